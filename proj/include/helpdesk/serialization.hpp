#pragma once

#include "helpdesk/advisor.hpp"
#include "helpdesk/evaluation.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace helpdesk {

using Json = nlohmann::ordered_json;

/// {"metric", "agents", "rows", optional "cost_model": {"opex_os", "n"}}
Json to_json(const CrossTestMatrix& m);
CrossTestMatrix matrix_from_json(const Json& j);

/// {"kpis": [{"agent", "kpi1", "kpi2", "composite_cost"}, ...]}
Json to_json(const std::vector<KpiRecord>& kpis);
std::vector<KpiRecord> kpis_from_json(const Json& j);

/// {"metric", "agents", "edges": [{"advisor", "advisee", "weight"}], "levels": {agent: level}}
Json to_json(const AdvisorGraph& g, const LevelAssignment& l);

Json read_json_file(const std::filesystem::path& path);
/// Two-space indented with a trailing newline.
std::string dump(const Json& j);

}  // namespace helpdesk
