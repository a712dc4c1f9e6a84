#pragma once

#include "helpdesk/advisor.hpp"
#include "helpdesk/evaluation.hpp"
#include "helpdesk/serialization.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace helpdesk {

/// Everything the end-to-end comparison produces: both cross-test tables, the
/// KPI table, the ranked resolution comparison and the advisor graph.
struct Report {
    CrossTestMatrix accuracy;
    CrossTestMatrix cost;
    std::vector<KpiRecord> kpis;
    std::vector<ResolutionEntry> resolution;
    AdvisorGraph graph;
    LevelAssignment levels;
    std::vector<std::string> warnings;
    Json metadata = Json::object();
};

/// `kpis` may be empty; the KPI row is then omitted and a warning recorded.
Report build_report(CrossTestMatrix accuracy, CrossTestMatrix cost, std::vector<KpiRecord> kpis,
                    double tie_epsilon = kDefaultTieEpsilon);

Json to_json(const Report& r);
void write_text(std::ostream& out, const Report& r);

/// K×K table with the diagonal bracketed.
void write_matrix_table(std::ostream& out, const CrossTestMatrix& m);

}  // namespace helpdesk
