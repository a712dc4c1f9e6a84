#include "helpdesk/serialization.hpp"

#include "helpdesk/error.hpp"

#include <fstream>

namespace helpdesk {

Json to_json(const CrossTestMatrix& m) {
    Json j;
    j["metric"] = std::string(to_string(m.metric));
    j["agents"] = m.agents;
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m(i, c));
        rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    if (m.cost_model) j["cost_model"] = {{"opex_os", m.cost_model->opex_os()}, {"n", m.cost_model->n()}};
    return j;
}

CrossTestMatrix matrix_from_json(const Json& j) {
    try {
        CrossTestMatrix m;
        m.metric = parse_metric(j.at("metric").get<std::string>());
        m.agents = j.at("agents").get<std::vector<std::string>>();
        const auto& rows = j.at("rows");
        if (rows.size() != m.agents.size()) throw DataError("matrix needs one row per agent");
        for (const auto& row : rows) {
            if (row.size() != m.agents.size()) throw DataError("matrix row length differs from agent count");
            for (const auto& v : row) m.entries.push_back(v.get<double>());
        }
        if (j.contains("cost_model")) {
            const auto& cm = j.at("cost_model");
            m.cost_model = CostModel(cm.at("opex_os").get<double>(), cm.at("n").get<double>());
        }
        validate(m);
        return m;
    } catch (const Json::exception& e) {
        throw DataError(std::string("malformed matrix JSON: ") + e.what());
    } catch (const ValidationError& e) {
        throw DataError(std::string("invalid matrix: ") + e.what());
    }
}

Json to_json(const std::vector<KpiRecord>& kpis) {
    Json list = Json::array();
    for (const auto& k : kpis) {
        list.push_back({{"agent", k.agent}, {"kpi1", k.kpi1}, {"kpi2", k.kpi2}, {"composite_cost", k.composite_cost}});
    }
    return Json{{"kpis", std::move(list)}};
}

std::vector<KpiRecord> kpis_from_json(const Json& j) {
    try {
        std::vector<KpiRecord> out;
        for (const auto& k : j.at("kpis")) {
            out.push_back({k.at("agent").get<std::string>(), k.at("kpi1").get<double>(), k.at("kpi2").get<double>(),
                           k.at("composite_cost").get<double>()});
        }
        return out;
    } catch (const Json::exception& e) {
        throw DataError(std::string("malformed KPI JSON: ") + e.what());
    }
}

Json to_json(const AdvisorGraph& g, const LevelAssignment& l) {
    Json j;
    j["metric"] = std::string(to_string(g.metric));
    j["agents"] = g.agents;
    Json edges = Json::array();
    for (const auto& e : g.edges) edges.push_back({{"advisor", e.advisor}, {"advisee", e.advisee}, {"weight", e.weight}});
    j["edges"] = std::move(edges);
    Json lv = Json::object();
    for (std::size_t i = 0; i < g.agents.size(); ++i) lv[g.agents[i]] = std::string(to_string(l.levels[i]));
    j["levels"] = std::move(lv);
    return j;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace helpdesk
