#include "helpdesk/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace helpdesk {

namespace {

std::string fixed(double v, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

}  // namespace

Report build_report(CrossTestMatrix accuracy, CrossTestMatrix cost, std::vector<KpiRecord> kpis, double tie_epsilon) {
    Report r;
    if (kpis.empty()) r.warnings.emplace_back("no KPI table supplied; KPI row omitted from the resolution comparison");
    r.resolution = resolution_report(accuracy, cost, kpis);
    r.graph = build_graph(cost, tie_epsilon);
    r.levels = levels(r.graph);
    r.accuracy = std::move(accuracy);
    r.cost = std::move(cost);
    r.kpis = std::move(kpis);
    return r;
}

Json to_json(const Report& r) {
    Json j;
    j["metadata"] = r.metadata;
    j["accuracy_matrix"] = to_json(r.accuracy);
    j["cost_matrix"] = to_json(r.cost);
    if (!r.kpis.empty()) j["kpis"] = to_json(r.kpis).at("kpis");
    Json res = Json::array();
    for (const auto& e : r.resolution) {
        res.push_back({{"source", std::string(to_string(e.source))},
                       {"description", std::string(describe(e.source))},
                       {"rsd", e.rsd}});
    }
    j["resolution"] = std::move(res);
    j["advisor_graph"] = to_json(r.graph, r.levels);
    Json advisors = Json::object();
    for (const auto& agent : r.graph.agents) {
        Json list = Json::array();
        for (const auto& a : advisors_of(r.graph, agent)) list.push_back({{"advisor", a.advisor}, {"weight", a.weight}});
        advisors[agent] = std::move(list);
    }
    j["advisors"] = std::move(advisors);
    j["warnings"] = r.warnings;
    return j;
}

void write_matrix_table(std::ostream& out, const CrossTestMatrix& m) {
    std::size_t width = 8;
    for (const auto& a : m.agents) width = std::max(width, a.size() + 2);
    out << pad("", width);
    for (const auto& a : m.agents) out << pad(a, width + 2);
    out << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        out << pad(m.agents[i], width);
        for (std::size_t j = 0; j < m.size(); ++j) {
            const auto cell = fixed(m(i, j), 4);
            out << pad(i == j ? "[" + cell + "]" : cell + " ", width + 2);
        }
        out << '\n';
    }
}

void write_text(std::ostream& out, const Report& r) {
    out << "Correctly classified instances (rows: trained on, columns: tested on)\n";
    write_matrix_table(out, r.accuracy);
    out << "\nAverage misclassification cost";
    if (r.cost.cost_model) {
        out << " (opex_os=" << fixed(r.cost.cost_model->opex_os(), 4) << ", n=" << fixed(r.cost.cost_model->n(), 4) << ")";
    }
    out << '\n';
    write_matrix_table(out, r.cost);
    if (!r.kpis.empty()) {
        out << "\nTraditional KPIs\n";
        out << pad("agent", 10) << pad("kpi1", 10) << pad("kpi2", 10) << pad("cost", 10) << '\n';
        for (const auto& k : r.kpis) {
            out << pad(k.agent, 10) << pad(fixed(k.kpi1, 4), 10) << pad(fixed(k.kpi2, 4), 10)
                << pad(fixed(k.composite_cost, 4), 10) << '\n';
        }
    }
    out << "\nResolution (ascending RSD)\n";
    for (const auto& e : r.resolution) out << "  " << fixed(e.rsd, 4) << "  " << describe(e.source) << '\n';
    out << "\nAdvisor flow graph: " << r.graph.edges.size() << " edge(s)\n";
    for (const auto& e : r.graph.edges) out << "  " << e.advisor << " -> " << e.advisee << "  " << fixed(e.weight, 4) << '\n';
    out << "\nAdvisors per agent\n";
    for (std::size_t i = 0; i < r.graph.agents.size(); ++i) {
        const auto& agent = r.graph.agents[i];
        out << "  " << agent << " (" << to_string(r.levels.levels[i]) << "):";
        const auto ranked = advisors_of(r.graph, agent);
        if (ranked.empty()) out << " none";
        for (const auto& a : ranked) out << ' ' << a.advisor << '(' << fixed(a.weight, 2) << ')';
        out << '\n';
    }
    for (const auto& w : r.warnings) out << "\nwarning: " << w << '\n';
}

}  // namespace helpdesk
