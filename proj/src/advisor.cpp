#include "helpdesk/advisor.hpp"

#include "helpdesk/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace helpdesk {

std::size_t AdvisorGraph::position(std::string_view agent) const {
    const auto it = std::ranges::find(agents, agent);
    if (it == agents.end()) throw ValidationError("unknown agent " + std::string(agent));
    return static_cast<std::size_t>(it - agents.begin());
}

bool AdvisorGraph::contains(std::string_view agent) const { return std::ranges::find(agents, agent) != agents.end(); }

AdvisorGraph build_graph(const CrossTestMatrix& m, double tie_epsilon) {
    if (m.metric != Metric::avg_cost) throw ValidationError("advisor graphs are built from avg_cost matrices");
    if (!(tie_epsilon >= 0.0)) throw ValidationError("tie epsilon must be non-negative");
    validate(m);
    AdvisorGraph g{m.agents, {}, m.metric, tie_epsilon};
    const auto k = m.size();
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
            const double forward = m(i, j);
            const double backward = m(j, i);
            const double gap = std::abs(forward - backward);
            if (gap <= tie_epsilon) continue;
            if (forward < backward) {
                g.edges.push_back({m.agents[i], m.agents[j], gap});
            } else {
                g.edges.push_back({m.agents[j], m.agents[i], gap});
            }
        }
    }
    std::ranges::sort(g.edges, [&](const AdvisorEdge& a, const AdvisorEdge& b) {
        const auto ka = std::pair(g.position(a.advisor), g.position(a.advisee));
        const auto kb = std::pair(g.position(b.advisor), g.position(b.advisee));
        return ka < kb;
    });
    return g;
}

std::vector<RankedAdvisor> advisors_of(const AdvisorGraph& g, std::string_view agent) {
    g.position(agent);
    std::vector<RankedAdvisor> out;
    for (const auto& e : g.edges) {
        if (e.advisee == agent) out.push_back({e.advisor, e.weight});
    }
    std::ranges::sort(out, [&](const RankedAdvisor& a, const RankedAdvisor& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return g.position(a.advisor) < g.position(b.advisor);
    });
    // Runs of weights within the epsilon of the run's heaviest member are ties.
    for (auto run = out.begin(); run != out.end();) {
        const double top = run->weight;
        auto end = std::find_if(run, out.end(), [&](const RankedAdvisor& r) { return top - r.weight > g.tie_epsilon; });
        std::sort(run, end, [&](const RankedAdvisor& a, const RankedAdvisor& b) {
            return g.position(a.advisor) < g.position(b.advisor);
        });
        run = end;
    }
    return out;
}

std::string_view to_string(Level l) {
    switch (l) {
        case Level::source_only: return "source_only";
        case Level::mixed: return "mixed";
        case Level::destination_only: return "destination_only";
        case Level::isolated: return "isolated";
    }
    return "";
}

std::vector<std::string> LevelAssignment::members(const AdvisorGraph& g, Level l) const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] == l) out.push_back(g.agents[i]);
    }
    return out;
}

LevelAssignment levels(const AdvisorGraph& g) {
    std::vector<std::size_t> in(g.agents.size(), 0);
    std::vector<std::size_t> out(g.agents.size(), 0);
    for (const auto& e : g.edges) {
        ++out[g.position(e.advisor)];
        ++in[g.position(e.advisee)];
    }
    LevelAssignment a;
    a.levels.reserve(g.agents.size());
    for (std::size_t i = 0; i < g.agents.size(); ++i) {
        if (out[i] > 0 && in[i] > 0) a.levels.push_back(Level::mixed);
        else if (out[i] > 0) a.levels.push_back(Level::source_only);
        else if (in[i] > 0) a.levels.push_back(Level::destination_only);
        else a.levels.push_back(Level::isolated);
    }
    return a;
}

namespace {

std::string quoted(std::string_view s) {
    std::string q = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c;
    }
    q += '"';
    return q;
}

std::string two_decimals(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

void export_dot(std::ostream& out, const AdvisorGraph& g, const LevelAssignment& l) {
    if (l.levels.size() != g.agents.size()) throw ValidationError("level assignment does not match graph");
    out << "digraph AdvisorFlow {\n";
    out << "  rankdir=TB;\n";
    out << "  node [shape=circle];\n";
    for (const auto& agent : g.agents) out << "  " << quoted(agent) << ";\n";
    for (const auto level : {Level::source_only, Level::mixed, Level::destination_only, Level::isolated}) {
        const auto members = l.members(g, level);
        if (members.empty()) continue;
        out << "  subgraph " << quoted("level_" + std::string(to_string(level))) << " {\n";
        out << "    rank=same;\n";
        for (const auto& m : members) out << "    " << quoted(m) << ";\n";
        out << "  }\n";
    }
    for (const auto& e : g.edges) {
        out << "  " << quoted(e.advisor) << " -> " << quoted(e.advisee) << " [label=" << quoted(two_decimals(e.weight))
            << "];\n";
    }
    out << "}\n";
}

std::string export_dot(const AdvisorGraph& g, const LevelAssignment& l) {
    std::ostringstream os;
    export_dot(os, g, l);
    return os.str();
}

}  // namespace helpdesk
