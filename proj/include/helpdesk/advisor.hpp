#pragma once

#include "helpdesk/evaluation.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace helpdesk {

/// The advisor's model handles the advisee's complaints more cheaply than the
/// other way round; weight is the absolute cross-cost gap.
struct AdvisorEdge {
    std::string advisor;
    std::string advisee;
    double weight = 0.0;

    friend bool operator==(const AdvisorEdge&, const AdvisorEdge&) = default;
};

inline constexpr double kDefaultTieEpsilon = 1e-9;

struct AdvisorGraph {
    std::vector<std::string> agents;
    std::vector<AdvisorEdge> edges;  // sorted by (advisor, advisee) agent position
    Metric metric = Metric::avg_cost;
    double tie_epsilon = kDefaultTieEpsilon;  // also decides weight ties when ranking

    std::size_t position(std::string_view agent) const;
    bool contains(std::string_view agent) const;

    friend bool operator==(const AdvisorGraph&, const AdvisorGraph&) = default;
};

/// For each pair {i, j}: an edge i -> j when C(i,j) < C(j,i) by more than
/// `tie_epsilon`, weight |C(i,j) - C(j,i)|. Pairs within the epsilon get no edge.
AdvisorGraph build_graph(const CrossTestMatrix& m, double tie_epsilon = kDefaultTieEpsilon);

struct RankedAdvisor {
    std::string advisor;
    double weight = 0.0;

    friend bool operator==(const RankedAdvisor&, const RankedAdvisor&) = default;
};

/// Incoming edges of `agent`, heaviest first. Weights within the graph's tie
/// epsilon of each other rank as equal and fall back to agent order.
std::vector<RankedAdvisor> advisors_of(const AdvisorGraph& g, std::string_view agent);

enum class Level { source_only, mixed, destination_only, isolated };

std::string_view to_string(Level l);

struct LevelAssignment {
    std::vector<Level> levels;  // parallel to AdvisorGraph::agents

    std::vector<std::string> members(const AdvisorGraph& g, Level l) const;
    friend bool operator==(const LevelAssignment&, const LevelAssignment&) = default;
};

LevelAssignment levels(const AdvisorGraph& g);

/// Same-level agents share a rank; edge labels carry weights to 2 decimals.
void export_dot(std::ostream& out, const AdvisorGraph& g, const LevelAssignment& l);
std::string export_dot(const AdvisorGraph& g, const LevelAssignment& l);

}  // namespace helpdesk
