#pragma once

#include "helpdesk/dataset.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace helpdesk {

using ClassCounts = std::vector<std::size_t>;

/// Gains below this are treated as zero; gain ratios closer than this tie.
inline constexpr double kGainTolerance = 1e-12;

struct InductionParams {
    std::size_t min_instances = 2;
    double confidence_factor = 0.25;
    bool pruning_enabled = true;
};

void validate(const InductionParams& p);

/// Continuous: `value <= threshold` goes to branch 0, otherwise branch 1.
/// Categorical: one branch per listed value, in list order.
struct Split {
    std::size_t attribute = 0;
    std::string attribute_name;
    AttributeKind kind = AttributeKind::continuous;
    double threshold = 0.0;
    std::vector<std::string> values;

    std::size_t branch_count() const { return kind == AttributeKind::continuous ? 2 : values.size(); }
    friend bool operator==(const Split&, const Split&) = default;
};

struct SplitEvaluation {
    bool applicable = false;
    double gain = 0.0;
    double split_info = 0.0;
    double gain_ratio = 0.0;
};

struct TreeNode {
    ClassCounts counts;
    std::size_t label = 0;
    std::optional<Split> split;
    std::vector<TreeNode> children;

    bool is_leaf() const { return !split.has_value(); }
    std::size_t total() const;
    std::size_t errors() const { return total() - counts[label]; }

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class DecisionTree {
public:
    DecisionTree(Schema schema, TreeNode root) : schema_(std::move(schema)), root_(std::move(root)) {}

    const Schema& schema() const { return schema_; }
    const TreeNode& root() const { return root_; }
    const std::vector<std::string>& classes() const { return schema_.classes(); }

    /// Class index for a record laid out by this tree's schema.
    std::size_t classify(const Record& r) const;
    std::string classify(const ComplaintRecord& r) const;

    std::size_t node_count() const;
    std::size_t leaf_count() const;
    std::size_t depth() const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    Schema schema_;
    TreeNode root_;
};

/// Shannon entropy in bits. Throws ValidationError when every count is zero.
double entropy(std::span<const std::size_t> class_counts);

/// Gain, split info and gain ratio of `s` over `d`. A split that leaves fewer
/// than two non-empty branches is reported as inapplicable.
SplitEvaluation evaluate_split(const Dataset& d, const Split& s);

/// Gain-ratio tree induction with optional pessimistic pruning.
DecisionTree induce(const Dataset& d, const InductionParams& p = {});

/// Upper confidence bound on the error count of a leaf holding `n` cases with
/// `e` errors: n times the p solving BinomCDF(e; n, p) = cf.
double pessimistic_errors(std::size_t n, std::size_t e, double cf);

/// Bottom-up subtree replacement.
DecisionTree prune(const DecisionTree& t, const InductionParams& p = {});

/// Majority class index; ties go to `preferred` when it is among them, then the
/// lowest index.
std::size_t majority_class(std::span<const std::size_t> counts, std::size_t preferred);

enum class TreeFormat { text, dot };

void export_tree(std::ostream& out, const DecisionTree& t, TreeFormat format);
std::string export_tree(const DecisionTree& t, TreeFormat format);

}  // namespace helpdesk
