#include "helpdesk/induction.hpp"

#include "helpdesk/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <sstream>

namespace helpdesk {

namespace {

// Subtree replacement fires when the leaf bound is within this many errors of
// the subtree bound (C4.5 uses the same slack).
constexpr double kPruneSlack = 0.1;

double entropy_of(std::span<const std::size_t> counts, std::size_t total) {
    double h = 0.0;
    const auto n = static_cast<double>(total);
    for (const auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

SplitEvaluation score(std::span<const std::size_t> parent, std::size_t total,
                      const std::vector<ClassCounts>& branches) {
    SplitEvaluation ev;
    std::vector<std::size_t> sizes;
    double remainder = 0.0;
    for (const auto& b : branches) {
        const auto n = std::accumulate(b.begin(), b.end(), std::size_t{0});
        sizes.push_back(n);
        if (n > 0) remainder += static_cast<double>(n) * entropy_of(b, n);
    }
    const auto non_empty = std::ranges::count_if(sizes, [](std::size_t n) { return n > 0; });
    ev.split_info = entropy_of(sizes, total);
    if (non_empty < 2 || ev.split_info <= 0.0) return ev;
    ev.applicable = true;
    ev.gain = std::max(0.0, entropy_of(parent, total) - remainder / static_cast<double>(total));
    ev.gain_ratio = ev.gain / ev.split_info;
    return ev;
}

bool strictly_better(double candidate, double incumbent) {
    return candidate > incumbent + kGainTolerance * std::max(1.0, std::abs(incumbent));
}

// Column-encoded view of a training set. Categorical codes follow the sorted
// vocabulary, so code order is lexicographic value order.
struct Encoded {
    const Schema* schema = nullptr;
    std::size_t class_count = 0;
    std::vector<std::size_t> labels;
    std::vector<std::vector<double>> numbers;
    std::vector<std::vector<std::uint32_t>> codes;
    std::vector<std::vector<std::string>> vocab;

    explicit Encoded(const Dataset& d) : schema(&d.schema), class_count(d.schema.classes().size()) {
        const auto n = d.size();
        labels.resize(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = d.label(i);
        numbers.resize(d.schema.size());
        codes.resize(d.schema.size());
        vocab.resize(d.schema.size());
        for (const auto a : d.schema.feature_indices()) {
            if (d.schema[a].kind == AttributeKind::continuous) {
                auto& col = numbers[a];
                col.reserve(n);
                for (const auto& r : d.records) col.push_back(r.number(a));
            } else {
                auto& words = vocab[a];
                for (const auto& r : d.records) words.push_back(r.text(a));
                std::ranges::sort(words);
                words.erase(std::unique(words.begin(), words.end()), words.end());
                auto& col = codes[a];
                col.reserve(n);
                for (const auto& r : d.records) {
                    col.push_back(static_cast<std::uint32_t>(std::ranges::lower_bound(words, r.text(a)) - words.begin()));
                }
            }
        }
    }
};

struct Candidate {
    Split split;
    SplitEvaluation eval;
};

class Builder {
public:
    Builder(const Encoded& data, const InductionParams& params, std::size_t global_majority)
        : data_(data), params_(params), global_majority_(global_majority) {}

    TreeNode build(std::vector<std::size_t> rows, std::vector<char> used) const {
        TreeNode node;
        node.counts.assign(data_.class_count, 0);
        for (const auto r : rows) ++node.counts[data_.labels[r]];
        node.label = majority_class(node.counts, global_majority_);

        const auto total = rows.size();
        const bool pure = node.counts[node.label] == total;
        if (pure || total < 2 * params_.min_instances) return node;

        auto best = best_split(rows, used, node.counts);
        if (!best) return node;

        const auto attr = best->split.attribute;
        std::vector<std::vector<std::size_t>> parts(best->split.branch_count());
        if (best->split.kind == AttributeKind::continuous) {
            for (const auto r : rows) parts[data_.numbers[attr][r] <= best->split.threshold ? 0 : 1].push_back(r);
        } else {
            // Branch list holds exactly the values observed here, in code order.
            const auto& words = data_.vocab[attr];
            for (const auto r : rows) {
                const auto& w = words[data_.codes[attr][r]];
                const auto b = std::ranges::lower_bound(best->split.values, w) - best->split.values.begin();
                parts[static_cast<std::size_t>(b)].push_back(r);
            }
            used[attr] = 1;
        }
        rows.clear();
        rows.shrink_to_fit();
        node.split = std::move(best->split);
        node.children.reserve(parts.size());
        for (auto& part : parts) node.children.push_back(build(std::move(part), used));
        return node;
    }

private:
    std::optional<Candidate> best_split(const std::vector<std::size_t>& rows, const std::vector<char>& used,
                                        const ClassCounts& counts) const {
        std::optional<Candidate> best;
        auto consider = [&](Candidate c) {
            if (!c.eval.applicable || c.eval.gain <= kGainTolerance) return;
            if (!best || strictly_better(c.eval.gain_ratio, best->eval.gain_ratio)) best = std::move(c);
        };
        for (const auto a : data_.schema->feature_indices()) {
            if ((*data_.schema)[a].kind == AttributeKind::continuous) {
                scan_thresholds(a, rows, counts, consider);
            } else if (!used[a]) {
                if (auto c = categorical(a, rows, counts)) consider(std::move(*c));
            }
        }
        return best;
    }

    std::optional<Candidate> categorical(std::size_t a, const std::vector<std::size_t>& rows,
                                         const ClassCounts& counts) const {
        const auto& words = data_.vocab[a];
        std::vector<ClassCounts> by_code(words.size(), ClassCounts(data_.class_count, 0));
        std::vector<std::size_t> size(words.size(), 0);
        for (const auto r : rows) {
            const auto c = data_.codes[a][r];
            ++by_code[c][data_.labels[r]];
            ++size[c];
        }
        Candidate cand;
        cand.split.attribute = a;
        cand.split.attribute_name = (*data_.schema)[a].name;
        cand.split.kind = AttributeKind::categorical;
        std::vector<ClassCounts> branches;
        std::size_t big_branches = 0;
        for (std::size_t c = 0; c < words.size(); ++c) {
            if (size[c] == 0) continue;
            cand.split.values.push_back(words[c]);
            branches.push_back(std::move(by_code[c]));
            if (size[c] >= params_.min_instances) ++big_branches;
        }
        if (big_branches < 2) return std::nullopt;
        cand.eval = score(counts, rows.size(), branches);
        return cand;
    }

    template <typename Consider>
    void scan_thresholds(std::size_t a, const std::vector<std::size_t>& rows, const ClassCounts& counts,
                         Consider& consider) const {
        const auto& col = data_.numbers[a];
        std::vector<std::size_t> order(rows);
        std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) { return col[x] < col[y]; });
        const auto n = order.size();
        std::vector<ClassCounts> branches{ClassCounts(data_.class_count, 0), counts};
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto label = data_.labels[order[i]];
            ++branches[0][label];
            --branches[1][label];
            const double lo = col[order[i]];
            const double hi = col[order[i + 1]];
            if (!(lo < hi)) continue;
            const auto left = i + 1;
            if (left < params_.min_instances || n - left < params_.min_instances) continue;
            double threshold = lo + (hi - lo) / 2.0;
            if (threshold >= hi) threshold = lo;
            Candidate cand;
            cand.split.attribute = a;
            cand.split.attribute_name = (*data_.schema)[a].name;
            cand.split.kind = AttributeKind::continuous;
            cand.split.threshold = threshold;
            cand.eval = score(counts, n, branches);
            consider(std::move(cand));
        }
    }

    const Encoded& data_;
    const InductionParams& params_;
    std::size_t global_majority_;
};

double binomial_cdf(std::size_t e, std::size_t n, double p) {
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    double sum = 0.0;
    for (std::size_t k = 0; k <= e; ++k) {
        const auto kd = static_cast<double>(k);
        const auto rest = static_cast<double>(n - k);
        sum += std::exp(log_n_fact - std::lgamma(kd + 1.0) - std::lgamma(rest + 1.0) + kd * log_p + rest * log_q);
    }
    return sum;
}

double prune_node(TreeNode& node, double cf) {
    const double as_leaf = pessimistic_errors(node.total(), node.errors(), cf);
    if (node.is_leaf()) return as_leaf;
    double subtree = 0.0;
    for (auto& child : node.children) subtree += prune_node(child, cf);
    if (as_leaf <= subtree + kPruneSlack) {
        node.split.reset();
        node.children.clear();
        return as_leaf;
    }
    return subtree;
}

std::size_t count_nodes(const TreeNode& n) {
    std::size_t c = 1;
    for (const auto& ch : n.children) c += count_nodes(ch);
    return c;
}

std::size_t count_leaves(const TreeNode& n) {
    if (n.is_leaf()) return 1;
    std::size_t c = 0;
    for (const auto& ch : n.children) c += count_leaves(ch);
    return c;
}

std::size_t node_depth(const TreeNode& n) {
    std::size_t d = 0;
    for (const auto& ch : n.children) d = std::max(d, 1 + node_depth(ch));
    return d;
}

}  // namespace

void validate(const InductionParams& p) {
    if (p.min_instances == 0) throw ValidationError("min_instances must be positive");
    if (!(p.confidence_factor > 0.0 && p.confidence_factor < 1.0)) {
        throw ValidationError("confidence_factor must lie in (0,1)");
    }
}

std::size_t TreeNode::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

double entropy(std::span<const std::size_t> class_counts) {
    const auto total = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
    if (total == 0) throw ValidationError("entropy of an all-zero count vector");
    return entropy_of(class_counts, total);
}

SplitEvaluation evaluate_split(const Dataset& d, const Split& s) {
    const auto idx = d.schema.index_of(s.attribute_name);
    if (!idx || *idx == d.schema.class_index()) throw ValidationError("split attribute " + s.attribute_name + " not in dataset");
    if (d.schema[*idx].kind != s.kind) throw ValidationError("split kind does not match attribute " + s.attribute_name);
    if (d.empty()) return {};
    const auto classes = d.schema.classes().size();
    std::vector<ClassCounts> branches(s.branch_count(), ClassCounts(classes, 0));
    ClassCounts parent(classes, 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto label = d.label(i);
        ++parent[label];
        std::size_t b = 0;
        if (s.kind == AttributeKind::continuous) {
            b = d.records[i].number(*idx) <= s.threshold ? 0 : 1;
        } else {
            const auto it = std::ranges::find(s.values, d.records[i].text(*idx));
            if (it == s.values.end()) throw ValidationError("value " + d.records[i].text(*idx) + " not covered by split");
            b = static_cast<std::size_t>(it - s.values.begin());
        }
        ++branches[b][label];
    }
    return score(parent, d.size(), branches);
}

std::size_t majority_class(std::span<const std::size_t> counts, std::size_t preferred) {
    const auto top = *std::ranges::max_element(counts);
    if (preferred < counts.size() && counts[preferred] == top) return preferred;
    return static_cast<std::size_t>(std::ranges::find(counts, top) - counts.begin());
}

DecisionTree induce(const Dataset& d, const InductionParams& p) {
    validate(p);
    if (d.empty()) throw ValidationError("cannot induce a tree from an empty dataset");
    if (d.schema.feature_indices().empty()) throw ValidationError("schema has no feature attributes");
    const Encoded data(d);
    ClassCounts global(data.class_count, 0);
    for (const auto l : data.labels) ++global[l];
    const Builder builder(data, p, majority_class(global, 0));
    std::vector<std::size_t> rows(d.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    DecisionTree tree(d.schema, builder.build(std::move(rows), std::vector<char>(d.schema.size(), 0)));
    return p.pruning_enabled ? prune(tree, p) : tree;
}

double pessimistic_errors(std::size_t n, std::size_t e, double cf) {
    if (n == 0) return 0.0;
    if (e >= n) return static_cast<double>(n);
    const auto nd = static_cast<double>(n);
    if (e == 0) return nd * (1.0 - std::pow(cf, 1.0 / nd));
    // CDF is decreasing in p; bisect for CDF(p) = cf.
    double lo = static_cast<double>(e) / nd;
    double hi = 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        const double mid = lo + (hi - lo) / 2.0;
        if (binomial_cdf(e, n, mid) > cf) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return nd * (lo + (hi - lo) / 2.0);
}

DecisionTree prune(const DecisionTree& t, const InductionParams& p) {
    validate(p);
    TreeNode root = t.root();
    prune_node(root, p.confidence_factor);
    return DecisionTree(t.schema(), std::move(root));
}

std::size_t DecisionTree::classify(const Record& r) const {
    if (r.values.size() != schema_.size()) {
        throw DataError("record has " + std::to_string(r.values.size()) + " values, tree expects " +
                        std::to_string(schema_.size()));
    }
    const TreeNode* node = &root_;
    while (!node->is_leaf()) {
        const auto& s = *node->split;
        const auto& value = r.values[s.attribute];
        if (s.kind == AttributeKind::continuous) {
            const auto* v = std::get_if<double>(&value);
            if (!v) throw DataError("attribute " + s.attribute_name + " is not numeric in record");
            node = &node->children[*v <= s.threshold ? 0 : 1];
        } else {
            const auto* v = std::get_if<std::string>(&value);
            if (!v) throw DataError("attribute " + s.attribute_name + " is not categorical in record");
            const auto it = std::ranges::lower_bound(s.values, *v);
            if (it == s.values.end() || *it != *v) return node->label;
            node = &node->children[static_cast<std::size_t>(it - s.values.begin())];
        }
    }
    return node->label;
}

std::string DecisionTree::classify(const ComplaintRecord& c) const {
    Record r;
    r.values.reserve(schema_.size());
    for (const auto& attr : schema_.attributes()) {
        const auto& name = attr.name;
        if (name == "AGENT") r.values.emplace_back(c.agent);
        else if (name == "PRODUCT") r.values.emplace_back(c.product);
        else if (name == "AREA") r.values.emplace_back(c.area);
        else if (name == "PROFILE") r.values.emplace_back(c.profile);
        else if (name == "SYNC") r.values.emplace_back(c.sync);
        else if (name == "MAX") r.values.emplace_back(c.max);
        else if (name == "DIST") r.values.emplace_back(c.dist);
        else if (name == "STATE") r.values.emplace_back(std::string(to_string(c.state)));
        else throw DataError("attribute " + name + " missing from record");
    }
    return classes()[classify(r)];
}

std::size_t DecisionTree::node_count() const { return count_nodes(root_); }
std::size_t DecisionTree::leaf_count() const { return count_leaves(root_); }
std::size_t DecisionTree::depth() const { return node_depth(root_); }

// ---------------------------------------------------------------------------
// Export

namespace {

std::string leaf_text(const DecisionTree& t, const TreeNode& n) {
    return t.classes()[n.label] + " (" + std::to_string(n.total()) + "/" + std::to_string(n.errors()) + ")";
}

std::string branch_test(const Split& s, std::size_t branch) {
    if (s.kind == AttributeKind::continuous) {
        return s.attribute_name + (branch == 0 ? " <= " : " > ") + format_number(s.threshold);
    }
    return s.attribute_name + " = " + s.values[branch];
}

std::string edge_text(const Split& s, std::size_t branch) {
    if (s.kind == AttributeKind::continuous) return (branch == 0 ? "<= " : "> ") + format_number(s.threshold);
    return "= " + s.values[branch];
}

void write_text(std::ostream& out, const DecisionTree& t, const TreeNode& n, std::size_t depth) {
    for (std::size_t b = 0; b < n.children.size(); ++b) {
        for (std::size_t i = 0; i < depth; ++i) out << "|   ";
        const auto& child = n.children[b];
        out << branch_test(*n.split, b);
        if (child.is_leaf()) {
            out << ": " << leaf_text(t, child) << '\n';
        } else {
            out << '\n';
            write_text(out, t, child, depth + 1);
        }
    }
}

std::string dot_quote(std::string_view s) {
    std::string q = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        q += c;
    }
    q += '"';
    return q;
}

std::size_t write_dot(std::ostream& out, const DecisionTree& t, const TreeNode& n, std::size_t& next_id) {
    const auto id = next_id++;
    if (n.is_leaf()) {
        out << "  n" << id << " [label=" << dot_quote(leaf_text(t, n)) << ", shape=box];\n";
        return id;
    }
    out << "  n" << id << " [label=" << dot_quote(n.split->attribute_name) << ", shape=ellipse];\n";
    for (std::size_t b = 0; b < n.children.size(); ++b) {
        const auto child = write_dot(out, t, n.children[b], next_id);
        out << "  n" << id << " -> n" << child << " [label=" << dot_quote(edge_text(*n.split, b)) << "];\n";
    }
    return id;
}

}  // namespace

void export_tree(std::ostream& out, const DecisionTree& t, TreeFormat format) {
    if (format == TreeFormat::text) {
        if (t.root().is_leaf()) {
            out << leaf_text(t, t.root()) << '\n';
        } else {
            write_text(out, t, t.root(), 0);
        }
        return;
    }
    out << "digraph DecisionTree {\n";
    std::size_t next_id = 0;
    write_dot(out, t, t.root(), next_id);
    out << "}\n";
}

std::string export_tree(const DecisionTree& t, TreeFormat format) {
    std::ostringstream os;
    export_tree(os, t, format);
    return os.str();
}

}  // namespace helpdesk
