#pragma once

// Test-only reference computations. Nothing here calls into the induction or
// advisor code paths they are used to check.

#include "helpdesk/dataset.hpp"
#include "helpdesk/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oracle {

using helpdesk::AttributeKind;
using helpdesk::Dataset;

/// H = log2(n) - (1/n) * sum c log2 c, a different float path from -sum p log2 p.
inline double entropy_from_counts(const std::map<std::string, std::size_t>& counts) {
    double n = 0.0;
    double s = 0.0;
    for (const auto& [k, c] : counts) {
        if (c == 0) continue;
        n += static_cast<double>(c);
        s += static_cast<double>(c) * std::log2(static_cast<double>(c));
    }
    return n == 0.0 ? 0.0 : std::log2(n) - s / n;
}

struct ExhaustiveSplit {
    std::size_t attribute;
    AttributeKind kind;
    double threshold = 0.0;
    std::vector<std::string> values;
    double gain = 0.0;
    double split_info = 0.0;
    double ratio = 0.0;
};

inline std::string class_of(const Dataset& d, std::size_t i) { return d.records[i].text(d.schema.class_index()); }

/// Scores one partition of the records into branches, recomputing every
/// entropy from raw labels.
inline std::optional<ExhaustiveSplit> score_partition(const Dataset& d, const std::vector<std::vector<std::size_t>>& branches,
                                                      std::size_t min_instances, ExhaustiveSplit proto) {
    std::size_t non_empty = 0;
    std::size_t big = 0;
    for (const auto& b : branches) {
        if (!b.empty()) ++non_empty;
        if (b.size() >= min_instances) ++big;
    }
    if (non_empty < 2 || big < 2) return std::nullopt;
    std::map<std::string, std::size_t> parent;
    for (std::size_t i = 0; i < d.size(); ++i) ++parent[class_of(d, i)];
    const double n = static_cast<double>(d.size());
    double remainder = 0.0;
    std::map<std::string, std::size_t> sizes;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        std::map<std::string, std::size_t> counts;
        for (const auto i : branches[b]) ++counts[class_of(d, i)];
        remainder += static_cast<double>(branches[b].size()) / n * entropy_from_counts(counts);
        sizes["b" + std::to_string(b)] = branches[b].size();
    }
    proto.gain = entropy_from_counts(parent) - remainder;
    proto.split_info = entropy_from_counts(sizes);
    if (proto.split_info <= 0.0) return std::nullopt;
    proto.ratio = proto.gain / proto.split_info;
    return proto;
}

/// Every candidate split of `d`, in schema order then ascending threshold.
inline std::vector<ExhaustiveSplit> enumerate_splits(const Dataset& d, std::size_t min_instances) {
    std::vector<ExhaustiveSplit> out;
    for (std::size_t a = 0; a < d.schema.size(); ++a) {
        if (a == d.schema.class_index()) continue;
        if (d.schema[a].kind == AttributeKind::categorical) {
            std::set<std::string> seen;
            for (const auto& r : d.records) seen.insert(r.text(a));
            std::vector<std::string> values(seen.begin(), seen.end());
            std::vector<std::vector<std::size_t>> branches(values.size());
            for (std::size_t i = 0; i < d.size(); ++i) {
                const auto pos = std::find(values.begin(), values.end(), d.records[i].text(a)) - values.begin();
                branches[static_cast<std::size_t>(pos)].push_back(i);
            }
            ExhaustiveSplit proto{a, AttributeKind::categorical, 0.0, values};
            if (auto s = score_partition(d, branches, min_instances, proto)) out.push_back(*s);
        } else {
            std::set<double> seen;
            for (const auto& r : d.records) seen.insert(r.number(a));
            const std::vector<double> distinct(seen.begin(), seen.end());
            for (std::size_t v = 0; v + 1 < distinct.size(); ++v) {
                const double t = (distinct[v] + distinct[v + 1]) / 2.0;
                std::vector<std::vector<std::size_t>> branches(2);
                for (std::size_t i = 0; i < d.size(); ++i) branches[d.records[i].number(a) <= t ? 0 : 1].push_back(i);
                ExhaustiveSplit proto{a, AttributeKind::continuous, t, {}};
                if (auto s = score_partition(d, branches, min_instances, proto)) out.push_back(*s);
            }
        }
    }
    return out;
}

/// Root-split argmax: maximal ratio over positive-gain candidates; the first
/// candidate (schema order, smaller threshold) within tolerance of the max wins.
inline std::optional<ExhaustiveSplit> best_root_split(const Dataset& d, std::size_t min_instances) {
    std::map<std::string, std::size_t> parent;
    for (std::size_t i = 0; i < d.size(); ++i) ++parent[class_of(d, i)];
    if (parent.size() < 2 || d.size() < 2 * min_instances) return std::nullopt;
    std::vector<ExhaustiveSplit> positive;
    for (auto& s : enumerate_splits(d, min_instances)) {
        if (s.gain > 1e-12) positive.push_back(std::move(s));
    }
    if (positive.empty()) return std::nullopt;
    double top = 0.0;
    for (const auto& s : positive) top = std::max(top, s.ratio);
    for (const auto& s : positive) {
        if (s.ratio >= top - 1e-12 * std::max(1.0, top)) return s;
    }
    return std::nullopt;
}

/// Pairwise enumeration of advisor edges straight from the matrix definition.
struct OracleEdge {
    std::size_t from;
    std::size_t to;
    double weight;
};

template <typename Cell>
std::vector<OracleEdge> advisor_edges(std::size_t k, Cell cost, double eps) {
    std::vector<OracleEdge> out;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b) continue;
            if (cost(b, a) - cost(a, b) > eps) out.push_back({a, b, cost(b, a) - cost(a, b)});
        }
    }
    return out;
}

/// Syntax check for the DOT language (graph, subgraph, node/edge/attr
/// statements, quoted and bare IDs). Returns an error message, empty on success.
class DotChecker {
public:
    explicit DotChecker(std::string_view text) : text_(text) { tokenize(); }

    std::string check() {
        if (!error_.empty()) return error_;
        try {
            graph();
            if (pos_ != tokens_.size()) return "trailing tokens after graph";
        } catch (const std::string& e) {
            return e;
        }
        return {};
    }

    std::size_t edge_count() const { return edges_; }

private:
    enum class Kind { id, quoted, punct, edgeop };
    struct Token {
        Kind kind;
        std::string text;
    };

    void tokenize() {
        std::size_t i = 0;
        while (i < text_.size()) {
            const char c = text_[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '"') {
                std::string s;
                ++i;
                while (i < text_.size() && text_[i] != '"') {
                    if (text_[i] == '\\' && i + 1 < text_.size()) ++i;
                    s += text_[i++];
                }
                if (i >= text_.size()) {
                    error_ = "unterminated string";
                    return;
                }
                ++i;
                tokens_.push_back({Kind::quoted, s});
            } else if (c == '-' && i + 1 < text_.size() && (text_[i + 1] == '>' || text_[i + 1] == '-')) {
                tokens_.push_back({Kind::edgeop, std::string(text_.substr(i, 2))});
                i += 2;
            } else if (std::string_view("{}[];,=:").find(c) != std::string_view::npos) {
                tokens_.push_back({Kind::punct, std::string(1, c)});
                ++i;
            } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') {
                std::string s;
                while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) || text_[i] == '_' ||
                                            text_[i] == '.' || text_[i] == '-')) {
                    s += text_[i++];
                }
                const bool numeral = std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '-' || s[0] == '.';
                if (numeral && !std::all_of(s.begin() + 1, s.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '.'; })) {
                    error_ = "malformed identifier " + s;
                    return;
                }
                tokens_.push_back({Kind::id, s});
            } else {
                error_ = std::string("unexpected character '") + c + "'";
                return;
            }
        }
    }

    const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }
    bool peek_punct(std::string_view p) const { return peek() && peek()->kind == Kind::punct && peek()->text == p; }
    bool peek_keyword(std::string_view k) const { return peek() && peek()->kind == Kind::id && lower(peek()->text) == k; }
    static std::string lower(std::string s) {
        for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        return s;
    }
    void expect_punct(std::string_view p) {
        if (!peek_punct(p)) throw std::string("expected '") + std::string(p) + "'";
        ++pos_;
    }
    bool is_id() const { return peek() && (peek()->kind == Kind::id || peek()->kind == Kind::quoted) && !is_keyword(); }
    bool is_keyword() const {
        if (!peek() || peek()->kind != Kind::id) return false;
        const auto k = lower(peek()->text);
        return k == "graph" || k == "digraph" || k == "node" || k == "edge" || k == "subgraph" || k == "strict";
    }
    void id() {
        if (!is_id()) throw std::string("expected identifier");
        ++pos_;
    }

    void graph() {
        if (peek_keyword("strict")) ++pos_;
        if (peek_keyword("digraph")) {
            directed_ = true;
        } else if (!peek_keyword("graph")) {
            throw std::string("expected graph or digraph");
        }
        ++pos_;
        if (is_id()) id();
        expect_punct("{");
        stmt_list();
        expect_punct("}");
    }

    void stmt_list() {
        while (peek() && !peek_punct("}")) {
            stmt();
            if (peek_punct(";")) ++pos_;
        }
    }

    void attr_list() {
        while (peek_punct("[")) {
            ++pos_;
            while (!peek_punct("]")) {
                id();
                expect_punct("=");
                id();
                if (peek_punct(";") || peek_punct(",")) ++pos_;
                if (!peek()) throw std::string("unterminated attribute list");
            }
            ++pos_;
        }
    }

    void subgraph() {
        if (peek_keyword("subgraph")) {
            ++pos_;
            if (is_id()) id();
        }
        expect_punct("{");
        stmt_list();
        expect_punct("}");
    }

    void node_id() {
        id();
        if (peek_punct(":")) {
            ++pos_;
            id();
        }
    }

    void edge_rhs() {
        while (peek() && peek()->kind == Kind::edgeop) {
            if ((peek()->text == "->") != directed_) throw std::string("edge operator does not match graph type");
            ++pos_;
            ++edges_;
            if (peek_keyword("subgraph") || peek_punct("{")) {
                subgraph();
            } else {
                node_id();
            }
        }
    }

    void stmt() {
        if (peek_keyword("graph") || peek_keyword("node") || peek_keyword("edge")) {
            ++pos_;
            if (!peek_punct("[")) throw std::string("attribute statement needs a list");
            attr_list();
            return;
        }
        if (peek_keyword("subgraph") || peek_punct("{")) {
            subgraph();
            edge_rhs();
            return;
        }
        node_id();
        if (peek_punct("=")) {
            ++pos_;
            id();
            return;
        }
        edge_rhs();
        attr_list();
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    bool directed_ = false;
    std::size_t edges_ = 0;
    std::string error_;
};

/// Random small dataset: up to `max_attrs` attributes drawn from small value
/// sets so ties and duplicate values are common.
inline Dataset random_dataset(helpdesk::Rng& rng, std::size_t max_records, std::size_t max_attrs) {
    using helpdesk::Attribute;
    using helpdesk::AttributeRole;
    const auto attrs = 1 + rng.below(max_attrs);
    std::vector<Attribute> schema;
    for (std::size_t a = 0; a < attrs; ++a) {
        const bool cat = rng.bernoulli(0.4);
        schema.push_back({"A" + std::to_string(a), cat ? AttributeKind::categorical : AttributeKind::continuous,
                          AttributeRole::feature, {}});
    }
    schema.push_back({"STATE", AttributeKind::categorical, AttributeRole::class_label, {"OS", "RS"}});
    Dataset d{helpdesk::Schema(schema), {}};
    const auto n = 1 + rng.below(max_records);
    for (std::size_t i = 0; i < n; ++i) {
        helpdesk::Record r;
        for (std::size_t a = 0; a < attrs; ++a) {
            if (schema[a].kind == AttributeKind::categorical) {
                r.values.emplace_back(std::string(1, static_cast<char>('a' + rng.below(3))));
            } else {
                r.values.emplace_back(static_cast<double>(rng.below(6)) * 0.5);
            }
        }
        r.values.emplace_back(std::string(rng.bernoulli(0.5) ? "OS" : "RS"));
        d.records.push_back(std::move(r));
    }
    return d;
}

}  // namespace oracle
