#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace helpdesk {

enum class AttributeKind { categorical, continuous };
enum class AttributeRole { feature, class_label, agent_key };

struct Attribute {
    std::string name;
    AttributeKind kind = AttributeKind::categorical;
    AttributeRole role = AttributeRole::feature;
    /// Admissible values; only populated for the class attribute.
    std::vector<std::string> domain;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered attribute list. Exactly one class attribute, at most one agent key,
/// unique names.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<Attribute> attributes);

    /// AGENT,PRODUCT,AREA,PROFILE,SYNC,MAX,DIST,STATE with STATE in {OS, RS}.
    static Schema complaints();

    std::span<const Attribute> attributes() const { return attributes_; }
    std::size_t size() const { return attributes_.size(); }
    const Attribute& operator[](std::size_t i) const { return attributes_[i]; }

    std::optional<std::size_t> index_of(std::string_view name) const;
    std::size_t class_index() const { return class_index_; }
    std::optional<std::size_t> agent_index() const { return agent_index_; }
    const std::vector<std::string>& classes() const { return attributes_[class_index_].domain; }

    /// Indices of every attribute induction may split on (all but the class).
    std::vector<std::size_t> feature_indices() const;

    friend bool operator==(const Schema& a, const Schema& b) { return a.attributes_ == b.attributes_; }

private:
    std::vector<Attribute> attributes_;
    std::size_t class_index_ = 0;
    std::optional<std::size_t> agent_index_;
};

using Value = std::variant<double, std::string>;

/// One row, values positionally aligned with the owning schema.
struct Record {
    std::vector<Value> values;

    double number(std::size_t i) const { return std::get<double>(values[i]); }
    const std::string& text(std::size_t i) const { return std::get<std::string>(values[i]); }

    friend bool operator==(const Record&, const Record&) = default;
};

enum class State { OS, RS };

std::string_view to_string(State s);
std::optional<State> parse_state(std::string_view text);

/// A helpdesk complaint in the canonical column layout.
struct ComplaintRecord {
    std::string agent;
    std::string product;
    std::string area;
    double profile = 0.0;  // Mb/s
    double sync = 0.0;     // kb/s
    double max = 0.0;      // kb/s
    double dist = 0.0;     // km
    State state = State::OS;

    friend bool operator==(const ComplaintRecord&, const ComplaintRecord&) = default;
};

/// Throws DataError when a ComplaintRecord invariant is violated.
void validate(const ComplaintRecord& r);

struct Dataset {
    Schema schema;
    std::vector<Record> records;

    std::size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    /// Class index of record i within schema.classes().
    std::size_t label(std::size_t i) const;
    std::vector<std::size_t> class_counts() const;

    static Dataset from_complaints(std::span<const ComplaintRecord> complaints);
    /// Reads the named canonical columns; throws DataError if one was dropped.
    ComplaintRecord complaint(std::size_t i) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Parses CSV with a mandatory header matching the schema's attribute names.
/// Any malformed row aborts the parse with a DataError naming its 1-based line.
Dataset parse_dataset(std::istream& input, const Schema& schema = Schema::complaints());

/// Canonical CSV: header row, unquoted fields, shortest round-trip decimals, LF.
void write_dataset(std::ostream& output, const Dataset& d);
std::string format_number(double v);

using AgentPartitions = std::map<std::string, Dataset>;

AgentPartitions partition_by_agent(const Dataset& d);

struct Fold {
    Dataset train;
    Dataset test;
};

/// Per-class seeded shuffle, then round-robin assignment to k folds.
std::vector<Fold> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed);
/// Test-set record indices of each fold, ascending.
std::vector<std::vector<std::size_t>> stratified_fold_indices(const Dataset& d, std::size_t k,
                                                              std::uint64_t seed);

Dataset drop_attributes(const Dataset& d, std::span<const std::string> names);
Dataset select(const Dataset& d, std::span<const std::size_t> indices);

struct GeneratorConfig {
    std::size_t agent_count = 5;
    std::size_t records_per_agent = 300;
    std::uint64_t seed = 0;
    double noise_rate = 0.05;
    double policy_divergence = 0.5;
};

void validate(const GeneratorConfig& config);

/// Latent triage policy used by the generator; exposed so tests can check labels.
struct TriagePolicy {
    double ratio_threshold;    // OS when sync/max below this
    double dist_threshold;     // OS when dist above this and profile high
    double profile_threshold;  // Mb/s
    double product_shift;      // ratio threshold offset for IPTV

    State decide(const ComplaintRecord& r) const;
};

TriagePolicy base_policy();

/// Agent identifiers produced by generate(): AGENT01, AGENT02, ...
std::string agent_name(std::size_t index);

Dataset generate(const GeneratorConfig& config);

}  // namespace helpdesk
