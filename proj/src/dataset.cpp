#include "helpdesk/dataset.hpp"

#include "helpdesk/error.hpp"
#include "helpdesk/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace helpdesk {

namespace {

constexpr std::string_view kAgent = "AGENT";
constexpr std::string_view kProduct = "PRODUCT";
constexpr std::string_view kArea = "AREA";
constexpr std::string_view kProfile = "PROFILE";
constexpr std::string_view kSync = "SYNC";
constexpr std::string_view kMax = "MAX";
constexpr std::string_view kDist = "DIST";
constexpr std::string_view kState = "STATE";

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

[[noreturn]] void fail_at(std::size_t line, const std::string& what) {
    throw DataError(what + " at line " + std::to_string(line));
}

std::optional<double> parse_number(std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Checks the physical invariants on whichever canonical columns are present.
void check_complaint_columns(const Schema& schema, const Record& r, std::size_t line) {
    auto number = [&](std::string_view name) -> std::optional<double> {
        const auto i = schema.index_of(name);
        if (!i || schema[*i].kind != AttributeKind::continuous) return std::nullopt;
        return r.number(*i);
    };
    for (const auto name : {kProfile, kSync, kMax, kDist}) {
        if (const auto v = number(name); v && *v < 0.0) fail_at(line, lower(name) + " is negative");
    }
    if (const auto p = number(kProfile); p && *p <= 0.0) fail_at(line, "profile must be positive");
    const auto sync = number(kSync);
    const auto max = number(kMax);
    if (sync && max && *sync > *max) fail_at(line, "sync exceeds max");
}

}  // namespace

Schema::Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
    std::set<std::string_view> names;
    std::optional<std::size_t> class_index;
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        const auto& a = attributes_[i];
        if (a.name.empty()) throw ValidationError("attribute name must not be empty");
        if (!names.insert(a.name).second) throw ValidationError("duplicate attribute name " + a.name);
        switch (a.role) {
            case AttributeRole::class_label:
                if (class_index) throw ValidationError("schema has more than one class attribute");
                if (a.kind != AttributeKind::categorical) throw ValidationError("class attribute must be categorical");
                if (a.domain.size() < 2) throw ValidationError("class attribute needs at least two values");
                class_index = i;
                break;
            case AttributeRole::agent_key:
                if (agent_index_) throw ValidationError("schema has more than one agent-key attribute");
                if (a.kind != AttributeKind::categorical) throw ValidationError("agent key must be categorical");
                agent_index_ = i;
                break;
            case AttributeRole::feature:
                break;
        }
    }
    if (!class_index) throw ValidationError("schema has no class attribute");
    class_index_ = *class_index;
    auto& domain = attributes_[class_index_].domain;
    if (!std::ranges::is_sorted(domain) || std::ranges::adjacent_find(domain) != domain.end()) {
        throw ValidationError("class values must be unique and sorted");
    }
}

Schema Schema::complaints() {
    using K = AttributeKind;
    using R = AttributeRole;
    return Schema({
        {std::string(kAgent), K::categorical, R::agent_key, {}},
        {std::string(kProduct), K::categorical, R::feature, {}},
        {std::string(kArea), K::categorical, R::feature, {}},
        {std::string(kProfile), K::continuous, R::feature, {}},
        {std::string(kSync), K::continuous, R::feature, {}},
        {std::string(kMax), K::continuous, R::feature, {}},
        {std::string(kDist), K::continuous, R::feature, {}},
        {std::string(kState), K::categorical, R::class_label, {"OS", "RS"}},
    });
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> Schema::feature_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (i != class_index_) out.push_back(i);
    }
    return out;
}

std::string_view to_string(State s) { return s == State::OS ? "OS" : "RS"; }

std::optional<State> parse_state(std::string_view text) {
    if (text == "OS") return State::OS;
    if (text == "RS") return State::RS;
    return std::nullopt;
}

void validate(const ComplaintRecord& r) {
    auto finite_non_negative = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (r.agent.empty() || r.product.empty() || r.area.empty()) throw DataError("missing field");
    if (!finite_non_negative(r.profile) || r.profile <= 0.0) throw DataError("profile must be positive");
    if (!finite_non_negative(r.sync)) throw DataError("sync must be finite and non-negative");
    if (!finite_non_negative(r.max)) throw DataError("max must be finite and non-negative");
    if (!finite_non_negative(r.dist)) throw DataError("dist must be finite and non-negative");
    if (r.sync > r.max) throw DataError("sync exceeds max");
}

std::size_t Dataset::label(std::size_t i) const {
    const auto& value = records[i].text(schema.class_index());
    const auto& classes = schema.classes();
    const auto it = std::ranges::lower_bound(classes, value);
    if (it == classes.end() || *it != value) throw DataError("unknown class value " + value);
    return static_cast<std::size_t>(it - classes.begin());
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(schema.classes().size(), 0);
    for (std::size_t i = 0; i < records.size(); ++i) ++counts[label(i)];
    return counts;
}

Dataset Dataset::from_complaints(std::span<const ComplaintRecord> complaints) {
    Dataset d{Schema::complaints(), {}};
    d.records.reserve(complaints.size());
    for (const auto& c : complaints) {
        validate(c);
        d.records.push_back(Record{{c.agent, c.product, c.area, c.profile, c.sync, c.max, c.dist,
                                    std::string(to_string(c.state))}});
    }
    return d;
}

ComplaintRecord Dataset::complaint(std::size_t i) const {
    auto column = [&](std::string_view name) {
        const auto idx = schema.index_of(name);
        if (!idx) throw DataError("dataset has no " + std::string(name) + " column");
        return *idx;
    };
    const auto& r = records[i];
    ComplaintRecord c;
    c.agent = r.text(column(kAgent));
    c.product = r.text(column(kProduct));
    c.area = r.text(column(kArea));
    c.profile = r.number(column(kProfile));
    c.sync = r.number(column(kSync));
    c.max = r.number(column(kMax));
    c.dist = r.number(column(kDist));
    const auto state = parse_state(r.text(column(kState)));
    if (!state) throw DataError("unknown class value " + r.text(column(kState)));
    c.state = *state;
    return c;
}

Dataset parse_dataset(std::istream& input, const Schema& schema) {
    Dataset d{schema, {}};
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(input, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() != schema.size()) fail_at(line_no, "header has wrong number of columns");
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (fields[i] != schema[i].name) {
                    fail_at(line_no, "header column " + std::string(fields[i]) + " does not match " + schema[i].name);
                }
            }
            have_header = true;
            continue;
        }
        if (fields.size() != schema.size()) {
            fail_at(line_no, "expected " + std::to_string(schema.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        Record r;
        r.values.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto field = fields[i];
            const auto& attr = schema[i];
            if (field.empty()) fail_at(line_no, "missing field " + attr.name);
            if (attr.kind == AttributeKind::continuous) {
                const auto v = parse_number(field);
                if (!v) fail_at(line_no, "unparseable number '" + std::string(field) + "' in " + attr.name);
                r.values.emplace_back(*v);
            } else {
                if (attr.role == AttributeRole::class_label && !std::ranges::binary_search(attr.domain, field)) {
                    fail_at(line_no, "unknown class value '" + std::string(field) + "'");
                }
                r.values.emplace_back(std::string(field));
            }
        }
        check_complaint_columns(schema, r, line_no);
        d.records.push_back(std::move(r));
    }
    if (!have_header) throw DataError("missing header row at line 1");
    return d;
}

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_dataset(std::ostream& output, const Dataset& d) {
    const auto attrs = d.schema.attributes();
    for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i) output << ',';
        output << attrs[i].name;
    }
    output << '\n';
    for (const auto& r : d.records) {
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            if (i) output << ',';
            if (const auto* num = std::get_if<double>(&r.values[i])) {
                output << format_number(*num);
            } else {
                output << std::get<std::string>(r.values[i]);
            }
        }
        output << '\n';
    }
}

AgentPartitions partition_by_agent(const Dataset& d) {
    if (d.empty()) throw ValidationError("cannot partition an empty dataset");
    const auto key = d.schema.agent_index();
    if (!key) throw ValidationError("dataset has no agent-key attribute");
    AgentPartitions parts;
    for (const auto& r : d.records) {
        auto [it, inserted] = parts.try_emplace(r.text(*key), Dataset{d.schema, {}});
        it->second.records.push_back(r);
    }
    return parts;
}

std::vector<std::vector<std::size_t>> stratified_fold_indices(const Dataset& d, std::size_t k,
                                                              std::uint64_t seed) {
    if (k < 2) throw ValidationError("need at least 2 folds");
    if (k > d.size()) throw ValidationError("more folds than records");

    std::vector<std::vector<std::size_t>> by_class(d.schema.classes().size());
    for (std::size_t i = 0; i < d.size(); ++i) by_class[d.label(i)].push_back(i);

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;  // round-robin position carries across classes so fold sizes stay balanced
    for (auto& members : by_class) {
        rng.shuffle(std::span(members));
        for (const auto idx : members) {
            folds[next].push_back(idx);
            next = (next + 1) % k;
        }
    }
    for (auto& f : folds) std::ranges::sort(f);
    return folds;
}

Dataset select(const Dataset& d, std::span<const std::size_t> indices) {
    Dataset out{d.schema, {}};
    out.records.reserve(indices.size());
    for (const auto i : indices) out.records.push_back(d.records[i]);
    return out;
}

std::vector<Fold> stratified_folds(const Dataset& d, std::size_t k, std::uint64_t seed) {
    const auto test_sets = stratified_fold_indices(d, k, seed);
    std::vector<Fold> folds;
    folds.reserve(k);
    std::vector<char> in_test(d.size());
    for (const auto& test : test_sets) {
        std::ranges::fill(in_test, 0);
        for (const auto i : test) in_test[i] = 1;
        std::vector<std::size_t> train;
        train.reserve(d.size() - test.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!in_test[i]) train.push_back(i);
        }
        folds.push_back(Fold{select(d, train), select(d, test)});
    }
    return folds;
}

Dataset drop_attributes(const Dataset& d, std::span<const std::string> names) {
    std::vector<char> dropped(d.schema.size(), 0);
    for (const auto& name : names) {
        const auto idx = d.schema.index_of(name);
        if (!idx) throw ValidationError("unknown attribute " + name);
        if (*idx == d.schema.class_index()) throw ValidationError("cannot drop the class attribute " + name);
        dropped[*idx] = 1;
    }
    std::vector<Attribute> kept;
    for (std::size_t i = 0; i < d.schema.size(); ++i) {
        if (!dropped[i]) kept.push_back(d.schema[i]);
    }
    Dataset out{Schema(std::move(kept)), {}};
    out.records.reserve(d.size());
    for (const auto& r : d.records) {
        Record nr;
        nr.values.reserve(out.schema.size());
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            if (!dropped[i]) nr.values.push_back(r.values[i]);
        }
        out.records.push_back(std::move(nr));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

namespace {

constexpr double kProfiles[] = {2.0, 24.0, 30.0, 50.0, 100.0};
constexpr const char* kProducts[] = {"INTERNET", "IPTV"};
constexpr const char* kAreas[] = {"Athens", "Heraklion", "Larissa", "Patras", "Thessaloniki"};

double round_to(double v, double step) { return std::round(v / step) * step; }

TriagePolicy perturb(const TriagePolicy& base, double divergence, Rng& rng) {
    TriagePolicy p = base;
    p.ratio_threshold += divergence * rng.uniform(-1.0, 1.0) * 0.4;
    p.dist_threshold += divergence * rng.uniform(-1.0, 1.0) * 4.0;
    p.product_shift += divergence * rng.uniform(-1.0, 1.0) * 0.2;
    // Shift the profile cut by up to two tiers.
    const auto base_tier = static_cast<long>(std::ranges::find(kProfiles, base.profile_threshold) - kProfiles);
    const auto shift = std::lround(divergence * rng.uniform(-1.0, 1.0) * 4.0);
    const auto tier = std::clamp(base_tier + shift, 0L, static_cast<long>(std::size(kProfiles)) - 1);
    p.profile_threshold = kProfiles[tier];
    return p;
}

}  // namespace

State TriagePolicy::decide(const ComplaintRecord& r) const {
    const double ratio = r.max > 0.0 ? r.sync / r.max : 0.0;
    const double cut = ratio_threshold + (r.product == "IPTV" ? product_shift : 0.0);
    if (ratio < cut) return State::OS;
    if (r.dist > dist_threshold && r.profile >= profile_threshold) return State::OS;
    return State::RS;
}

TriagePolicy base_policy() { return TriagePolicy{0.55, 5.0, 24.0, 0.05}; }

std::string agent_name(std::size_t index) {
    std::string digits = std::to_string(index + 1);
    if (digits.size() < 2) digits.insert(0, "0");
    return "AGENT" + digits;
}

void validate(const GeneratorConfig& config) {
    if (config.agent_count == 0) throw ValidationError("agent_count must be positive");
    if (config.records_per_agent == 0) throw ValidationError("records_per_agent must be positive");
    if (!(config.noise_rate >= 0.0 && config.noise_rate <= 1.0)) throw ValidationError("noise_rate must be in [0,1]");
    if (!(config.policy_divergence >= 0.0 && config.policy_divergence <= 1.0)) {
        throw ValidationError("policy_divergence must be in [0,1]");
    }
}

Dataset generate(const GeneratorConfig& config) {
    validate(config);
    Rng rng(config.seed);
    const auto base = base_policy();
    std::vector<TriagePolicy> policies;
    policies.reserve(config.agent_count);
    for (std::size_t a = 0; a < config.agent_count; ++a) {
        policies.push_back(perturb(base, config.policy_divergence, rng));
    }

    std::vector<ComplaintRecord> complaints;
    const auto total = config.agent_count * config.records_per_agent;
    complaints.reserve(total);
    // Complaints arrive interleaved; agent a takes every K-th one.
    for (std::size_t n = 0; n < total; ++n) {
        const auto a = n % config.agent_count;
        ComplaintRecord c;
        c.agent = agent_name(a);
        c.product = kProducts[rng.below(std::size(kProducts))];
        c.area = kAreas[rng.below(std::size(kAreas))];
        c.profile = kProfiles[rng.below(std::size(kProfiles))];
        c.dist = round_to(rng.uniform(0.1, 10.0), 0.01);
        c.max = std::max(1.0, std::round(28000.0 * std::exp(-0.22 * c.dist) * rng.uniform(0.85, 1.15)));
        c.sync = std::floor(rng.uniform(0.3, 1.0) * c.max);
        c.state = policies[a].decide(c);
        if (rng.bernoulli(config.noise_rate)) c.state = c.state == State::OS ? State::RS : State::OS;
        complaints.push_back(std::move(c));
    }
    return Dataset::from_complaints(complaints);
}

}  // namespace helpdesk
