#include "helpdesk/evaluation.hpp"

#include "helpdesk/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <set>

namespace helpdesk {

CostModel::CostModel(double opex_os, double n) : opex_os_(opex_os), n_(n) {
    if (!(std::isfinite(opex_os) && opex_os > 0.0)) throw ValidationError("opex_os must be a positive real");
    if (!(std::isfinite(n) && n > 1.0)) throw ValidationError("cost divisor n must exceed 1");
}

double CostMatrix::operator()(State predicted, State actual) const {
    if (predicted == actual) return 0.0;
    return predicted == State::OS ? model_.opex_os() : model_.opex_rs();
}

std::string_view to_string(Metric m) { return m == Metric::accuracy ? "accuracy" : "avg_cost"; }

Metric parse_metric(std::string_view text) {
    if (text == "accuracy") return Metric::accuracy;
    if (text == "avg_cost" || text == "cost") return Metric::avg_cost;
    throw ValidationError("unknown metric " + std::string(text));
}

std::vector<double> CrossTestMatrix::diagonal() const {
    std::vector<double> d;
    d.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) d.push_back((*this)(i, i));
    return d;
}

std::optional<std::size_t> CrossTestMatrix::index_of(std::string_view agent) const {
    const auto it = std::ranges::find(agents, agent);
    if (it == agents.end()) return std::nullopt;
    return static_cast<std::size_t>(it - agents.begin());
}

void validate(const CrossTestMatrix& m) {
    const auto k = m.size();
    if (k == 0) throw ValidationError("cross-test matrix has no agents");
    if (m.entries.size() != k * k) throw ValidationError("cross-test matrix is not square");
    if (std::set<std::string>(m.agents.begin(), m.agents.end()).size() != k) {
        throw ValidationError("cross-test matrix has duplicate agents");
    }
    for (const double v : m.entries) {
        if (!std::isfinite(v) || v < 0.0) throw ValidationError("cross-test entry out of range");
        if (m.metric == Metric::accuracy && v > 1.0) throw ValidationError("accuracy entry exceeds 1");
        if (m.metric == Metric::avg_cost && m.cost_model && v > m.cost_model->opex_os()) {
            throw ValidationError("cost entry exceeds opex_os");
        }
    }
}

namespace {

std::vector<State> class_states(const DecisionTree& t) {
    std::vector<State> states;
    for (const auto& name : t.classes()) {
        const auto s = parse_state(name);
        if (!s) throw ValidationError("cost scoring needs OS/RS classes, found " + name);
        states.push_back(*s);
    }
    return states;
}

void check_compatible(const DecisionTree& t, const Dataset& d) {
    if (d.empty()) throw ValidationError("cannot score on an empty dataset");
    if (!(t.schema() == d.schema)) throw ValidationError("dataset schema does not match the tree's");
}

struct Trained {
    std::optional<DecisionTree> tree;
    std::exception_ptr error;
};

[[noreturn]] void rethrow_annotated(std::exception_ptr e, const std::string& where) {
    try {
        std::rethrow_exception(e);
    } catch (const ValidationError& err) {
        throw ValidationError(where + ": " + err.what());
    } catch (const DataError& err) {
        throw DataError(where + ": " + err.what());
    } catch (const std::exception& err) {
        throw Error(where + ": " + err.what());
    }
}

// Shared by the serial and parallel drivers so both evaluate identical code.
class CrossTestJob {
public:
    CrossTestJob(const AgentPartitions& partitions, const InductionParams& p, Metric metric,
                 const std::optional<CostModel>& cm)
        : params_(p), metric_(metric), cm_(cm) {
        validate(p);
        if (partitions.size() < 2) throw DataError("cross-test needs at least 2 agents");
        if ((metric == Metric::avg_cost) != cm.has_value()) {
            throw ValidationError("a cost model is required exactly when the metric is avg_cost");
        }
        for (const auto& [agent, data] : partitions) {
            if (data.empty()) throw DataError("partition for agent " + agent + " is empty");
            agents_.push_back(agent);
            data_.push_back(&data);
        }
        trained_.resize(agents_.size());
        cells_.assign(agents_.size() * agents_.size(), 0.0);
        cell_errors_.resize(cells_.size());
    }

    std::size_t k() const { return agents_.size(); }

    void train(std::size_t i) {
        try {
            trained_[i].tree.emplace(induce(*data_[i], params_));
        } catch (...) {
            trained_[i].error = std::current_exception();
        }
    }

    void score(std::size_t cell) {
        const auto i = cell / k();
        const auto j = cell % k();
        if (!trained_[i].tree) return;
        try {
            cells_[cell] = metric_ == Metric::accuracy ? accuracy(*trained_[i].tree, *data_[j])
                                                       : avg_misclassification_cost(*trained_[i].tree, *data_[j], *cm_);
        } catch (...) {
            cell_errors_[cell] = std::current_exception();
        }
    }

    CrossTestMatrix finish() const {
        for (std::size_t cell = 0; cell < cells_.size(); ++cell) {
            const auto i = cell / k();
            const auto j = cell % k();
            const auto where = "cross-test cell (" + agents_[i] + ", " + agents_[j] + ")";
            if (trained_[i].error) rethrow_annotated(trained_[i].error, where);
            if (cell_errors_[cell]) rethrow_annotated(cell_errors_[cell], where);
        }
        return CrossTestMatrix{metric_, agents_, cells_, cm_};
    }

private:
    InductionParams params_;
    Metric metric_;
    std::optional<CostModel> cm_;
    std::vector<std::string> agents_;
    std::vector<const Dataset*> data_;
    std::vector<Trained> trained_;
    std::vector<double> cells_;
    std::vector<std::exception_ptr> cell_errors_;
};

double fold_accuracy(const Fold& fold, const InductionParams& p) { return accuracy(induce(fold.train, p), fold.test); }

double mean_in_order(const std::vector<double>& xs) {
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

}  // namespace

double accuracy(const DecisionTree& t, const Dataset& d) {
    check_compatible(t, d);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (t.classify(d.records[i]) == d.label(i)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(d.size());
}

double avg_misclassification_cost(const DecisionTree& t, const Dataset& d, const CostModel& cm) {
    check_compatible(t, d);
    const auto states = class_states(t);
    std::size_t os_for_rs = 0;
    std::size_t rs_for_os = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto predicted = states[t.classify(d.records[i])];
        const auto actual = states[d.label(i)];
        if (predicted == actual) continue;
        if (predicted == State::OS) {
            ++os_for_rs;
        } else {
            ++rs_for_os;
        }
    }
    const double total = static_cast<double>(os_for_rs) * cm.opex_os() + static_cast<double>(rs_for_os) * cm.opex_rs();
    return total / static_cast<double>(d.size());
}

CrossTestMatrix cross_test_serial(const AgentPartitions& partitions, const InductionParams& p, Metric metric,
                                  const std::optional<CostModel>& cm) {
    CrossTestJob job(partitions, p, metric, cm);
    for (std::size_t i = 0; i < job.k(); ++i) job.train(i);
    for (std::size_t c = 0; c < job.k() * job.k(); ++c) job.score(c);
    return job.finish();
}

CrossTestMatrix cross_test(const AgentPartitions& partitions, const InductionParams& p, Metric metric,
                           const std::optional<CostModel>& cm) {
    CrossTestJob job(partitions, p, metric, cm);
    const auto k = static_cast<std::ptrdiff_t>(job.k());
#pragma omp parallel
    {
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < k; ++i) job.train(static_cast<std::size_t>(i));
#pragma omp for schedule(dynamic)
        for (std::ptrdiff_t c = 0; c < k * k; ++c) job.score(static_cast<std::size_t>(c));
    }
    return job.finish();
}

double rsd(std::span<const double> values) {
    if (values.size() < 2) throw ValidationError("rsd needs at least 2 values");
    double sum = 0.0;
    for (const double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (mean == 0.0) throw ValidationError("rsd undefined for zero mean");
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return std::abs(sd / mean);
}

double cross_validate_serial(const Dataset& d, const InductionParams& p, std::size_t k, std::uint64_t seed) {
    validate(p);
    const auto folds = stratified_folds(d, k, seed);
    std::vector<double> acc;
    acc.reserve(folds.size());
    for (const auto& f : folds) acc.push_back(fold_accuracy(f, p));
    return mean_in_order(acc);
}

double cross_validate(const Dataset& d, const InductionParams& p, std::size_t k, std::uint64_t seed) {
    validate(p);
    const auto folds = stratified_folds(d, k, seed);
    const auto n = static_cast<std::ptrdiff_t>(folds.size());
    std::vector<double> acc(folds.size(), 0.0);
    std::vector<std::exception_ptr> errors(folds.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t f = 0; f < n; ++f) {
        const auto i = static_cast<std::size_t>(f);
        try {
            acc[i] = fold_accuracy(folds[i], p);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i]) rethrow_annotated(errors[i], "fold " + std::to_string(i + 1));
    }
    return mean_in_order(acc);
}

std::string_view to_string(ResolutionSource s) {
    switch (s) {
        case ResolutionSource::kpi: return "kpi";
        case ResolutionSource::accuracy: return "accuracy";
        case ResolutionSource::cost: return "cost";
    }
    return "";
}

std::string_view describe(ResolutionSource s) {
    switch (s) {
        case ResolutionSource::kpi: return "Cost using traditional KPIs";
        case ResolutionSource::accuracy: return "Correctly classified instances only";
        case ResolutionSource::cost: return "Average misclassification cost";
    }
    return "";
}

std::vector<ResolutionEntry> resolution_report(const CrossTestMatrix& acc, const CrossTestMatrix& cost,
                                               std::span<const KpiRecord> kpis) {
    if (acc.metric != Metric::accuracy) throw ValidationError("first matrix must hold accuracy values");
    if (cost.metric != Metric::avg_cost) throw ValidationError("second matrix must hold avg_cost values");
    if (acc.agents != cost.agents) throw ValidationError("accuracy and cost matrices list different agents");

    std::vector<ResolutionEntry> out;
    if (!kpis.empty()) {
        if (kpis.size() != acc.agents.size()) throw ValidationError("KPI records do not cover the matrix agents");
        std::vector<double> composite;
        for (const auto& agent : acc.agents) {
            const auto it = std::ranges::find(kpis, agent, &KpiRecord::agent);
            if (it == kpis.end()) throw ValidationError("no KPI record for agent " + agent);
            composite.push_back(it->composite_cost);
        }
        out.push_back({ResolutionSource::kpi, rsd(composite)});
    }
    out.push_back({ResolutionSource::accuracy, rsd(acc.diagonal())});
    out.push_back({ResolutionSource::cost, rsd(cost.diagonal())});
    std::ranges::stable_sort(out, {}, &ResolutionEntry::rsd);
    return out;
}

}  // namespace helpdesk
