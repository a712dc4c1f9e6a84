#pragma once

#include "helpdesk/dataset.hpp"
#include "helpdesk/induction.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace helpdesk {

/// On-site action cost and the divisor giving the remote-resolution cost.
class CostModel {
public:
    static constexpr double kDefaultOpexOs = 1.0;
    static constexpr double kDefaultDivisor = 12.0;

    CostModel() = default;
    CostModel(double opex_os, double n);

    double opex_os() const { return opex_os_; }
    double n() const { return n_; }
    double opex_rs() const { return opex_os_ / n_; }

    /// Same divisor, on-site cost multiplied by `c` > 0.
    CostModel scaled(double c) const { return CostModel(opex_os_ * c, n_); }

    friend bool operator==(const CostModel&, const CostModel&) = default;

private:
    double opex_os_ = kDefaultOpexOs;
    double n_ = kDefaultDivisor;
};

/// Cost of acting on `predicted` when the record's label is `actual`.
/// Zero on the diagonal; OS-for-RS costs opex_os; RS-for-OS costs opex_rs.
class CostMatrix {
public:
    explicit CostMatrix(const CostModel& m) : model_(m) {}
    double operator()(State predicted, State actual) const;

private:
    CostModel model_;
};

enum class Metric { accuracy, avg_cost };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view text);

/// entry(i, j): model trained on agent i's partition, scored on agent j's.
struct CrossTestMatrix {
    Metric metric = Metric::accuracy;
    std::vector<std::string> agents;
    std::vector<double> entries;  // row-major K×K
    std::optional<CostModel> cost_model;

    std::size_t size() const { return agents.size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries[i * agents.size() + j]; }
    double& operator()(std::size_t i, std::size_t j) { return entries[i * agents.size() + j]; }
    std::vector<double> diagonal() const;
    std::optional<std::size_t> index_of(std::string_view agent) const;

    friend bool operator==(const CrossTestMatrix&, const CrossTestMatrix&) = default;
};

/// Throws ValidationError if the matrix is not square or an entry is out of range.
void validate(const CrossTestMatrix& m);

struct KpiRecord {
    std::string agent;
    double kpi1 = 0.0;
    double kpi2 = 0.0;
    double composite_cost = 0.0;

    friend bool operator==(const KpiRecord&, const KpiRecord&) = default;
};

double accuracy(const DecisionTree& t, const Dataset& d);
double avg_misclassification_cost(const DecisionTree& t, const Dataset& d, const CostModel& cm);

/// Induces one tree per partition and scores it on every partition. Trees and
/// cells are computed in parallel; the result is bit-identical to
/// cross_test_serial.
CrossTestMatrix cross_test(const AgentPartitions& partitions, const InductionParams& p, Metric metric,
                           const std::optional<CostModel>& cm = std::nullopt);
CrossTestMatrix cross_test_serial(const AgentPartitions& partitions, const InductionParams& p, Metric metric,
                                  const std::optional<CostModel>& cm = std::nullopt);

/// Sample standard deviation (n-1) over the mean.
double rsd(std::span<const double> values);

/// Mean test accuracy over stratified folds; folds run in parallel.
double cross_validate(const Dataset& d, const InductionParams& p, std::size_t k, std::uint64_t seed);
double cross_validate_serial(const Dataset& d, const InductionParams& p, std::size_t k, std::uint64_t seed);

enum class ResolutionSource { kpi, accuracy, cost };

std::string_view to_string(ResolutionSource s);
std::string_view describe(ResolutionSource s);

struct ResolutionEntry {
    ResolutionSource source;
    double rsd = 0.0;
};

/// RSD of the KPI composite column, the accuracy diagonal and the cost
/// diagonal, ascending (stable in that input order). An empty `kpis` omits the
/// KPI row.
std::vector<ResolutionEntry> resolution_report(const CrossTestMatrix& acc, const CrossTestMatrix& cost,
                                               std::span<const KpiRecord> kpis);

}  // namespace helpdesk
