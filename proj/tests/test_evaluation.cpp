#include "helpdesk/error.hpp"
#include "helpdesk/evaluation.hpp"
#include "helpdesk/serialization.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace helpdesk;

namespace {

std::string fixture(const std::string& name) { return std::string(HELPDESK_SOURCE_DIR) + "/fixtures/" + name; }

Dataset complaints(const std::string& body) {
    std::istringstream in("AGENT,PRODUCT,AREA,PROFILE,SYNC,MAX,DIST,STATE\n" + body);
    return parse_dataset(in);
}

Dataset with_states(std::size_t os, std::size_t rs) {
    std::string body;
    for (std::size_t i = 0; i < os; ++i) body += "A,INTERNET,Athens,2,100,200," + std::to_string(i + 1) + ",OS\n";
    for (std::size_t i = 0; i < rs; ++i) body += "A,INTERNET,Athens,2,100,200," + std::to_string(os + i + 1) + ",RS\n";
    return complaints(body);
}

DecisionTree constant_tree(State s, ClassCounts counts = {1, 1}) {
    return DecisionTree(Schema::complaints(), TreeNode{std::move(counts), s == State::OS ? 0u : 1u, std::nullopt, {}});
}

}  // namespace

TEST(CostModel, DerivedRemoteCost) {
    const CostModel cm(1.0, 12.0);
    EXPECT_DOUBLE_EQ(cm.opex_rs(), 1.0 / 12.0);
    EXPECT_LT(cm.opex_rs(), cm.opex_os());
    EXPECT_THROW(CostModel(0.0, 12.0), ValidationError);
    EXPECT_THROW(CostModel(1.0, 1.0), ValidationError);
    const CostMatrix m(cm);
    EXPECT_EQ(m(State::OS, State::OS), 0.0);
    EXPECT_EQ(m(State::RS, State::RS), 0.0);
    EXPECT_EQ(m(State::OS, State::RS), 1.0);
    EXPECT_EQ(m(State::RS, State::OS), 1.0 / 12.0);
}

TEST(Accuracy, Examples) {
    const auto d = generate({1, 80, 4, 0.1, 0.5});
    EXPECT_EQ(accuracy(induce(d, {1, 0.25, false}), d), 1.0);
    EXPECT_DOUBLE_EQ(accuracy(constant_tree(State::RS), with_states(4, 6)), 0.6);
    EXPECT_THROW(accuracy(constant_tree(State::RS), complaints("")), ValidationError);
}

TEST(AvgCost, Examples) {
    const CostModel unit(1.0, 10.0);
    const auto d = with_states(3, 3);
    EXPECT_EQ(avg_misclassification_cost(induce(d, {1, 0.25, false}), d, unit), 0.0);
    // Constant OS tree on 8 OS + 2 RS: two OS-for-RS errors at opex_os = 1.
    EXPECT_DOUBLE_EQ(avg_misclassification_cost(constant_tree(State::OS), with_states(8, 2), unit), 0.2);
    // Constant RS tree on 1 OS + 3 RS: one RS-for-OS error at 1/10, over 4.
    EXPECT_DOUBLE_EQ(avg_misclassification_cost(constant_tree(State::RS), with_states(1, 3), unit), 0.025);
    EXPECT_THROW(avg_misclassification_cost(constant_tree(State::RS), complaints(""), unit), ValidationError);
}

TEST(AvgCostProperty, ZeroCostIffPerfectAccuracy) {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto train = generate({1, 5 + rng.below(40), rng.next(), rng.uniform() * 0.3, 0.5});
        const auto test = rng.bernoulli(0.5) ? train : generate({1, 5 + rng.below(40), rng.next(), 0.1, 0.5});
        const auto t = induce(train, {1 + rng.below(2), 0.25, rng.bernoulli(0.5)});
        const CostModel cm(0.5 + rng.uniform() * 4.0, 1.5 + rng.uniform() * 20.0);
        const double cost = avg_misclassification_cost(t, test, cm);
        EXPECT_EQ(cost == 0.0, accuracy(t, test) == 1.0) << "trial " << trial;
        EXPECT_LE(cost, std::max(cm.opex_os(), cm.opex_rs()));
        EXPECT_GE(cost, 0.0);
    }
}

TEST(CrossTest, IdenticalPartitionsGiveUniformMatrix) {
    const auto d = generate({1, 60, 5, 0.1, 0.5});
    AgentPartitions parts{{"a", d}, {"b", d}};
    const auto m = cross_test(parts, {}, Metric::accuracy);
    EXPECT_EQ(m(0, 1), m(1, 0));
    EXPECT_EQ(m(0, 0), m(1, 1));
    EXPECT_EQ(m(0, 0), m(0, 1));
}

TEST(CrossTest, ShapeAndMetadata) {
    const auto parts = partition_by_agent(generate({5, 80, 6, 0.05, 0.5}));
    const auto m = cross_test(parts, {}, Metric::avg_cost, CostModel{});
    EXPECT_EQ(m.size(), 5u);
    EXPECT_EQ(m.entries.size(), 25u);
    EXPECT_EQ(m.metric, Metric::avg_cost);
    EXPECT_EQ(m.cost_model, CostModel{});
    EXPECT_NO_THROW(validate(m));
}

TEST(CrossTest, CostScalesLinearly) {
    const auto parts = partition_by_agent(generate({4, 100, 7, 0.05, 0.5}));
    const CostModel base(1.0, 12.0);
    const auto m = cross_test(parts, {}, Metric::avg_cost, base);
    for (const double c : {0.5, 2.0, 10.0, 3.7}) {
        const auto scaled = cross_test(parts, {}, Metric::avg_cost, base.scaled(c));
        for (std::size_t i = 0; i < m.entries.size(); ++i) {
            EXPECT_NEAR(scaled.entries[i], c * m.entries[i], 1e-12 * c) << "c=" << c;
        }
    }
}

TEST(CrossTest, ParallelMatchesSerialBitForBit) {
    const auto parts = partition_by_agent(generate({6, 90, 8, 0.05, 0.5}));
    for (const auto metric : {Metric::accuracy, Metric::avg_cost}) {
        std::optional<CostModel> cm;
        if (metric == Metric::avg_cost) cm = CostModel(3.0, 7.0);
        const auto par = cross_test(parts, {}, metric, cm);
        const auto ser = cross_test_serial(parts, {}, metric, cm);
        EXPECT_EQ(par.agents, ser.agents);
        EXPECT_EQ(par.entries, ser.entries);
    }
}

TEST(CrossTest, Errors) {
    const auto d = generate({2, 20, 1, 0.05, 0.5});
    const auto parts = partition_by_agent(d);
    EXPECT_THROW(cross_test(parts, {}, Metric::avg_cost), ValidationError);
    EXPECT_THROW(cross_test(parts, {}, Metric::accuracy, CostModel{}), ValidationError);
    AgentPartitions one{{"a", d}};
    EXPECT_THROW(cross_test(one, {}, Metric::accuracy), DataError);
    AgentPartitions hollow{{"a", d}, {"b", Dataset{d.schema, {}}}};
    EXPECT_THROW(cross_test(hollow, {}, Metric::accuracy), DataError);
}

TEST(Rsd, FixtureDiagonals) {
    const std::vector<double> accuracy_diag{0.60, 0.72, 0.60, 0.75, 0.71};
    const std::vector<double> cost_diag{0.1, 0.3, 0.4, 0.1, 0.1};
    const std::vector<double> kpi_costs{0.72, 0.69, 0.69, 0.68, 0.69};
    EXPECT_NEAR(rsd(accuracy_diag), 0.1049, 5e-4);
    EXPECT_NEAR(rsd(cost_diag), 0.7071, 5e-4);
    EXPECT_NEAR(rsd(kpi_costs), 0.0219, 5e-4);
}

TEST(Rsd, ConstantAndErrors) {
    const std::vector<double> constant{3.5, 3.5, 3.5};
    EXPECT_EQ(rsd(constant), 0.0);
    const std::vector<double> one{1.0};
    const std::vector<double> zero_mean{-1.0, 1.0};
    EXPECT_THROW(rsd(one), ValidationError);
    EXPECT_THROW(rsd(zero_mean), ValidationError);
}

TEST(RsdProperty, PositiveScaleInvariance) {
    Rng rng(32);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(2 + rng.below(8));
        for (auto& x : v) x = 0.01 + rng.uniform();
        const double c = 0.01 + rng.uniform() * 100.0;
        std::vector<double> scaled = v;
        for (auto& x : scaled) x *= c;
        EXPECT_NEAR(rsd(scaled), rsd(v), 1e-12);
    }
}

TEST(CrossValidate, SeparableDataIsPerfect) {
    std::string body;
    // A gap between the classes keeps every learned threshold inside it.
    for (int i = 0; i < 20; ++i) {
        body += "A,INTERNET,Athens,2,100,200," + std::to_string(i < 10 ? i + 1 : i + 11) + (i < 10 ? ",OS\n" : ",RS\n");
    }
    EXPECT_EQ(cross_validate(complaints(body), {}, 5, 3), 1.0);
}

TEST(CrossValidate, DeterministicAndMatchesSerial) {
    const auto d = generate({3, 100, 12, 0.05, 0.5});
    const double a = cross_validate(d, {}, 10, 4);
    EXPECT_EQ(a, cross_validate(d, {}, 10, 4));
    EXPECT_EQ(a, cross_validate_serial(d, {}, 10, 4));
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
}

TEST(CrossValidate, AgentAttributeHelpsOnDivergentCorpus) {
    const auto d = generate({5, 300, 42, 0.05, 0.5});
    const std::vector<std::string> drop{"AGENT", "AREA"};
    EXPECT_GT(cross_validate(d, {}, 10, 42), cross_validate(drop_attributes(d, drop), {}, 10, 42));
}

TEST(ResolutionReport, FixturesOrdering) {
    const auto acc = matrix_from_json(read_json_file(fixture("accuracy_matrix.json")));
    const auto cost = matrix_from_json(read_json_file(fixture("cost_matrix.json")));
    const auto kpis = kpis_from_json(read_json_file(fixture("kpis.json")));
    const auto r = resolution_report(acc, cost, kpis);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].source, ResolutionSource::kpi);
    EXPECT_EQ(r[1].source, ResolutionSource::accuracy);
    EXPECT_EQ(r[2].source, ResolutionSource::cost);
    EXPECT_NEAR(r[0].rsd, 0.0219, 5e-4);
    EXPECT_NEAR(r[1].rsd, 0.1049, 5e-4);
    EXPECT_NEAR(r[2].rsd, 0.7071, 5e-4);
}

TEST(ResolutionReport, EqualDiagonalsKeepInputOrder) {
    const std::vector<std::string> agents{"x", "y", "z"};
    const std::vector<double> cells{0.2, 0, 0, 0, 0.4, 0, 0, 0, 0.6};
    const CrossTestMatrix acc{Metric::accuracy, agents, cells, std::nullopt};
    const CrossTestMatrix cost{Metric::avg_cost, agents, cells, std::nullopt};
    const std::vector<KpiRecord> kpis{{"x", 0, 0, 0.2}, {"y", 0, 0, 0.4}, {"z", 0, 0, 0.6}};
    const auto r = resolution_report(acc, cost, kpis);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].rsd, r[1].rsd);
    EXPECT_EQ(r[1].rsd, r[2].rsd);
    EXPECT_EQ(r[0].source, ResolutionSource::kpi);
    EXPECT_EQ(r[1].source, ResolutionSource::accuracy);
    EXPECT_EQ(r[2].source, ResolutionSource::cost);
}

TEST(ResolutionReport, KpiScaleInvariantAndMismatches) {
    const auto acc = matrix_from_json(read_json_file(fixture("accuracy_matrix.json")));
    const auto cost = matrix_from_json(read_json_file(fixture("cost_matrix.json")));
    auto kpis = kpis_from_json(read_json_file(fixture("kpis.json")));
    const double before = resolution_report(acc, cost, kpis)[0].rsd;
    for (auto& k : kpis) k.composite_cost *= 2.0;
    EXPECT_NEAR(resolution_report(acc, cost, kpis)[0].rsd, before, 1e-12);

    EXPECT_EQ(resolution_report(acc, cost, {}).size(), 2u);
    kpis.pop_back();
    EXPECT_THROW(resolution_report(acc, cost, kpis), ValidationError);
    kpis.push_back({"9", 0, 0, 1.0});
    EXPECT_THROW(resolution_report(acc, cost, kpis), ValidationError);
    auto renamed = cost;
    renamed.agents[0] = "one";
    EXPECT_THROW(resolution_report(acc, renamed, {}), ValidationError);
    EXPECT_THROW(resolution_report(cost, acc, {}), ValidationError);
}

TEST(MatrixJson, FixtureRoundTrip) {
    const auto j = read_json_file(fixture("cost_matrix.json"));
    const auto m = matrix_from_json(j);
    EXPECT_EQ(to_json(m), j);
    EXPECT_EQ(matrix_from_json(to_json(m)), m);
    EXPECT_EQ(m(1, 2), 0.4);
}

TEST(MatrixJson, RejectsMalformed) {
    EXPECT_THROW(matrix_from_json(Json{{"metric", "accuracy"}, {"agents", {"a", "b"}}, {"rows", {{1.0, 0.5}}}}), DataError);
    EXPECT_THROW(matrix_from_json(Json{{"metric", "accuracy"}, {"agents", {"a"}}, {"rows", {{1.5}}}}), DataError);
    EXPECT_THROW(matrix_from_json(Json{{"metric", "speed"}, {"agents", {"a"}}, {"rows", {{0.5}}}}), DataError);
    EXPECT_THROW(matrix_from_json(Json{{"agents", {"a"}}}), DataError);
}
