#include "cli.hpp"

#include "helpdesk/advisor.hpp"
#include "helpdesk/dataset.hpp"
#include "helpdesk/error.hpp"
#include "helpdesk/evaluation.hpp"
#include "helpdesk/induction.hpp"
#include "helpdesk/report.hpp"
#include "helpdesk/serialization.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

namespace helpdesk::cli {

namespace {

/// Flat JSON object whose keys are long flag names: {"seed": 42, "per-agent": 300}.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        Json j;
        try {
            j = Json::parse(input);
        } catch (const Json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            items.push_back(std::move(item));
        }
        return items;
    }

private:
    static std::string scalar(const Json& v) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        return v.dump();
    }
};

struct Options {
    std::string data;
    std::string out;
    std::string dot;
    std::optional<std::uint64_t> seed;
    std::size_t agents = 5;
    std::size_t per_agent = 300;
    double noise = 0.05;
    double divergence = 0.5;
    std::string metric = "accuracy";
    std::optional<double> opex_os;
    std::optional<double> cost_n;
    std::size_t folds = 10;
    std::vector<std::string> drop_attrs;
    std::size_t min_instances = 2;
    double confidence = 0.25;
    bool no_prune = false;
    std::string format = "json";
    std::string matrix;
    std::string accuracy_matrix;
    std::string cost_matrix;
    std::string kpis;
    std::vector<double> values;
    double tie_epsilon = kDefaultTieEpsilon;
};

class Runner {
public:
    Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

    void generate() {
        const auto d = helpdesk::generate(generator_config());
        std::ostringstream csv;
        write_dataset(csv, d);
        emit(csv.str());
    }

    void train() {
        const auto d = apply_drops(load_data());
        const auto tree = induce(d, induction());
        emit(export_tree(tree, TreeFormat::text));
        if (!o_.dot.empty()) write_file(o_.dot, export_tree(tree, TreeFormat::dot));
        err_ << "trained on " << d.size() << " records: " << tree.node_count() << " nodes, " << tree.leaf_count()
             << " leaves, reclassification accuracy " << format_fixed(accuracy(tree, d), 4) << '\n';
    }

    void cross_test() {
        CrossTestMatrix m;
        if (!o_.matrix.empty()) {
            m = matrix_from_json(read_json_file(o_.matrix));
        } else {
            m = compute_matrix(parse_metric(o_.metric));
        }
        emit_matrix(m);
    }

    void rsd() {
        std::vector<double> values = o_.values;
        std::string source = "values";
        if (!o_.matrix.empty()) {
            values = matrix_from_json(read_json_file(o_.matrix)).diagonal();
            source = "matrix diagonal";
        } else if (!o_.kpis.empty()) {
            values.clear();
            for (const auto& k : kpis_from_json(read_json_file(o_.kpis))) values.push_back(k.composite_cost);
            source = "KPI composite column";
        }
        if (values.empty()) throw ValidationError("rsd needs --values, --matrix or --kpis");
        const double r = helpdesk::rsd(values);
        if (o_.format == "text") {
            emit("rsd of " + source + ": " + format_fixed(r, 4) + "\n");
        } else {
            emit(dump(Json{{"source", source}, {"n", values.size()}, {"rsd", r}}));
        }
    }

    void advisor_graph() {
        const auto m = !o_.matrix.empty() ? matrix_from_json(read_json_file(o_.matrix)) : compute_matrix(Metric::avg_cost);
        const auto g = build_graph(m, o_.tie_epsilon);
        const auto l = levels(g);
        if (o_.format == "text") {
            std::ostringstream os;
            for (std::size_t i = 0; i < g.agents.size(); ++i) {
                os << g.agents[i] << " (" << to_string(l.levels[i]) << "):";
                const auto ranked = advisors_of(g, g.agents[i]);
                if (ranked.empty()) os << " none";
                for (const auto& a : ranked) os << ' ' << a.advisor << '(' << format_fixed(a.weight, 2) << ')';
                os << '\n';
            }
            emit(os.str());
        } else {
            emit(dump(to_json(g, l)));
        }
        if (!o_.dot.empty()) write_file(o_.dot, export_dot(g, l));
    }

    void cv() {
        const auto seed = require_seed("cv");
        const auto d = apply_drops(load_data());
        const double acc = cross_validate(d, induction(), o_.folds, seed);
        if (o_.format == "text") {
            emit(std::to_string(o_.folds) + "-fold cross-validation accuracy: " + format_fixed(acc, 4) + "\n");
        } else {
            Json j{{"folds", o_.folds}, {"seed", seed}, {"dropped", o_.drop_attrs}, {"records", d.size()}, {"accuracy", acc}};
            emit(dump(j));
        }
    }

    void report() {
        Json meta;
        CrossTestMatrix acc;
        CrossTestMatrix cost;
        if (!o_.accuracy_matrix.empty() || !o_.cost_matrix.empty()) {
            if (o_.accuracy_matrix.empty() || o_.cost_matrix.empty()) {
                throw ValidationError("--accuracy-matrix and --cost-matrix must be given together");
            }
            acc = matrix_from_json(read_json_file(o_.accuracy_matrix));
            cost = matrix_from_json(read_json_file(o_.cost_matrix));
            meta["source"] = "matrices";
        } else {
            acc = compute_matrix(Metric::accuracy);
            cost = compute_matrix(Metric::avg_cost);
            meta["source"] = o_.data.empty() ? "generated" : "data";
            meta["induction"] = {{"min_instances", o_.min_instances},
                                 {"confidence_factor", o_.confidence},
                                 {"pruning", !o_.no_prune}};
            meta["dropped_attributes"] = o_.drop_attrs;
            if (o_.data.empty()) {
                const auto g = generator_config();
                meta["generator"] = {{"agents", g.agent_count},
                                     {"per_agent", g.records_per_agent},
                                     {"seed", g.seed},
                                     {"noise", g.noise_rate},
                                     {"divergence", g.policy_divergence}};
            }
        }
        std::vector<KpiRecord> kpis;
        if (!o_.kpis.empty()) kpis = kpis_from_json(read_json_file(o_.kpis));
        meta["tie_epsilon"] = o_.tie_epsilon;
        auto r = build_report(std::move(acc), std::move(cost), std::move(kpis), o_.tie_epsilon);
        r.metadata = std::move(meta);
        for (const auto& w : r.warnings) err_ << "warning: " << w << '\n';

        const auto json = dump(to_json(r));
        if (o_.format == "text") {
            std::ostringstream os;
            write_text(os, r);
            out_ << os.str();
            if (!o_.out.empty()) write_file(o_.out, json);
        } else {
            emit(json);
        }
        if (!o_.dot.empty()) write_file(o_.dot, export_dot(r.graph, r.levels));
    }

private:
    static std::string format_fixed(double v, int decimals) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
        return buf;
    }

    std::uint64_t require_seed(const std::string& what) const {
        if (!o_.seed) throw ValidationError(what + " needs --seed");
        return *o_.seed;
    }

    GeneratorConfig generator_config() const {
        GeneratorConfig c;
        c.agent_count = o_.agents;
        c.records_per_agent = o_.per_agent;
        c.seed = require_seed("data generation");
        c.noise_rate = o_.noise;
        c.policy_divergence = o_.divergence;
        helpdesk::validate(c);
        return c;
    }

    InductionParams induction() const {
        InductionParams p{o_.min_instances, o_.confidence, !o_.no_prune};
        helpdesk::validate(p);
        return p;
    }

    CostModel cost_model() const {
        if (!o_.opex_os || !o_.cost_n) {
            err_ << "cost model: opex_os=" << o_.opex_os.value_or(CostModel::kDefaultOpexOs)
                 << " n=" << o_.cost_n.value_or(CostModel::kDefaultDivisor) << (o_.opex_os || o_.cost_n ? "" : " (defaults)")
                 << '\n';
        }
        return CostModel(o_.opex_os.value_or(CostModel::kDefaultOpexOs), o_.cost_n.value_or(CostModel::kDefaultDivisor));
    }

    Dataset load_data() const {
        if (o_.data.empty()) return helpdesk::generate(generator_config());
        std::ifstream in(o_.data);
        if (!in) throw DataError("cannot open " + o_.data);
        return parse_dataset(in);
    }

    Dataset apply_drops(const Dataset& d) const {
        return o_.drop_attrs.empty() ? d : drop_attributes(d, o_.drop_attrs);
    }

    CrossTestMatrix compute_matrix(Metric metric) const {
        auto parts = partition_by_agent(load_data());
        if (parts.size() < 2) throw DataError("cross-test needs at least 2 agents in the data");
        if (!o_.drop_attrs.empty()) {
            for (auto& [agent, d] : parts) d = drop_attributes(d, o_.drop_attrs);
        }
        std::optional<CostModel> cm;
        if (metric == Metric::avg_cost) cm = cost_model();
        return helpdesk::cross_test(parts, induction(), metric, cm);
    }

    void emit_matrix(const CrossTestMatrix& m) {
        const auto json = dump(to_json(m));
        if (o_.format == "text") {
            std::ostringstream os;
            os << (m.metric == Metric::accuracy ? "Correctly classified instances" : "Average misclassification cost");
            os << " (rows: trained on, columns: tested on)\n";
            write_matrix_table(os, m);
            out_ << os.str();
            if (!o_.out.empty()) write_file(o_.out, json);
        } else {
            emit(json);
        }
    }

    void emit(const std::string& content) {
        if (o_.out.empty()) {
            out_ << content;
        } else {
            write_file(o_.out, content);
        }
    }

    static void write_file(const std::string& path, const std::string& content) {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw DataError("cannot write " + path);
        f << content;
        if (!f) throw DataError("failed writing " + path);
    }

    const Options& o_;
    std::ostream& out_;
    std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Per-agent decision trees, cost-sensitive cross-testing and advisor flow graphs", "helpdesk"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON file of flag values; command-line flags win");
    app.require_subcommand(1, 1);
    app.fallthrough();

    Options o;
    app.add_option("--data", o.data, "Input CSV (AGENT,PRODUCT,AREA,PROFILE,SYNC,MAX,DIST,STATE)");
    app.add_option("--out", o.out, "Output file (default: standard output)");
    app.add_option("--dot", o.dot, "Write a DOT rendering to this file");
    app.add_option("--seed", o.seed, "Seed for generation and fold assignment");
    app.add_option("--agents", o.agents, "Generated agent count")->check(CLI::PositiveNumber);
    app.add_option("--per-agent", o.per_agent, "Generated records per agent")->check(CLI::PositiveNumber);
    app.add_option("--noise", o.noise, "Label noise rate")->check(CLI::Range(0.0, 1.0));
    app.add_option("--divergence", o.divergence, "Policy divergence between agents")->check(CLI::Range(0.0, 1.0));
    app.add_option("--metric", o.metric, "Cross-test metric")->check(CLI::IsMember({"accuracy", "cost", "avg_cost"}));
    app.add_option("--opex-os", o.opex_os, "On-site action cost");
    app.add_option("--cost-n", o.cost_n, "Remote cost divisor (opex_rs = opex_os / n)");
    app.add_option("--folds", o.folds, "Cross-validation folds");
    app.add_option("--drop-attrs", o.drop_attrs, "Attributes to drop before induction")->delimiter(',');
    app.add_option("--min-instances", o.min_instances, "Minimum instances per branch")->check(CLI::PositiveNumber);
    app.add_option("--confidence", o.confidence, "Pruning confidence factor")->check(CLI::Range(0.0, 1.0));
    app.add_flag("--no-prune", o.no_prune, "Disable pessimistic pruning");
    app.add_option("--format", o.format, "Standard-output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--matrix", o.matrix, "Cross-test matrix JSON input");
    app.add_option("--accuracy-matrix", o.accuracy_matrix, "Accuracy matrix JSON (report)");
    app.add_option("--cost-matrix", o.cost_matrix, "Cost matrix JSON (report)");
    app.add_option("--kpis", o.kpis, "KPI table JSON");
    app.add_option("--values", o.values, "Values for rsd")->delimiter(',');
    app.add_option("--tie-epsilon", o.tie_epsilon, "Cost gap treated as a tie")->check(CLI::NonNegativeNumber);

    auto* generate = app.add_subcommand("generate", "Write a synthetic complaint corpus as CSV");
    auto* train = app.add_subcommand("train", "Induce a tree on a dataset and print it");
    auto* cross = app.add_subcommand("cross-test", "Train per agent, test on every agent");
    auto* rsd = app.add_subcommand("rsd", "Relative standard deviation of values, a matrix diagonal or KPI costs");
    auto* graph = app.add_subcommand("advisor-graph", "Advisor flow graph from a cost cross-test");
    auto* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation accuracy");
    auto* report = app.add_subcommand("report", "Cross-tests, resolution comparison and advisor graph");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }

    Runner runner(o, out, err);
    try {
        if (generate->parsed()) runner.generate();
        else if (train->parsed()) runner.train();
        else if (cross->parsed()) runner.cross_test();
        else if (rsd->parsed()) runner.rsd();
        else if (graph->parsed()) runner.advisor_graph();
        else if (cv->parsed()) runner.cv();
        else if (report->parsed()) runner.report();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace helpdesk::cli
