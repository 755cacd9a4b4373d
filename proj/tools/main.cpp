// relucov: structural coverage, test generation and analysis for feedforward
// ReLU networks. Subcommands: eval, coverage, gen, patterns, lattice.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "relucov/analysis.hpp"
#include "relucov/coverage.hpp"
#include "relucov/errors.hpp"
#include "relucov/generation.hpp"
#include "relucov/lattice.hpp"
#include "relucov/lp.hpp"
#include "relucov/network.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace relucov;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitConfig = 3;
constexpr int kExitProperty = 4;
constexpr int kExitInternal = 5;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream out;
    out << std::hex << v;
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
}

// Shared run options, fillable from flags or a JSON config file; flags win.
struct RunConfig {
    std::string net_path;
    std::string dataset_path;
    std::string corpus_path;
    std::string reference_path;
    std::string pairs_mode = "singleton"; // singleton | topw | random | a file path
    std::string criterion = "ss";
    std::string g1_spec;
    std::string g2_spec;
    std::string engine = "lp";
    std::string out_dir = "out";
    std::string input_csv; // inline input for eval
    std::string dump_lp_path;
    int kappa = 1;
    double omega = 1.0;
    int pair_count = 100;
    int sections = 5;
    int top_m = 1;
    double oracle_b = 0.0;
    std::string oracle_p = "inf";
    double delta = 1e-6;
    double eps0 = 0.1;
    int budget = 100;
    int max_seeds = -1;
    long lp_iterations = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
    bool output_decisions = false;
    bool fraction_sections = false;
    bool uniform_init = false;
    int pattern_limit = 16;
    int lattice_nets = 50;
    int lattice_suites = 20;

    std::string config_hash; // filled after resolution
};

Json config_to_json(const RunConfig& c) {
    Json j;
    j["net"] = c.net_path;
    j["dataset"] = c.dataset_path;
    j["corpus"] = c.corpus_path;
    j["reference"] = c.reference_path;
    j["pairs"] = c.pairs_mode;
    j["criterion"] = c.criterion;
    j["g1"] = c.g1_spec;
    j["g2"] = c.g2_spec;
    j["engine"] = c.engine;
    j["kappa"] = c.kappa;
    j["omega"] = c.omega;
    j["pair_count"] = c.pair_count;
    j["sections"] = c.sections;
    j["top_m"] = c.top_m;
    j["oracle_b"] = c.oracle_b;
    j["oracle_p"] = c.oracle_p;
    j["delta"] = c.delta;
    j["eps0"] = c.eps0;
    j["budget"] = c.budget;
    j["max_seeds"] = c.max_seeds;
    j["lp_iterations"] = c.lp_iterations;
    j["seed"] = c.seed;
    // workers is execution topology, not run identity: results are
    // worker-count independent, so it stays out of the config hash
    j["output_decisions"] = c.output_decisions;
    j["fraction_sections"] = c.fraction_sections;
    j["uniform_init"] = c.uniform_init;
    j["pattern_limit"] = c.pattern_limit;
    j["lattice_nets"] = c.lattice_nets;
    j["lattice_suites"] = c.lattice_suites;
    return j;
}

void apply_config_file(RunConfig& c, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed config file: ") + e.what());
    }
    const auto str = [&](const char* key, std::string& slot) {
        if (j.contains(key)) slot = j[key].get<std::string>();
    };
    str("net", c.net_path);
    str("dataset", c.dataset_path);
    str("corpus", c.corpus_path);
    str("reference", c.reference_path);
    str("pairs", c.pairs_mode);
    str("criterion", c.criterion);
    str("g1", c.g1_spec);
    str("g2", c.g2_spec);
    str("engine", c.engine);
    str("out_dir", c.out_dir);
    str("oracle_p", c.oracle_p);
    if (j.contains("kappa")) c.kappa = j["kappa"].get<int>();
    if (j.contains("omega")) c.omega = j["omega"].get<double>();
    if (j.contains("pair_count")) c.pair_count = j["pair_count"].get<int>();
    if (j.contains("sections")) c.sections = j["sections"].get<int>();
    if (j.contains("top_m")) c.top_m = j["top_m"].get<int>();
    if (j.contains("oracle_b")) c.oracle_b = j["oracle_b"].get<double>();
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("eps0")) c.eps0 = j["eps0"].get<double>();
    if (j.contains("budget")) c.budget = j["budget"].get<int>();
    if (j.contains("max_seeds")) c.max_seeds = j["max_seeds"].get<int>();
    if (j.contains("lp_iterations")) c.lp_iterations = j["lp_iterations"].get<long>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("output_decisions")) c.output_decisions = j["output_decisions"].get<bool>();
    if (j.contains("fraction_sections")) c.fraction_sections = j["fraction_sections"].get<bool>();
    if (j.contains("uniform_init")) c.uniform_init = j["uniform_init"].get<bool>();
    if (j.contains("pattern_limit")) c.pattern_limit = j["pattern_limit"].get<int>();
    if (j.contains("lattice_nets")) c.lattice_nets = j["lattice_nets"].get<int>();
    if (j.contains("lattice_suites")) c.lattice_suites = j["lattice_suites"].get<int>();
}

Norm parse_norm(const std::string& p) {
    if (p == "1") return Norm::l1;
    if (p == "2") return Norm::l2;
    if (p == "inf") return Norm::linf;
    throw ConfigError("oracle norm must be 1, 2 or inf");
}

std::optional<ValueFunction> parse_g(const std::string& spec) {
    if (spec.empty()) return std::nullopt;
    return ValueFunction::parse(spec);
}

FeaturePairSet build_pairs(const RunConfig& c, const Network& net) {
    PairEnumOptions opts;
    opts.include_output_decisions = c.output_decisions;
    if (c.pairs_mode == "singleton") return enumerate_singleton_pairs(net, opts);
    if (c.pairs_mode == "topw") return enumerate_top_weight_pairs(net, c.kappa, opts);
    if (c.pairs_mode == "random")
        return enumerate_random_feature_pairs(net, c.omega, c.pair_count, c.seed, opts);
    std::ifstream in(c.pairs_mode);
    if (!in) throw ConfigError("pairs mode must be singleton, topw, random or a readable file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return pair_set_from_json(buf.str(), net, opts);
}

Json pair_entry_json(const PairCoverageEntry& e) {
    Json j;
    j["k"] = e.pair.condition.layer;
    j["condition"] = e.pair.condition.nodes;
    j["decision"] = e.pair.decision.nodes;
    j["covered"] = e.covered;
    if (e.covered) {
        j["witness"] = Json::array({e.witness1, e.witness2});
        j["linf_distance"] = e.linf_distance;
    }
    if (e.adversarial.has_value()) j["adversarial"] = *e.adversarial;
    return j;
}

Json report_to_json(const CoverageReport& report, const RunConfig& c) {
    Json j;
    j["config_hash"] = c.config_hash;
    j["seed"] = c.seed;
    j["criterion"] = report.criterion;
    j["params"] = report.params;
    j["covered"] = report.covered;
    j["total"] = report.total;
    j["metric"] = report.metric;
    if (report.ae_fraction.has_value()) j["ae_fraction"] = *report.ae_fraction;
    else j["ae_fraction"] = nullptr;
    Json layers = Json::array();
    for (const auto& lb : report.per_layer) {
        Json l;
        l["layer"] = lb.layer;
        l["covered"] = lb.covered;
        l["total"] = lb.total;
        layers.push_back(std::move(l));
    }
    j["per_layer"] = std::move(layers);
    Json entries = Json::array();
    for (const auto& e : report.pair_entries) entries.push_back(pair_entry_json(e));
    for (const auto& e : report.node_entries) {
        Json node;
        node["layer"] = e.layer;
        node["node"] = e.node;
        node["covered"] = e.covered;
        if (e.witness >= 0) node["witness"] = e.witness;
        if (e.excluded) node["excluded"] = true;
        entries.push_back(std::move(node));
    }
    j["entries"] = std::move(entries);
    return j;
}

std::string join_ints(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + std::to_string(v[i]);
    return out;
}

std::string report_to_csv(const CoverageReport& report, const RunConfig& c) {
    std::ostringstream out;
    out << "# config_hash=" << c.config_hash << " seed=" << c.seed << "\n";
    out.precision(17);
    if (!report.pair_entries.empty() || report.node_entries.empty()) {
        out << "decision_layer,condition,decision,covered,witness_x1,witness_x2,"
               "linf_distance,adversarial\n";
        for (const auto& e : report.pair_entries) {
            out << e.pair.decision.layer << "," << join_ints(e.pair.condition.nodes) << ","
                << join_ints(e.pair.decision.nodes) << "," << (e.covered ? 1 : 0) << ",";
            if (e.covered) out << e.witness1 << "," << e.witness2 << "," << e.linf_distance;
            else out << ",,";
            out << ",";
            if (e.adversarial.has_value()) out << (*e.adversarial ? 1 : 0);
            out << "\n";
        }
    } else {
        out << "layer,node,covered,witness,excluded\n";
        for (const auto& e : report.node_entries) {
            out << e.layer << "," << e.node << "," << (e.covered ? 1 : 0) << ",";
            if (e.witness >= 0) out << e.witness;
            out << "," << (e.excluded ? 1 : 0) << "\n";
        }
    }
    return out.str();
}

void finalize_config(RunConfig& c, const std::string& command) {
    Json j = config_to_json(c);
    j["command"] = command;
    c.config_hash = hex64(fnv1a(j.dump()));
}

// ---------------------------------------------------------------- eval ----

int cmd_eval(RunConfig& c) {
    finalize_config(c, "eval");
    const Network net = load_network_file(c.net_path);

    std::vector<Vec> inputs;
    if (!c.input_csv.empty()) {
        Vec x;
        std::istringstream row(c.input_csv);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                x.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InputError("cannot parse input value '" + cell + "'");
            }
        }
        inputs.push_back(std::move(x));
    } else if (!c.dataset_path.empty()) {
        inputs = load_dataset_file(c.dataset_path);
    } else {
        throw ConfigError("eval needs --input or --dataset");
    }

    std::cout.precision(12);
    for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
        const ActivationTrace t = evaluate(net, inputs[idx]);
        std::cout << "# input " << idx << "\n";
        std::cout << "x =";
        for (double v : t.input) std::cout << " " << v;
        std::cout << "\n";
        for (int k = 2; k <= net.layer_count() - 1; ++k) {
            std::cout << "layer " << k << ": u =";
            for (int i = 1; i <= net.layer_size(k); ++i) std::cout << " " << t.u(k, i);
            std::cout << "  v =";
            for (int i = 1; i <= net.layer_size(k); ++i) std::cout << " " << t.v(k, i);
            std::cout << "  sign =";
            for (int i = 1; i <= net.layer_size(k); ++i)
                std::cout << " " << (t.sign(k, i) > 0 ? "+" : "-");
            std::cout << "\n";
        }
        std::cout << "output: u =";
        for (double v : t.output) std::cout << " " << v;
        std::cout << "\nlabel = " << t.label << "\n";
    }
    std::cout << "eval status=ok inputs=" << inputs.size() << " config_hash=" << c.config_hash
              << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ coverage ----

int cmd_coverage(RunConfig& c) {
    finalize_config(c, "coverage");

    // validate the whole configuration before doing any work
    std::vector<std::string> errors;
    if (c.net_path.empty()) errors.push_back("--net is required");
    if (c.dataset_path.empty()) errors.push_back("--dataset is required");
    const bool pair_criterion = c.criterion == "ss" || c.criterion == "vs" ||
                                c.criterion == "sv" || c.criterion == "vv";
    const bool node_criterion = c.criterion == "nc" || c.criterion == "nbc" ||
                                c.criterion == "tnc" || c.criterion == "mnc";
    if (!pair_criterion && !node_criterion && c.criterion != "safety")
        errors.push_back("unknown criterion '" + c.criterion + "'");
    if ((c.criterion == "nbc" || c.criterion == "mnc") && c.reference_path.empty())
        errors.push_back(c.criterion + " needs --reference for the recorded bounds");
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return kExitConfig;
    }

    const Network net = load_network_file(c.net_path);
    const TestSuite suite = TestSuite::load(c.dataset_path);

    std::optional<NeuronBounds> bounds;
    if (!c.reference_path.empty())
        bounds = compute_bounds(net, TestSuite::load(c.reference_path));

    CoverageReport report;
    if (pair_criterion) {
        const FeaturePairSet pairs = build_pairs(c, net);
        CoverageCriterion criterion;
        criterion.method = parse_method(c.criterion);
        criterion.g1 = parse_g(c.g1_spec);
        criterion.g2 = parse_g(c.g2_spec);
        criterion.bounds = bounds ? &*bounds : nullptr;
        criterion.validate();
        report = coverage(net, pairs, suite, criterion, c.workers);
        if (c.oracle_b > 0.0) {
            const OracleConfig oracle{parse_norm(c.oracle_p), c.oracle_b};
            const AdversarialStats stats = adversarial_stats(net, report, suite, oracle);
            write_file(c.out_dir + "/curve.csv", "# config_hash=" + c.config_hash + " seed=" + std::to_string(c.seed) + "\n" + curve_to_csv(stats));
        }
    } else if (c.criterion == "nc") {
        report = neuron_coverage(net, suite);
    } else if (c.criterion == "nbc") {
        report = neuron_boundary_coverage(net, suite, *bounds);
    } else if (c.criterion == "tnc") {
        report = top_m_coverage(net, suite, c.top_m);
    } else if (c.criterion == "mnc") {
        report = multisection_coverage(net, suite, *bounds, c.sections, c.fraction_sections);
    } else { // safety
        const PatternSet patterns = enumerate_patterns(net, c.pattern_limit, c.delta, c.workers);
        report = safety_coverage(net, suite, patterns);
    }

    write_file(c.out_dir + "/report.json", report_to_json(report, c).dump(2) + "\n");
    write_file(c.out_dir + "/report.csv", report_to_csv(report, c));
    std::cout << "coverage criterion=" << c.criterion << " metric=" << report.metric
              << " covered=" << report.covered << " total=" << report.total << " ae_f="
              << (report.ae_fraction ? std::to_string(*report.ae_fraction) : std::string("n/a"))
              << " config_hash=" << c.config_hash << "\n";
    return kExitOk;
}

// ----------------------------------------------------------------- gen ----

int cmd_gen(RunConfig& c) {
    finalize_config(c, "gen");
    std::vector<std::string> errors;
    if (c.net_path.empty()) errors.push_back("--net is required");
    if (c.corpus_path.empty()) errors.push_back("--corpus is required");
    if (c.criterion != "ss" && c.criterion != "vs" && c.criterion != "sv" && c.criterion != "vv")
        errors.push_back("gen needs a pair criterion (ss, vs, sv, vv)");
    if (c.budget < 1) errors.push_back("--budget must be >= 1");
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return kExitConfig;
    }

    const Network net = load_network_file(c.net_path);
    const std::vector<Vec> corpus = load_dataset_file(c.corpus_path);
    const FeaturePairSet pairs = build_pairs(c, net);

    std::optional<NeuronBounds> bounds;
    if (!c.reference_path.empty())
        bounds = compute_bounds(net, TestSuite::load(c.reference_path));

    CoverageCriterion criterion;
    criterion.method = parse_method(c.criterion);
    criterion.g1 = parse_g(c.g1_spec);
    criterion.g2 = parse_g(c.g2_spec);
    criterion.bounds = bounds ? &*bounds : nullptr;
    criterion.validate();

    if (!c.dump_lp_path.empty() && !pairs.empty() && !corpus.empty() &&
        parse_engine(c.engine) == Engine::lp) {
        const ActivationTrace seed = evaluate(net, corpus.front());
        LpModel model = build_pattern_model(net, seed, pairs[0].decision.layer, c.delta);
        model = add_test_condition(std::move(model), pairs[0], criterion.method, seed,
                                   criterion.g1, criterion.g2, criterion.bounds);
        model = add_linf_objective(std::move(model), corpus.front());
        write_file(c.dump_lp_path, model.dump());
    }

    SuiteGenConfig config;
    config.engine = parse_engine(c.engine);
    config.budget_steps = c.budget;
    config.max_seeds = c.max_seeds;
    config.eps0 = c.eps0;
    config.delta = c.delta;
    config.lp_max_iterations = c.lp_iterations;
    config.rng_seed = c.seed;
    config.init = c.uniform_init ? GenerationRequest::Init::uniform
                                 : GenerationRequest::Init::fgsm;
    config.workers = c.workers;

    SuiteGenResult result = generate_suite(net, pairs, criterion, corpus, config);

    if (c.oracle_b > 0.0) {
        const OracleConfig oracle{parse_norm(c.oracle_p), c.oracle_b};
        const AdversarialStats stats = adversarial_stats(net, result.report, result.suite, oracle);
        write_file(c.out_dir + "/curve.csv", "# config_hash=" + c.config_hash + " seed=" + std::to_string(c.seed) + "\n" + curve_to_csv(stats));
    }

    Json suite_json;
    suite_json["config_hash"] = c.config_hash;
    suite_json["seed"] = c.seed;
    suite_json["inputs"] = Json::parse(dataset_to_json(result.suite.inputs()));
    write_file(c.out_dir + "/suite.json", suite_json.dump(2) + "\n");

    Json prov = Json::array();
    long uncovered = 0;
    for (const auto& p : result.provenance) {
        Json e;
        e["pair_index"] = p.pair_index;
        e["k"] = p.pair.condition.layer;
        e["condition"] = p.pair.condition.nodes;
        e["decision"] = p.pair.decision.nodes;
        switch (p.status) {
        case ProvenanceEntry::Status::covered_by_suite: e["status"] = "covered_by_suite"; break;
        case ProvenanceEntry::Status::corpus: e["status"] = "corpus"; break;
        case ProvenanceEntry::Status::found: e["status"] = "found"; break;
        case ProvenanceEntry::Status::uncovered:
            e["status"] = "uncovered";
            ++uncovered;
            break;
        }
        if (p.status == ProvenanceEntry::Status::found) {
            e["engine"] = p.engine;
            e["distance"] = p.distance;
            e["steps"] = p.steps;
            e["seed_index"] = p.seed_index;
        }
        e["appended"] = p.appended;
        prov.push_back(std::move(e));
    }
    Json prov_doc;
    prov_doc["config_hash"] = c.config_hash;
    prov_doc["seed"] = c.seed;
    prov_doc["pairs"] = std::move(prov);
    write_file(c.out_dir + "/provenance.json", prov_doc.dump(2) + "\n");
    write_file(c.out_dir + "/report.json", report_to_json(result.report, c).dump(2) + "\n");
    write_file(c.out_dir + "/report.csv", report_to_csv(result.report, c));

    std::cout << "gen criterion=" << c.criterion << " engine=" << c.engine
              << " metric=" << result.report.metric << " covered=" << result.report.covered
              << " total=" << result.report.total << " uncovered=" << uncovered
              << " suite_size=" << result.suite.size() << " ae_f="
              << (result.report.ae_fraction ? std::to_string(*result.report.ae_fraction)
                                            : std::string("n/a"))
              << " config_hash=" << c.config_hash << "\n";
    return kExitOk;
}

// ------------------------------------------------------------ patterns ----

int cmd_patterns(RunConfig& c) {
    finalize_config(c, "patterns");
    const Network net = load_network_file(c.net_path);
    const PatternSet patterns = enumerate_patterns(net, c.pattern_limit, c.delta, c.workers);

    Json doc;
    doc["config_hash"] = c.config_hash;
    doc["seed"] = c.seed;
    doc["hidden_nodes"] = patterns.hidden_count;
    doc["feasible"] = patterns.feasible_count();
    doc["total"] = static_cast<long>(patterns.entries.size());
    Json list = Json::array();
    for (const auto& entry : patterns.entries) {
        Json e;
        std::string signs;
        for (std::int8_t s : entry.signs) signs += s > 0 ? '+' : '-';
        e["signs"] = signs;
        e["feasible"] = entry.feasible;
        if (entry.witness) e["witness"] = *entry.witness;
        list.push_back(std::move(e));
    }
    doc["patterns"] = std::move(list);
    write_file(c.out_dir + "/patterns.json", doc.dump(2) + "\n");

    if (!c.dataset_path.empty()) {
        const TestSuite suite = TestSuite::load(c.dataset_path);
        const CoverageReport report = safety_coverage(net, suite, patterns);
        write_file(c.out_dir + "/report.json", report_to_json(report, c).dump(2) + "\n");
        std::cout << "patterns status=ok hidden=" << patterns.hidden_count
                  << " feasible=" << patterns.feasible_count()
                  << " safety_metric=" << report.metric << " config_hash=" << c.config_hash
                  << "\n";
    } else {
        std::cout << "patterns status=ok hidden=" << patterns.hidden_count
                  << " feasible=" << patterns.feasible_count()
                  << " total=" << patterns.entries.size() << " config_hash=" << c.config_hash
                  << "\n";
    }
    return kExitOk;
}

// ------------------------------------------------------------- lattice ----

int cmd_lattice(RunConfig& c) {
    finalize_config(c, "lattice");
    if (c.lattice_nets < 1 || c.lattice_suites < 1)
        throw ConfigError("--nets and --suites must be >= 1");
    // a single section is filled by v = 0 and cannot witness activation
    if (c.sections < 2) c.sections = 3;
    LatticeBatteryConfig config;
    config.num_nets = c.lattice_nets;
    config.suites_per_net = c.lattice_suites;
    config.seed = c.seed;
    config.sections = std::min(c.sections, 8);
    config.top_m = std::max(1, std::min(c.top_m, 2));
    config.pattern_limit = std::min(c.pattern_limit, 12);
    config.delta = c.delta;
    config.workers = c.workers;

    const auto start = std::chrono::steady_clock::now();
    const LatticeBatteryResult result = run_lattice_battery(config);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json doc;
    doc["config_hash"] = c.config_hash;
    doc["seed"] = result.seed;
    doc["nets"] = config.num_nets;
    doc["suites_per_net"] = config.suites_per_net;
    doc["all_pass"] = result.all_pass;
    doc["runtime_seconds"] = secs;
    Json edges = Json::array();
    for (const EdgeRun& run : result.runs) {
        Json e;
        e["edge"] = run.edge.name();
        e["pass"] = run.pass;
        e["suites_checked"] = run.suites_checked;
        e["antecedent_fired"] = run.antecedent_fired;
        if (!run.pass) {
            e["failed_net"] = run.failed_net;
            e["failed_suite"] = run.failed_suite;
            e["weaker_metric"] = run.weaker_metric;
            e["stronger_metric"] = run.stronger_metric;
        }
        edges.push_back(std::move(e));
        std::cout << "lattice edge=" << run.edge.name() << " pass=" << (run.pass ? 1 : 0)
                  << " suites=" << run.suites_checked << " fired=" << run.antecedent_fired
                  << "\n";
    }
    doc["edges"] = std::move(edges);
    write_file(c.out_dir + "/lattice.json", doc.dump(2) + "\n");
    std::cout << "lattice all_pass=" << (result.all_pass ? 1 : 0) << " nets=" << config.num_nets
              << " runtime_s=" << secs << " config_hash=" << c.config_hash << "\n";
    return result.all_pass ? kExitOk : kExitProperty;
}

void add_common_flags(CLI::App* app, RunConfig& c, std::string& config_file) {
    app->add_option("--config", config_file, "JSON config file; flags override its values");
    app->add_option("--net", c.net_path, "network file (JSON)");
    app->add_option("--seed", c.seed, "run seed");
    app->add_option("--workers", c.workers, "worker threads (1 = serial)");
    app->add_option("--out-dir", c.out_dir, "output directory");
    app->add_option("--delta", c.delta, "LP strictness for deactivated nodes");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"structural coverage testing for feedforward ReLU networks"};
    app.require_subcommand(1);

    RunConfig c;
    std::string config_file;

    CLI::App* eval = app.add_subcommand("eval", "evaluate inputs and print traces");
    add_common_flags(eval, c, config_file);
    eval->add_option("--input", c.input_csv, "one input vector, comma separated");
    eval->add_option("--dataset", c.dataset_path, "dataset file (JSON or CSV)");

    CLI::App* cov = app.add_subcommand("coverage", "measure a criterion over a test suite");
    add_common_flags(cov, c, config_file);
    cov->add_option("--dataset", c.dataset_path, "test suite file");
    cov->add_option("--reference", c.reference_path, "reference dataset for recorded bounds");
    cov->add_option("--criterion", c.criterion, "ss|vs|sv|vv|nc|nbc|tnc|mnc|safety");
    cov->add_option("--pairs", c.pairs_mode, "singleton|topw|random|<pairs.json>");
    cov->add_option("--kappa", c.kappa, "top-weight pairs per decision node");
    cov->add_option("--omega", c.omega, "condition feature size fraction");
    cov->add_option("--pair-count", c.pair_count, "number of random feature pairs");
    cov->add_option("--g1", c.g1_spec, "condition value function, e.g. ratio_at_least:sigma=2");
    cov->add_option("--g2", c.g2_spec, "decision value function");
    cov->add_option("--sections", c.sections, "multisection m");
    cov->add_option("--top-m", c.top_m, "top-m rank bound");
    cov->add_option("--oracle-b", c.oracle_b, "adversarial closeness bound (enables AE stats)");
    cov->add_option("--oracle-p", c.oracle_p, "adversarial norm: 1|2|inf");
    cov->add_option("--pattern-limit", c.pattern_limit, "safety enumeration limit");
    cov->add_flag("--output-decisions", c.output_decisions, "add output-layer decisions");
    cov->add_flag("--fraction-sections", c.fraction_sections,
                  "report multisection as filled sections / all sections");

    CLI::App* gen = app.add_subcommand("gen", "generate a covering test suite");
    add_common_flags(gen, c, config_file);
    gen->add_option("--corpus", c.corpus_path, "seed corpus (dataset file)");
    gen->add_option("--reference", c.reference_path, "reference dataset for recorded bounds");
    gen->add_option("--criterion", c.criterion, "ss|vs|sv|vv");
    gen->add_option("--pairs", c.pairs_mode, "singleton|topw|random|<pairs.json>");
    gen->add_option("--kappa", c.kappa, "top-weight pairs per decision node");
    gen->add_option("--omega", c.omega, "condition feature size fraction");
    gen->add_option("--pair-count", c.pair_count, "number of random feature pairs");
    gen->add_option("--g1", c.g1_spec, "condition value function");
    gen->add_option("--g2", c.g2_spec, "decision value function");
    gen->add_option("--engine", c.engine, "lp|gradient");
    gen->add_option("--budget", c.budget, "gradient steps per seed");
    gen->add_option("--max-seeds", c.max_seeds, "corpus seeds per pair (-1: all)");
    gen->add_option("--eps0", c.eps0, "FGSM step and epsilon ceiling");
    gen->add_option("--lp-iterations", c.lp_iterations, "LP pivot limit");
    gen->add_option("--oracle-b", c.oracle_b, "adversarial closeness bound");
    gen->add_option("--oracle-p", c.oracle_p, "adversarial norm: 1|2|inf");
    gen->add_flag("--output-decisions", c.output_decisions, "add output-layer decisions");
    gen->add_flag("--uniform-init", c.uniform_init, "sample x2 uniformly instead of FGSM");
    gen->add_option("--dump-lp", c.dump_lp_path, "write the first pair's LP model to a file");

    CLI::App* pat = app.add_subcommand("patterns", "enumerate feasible activation patterns");
    add_common_flags(pat, c, config_file);
    pat->add_option("--dataset", c.dataset_path, "optional suite for safety coverage");
    pat->add_option("--pattern-limit", c.pattern_limit, "max hidden nodes");

    CLI::App* lat = app.add_subcommand("lattice", "verify the criteria subsumption lattice");
    add_common_flags(lat, c, config_file);
    lat->add_option("--nets", c.lattice_nets, "random networks in the battery");
    lat->add_option("--suites", c.lattice_suites, "suites per network and edge");
    lat->add_option("--sections", c.sections, "multisection m for the mn edges");
    lat->add_option("--top-m", c.top_m, "m for the tn edges");
    lat->add_option("--pattern-limit", c.pattern_limit, "hidden-node cap for ss<=s");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!config_file.empty()) {
            // file values fill every field the flags left at its default
            const RunConfig flags = c; // parsed command-line values
            RunConfig merged;
            apply_config_file(merged, config_file);
            const RunConfig defaults;
            const auto pick = [&](auto RunConfig::* field) {
                if (flags.*field != defaults.*field) merged.*field = flags.*field;
            };
            pick(&RunConfig::net_path);
            pick(&RunConfig::dataset_path);
            pick(&RunConfig::corpus_path);
            pick(&RunConfig::reference_path);
            pick(&RunConfig::pairs_mode);
            pick(&RunConfig::criterion);
            pick(&RunConfig::g1_spec);
            pick(&RunConfig::g2_spec);
            pick(&RunConfig::engine);
            pick(&RunConfig::out_dir);
            pick(&RunConfig::input_csv);
            pick(&RunConfig::dump_lp_path);
            pick(&RunConfig::oracle_p);
            pick(&RunConfig::kappa);
            pick(&RunConfig::omega);
            pick(&RunConfig::pair_count);
            pick(&RunConfig::sections);
            pick(&RunConfig::top_m);
            pick(&RunConfig::oracle_b);
            pick(&RunConfig::delta);
            pick(&RunConfig::eps0);
            pick(&RunConfig::budget);
            pick(&RunConfig::max_seeds);
            pick(&RunConfig::lp_iterations);
            pick(&RunConfig::seed);
            pick(&RunConfig::workers);
            pick(&RunConfig::output_decisions);
            pick(&RunConfig::fraction_sections);
            pick(&RunConfig::uniform_init);
            pick(&RunConfig::pattern_limit);
            pick(&RunConfig::lattice_nets);
            pick(&RunConfig::lattice_suites);
            c = merged;
        }

        if (eval->parsed()) return cmd_eval(c);
        if (cov->parsed()) return cmd_coverage(c);
        if (gen->parsed()) return cmd_gen(c);
        if (pat->parsed()) return cmd_patterns(c);
        if (lat->parsed()) return cmd_lattice(c);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
