// Acceptance suite: one check per release criterion, each printed as a
// single pass/fail line. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "relucov/analysis.hpp"
#include "relucov/coverage.hpp"
#include "relucov/generation.hpp"
#include "relucov/lattice.hpp"
#include "relucov/lp.hpp"
#include "relucov/network.hpp"
#include "testkit.hpp"

using namespace relucov;

namespace {

struct Criterion {
    int number;
    std::string name;
    std::function<bool(std::string&)> run;
    double budget_seconds; // 0 = no runtime gate
};

bool approx(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

// ---------------------------------------------------------------------------
// 1. Golden traces: all eight table rows of the worked example within 1e-9,
//    and the sign-change verdicts derived from them.

bool golden_traces(std::string& detail) {
    const Network net = testkit::example_net();

    struct Row {
        Vec x;
        Vec u; // layer-2 then layer-3 pre-activation values
    };
    const std::vector<Row> rows = {
        {{0.1, 0.0}, {0.4, 0.0, -0.1, 0.8, 1.2, -0.4}},
        {{0.0, -1.0}, {-1.0, 2.0, -1.0, -14.0, 12.0, 8.0}},
        {{0.0, 1.0}, {1.0, -2.0, 1.0, 3.0, -2.0, 8.0}},
        {{0.1, 0.1}, {0.5, -0.2, 0.0, 1.0, 1.5, -0.5}},
        {{0.0, -1.0}, {-1.0, 2.0, -1.0, -14.0, 12.0, 8.0}},
        {{0.1, -0.1}, {0.3, 0.2, -0.2, -0.8, 2.1, 0.5}},
        {{0.0, 1.0}, {1.0, -2.0, 1.0, 3.0, -2.0, 8.0}},
        {{0.1, 0.5}, {0.9, -1.0, 0.4, 2.2, 0.7, 2.7}},
    };
    for (const Row& row : rows) {
        const ActivationTrace t = evaluate(net, row.x);
        int idx = 0;
        for (int k = 2; k <= 3; ++k) {
            for (int i = 1; i <= 3; ++i, ++idx) {
                const double want_u = row.u[static_cast<std::size_t>(idx)];
                if (!approx(t.u(k, i), want_u, 1e-9)) {
                    detail = "u mismatch at layer " + std::to_string(k);
                    return false;
                }
                // bracketed entries: negative u comes with v = 0
                const double want_v = want_u >= 0.0 ? want_u : 0.0;
                if (!approx(t.v(k, i), want_v, 1e-9)) {
                    detail = "v mismatch at layer " + std::to_string(k);
                    return false;
                }
            }
        }
    }

    // sign-change verdicts per input pair; true = sc. The verdicts follow
    // from the tabulated u values (8 -> 0.5 at n_{3,3} of the third pair
    // keeps its sign, so that cell is no-change).
    struct PairRow {
        int a, b; // row indices
        std::vector<bool> sc_expected;
    };
    const std::vector<PairRow> pairs = {
        {0, 1, {true, false, false, true, false, true}},
        {2, 3, {false, false, false, false, true, true}},
        {4, 5, {true, false, false, false, false, false}},
        {6, 7, {false, false, false, false, true, false}},
    };
    for (const PairRow& pr : pairs) {
        const ActivationTrace t1 = evaluate(net, rows[static_cast<std::size_t>(pr.a)].x);
        const ActivationTrace t2 = evaluate(net, rows[static_cast<std::size_t>(pr.b)].x);
        int idx = 0;
        for (int k = 2; k <= 3; ++k) {
            for (int i = 1; i <= 3; ++i, ++idx) {
                const bool got = sc(Feature::single(k, i), t1, t2);
                if (got != pr.sc_expected[static_cast<std::size_t>(idx)]) {
                    detail = "sign-change mismatch at n_{" + std::to_string(k) + "," +
                             std::to_string(i) + "}";
                    return false;
                }
            }
        }
    }
    detail = "8 rows, 24 sign verdicts";
    return true;
}

// ---------------------------------------------------------------------------
// 2. Worked-example covering predicates.

bool worked_example_predicates(std::string& detail) {
    const Network net = testkit::example_net();
    const auto at = [&](double a, double b) { return evaluate(net, {a, b}); };
    const auto r = ValueFunction::RatioOrientation::first_over_second;

    bool ok = ss_covered({Feature::single(2, 1), Feature::single(3, 1)}, at(0.1, 0.0),
                         at(0.0, -1.0));
    ok = ok && vs_covered({Feature{2, {1, 2}}, Feature::single(3, 3)}, at(0.0, 1.0),
                          at(0.1, 0.1), ValueFunction::unconstrained());

    const ActivationTrace sv1 = at(0.0, -1.0);
    const ActivationTrace sv2 = at(0.1, -0.1);
    const double sv_ratio = sv1.u(3, 2) / sv2.u(3, 2);
    ok = ok && approx(sv_ratio, 5.71, 1e-2);
    ok = ok && sv_covered({Feature::single(2, 1), Feature::single(3, 2)}, sv1, sv2,
                          ValueFunction::ratio_at_least(2.0, r));

    const ActivationTrace vv1 = at(0.0, 1.0);
    const ActivationTrace vv2 = at(0.1, 0.5);
    const double vv_ratio = vv1.u(3, 3) / vv2.u(3, 3);
    ok = ok && approx(vv_ratio, 2.96, 1e-2);
    const FeaturePair vv_pair{Feature::single(2, 1), Feature::single(3, 3)};
    ok = ok && vv_covered(vv_pair, vv1, vv2, ValueFunction::unconstrained(),
                          ValueFunction::ratio_at_least(2.0, r));
    ok = ok && !vv_covered(vv_pair, vv1, vv2, ValueFunction::unconstrained(),
                           ValueFunction::ratio_at_least(5.0, r));

    std::ostringstream s;
    s.precision(3);
    s << "ratios " << sv_ratio << " and " << vv_ratio;
    detail = s.str();
    return ok;
}

// ---------------------------------------------------------------------------
// 3. LP pattern soundness over random networks.

bool lp_pattern_soundness(std::string& detail) {
    testkit::Rng rng(91001);
    long models = 0;
    long violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        testkit::RandomNetOptions opt;
        opt.min_hidden_layers = 1;
        opt.max_hidden_layers = 4;
        opt.min_width = 2;
        opt.max_width = 8;
        opt.with_domain = trial % 2 == 0;
        const Network net = testkit::random_net(rng, opt);
        const Vec x1 = testkit::random_input(rng, net.input_size());
        const ActivationTrace seed = evaluate(net, x1);
        const int depth = rng.uniform_int(2, net.layer_count() - 1);

        LpModel model = build_pattern_model(net, seed, depth);
        model = add_linf_objective(std::move(model), x1);
        const LpSolution sol = solve(model);
        if (sol.status != LpStatus::optimal) {
            ++violations; // the seed itself is always feasible
            continue;
        }
        ++models;
        const ActivationTrace check = evaluate(net, sol.input(model));
        for (int k = 2; k <= depth; ++k)
            for (int i = 1; i <= net.layer_size(k); ++i)
                if (std::fabs(check.u(k, i)) >= model.strictness &&
                    check.sign(k, i) != seed.sign(k, i))
                    ++violations;
    }
    detail = std::to_string(models) + " models, " + std::to_string(violations) + " violations";
    return violations == 0 && models == 100;
}

// ---------------------------------------------------------------------------
// 4. The analytic flip reaches its known optimum.

bool lp_minimality(std::string& detail) {
    const Network net = testkit::example_net();
    const ActivationTrace seed = evaluate(net, {0.1, 0.0});
    LpModel model = build_pattern_model(net, seed, 2, /*delta=*/0.0);
    model.remove_constraints_with_tag("sign:2:1");
    model.remove_constraints_with_tag("relu:2:1");
    model.add_constraint({{model.variable("u_2_1"), 1.0}}, LpCmp::le, 0.0, "sign:2:1");
    model.add_constraint({{model.variable("v_2_1"), 1.0}}, LpCmp::eq, 0.0, "relu:2:1");
    model = add_linf_objective(std::move(model), {0.1, 0.0});
    const LpSolution sol = solve(model);
    std::ostringstream s;
    s.precision(10);
    s << "t = " << sol.objective;
    detail = s.str();
    return sol.status == LpStatus::optimal && approx(sol.objective, 0.08, 1e-6);
}

// ---------------------------------------------------------------------------
// 5. Gradients against central finite differences.

bool gradient_correctness(std::string& detail) {
    testkit::Rng rng(91002);
    int nets_checked = 0;
    long points = 0;
    double worst = 0.0;
    while (nets_checked < 20) {
        const Network net = testkit::random_net(rng);
        bool used = false;
        for (int rep = 0; rep < 6; ++rep) {
            const Vec x = testkit::random_input(rng, net.input_size());
            const ActivationTrace t = evaluate(net, x);
            bool near_kink = false;
            for (int k = 2; k <= net.layer_count() - 1; ++k)
                for (int i = 1; i <= net.layer_size(k); ++i)
                    near_kink = near_kink || std::fabs(t.u(k, i)) < 1e-3;
            if (near_kink) continue;
            used = true;
            ++points;
            const int j = rng.uniform_int(1, net.output_size());
            const Vec analytic = gradient(net, x, GradientObjective::logit(j));
            const Vec numeric = testkit::fd_gradient(
                [&](const Vec& p) { return evaluate(net, p).u(net.layer_count(), j); }, x, 1e-5);
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double scale = std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric[i])});
                worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / scale);
            }
        }
        if (used) ++nets_checked;
    }
    std::ostringstream s;
    s.precision(3);
    s << points << " points, max rel err " << worst;
    detail = s.str();
    return worst <= 1e-4;
}

// ---------------------------------------------------------------------------
// 6. The subsumption lattice holds over the full battery.

bool lattice_battery(std::string& detail) {
    LatticeBatteryConfig config;
    config.num_nets = 50;
    config.suites_per_net = 20;
    config.seed = 20240;
    config.workers = 4;
    const LatticeBatteryResult result = run_lattice_battery(config);
    long fired = 0;
    std::string failed;
    for (const EdgeRun& run : result.runs) {
        fired += run.antecedent_fired;
        if (!run.pass)
            failed += " " + run.edge.name() + "(net " + std::to_string(run.failed_net) +
                      ", suite " + std::to_string(run.failed_suite) + ")";
    }
    detail = std::to_string(result.runs.size()) + " edges x 50 nets x 20 suites, antecedent fired " +
             std::to_string(fired) + " times";
    if (!result.all_pass) detail += "; failed:" + failed;
    return result.all_pass;
}

// ---------------------------------------------------------------------------
// 7. Pattern enumeration is complete against a large random probe, and the
//    safety metric equals a recount.

bool pattern_completeness(std::string& detail) {
    testkit::Rng rng(91003);
    long probes = 0;
    for (int trial = 0; trial < 3; ++trial) {
        testkit::RandomNetOptions opt;
        opt.min_hidden_layers = 2;
        opt.max_hidden_layers = 2;
        opt.min_width = 2;
        opt.max_width = 5;
        opt.with_domain = true;
        opt.box = 2.0;
        Network net = testkit::random_net(rng, opt);
        while (net.hidden_count() > 10) net = testkit::random_net(rng, opt);
        const PatternSet patterns = enumerate_patterns(net, 10, 1e-6, 4);

        std::set<std::vector<std::int8_t>> feasible;
        for (const auto& e : patterns.entries)
            if (e.feasible) feasible.insert(e.signs);

        std::set<std::vector<std::int8_t>> observed;
        TestSuite sample;
        for (int i = 0; i < 1000000; ++i) {
            const Vec x = testkit::random_input(rng, net.input_size(), -2.0, 2.0);
            ++probes;
            const ActivationTrace t = evaluate(net, x);
            const auto signs = hidden_sign_vector(t);
            if (!observed.contains(signs)) {
                observed.insert(signs);
                sample.add(x);
            }
        }
        for (const auto& signs : observed) {
            if (!feasible.contains(signs)) {
                detail = "a sampled pattern was not LP-feasible";
                return false;
            }
        }

        const CoverageReport report = safety_coverage(net, sample, patterns);
        long covered = 0;
        for (const auto& e : patterns.entries)
            if (e.feasible && observed.contains(e.signs)) ++covered;
        if (report.covered != covered ||
            report.metric != static_cast<double>(covered) /
                                 static_cast<double>(patterns.feasible_count())) {
            detail = "safety metric disagrees with the recount";
            return false;
        }
    }
    detail = std::to_string(probes) + " probe points over 3 networks";
    return true;
}

// ---------------------------------------------------------------------------
// 8. Coverage equals the independent double loop, exactly.

bool coverage_oracle_equivalence(std::string& detail) {
    testkit::Rng rng(91004);
    for (int trial = 0; trial < 50; ++trial) {
        testkit::RandomNetOptions opt;
        opt.min_hidden_layers = 2;
        opt.max_hidden_layers = 3;
        opt.max_width = 5;
        const Network net = testkit::random_net(rng, opt);
        const FeaturePairSet pairs = enumerate_singleton_pairs(net);
        std::vector<Vec> inputs;
        const int n = rng.uniform_int(2, 8);
        for (int i = 0; i < n; ++i) inputs.push_back(testkit::random_input(rng, net.input_size()));
        const CoverageReport report = coverage(net, pairs, TestSuite(inputs),
                                               {CoveringMethod::ss, {}, {}, nullptr});
        if (report.metric != testkit::oracle_ss_metric(net, pairs, inputs)) {
            detail = "mismatch on trial " + std::to_string(trial);
            return false;
        }
    }
    detail = "50 random cases, exact equality";
    return true;
}

// ---------------------------------------------------------------------------
// 9. Everything either engine reports found re-verifies; results are
//    deterministic under a fixed seed.

bool generation_verification(std::string& detail) {
    testkit::Rng rng(91005);
    long found = 0;
    long checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        testkit::RandomNetOptions opt;
        opt.min_hidden_layers = 2;
        opt.max_hidden_layers = 2;
        opt.max_width = 4;
        opt.with_domain = true;
        const Network net = testkit::random_net(rng, opt);
        const FeaturePairSet pairs = enumerate_singleton_pairs(net);
        std::vector<Vec> corpus;
        for (int i = 0; i < 4; ++i) corpus.push_back(testkit::random_input(rng, net.input_size()));

        for (const Engine engine : {Engine::lp, Engine::gradient}) {
            GenerationRequest request;
            request.method = CoveringMethod::ss;
            request.pair = pairs[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<int>(pairs.size()) - 1))];
            request.engine = engine;
            request.budget_steps = 60;
            request.rng_seed = static_cast<std::uint64_t>(trial);
            ++checked;
            const GenerationResult a = generate_pair(net, corpus, request);
            const GenerationResult b = generate_pair(net, corpus, request);
            if (a.status != b.status || a.x1 != b.x1 || a.x2 != b.x2) {
                detail = "nondeterministic result";
                return false;
            }
            if (a.status != GenerationResult::Status::found) continue;
            ++found;
            if (!ss_covered(request.pair, evaluate(net, a.x1), evaluate(net, a.x2))) {
                detail = "an engine result failed re-verification";
                return false;
            }
            if (!testkit::oracle_ss(net, request.pair, testkit::oracle_eval(net, a.x1),
                                    testkit::oracle_eval(net, a.x2))) {
                detail = "an engine result failed the independent oracle";
                return false;
            }
        }
    }
    detail = std::to_string(found) + " of " + std::to_string(checked) +
             " requests found, all verified, byte-stable";
    return found >= 20;
}

// ---------------------------------------------------------------------------
// 10. A model at the published scale solves within budget.

bool scale_sanity(std::string& detail) {
    testkit::Rng rng(91006);
    std::vector<int> sizes{784, 78, 62, 10};
    std::vector<Matrix> weights;
    std::vector<Vec> biases;
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
        Matrix w(sizes[k], sizes[k + 1]);
        for (int r = 0; r < w.rows(); ++r)
            for (int c = 0; c < w.cols(); ++c)
                w.at(r, c) = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.01, 0.08);
        weights.push_back(std::move(w));
        Vec b(static_cast<std::size_t>(sizes[k + 1]));
        for (double& v : b) v = rng.uniform(-0.05, 0.05);
        biases.push_back(std::move(b));
    }
    InputDomain domain;
    domain.lo.assign(784, 0.0);
    domain.hi.assign(784, 1.0);
    const Network net =
        Network::create(sizes, std::move(weights), std::move(biases), std::move(domain));

    Vec x1(784);
    for (double& v : x1) v = rng.uniform(0.0, 1.0);
    const ActivationTrace seed = evaluate(net, x1);

    LpModel model = build_pattern_model(net, seed, 3);
    const FeaturePair pair{Feature::single(2, 1), Feature::single(3, 1)};
    model = add_test_condition(std::move(model), pair, CoveringMethod::ss, seed, {}, {});
    model = add_linf_objective(std::move(model), x1);

    const auto start = std::chrono::steady_clock::now();
    const LpSolution sol = solve(model, {400000});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream s;
    s.precision(3);
    s << model.num_variables() << " vars, " << model.num_constraints() << " constraints, "
      << lp_status_name(sol.status) << " in " << secs << " s";
    detail = s.str();
    if (model.num_variables() < 1000 || model.num_constraints() < 3000) return false;
    if (secs >= 5.0) return false;
    return sol.status == LpStatus::optimal && sol.max_violation <= 1e-7;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "golden example traces", golden_traces, 1.0},
        {2, "worked-example covering predicates", worked_example_predicates, 0.0},
        {3, "lp pattern soundness on random networks", lp_pattern_soundness, 0.0},
        {4, "lp minimality spot check", lp_minimality, 0.0},
        {5, "gradients match finite differences", gradient_correctness, 0.0},
        {6, "criteria subsumption lattice", lattice_battery, 300.0},
        {7, "safety pattern enumeration completeness", pattern_completeness, 0.0},
        {8, "coverage equals the brute-force oracle", coverage_oracle_equivalence, 0.0},
        {9, "generated pairs re-verify deterministically", generation_verification, 0.0},
        {10, "published-scale lp solves in budget", scale_sanity, 5.0},
    };

    int passed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0 && secs > c.budget_seconds) {
            ok = false;
            detail += " [over budget " + std::to_string(c.budget_seconds) + " s]";
        }
        std::printf("[%s] criterion %2d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", c.number,
                    c.name.c_str(), secs, detail.empty() ? "" : " -- ", detail.c_str());
        if (ok) ++passed;
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
