#include "relucov/generation.hpp"

#include <algorithm>
#include <cmath>

#include "relucov/errors.hpp"
#include "relucov/parallel.hpp"
#include "relucov/rng.hpp"

namespace relucov {

std::string engine_name(Engine e) { return e == Engine::lp ? "lp" : "gradient"; }

Engine parse_engine(const std::string& name) {
    if (name == "lp") return Engine::lp;
    if (name == "gradient") return Engine::gradient;
    throw ConfigError("unknown engine '" + name + "'");
}

void GenerationRequest::validate() const {
    criterion().validate();
    if (budget_steps < 1) throw ConfigError("generation budget must be >= 1");
    if (!(eps0 > 0.0)) throw ConfigError("eps0 must be > 0");
    if (engine == Engine::lp) {
        if (g1 && !g1->lp_linearizable())
            throw ConfigError("value function '" + g1->describe() +
                              "' requires the gradient engine");
        if (g2 && !g2->lp_linearizable())
            throw ConfigError("value function '" + g2->describe() +
                              "' requires the gradient engine");
    }
}

bool widened_predicate(CoveringMethod, const FeaturePair& pair, const ActivationTrace& t1,
                       const ActivationTrace& t2) {
    // every clause on the pair's own features is dropped, for all methods
    return nsc_layer_except(pair.condition.layer, pair.condition.nodes, t1, t2);
}

GenerationResult generate_lp(const Network& net, const std::vector<Vec>& corpus,
                             const GenerationRequest& request) {
    request.validate();
    const CoverageCriterion criterion = request.criterion();
    GenerationResult result;

    const int seeds = request.max_seeds < 0
                          ? static_cast<int>(corpus.size())
                          : std::min<int>(request.max_seeds, static_cast<int>(corpus.size()));
    for (int s = 0; s < seeds; ++s) {
        const Vec& x1 = corpus[static_cast<std::size_t>(s)];
        const ActivationTrace seed = evaluate(net, x1);
        LpModel model =
            build_pattern_model(net, seed, request.pair.decision.layer, request.delta);
        model = add_test_condition(std::move(model), request.pair, request.method, seed,
                                   request.g1, request.g2, request.bounds);
        model = add_linf_objective(std::move(model), x1);
        const LpSolution sol = solve(model, {request.lp_max_iterations});
        result.last_lp_status = sol.status;
        if (sol.status != LpStatus::optimal) continue;
        Vec x2 = sol.input(model);
        const ActivationTrace t2 = evaluate(net, x2);
        // never trust the engine: the covering predicate decides
        if (!criterion.evaluate(request.pair, seed, t2)) continue;
        result.status = GenerationResult::Status::found;
        result.x1 = x1;
        result.x2 = std::move(x2);
        result.distance = sol.objective;
        result.steps = static_cast<int>(sol.iterations);
        result.seed_index = s;
        return result;
    }
    return result;
}

namespace {

Vec clamp_to_domain(const Network& net, Vec x) {
    if (!net.input_domain()) return x;
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] = net.input_domain()->clamp(x[i], static_cast<int>(i));
    return x;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; }

} // namespace

GenerationResult generate_gradient(const Network& net, const std::vector<Vec>& corpus,
                                   const GenerationRequest& request) {
    request.validate();
    const CoverageCriterion criterion = request.criterion();
    const GradientObjective objective =
        request.grad_objective.value_or(GradientObjective::feature_sum(request.pair.decision));
    GenerationResult result;

    const int seeds = request.max_seeds < 0
                          ? static_cast<int>(corpus.size())
                          : std::min<int>(request.max_seeds, static_cast<int>(corpus.size()));
    for (int s = 0; s < seeds; ++s) {
        const Vec& x1 = corpus[static_cast<std::size_t>(s)];
        const ActivationTrace t1 = evaluate(net, x1);

        Vec x2 = x1;
        if (request.init == GenerationRequest::Init::fgsm) {
            const Vec g0 = gradient(net, x1, objective);
            for (std::size_t i = 0; i < x2.size(); ++i) x2[i] += request.eps0 * sign_of(g0[i]);
        } else {
            Rng rng = Rng(request.rng_seed).fork(static_cast<std::uint64_t>(s));
            for (double& xi : x2) xi += rng.uniform(-request.eps0, request.eps0);
        }
        x2 = clamp_to_domain(net, std::move(x2));

        double eps = request.eps0;
        int streak = 0;
        for (int step = 1; step <= request.budget_steps; ++step) {
            const ActivationTrace t2 = evaluate(net, x2);
            if (criterion.evaluate(request.pair, t1, t2)) {
                result.status = GenerationResult::Status::found;
                result.x1 = x1;
                result.x2 = x2;
                result.distance = linf_distance(x1, x2);
                result.steps = step;
                result.seed_index = s;
                return result;
            }
            // halve epsilon while the widened condition is broken, restore it
            // toward eps0 after two consecutive healthy steps
            const bool widened_ok = widened_predicate(request.method, request.pair, t1, t2);
            if (widened_ok) {
                if (++streak >= 2) eps = std::min(eps * 2.0, request.eps0);
            } else {
                streak = 0;
                eps /= 2.0;
            }
            const Vec grad = gradient(net, x2, objective);
            const double direction = widened_ok ? 1.0 : -1.0;
            for (std::size_t i = 0; i < x2.size(); ++i) x2[i] += direction * eps * grad[i];
            x2 = clamp_to_domain(net, std::move(x2));
        }
    }
    return result;
}

GenerationResult generate_pair(const Network& net, const std::vector<Vec>& corpus,
                               const GenerationRequest& request) {
    return request.engine == Engine::lp ? generate_lp(net, corpus, request)
                                        : generate_gradient(net, corpus, request);
}

SuiteGenResult generate_suite(const Network& net, const FeaturePairSet& pairs,
                              const CoverageCriterion& criterion, const std::vector<Vec>& corpus,
                              const SuiteGenConfig& config) {
    if (pairs.empty()) throw ConfigError("empty feature pair set");
    criterion.validate();

    // per-pair tasks are pure functions of (net, corpus, pair); the shared
    // suite is only consulted at merge time, in pair order
    struct TaskResult {
        bool corpus_hit = false;
        int corpus_i1 = -1;
        int corpus_i2 = -1;
        GenerationResult engine;
    };
    std::vector<TaskResult> results(pairs.size());

    std::vector<ActivationTrace> corpus_traces;
    corpus_traces.reserve(corpus.size());
    for (const Vec& x : corpus) corpus_traces.push_back(evaluate(net, x));

    parallel_for(static_cast<int>(pairs.size()), config.workers, [&](int pi) {
        const FeaturePair& pair = pairs[static_cast<std::size_t>(pi)];
        TaskResult task;
        for (std::size_t i1 = 0; i1 < corpus.size() && !task.corpus_hit; ++i1) {
            for (std::size_t i2 = 0; i2 < corpus.size(); ++i2) {
                if (i1 == i2) continue;
                if (criterion.evaluate(pair, corpus_traces[i1], corpus_traces[i2])) {
                    task.corpus_hit = true;
                    task.corpus_i1 = static_cast<int>(i1);
                    task.corpus_i2 = static_cast<int>(i2);
                    break;
                }
            }
        }
        if (!task.corpus_hit) {
            GenerationRequest request;
            request.method = criterion.method;
            request.pair = pair;
            request.g1 = criterion.g1;
            request.g2 = criterion.g2;
            request.bounds = criterion.bounds;
            request.engine = config.engine;
            request.budget_steps = config.budget_steps;
            request.max_seeds = config.max_seeds;
            request.eps0 = config.eps0;
            request.delta = config.delta;
            request.lp_max_iterations = config.lp_max_iterations;
            request.init = config.init;
            request.rng_seed = mix64(config.rng_seed, static_cast<std::uint64_t>(pi));
            task.engine = generate_pair(net, corpus, request);
        }
        results[static_cast<std::size_t>(pi)] = std::move(task);
    });

    SuiteGenResult out;
    std::vector<ActivationTrace> suite_traces;
    const auto append_input = [&](const Vec& x, ProvenanceEntry& entry) {
        const auto before = out.suite.size();
        if (out.suite.add_unique(x)) {
            suite_traces.push_back(evaluate(net, x));
            entry.appended.push_back(static_cast<int>(before));
        }
    };

    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const FeaturePair& pair = pairs[pi];
        ProvenanceEntry entry;
        entry.pair_index = static_cast<int>(pi);
        entry.pair = pair;

        bool already = false;
        for (std::size_t i1 = 0; i1 < suite_traces.size() && !already; ++i1)
            for (std::size_t i2 = 0; i2 < suite_traces.size(); ++i2) {
                if (i1 == i2) continue;
                if (criterion.evaluate(pair, suite_traces[i1], suite_traces[i2])) {
                    already = true;
                    break;
                }
            }
        if (already) {
            entry.status = ProvenanceEntry::Status::covered_by_suite;
        } else {
            const TaskResult& task = results[pi];
            if (task.corpus_hit) {
                entry.status = ProvenanceEntry::Status::corpus;
                append_input(corpus[static_cast<std::size_t>(task.corpus_i1)], entry);
                append_input(corpus[static_cast<std::size_t>(task.corpus_i2)], entry);
            } else if (task.engine.status == GenerationResult::Status::found) {
                entry.status = ProvenanceEntry::Status::found;
                entry.engine = engine_name(config.engine);
                entry.distance = task.engine.distance;
                entry.steps = task.engine.steps;
                entry.seed_index = task.engine.seed_index;
                append_input(task.engine.x1, entry);
                append_input(task.engine.x2, entry);
            } else {
                entry.status = ProvenanceEntry::Status::uncovered;
            }
        }
        out.provenance.push_back(std::move(entry));
    }

    TracedSuite traced;
    traced.net = &net;
    traced.inputs = out.suite.inputs();
    traced.traces = std::move(suite_traces);
    out.report = coverage(traced, pairs, criterion, config.workers);
    return out;
}

} // namespace relucov
