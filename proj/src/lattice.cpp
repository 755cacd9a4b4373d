#include "relucov/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "relucov/errors.hpp"
#include "relucov/parallel.hpp"
#include "relucov/rng.hpp"

namespace relucov {

std::string LatticeEdge::name() const {
    switch (id) {
    case LatticeEdgeId::n_ss: return "n<=ss";
    case LatticeEdgeId::n_vs: return "n<=vs";
    case LatticeEdgeId::n_mn: return "n<=mn";
    case LatticeEdgeId::mn_sv: return "mn<=sv";
    case LatticeEdgeId::mn_vv: return "mn<=vv";
    case LatticeEdgeId::nb_sv: return "nb<=sv";
    case LatticeEdgeId::nb_vv: return "nb<=vv";
    case LatticeEdgeId::tn_vv: return "tn<=vv";
    case LatticeEdgeId::tn_vs: return "tn<=vs";
    case LatticeEdgeId::ss_s: return "ss<=s";
    }
    return "?";
}

LatticeEdge LatticeEdge::parse(const std::string& name, int sections, int top_m) {
    for (const LatticeEdge& edge : default_lattice_edges(sections, top_m))
        if (edge.name() == name) return edge;
    throw ConfigError("unknown lattice edge '" + name + "'");
}

std::vector<LatticeEdge> default_lattice_edges(int sections, int top_m) {
    std::vector<LatticeEdge> edges;
    for (LatticeEdgeId id :
         {LatticeEdgeId::n_ss, LatticeEdgeId::n_vs, LatticeEdgeId::n_mn, LatticeEdgeId::mn_sv,
          LatticeEdgeId::mn_vv, LatticeEdgeId::nb_sv, LatticeEdgeId::nb_vv, LatticeEdgeId::tn_vv,
          LatticeEdgeId::tn_vs, LatticeEdgeId::ss_s})
        edges.push_back(LatticeEdge{id, sections, top_m});
    return edges;
}

namespace {

// Is there a pair of feasible patterns that flips the condition node, keeps
// the rest of its layer, and flips the decision node? Witnesses of those two
// patterns SS-cover the pair; without such a pattern pair no suite can.
std::vector<bool> coverable_pairs(const Network& net, const FeaturePairSet& pairs,
                                  const PatternSet& patterns) {
    std::vector<const PatternEntry*> feasible;
    for (const auto& e : patterns.entries)
        if (e.feasible) feasible.push_back(&e);

    std::vector<int> offset(static_cast<std::size_t>(net.layer_count() + 2), 0);
    for (int k = 2; k <= net.layer_count() - 1; ++k)
        offset[static_cast<std::size_t>(k + 1)] =
            offset[static_cast<std::size_t>(k)] + net.layer_size(k);

    std::vector<bool> out(pairs.size(), false);
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const FeaturePair& pair = pairs[pi];
        const int k = pair.condition.layer;
        const int ci = offset[static_cast<std::size_t>(k)] + pair.condition.nodes.front() - 1;
        const int dj = offset[static_cast<std::size_t>(k + 1)] + pair.decision.nodes.front() - 1;
        const int layer_begin = offset[static_cast<std::size_t>(k)];
        const int layer_end = layer_begin + net.layer_size(k);
        for (std::size_t a = 0; a < feasible.size() && !out[pi]; ++a) {
            for (std::size_t b = a + 1; b < feasible.size(); ++b) {
                const auto& p1 = feasible[a]->signs;
                const auto& p2 = feasible[b]->signs;
                if (p1[static_cast<std::size_t>(ci)] == p2[static_cast<std::size_t>(ci)]) continue;
                if (p1[static_cast<std::size_t>(dj)] == p2[static_cast<std::size_t>(dj)]) continue;
                bool rest_equal = true;
                for (int o = layer_begin; o < layer_end && rest_equal; ++o)
                    if (o != ci &&
                        p1[static_cast<std::size_t>(o)] != p2[static_cast<std::size_t>(o)])
                        rest_equal = false;
                if (rest_equal) {
                    out[pi] = true;
                    break;
                }
            }
        }
    }
    return out;
}

} // namespace

LatticeContext build_lattice_context(const Network& net, const TestSuite& reference,
                                     bool with_patterns, int pattern_limit, double delta) {
    LatticeContext ctx;
    ctx.net = &net;
    ctx.pairs = enumerate_singleton_pairs(net);
    ctx.bounds = compute_bounds(net, reference);
    if (with_patterns) {
        ctx.patterns = enumerate_patterns(net, pattern_limit, delta);
        ctx.pair_coverable = coverable_pairs(net, ctx.pairs, *ctx.patterns);
    }
    return ctx;
}

namespace {

struct MetricValue {
    long covered = 0;
    long total = 0;

    bool full() const { return covered == total; }
    double value() const {
        return total > 0 ? static_cast<double>(covered) / static_cast<double>(total) : 1.0;
    }
    void merge(const MetricValue& other) {
        covered += other.covered;
        total += other.total;
    }
};

struct LayerRange {
    int lo = 0;
    int hi = 0; // inclusive
};

template <typename CoversFn>
MetricValue node_universe_metric(const Network& net, LayerRange range, CoversFn&& covers) {
    MetricValue m;
    for (int k = range.lo; k <= range.hi; ++k) {
        for (int i = 1; i <= net.layer_size(k); ++i) {
            const auto c = covers(k, i);
            if (!c.has_value()) continue; // excluded node
            ++m.total;
            if (*c) ++m.covered;
        }
    }
    return m;
}

MetricValue neuron_metric(const TracedSuite& traced, const Network& net, LayerRange range) {
    return node_universe_metric(net, range, [&](int k, int i) -> std::optional<bool> {
        for (const auto& t : traced.traces)
            if (covers_neuron(t, k, i)) return true;
        return false;
    });
}

MetricValue boundary_metric(const TracedSuite& traced, const Network& net,
                            const NeuronBounds& bounds, LayerRange range) {
    return node_universe_metric(net, range, [&](int k, int i) -> std::optional<bool> {
        for (const auto& t : traced.traces)
            if (covers_boundary(t, bounds, k, i)) return true;
        return false;
    });
}

MetricValue topm_metric(const TracedSuite& traced, const Network& net, int m, LayerRange range) {
    return node_universe_metric(net, range, [&](int k, int i) -> std::optional<bool> {
        for (const auto& t : traced.traces)
            if (value_rank(t, k, i) <= m) return true;
        return false;
    });
}

MetricValue multisection_metric(const TracedSuite& traced, const Network& net,
                                const NeuronBounds& bounds, int sections, LayerRange range) {
    return node_universe_metric(net, range, [&](int k, int i) -> std::optional<bool> {
        if (bounds.degenerate(k, i)) return std::nullopt;
        for (int j = 1; j <= sections; ++j)
            if (!section_hit(traced, bounds, k, i, j, sections)) return false;
        return true;
    });
}

MetricValue pair_metric(const TracedSuite& traced, const FeaturePairSet& pairs,
                        const CoverageCriterion& criterion) {
    const CoverageReport report = coverage(traced, pairs, criterion, 1);
    return {report.covered, report.total};
}

// SS over the pattern-coverable pairs only: a pair no feasible pattern flip
// can realize is excluded from this edge's denominator.
MetricValue ss_metric_coverable(const TracedSuite& traced, const LatticeContext& ctx) {
    const CoverageReport report =
        coverage(traced, ctx.pairs, CoverageCriterion{CoveringMethod::ss, {}, {}, nullptr}, 1);
    MetricValue m;
    for (std::size_t pi = 0; pi < ctx.pairs.size(); ++pi) {
        if (!ctx.pair_coverable[pi]) continue;
        ++m.total;
        if (report.pair_entries[pi].covered) ++m.covered;
    }
    return m;
}

MetricValue safety_metric(const TracedSuite& traced, const PatternSet& patterns) {
    MetricValue m;
    std::vector<std::vector<std::int8_t>> suite_patterns;
    suite_patterns.reserve(traced.size());
    for (const auto& t : traced.traces) suite_patterns.push_back(hidden_sign_vector(t));
    for (const auto& entry : patterns.entries) {
        if (!entry.feasible) continue;
        ++m.total;
        for (const auto& sp : suite_patterns)
            if (sp == entry.signs) { ++m.covered; break; }
    }
    return m;
}

} // namespace

EdgeVerdict check_lattice_edge(const Network& net, const LatticeEdge& edge,
                               const std::vector<TestSuite>& suites, const LatticeContext& ctx) {
    if (edge.id == LatticeEdgeId::ss_s && !ctx.patterns)
        throw ConfigError("edge ss<=s needs an enumerated pattern set in the context");

    const int K = net.layer_count();
    const LayerRange all_hidden{2, K - 1};
    const LayerRange decisions{3, K - 1};
    const LayerRange conditions{2, K - 2};

    EdgeVerdict verdict;
    verdict.edge = edge;

    for (std::size_t si = 0; si < suites.size(); ++si) {
        const TracedSuite traced = trace_suite(net, suites[si]);

        MetricValue weaker;
        MetricValue stronger;
        switch (edge.id) {
        case LatticeEdgeId::n_ss:
            weaker = neuron_metric(traced, net, all_hidden);
            stronger = pair_metric(traced, ctx.pairs, {CoveringMethod::ss, {}, {}, nullptr});
            break;
        case LatticeEdgeId::n_vs:
            weaker = neuron_metric(traced, net, all_hidden);
            stronger = pair_metric(
                traced, ctx.pairs,
                {CoveringMethod::vs, ValueFunction::upper_bound(0.0), {}, nullptr});
            break;
        case LatticeEdgeId::n_mn:
            weaker = neuron_metric(traced, net, all_hidden);
            stronger = multisection_metric(traced, net, ctx.bounds, edge.sections, all_hidden);
            break;
        case LatticeEdgeId::mn_sv:
        case LatticeEdgeId::mn_vv:
            weaker = multisection_metric(traced, net, ctx.bounds, edge.sections, decisions);
            // one SV (or VV) criterion per section; full means full for all
            for (int j = 1; j <= edge.sections; ++j) {
                const ValueFunction g = ValueFunction::in_subsection(j, edge.sections);
                const CoverageCriterion criterion =
                    edge.id == LatticeEdgeId::mn_sv
                        ? CoverageCriterion{CoveringMethod::sv, {}, g, &ctx.bounds}
                        : CoverageCriterion{CoveringMethod::vv, ValueFunction::unconstrained(), g,
                                            &ctx.bounds};
                stronger.merge(pair_metric(traced, ctx.pairs, criterion));
            }
            break;
        case LatticeEdgeId::nb_sv:
            weaker = boundary_metric(traced, net, ctx.bounds, decisions);
            stronger = pair_metric(
                traced, ctx.pairs,
                {CoveringMethod::sv, {}, ValueFunction::exceeds_recorded_max(), &ctx.bounds});
            break;
        case LatticeEdgeId::nb_vv:
            weaker = boundary_metric(traced, net, ctx.bounds, decisions);
            stronger = pair_metric(traced, ctx.pairs,
                                   {CoveringMethod::vv, ValueFunction::unconstrained(),
                                    ValueFunction::exceeds_recorded_max(), &ctx.bounds});
            break;
        case LatticeEdgeId::tn_vv:
            weaker = topm_metric(traced, net, edge.top_m, conditions);
            stronger = pair_metric(traced, ctx.pairs,
                                   {CoveringMethod::vv, ValueFunction::rank_at_most(edge.top_m),
                                    ValueFunction::unconstrained(), nullptr});
            break;
        case LatticeEdgeId::tn_vs:
            weaker = topm_metric(traced, net, edge.top_m, conditions);
            stronger = pair_metric(
                traced, ctx.pairs,
                {CoveringMethod::vs, ValueFunction::rank_at_most(edge.top_m), {}, nullptr});
            break;
        case LatticeEdgeId::ss_s:
            weaker = ss_metric_coverable(traced, ctx);
            stronger = safety_metric(traced, *ctx.patterns);
            break;
        }

        ++verdict.suites_checked;
        if (stronger.full()) ++verdict.antecedent_fired;
        if (stronger.full() && !weaker.full()) {
            verdict.pass = false;
            verdict.failed_suite = static_cast<int>(si);
            verdict.weaker_metric = weaker.value();
            verdict.stronger_metric = stronger.value();
            return verdict;
        }
    }
    return verdict;
}

namespace {

struct SampledNet {
    Network net;
    TestSuite reference;
};

Vec random_input(Rng& rng, int dim, double lo, double hi) {
    Vec x(static_cast<std::size_t>(dim));
    for (double& v : x) v = rng.uniform(lo, hi);
    return x;
}

// Screens candidates until every hidden node takes both signs on the
// reference set. That keeps every node flippable and every recorded interval
// non-trivial, which are the side conditions of the proven relations.
SampledNet sample_screened_net(Rng rng, const LatticeBatteryConfig& config) {
    constexpr double kBox = 3.0;
    for (int attempt = 0; attempt < 500; ++attempt) {
        const int s1 = rng.uniform_int(2, 3);
        const int s2 = rng.uniform_int(2, 4);
        const int s3 = rng.uniform_int(2, 4);
        const int s4 = rng.uniform_int(2, 3);
        if (s2 + s3 > config.pattern_limit) continue;
        std::vector<int> sizes{s1, s2, s3, s4};

        std::vector<Matrix> weights;
        std::vector<Vec> biases;
        for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
            Matrix w(sizes[k], sizes[k + 1]);
            for (int r = 0; r < w.rows(); ++r)
                for (int c = 0; c < w.cols(); ++c)
                    w.at(r, c) = (rng.coin() ? 1.0 : -1.0) * rng.uniform(0.4, 1.6);
            weights.push_back(std::move(w));
            Vec b(static_cast<std::size_t>(sizes[k + 1]));
            for (double& v : b) v = rng.uniform(-0.3, 0.3);
            biases.push_back(std::move(b));
        }
        InputDomain domain;
        domain.lo.assign(static_cast<std::size_t>(s1), -kBox);
        domain.hi.assign(static_cast<std::size_t>(s1), kBox);
        Network net = Network::create(std::move(sizes), std::move(weights), std::move(biases),
                                      std::move(domain));

        TestSuite reference;
        for (int i = 0; i < config.reference_size; ++i)
            reference.add(random_input(rng, s1, -kBox, kBox));
        const TracedSuite traced = trace_suite(net, reference);

        bool ok = true;
        for (int k = 2; k <= net.layer_count() - 1 && ok; ++k) {
            for (int i = 1; i <= net.layer_size(k) && ok; ++i) {
                bool pos = false;
                bool neg = false;
                for (const auto& t : traced.traces) {
                    if (t.u(k, i) > 0.0) pos = true;
                    if (t.u(k, i) < 0.0) neg = true;
                    if (pos && neg) break;
                }
                ok = pos && neg;
            }
        }
        if (ok) return {std::move(net), std::move(reference)};
    }
    throw Error("could not sample a screened network for the lattice battery");
}

CoverageCriterion saturation_target(const LatticeEdge& edge) {
    switch (edge.id) {
    case LatticeEdgeId::n_vs:
        return {CoveringMethod::vs, ValueFunction::upper_bound(0.0), {}, nullptr};
    case LatticeEdgeId::tn_vv:
        return {CoveringMethod::vv, ValueFunction::rank_at_most(edge.top_m),
                ValueFunction::unconstrained(), nullptr};
    case LatticeEdgeId::tn_vs:
        return {CoveringMethod::vs, ValueFunction::rank_at_most(edge.top_m), {}, nullptr};
    default:
        return {CoveringMethod::ss, {}, {}, nullptr};
    }
}

// grows a suite with random inputs that increase the stronger-side coverage,
// pushing the antecedent of the implication toward firing
TestSuite saturate_suite(const Network& net, const LatticeEdge& edge, const LatticeContext& ctx,
                         Rng& rng, int tries) {
    const double lo = net.input_domain()->lo.front();
    const double hi = net.input_domain()->hi.front();
    TestSuite suite;
    for (int i = 0; i < 6; ++i) suite.add(random_input(rng, net.input_size(), lo, hi));

    const CoverageCriterion criterion = saturation_target(edge);
    const auto covered_count = [&](const TestSuite& s) {
        return coverage(trace_suite(net, s), ctx.pairs, criterion, 1).covered;
    };

    long best = covered_count(suite);
    for (int i = 0; i < tries; ++i) {
        TestSuite candidate = suite;
        candidate.add(random_input(rng, net.input_size(), lo, hi));
        const long covered = covered_count(candidate);
        if (covered > best) {
            best = covered;
            suite = std::move(candidate);
        }
    }
    return suite;
}

// Drops every input that covers the picked node (or hits the picked section),
// forcing the weaker metric below 1; the implication then requires the
// stronger metric to fall too.
TestSuite starve_suite(const Network& net, const LatticeEdge& edge, const LatticeContext& ctx,
                       const TestSuite& base, int which) {
    const TracedSuite traced = trace_suite(net, base);
    const int K = net.layer_count();
    int lo_layer = 2;
    int hi_layer = K - 1;
    if (edge.id == LatticeEdgeId::mn_sv || edge.id == LatticeEdgeId::mn_vv ||
        edge.id == LatticeEdgeId::nb_sv || edge.id == LatticeEdgeId::nb_vv)
        lo_layer = 3;
    if (edge.id == LatticeEdgeId::tn_vv || edge.id == LatticeEdgeId::tn_vs) hi_layer = K - 2;

    struct Node {
        int layer;
        int index;
    };
    std::vector<Node> nodes;
    for (int k = lo_layer; k <= hi_layer; ++k)
        for (int i = 1; i <= net.layer_size(k); ++i) nodes.push_back({k, i});
    const Node target = nodes[static_cast<std::size_t>(which) % nodes.size()];

    TestSuite out;
    for (std::size_t t = 0; t < traced.size(); ++t) {
        const ActivationTrace& trace = traced.traces[t];
        bool drop = false;
        switch (edge.id) {
        case LatticeEdgeId::n_ss:
        case LatticeEdgeId::n_vs:
        case LatticeEdgeId::n_mn:
            drop = covers_neuron(trace, target.layer, target.index);
            break;
        case LatticeEdgeId::mn_sv:
        case LatticeEdgeId::mn_vv: {
            const int j = 1 + which % edge.sections;
            drop = ctx.bounds.section_of(target.layer, target.index,
                                         trace.v(target.layer, target.index), edge.sections) == j;
            break;
        }
        case LatticeEdgeId::nb_sv:
        case LatticeEdgeId::nb_vv:
            drop = covers_boundary(trace, ctx.bounds, target.layer, target.index);
            break;
        case LatticeEdgeId::tn_vv:
        case LatticeEdgeId::tn_vs:
            drop = value_rank(trace, target.layer, target.index) <= edge.top_m;
            break;
        case LatticeEdgeId::ss_s:
            break;
        }
        if (!drop) out.add(traced.inputs[t]);
    }
    return out;
}

} // namespace

LatticeBatteryResult run_lattice_battery(const LatticeBatteryConfig& config) {
    LatticeBatteryResult result;
    result.seed = config.seed;
    const std::vector<LatticeEdge> edges = default_lattice_edges(config.sections, config.top_m);
    for (const LatticeEdge& edge : edges) result.runs.push_back(EdgeRun{edge});

    std::vector<std::optional<SampledNet>> nets(static_cast<std::size_t>(config.num_nets));
    parallel_for(config.num_nets, config.workers, [&](int ni) {
        nets[static_cast<std::size_t>(ni)] =
            sample_screened_net(Rng(config.seed).fork(static_cast<std::uint64_t>(ni)), config);
    });

    std::mutex merge_mutex;
    parallel_for(config.num_nets, config.workers, [&](int ni) {
        const SampledNet& sampled = *nets[static_cast<std::size_t>(ni)];
        const Network& net = sampled.net;
        const LatticeContext ctx = build_lattice_context(
            net, sampled.reference, /*with_patterns=*/true, config.pattern_limit, config.delta);
        const double lo = net.input_domain()->lo.front();
        const double hi = net.input_domain()->hi.front();

        for (std::size_t ei = 0; ei < edges.size(); ++ei) {
            const LatticeEdge& edge = edges[ei];
            Rng rng = Rng(config.seed).fork(mix64(static_cast<std::uint64_t>(ni), ei + 1));

            TestSuite base;
            for (int i = 0; i < 30; ++i) base.add(random_input(rng, net.input_size(), lo, hi));
            const int n_random = std::max(1, config.suites_per_net * 2 / 5);
            const int n_starved = std::max(1, config.suites_per_net * 3 / 10);

            std::vector<TestSuite> suites;
            for (int s = 0; s < config.suites_per_net; ++s) {
                if (s < n_random) {
                    TestSuite suite;
                    const int size = rng.uniform_int(5, 25);
                    for (int i = 0; i < size; ++i)
                        suite.add(random_input(rng, net.input_size(), lo, hi));
                    suites.push_back(std::move(suite));
                } else if (s < n_random + n_starved) {
                    suites.push_back(starve_suite(net, edge, ctx, base, s));
                } else if (edge.id == LatticeEdgeId::ss_s) {
                    // the safety-complete witness suite first, then random
                    // subsets of it
                    TestSuite suite;
                    for (const auto& entry : ctx.patterns->entries) {
                        if (!entry.feasible) continue;
                        if (s > n_random + n_starved && rng.coin()) continue;
                        suite.add(*entry.witness);
                    }
                    suites.push_back(std::move(suite));
                } else {
                    suites.push_back(saturate_suite(net, edge, ctx, rng, 40));
                }
            }

            const EdgeVerdict verdict = check_lattice_edge(net, edge, suites, ctx);
            const std::lock_guard<std::mutex> lock(merge_mutex);
            EdgeRun& run = result.runs[ei];
            run.suites_checked += verdict.suites_checked;
            run.antecedent_fired += verdict.antecedent_fired;
            if (!verdict.pass && (run.pass || ni < run.failed_net)) {
                run.pass = false;
                run.failed_net = ni;
                run.failed_suite = verdict.failed_suite;
                run.weaker_metric = verdict.weaker_metric;
                run.stronger_metric = verdict.stronger_metric;
            }
        }
    });

    for (const EdgeRun& run : result.runs) result.all_pass = result.all_pass && run.pass;
    return result;
}

} // namespace relucov
