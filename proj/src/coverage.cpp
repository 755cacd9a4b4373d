#include "relucov/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "relucov/errors.hpp"
#include "relucov/parallel.hpp"

namespace relucov {

std::string method_name(CoveringMethod m) {
    switch (m) {
    case CoveringMethod::ss: return "ss";
    case CoveringMethod::vs: return "vs";
    case CoveringMethod::sv: return "sv";
    case CoveringMethod::vv: return "vv";
    }
    return "?";
}

CoveringMethod parse_method(const std::string& name) {
    if (name == "ss") return CoveringMethod::ss;
    if (name == "vs") return CoveringMethod::vs;
    if (name == "sv") return CoveringMethod::sv;
    if (name == "vv") return CoveringMethod::vv;
    throw ConfigError("unknown covering method '" + name + "'");
}

namespace {

void check_same_net(const ActivationTrace& t1, const ActivationTrace& t2) {
    if (t1.net_hash != t2.net_hash)
        throw InputError("traces come from different networks");
}

void check_feature_in_range(const Feature& f, const ActivationTrace& t) {
    const int K = t.layer_count();
    if (f.layer < 2 || f.layer > K)
        throw InputError("feature layer " + std::to_string(f.layer) + " out of range");
    for (int n : f.nodes)
        if (n < 1 || n > t.layer_size(f.layer))
            throw InputError("feature node " + std::to_string(n) + " out of range for layer " +
                             std::to_string(f.layer));
}

} // namespace

int node_sign_ext(const ActivationTrace& trace, int layer, int node) {
    if (layer == trace.layer_count())
        return trace.output[static_cast<std::size_t>(node - 1)] >= 0.0 ? 1 : -1;
    return trace.sign(layer, node);
}

bool sc(const Feature& feature, const ActivationTrace& t1, const ActivationTrace& t2) {
    check_same_net(t1, t2);
    check_feature_in_range(feature, t1);
    for (int n : feature.nodes)
        if (node_sign_ext(t1, feature.layer, n) == node_sign_ext(t2, feature.layer, n))
            return false;
    return true;
}

bool nsc(const Feature& feature, const ActivationTrace& t1, const ActivationTrace& t2) {
    check_same_net(t1, t2);
    check_feature_in_range(feature, t1);
    for (int n : feature.nodes)
        if (node_sign_ext(t1, feature.layer, n) != node_sign_ext(t2, feature.layer, n))
            return false;
    return true;
}

bool nsc_layer_except(int layer, const std::vector<int>& excluded, const ActivationTrace& t1,
                      const ActivationTrace& t2) {
    const int size = t1.layer_size(layer);
    if (layer <= t1.layer_count() - 1 && size <= 64) {
        const auto k = static_cast<std::size_t>(layer - 2);
        std::uint64_t mask = 0;
        for (int n : excluded) mask |= (1ULL << (n - 1));
        return ((t1.sign_bits[k] ^ t2.sign_bits[k]) & ~mask) == 0;
    }
    for (int n = 1; n <= size; ++n) {
        if (std::find(excluded.begin(), excluded.end(), n) != excluded.end()) continue;
        if (node_sign_ext(t1, layer, n) != node_sign_ext(t2, layer, n)) return false;
    }
    return true;
}

namespace {

double norm_of(const Vec& diff, Norm p) {
    double acc = 0.0;
    switch (p) {
    case Norm::l1:
        for (double v : diff) acc += std::fabs(v);
        return acc;
    case Norm::l2:
        for (double v : diff) acc += v * v;
        return std::sqrt(acc);
    case Norm::linf:
        for (double v : diff) acc = std::max(acc, std::fabs(v));
        return acc;
    }
    return acc;
}

} // namespace

bool vc(const ValueFunction& g, const Feature& feature, const ActivationTrace& t1,
        const ActivationTrace& t2, const NeuronBounds* bounds) {
    check_same_net(t1, t2);
    check_feature_in_range(feature, t1);
    if (g.requires_singleton() && !feature.is_singleton())
        throw ConfigError(g.describe() + " requires a singleton feature");
    if (g.requires_bounds()) {
        if (bounds == nullptr) throw ConfigError(g.describe() + " needs recorded neuron bounds");
        if (bounds->net_hash() != t1.net_hash)
            throw InputError("neuron bounds come from a different network");
    }

    const int k = feature.layer;
    switch (g.kind()) {
    case ValueFunction::Kind::abs_change: {
        const int n = feature.nodes.front();
        return std::fabs(t1.u(k, n) - t2.u(k, n)) >= g.d();
    }
    case ValueFunction::Kind::rel_change: {
        const int n = feature.nodes.front();
        const double den = t2.u(k, n);
        if (den == 0.0) return false;
        const double r = t1.u(k, n) / den;
        return r > g.d() || r < 1.0 / g.d();
    }
    case ValueFunction::Kind::ratio_at_least: {
        const int n = feature.nodes.front();
        const bool second_first =
            g.orientation() == ValueFunction::RatioOrientation::second_over_first;
        const double num = second_first ? t2.u(k, n) : t1.u(k, n);
        const double den = second_first ? t1.u(k, n) : t2.u(k, n);
        if (den == 0.0) return false;
        return num / den >= g.sigma();
    }
    case ValueFunction::Kind::upper_bound: {
        const int n = feature.nodes.front();
        return t2.u(k, n) > g.d();
    }
    case ValueFunction::Kind::exceeds_recorded_max: {
        for (int n : feature.nodes)
            if (!(t2.v(k, n) > bounds->hi(k, n))) return false;
        return true;
    }
    case ValueFunction::Kind::in_subsection: {
        for (int n : feature.nodes)
            if (bounds->section_of(k, n, t2.v(k, n), g.m()) != g.j()) return false;
        return true;
    }
    case ValueFunction::Kind::norm_distance: {
        Vec diff(feature.nodes.size());
        for (std::size_t i = 0; i < feature.nodes.size(); ++i)
            diff[i] = t1.v(k, feature.nodes[i]) - t2.v(k, feature.nodes[i]);
        const double d = norm_of(diff, g.p());
        return g.cmp() == ValueFunction::Cmp::le ? d <= g.d() : d >= g.d();
    }
    case ValueFunction::Kind::rank_at_most:
        return value_rank(t2, k, feature.nodes.front()) <= g.m();
    case ValueFunction::Kind::unconstrained:
        return true;
    }
    return false;
}

bool ss_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2) {
    return sc(pair.condition, t1, t2) &&
           nsc_layer_except(pair.condition.layer, pair.condition.nodes, t1, t2) &&
           sc(pair.decision, t1, t2);
}

bool vs_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2,
                const ValueFunction& g, const NeuronBounds* bounds) {
    return vc(g, pair.condition, t1, t2, bounds) &&
           nsc_layer_except(pair.condition.layer, {}, t1, t2) && sc(pair.decision, t1, t2);
}

bool sv_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2,
                const ValueFunction& g, const NeuronBounds* bounds) {
    return sc(pair.condition, t1, t2) &&
           nsc_layer_except(pair.condition.layer, pair.condition.nodes, t1, t2) &&
           vc(g, pair.decision, t1, t2, bounds) && nsc(pair.decision, t1, t2);
}

bool vv_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2,
                const ValueFunction& g1, const ValueFunction& g2, const NeuronBounds* bounds) {
    return vc(g1, pair.condition, t1, t2, bounds) &&
           nsc_layer_except(pair.condition.layer, {}, t1, t2) &&
           vc(g2, pair.decision, t1, t2, bounds) && nsc(pair.decision, t1, t2);
}

void CoverageCriterion::validate() const {
    const bool needs_g1 = method == CoveringMethod::vs || method == CoveringMethod::vv;
    const bool needs_g2 = method == CoveringMethod::sv || method == CoveringMethod::vv;
    if (needs_g1 && !g1)
        throw ConfigError(method_name(method) + " coverage needs a condition value function");
    if (needs_g2 && !g2)
        throw ConfigError(method_name(method) + " coverage needs a decision value function");
    if (!needs_g1 && g1)
        throw ConfigError(method_name(method) + " coverage takes no condition value function");
    if (!needs_g2 && g2)
        throw ConfigError(method_name(method) + " coverage takes no decision value function");
    const bool needs_bounds =
        (g1 && g1->requires_bounds()) || (g2 && g2->requires_bounds());
    if (needs_bounds && bounds == nullptr)
        throw ConfigError("the chosen value functions need recorded neuron bounds");
}

bool CoverageCriterion::evaluate(const FeaturePair& pair, const ActivationTrace& t1,
                                 const ActivationTrace& t2) const {
    switch (method) {
    case CoveringMethod::ss: return ss_covered(pair, t1, t2);
    case CoveringMethod::vs: return vs_covered(pair, t1, t2, *g1, bounds);
    case CoveringMethod::sv: return sv_covered(pair, t1, t2, *g2, bounds);
    case CoveringMethod::vv: return vv_covered(pair, t1, t2, *g1, *g2, bounds);
    }
    return false;
}

std::string CoverageCriterion::describe() const {
    std::string out = method_name(method);
    if (g1) out += " g1=" + g1->describe();
    if (g2) out += " g2=" + g2->describe();
    return out;
}

CoverageReport coverage(const Network& net, const FeaturePairSet& pairs, const TestSuite& suite,
                        const CoverageCriterion& criterion, int workers) {
    return coverage(trace_suite(net, suite), pairs, criterion, workers);
}

CoverageReport coverage(const TracedSuite& traced, const FeaturePairSet& pairs,
                        const CoverageCriterion& criterion, int workers) {
    if (pairs.empty()) throw ConfigError("empty feature pair set");
    criterion.validate();

    CoverageReport report;
    report.criterion = method_name(criterion.method);
    report.params = criterion.describe();
    report.total = static_cast<long>(pairs.size());
    report.pair_entries.resize(pairs.size());

    const int n = static_cast<int>(traced.size());
    parallel_for(static_cast<int>(pairs.size()), workers, [&](int pi) {
        const FeaturePair& pair = pairs[static_cast<std::size_t>(pi)];
        PairCoverageEntry entry;
        entry.pair = pair;
        for (int i1 = 0; i1 < n && !entry.covered; ++i1) {
            for (int i2 = 0; i2 < n; ++i2) {
                if (i1 == i2) continue;
                if (criterion.evaluate(pair, traced.traces[static_cast<std::size_t>(i1)],
                                       traced.traces[static_cast<std::size_t>(i2)])) {
                    entry.covered = true;
                    entry.witness1 = i1;
                    entry.witness2 = i2;
                    entry.linf_distance = linf_distance(traced.inputs[static_cast<std::size_t>(i1)],
                                                        traced.inputs[static_cast<std::size_t>(i2)]);
                    break;
                }
            }
        }
        report.pair_entries[static_cast<std::size_t>(pi)] = std::move(entry);
    });

    std::map<int, LayerBreakdown> layers;
    for (const auto& entry : report.pair_entries) {
        if (entry.covered) ++report.covered;
        auto& lb = layers[entry.pair.decision.layer];
        lb.layer = entry.pair.decision.layer;
        ++lb.total;
        if (entry.covered) ++lb.covered;
    }
    for (auto& [_, lb] : layers) report.per_layer.push_back(lb);
    report.metric = static_cast<double>(report.covered) / static_cast<double>(report.total);
    return report;
}

int value_rank(const ActivationTrace& trace, int layer, int node) {
    const int sk = trace.layer_size(layer);
    const double mine = trace.v(layer, node);
    int strictly_below = 0;
    for (int l = 1; l <= sk; ++l)
        if (trace.v(layer, l) < mine) ++strictly_below;
    return sk - strictly_below;
}

bool covers_neuron(const ActivationTrace& trace, int layer, int node) {
    return trace.sign(layer, node) == 1;
}

bool covers_boundary(const ActivationTrace& trace, const NeuronBounds& bounds, int layer,
                     int node) {
    return trace.v(layer, node) > bounds.hi(layer, node);
}

bool section_hit(const TracedSuite& traced, const NeuronBounds& bounds, int layer, int node,
                 int j, int m) {
    for (const auto& trace : traced.traces)
        if (bounds.section_of(layer, node, trace.v(layer, node), m) == j) return true;
    return false;
}

namespace {

// shared shell for the per-node baseline criteria
template <typename CoversFn>
CoverageReport node_metric(const Network& net, const TracedSuite& traced, std::string criterion,
                           std::string params, CoversFn&& covers) {
    CoverageReport report;
    report.criterion = std::move(criterion);
    report.params = std::move(params);
    std::map<int, LayerBreakdown> layers;
    for (int k = 2; k <= net.layer_count() - 1; ++k) {
        for (int i = 1; i <= net.layer_size(k); ++i) {
            NodeCoverageEntry entry;
            entry.layer = k;
            entry.node = i;
            for (std::size_t t = 0; t < traced.size(); ++t) {
                if (covers(traced.traces[t], k, i)) {
                    entry.covered = true;
                    entry.witness = static_cast<int>(t);
                    break;
                }
            }
            ++report.total;
            if (entry.covered) ++report.covered;
            auto& lb = layers[k];
            lb.layer = k;
            ++lb.total;
            if (entry.covered) ++lb.covered;
            report.node_entries.push_back(std::move(entry));
        }
    }
    for (auto& [_, lb] : layers) report.per_layer.push_back(lb);
    report.metric =
        report.total > 0 ? static_cast<double>(report.covered) / static_cast<double>(report.total)
                         : 1.0;
    return report;
}

} // namespace

CoverageReport neuron_coverage(const Network& net, const TestSuite& suite) {
    const TracedSuite traced = trace_suite(net, suite);
    return node_metric(net, traced, "nc", "neuron coverage",
                       [](const ActivationTrace& t, int k, int i) { return covers_neuron(t, k, i); });
}

CoverageReport neuron_boundary_coverage(const Network& net, const TestSuite& suite,
                                        const NeuronBounds& bounds) {
    if (bounds.net_hash() != net.hash())
        throw InputError("neuron bounds come from a different network");
    const TracedSuite traced = trace_suite(net, suite);
    return node_metric(net, traced, "nbc", "neuron boundary coverage",
                       [&](const ActivationTrace& t, int k, int i) {
                           return covers_boundary(t, bounds, k, i);
                       });
}

CoverageReport top_m_coverage(const Network& net, const TestSuite& suite, int m) {
    int min_size = net.layer_size(2);
    for (int k = 2; k <= net.layer_count() - 1; ++k)
        min_size = std::min(min_size, net.layer_size(k));
    if (m < 1 || m > min_size)
        throw ConfigError("top-m: m must be in [1.." + std::to_string(min_size) + "]");
    const TracedSuite traced = trace_suite(net, suite);
    return node_metric(net, traced, "tnc", "top-" + std::to_string(m) + " neuron coverage",
                       [m](const ActivationTrace& t, int k, int i) {
                           return value_rank(t, k, i) <= m;
                       });
}

CoverageReport multisection_coverage(const Network& net, const TestSuite& suite,
                                     const NeuronBounds& bounds, int m,
                                     bool fraction_of_sections) {
    if (bounds.net_hash() != net.hash())
        throw InputError("neuron bounds come from a different network");
    if (m < 1) throw ConfigError("multisection: m must be >= 1");
    const TracedSuite traced = trace_suite(net, suite);

    CoverageReport report;
    report.criterion = "mnc";
    report.params = std::to_string(m) + "-multisection neuron coverage" +
                    (fraction_of_sections ? " (fraction of sections)" : "");
    std::map<int, LayerBreakdown> layers;
    long sections_hit = 0;
    long node_total = 0;
    long node_covered = 0;
    for (int k = 2; k <= net.layer_count() - 1; ++k) {
        for (int i = 1; i <= net.layer_size(k); ++i) {
            NodeCoverageEntry entry;
            entry.layer = k;
            entry.node = i;
            if (bounds.degenerate(k, i)) {
                entry.excluded = true;
                report.node_entries.push_back(std::move(entry));
                continue;
            }
            int hit = 0;
            for (int j = 1; j <= m; ++j)
                if (section_hit(traced, bounds, k, i, j, m)) ++hit;
            sections_hit += hit;
            entry.covered = hit == m;
            ++node_total;
            if (entry.covered) ++node_covered;
            auto& lb = layers[k];
            lb.layer = k;
            ++lb.total;
            if (entry.covered) ++lb.covered;
            report.node_entries.push_back(std::move(entry));
        }
    }
    for (auto& [_, lb] : layers) report.per_layer.push_back(lb);
    if (fraction_of_sections) {
        report.covered = sections_hit;
        report.total = node_total * m;
    } else {
        report.covered = node_covered;
        report.total = node_total;
    }
    report.metric =
        report.total > 0 ? static_cast<double>(report.covered) / static_cast<double>(report.total)
                         : 1.0;
    return report;
}

NeuronBounds compute_bounds(const Network& net, const TestSuite& reference) {
    if (reference.empty()) throw ConfigError("bounds need a non-empty reference suite");
    const TracedSuite traced = trace_suite(net, reference);
    std::vector<std::vector<double>> lo;
    std::vector<std::vector<double>> hi;
    for (int k = 2; k <= net.layer_count() - 1; ++k) {
        const auto sk = static_cast<std::size_t>(net.layer_size(k));
        std::vector<double> mins(sk), maxs(sk);
        for (std::size_t i = 0; i < sk; ++i) {
            double mn = traced.traces[0].v(k, static_cast<int>(i) + 1);
            double mx = mn;
            for (std::size_t t = 1; t < traced.size(); ++t) {
                const double v = traced.traces[t].v(k, static_cast<int>(i) + 1);
                mn = std::min(mn, v);
                mx = std::max(mx, v);
            }
            mins[i] = mn;
            maxs[i] = mx;
        }
        lo.push_back(std::move(mins));
        hi.push_back(std::move(maxs));
    }
    return NeuronBounds(std::move(lo), std::move(hi), net.hash());
}

} // namespace relucov
