#include "relucov/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "relucov/errors.hpp"
#include "relucov/lp.hpp"
#include "relucov/parallel.hpp"

namespace relucov {

void OracleConfig::validate() const {
    if (!(b > 0.0) || !std::isfinite(b)) throw ConfigError("oracle bound b must be positive and finite");
}

double input_distance(const Vec& x, const Vec& y, Norm p) {
    switch (p) {
    case Norm::l1: return l1_distance(x, y);
    case Norm::l2: return l2_distance(x, y);
    case Norm::linf: return linf_distance(x, y);
    }
    return 0.0;
}

bool close_inputs(const Vec& x, const Vec& y, const OracleConfig& oracle) {
    if (x.size() != y.size()) throw InputError("inputs have different dimensions");
    return input_distance(x, y, oracle.p) <= oracle.b;
}

bool is_adversarial(const Network& net, const Vec& x, const Vec& x_prime,
                    const OracleConfig& oracle) {
    oracle.validate();
    if (!close_inputs(x, x_prime, oracle)) return false;
    return evaluate(net, x).label != evaluate(net, x_prime).label;
}

AdversarialStats adversarial_stats(const Network& net, CoverageReport& report,
                                   const TestSuite& suite, const OracleConfig& oracle) {
    oracle.validate();
    const TracedSuite traced = trace_suite(net, suite);

    AdversarialStats stats;
    std::map<int, LayerBreakdown> layers;
    std::vector<double> adversarial_distances;
    long witnesses = 0;
    long adversarial = 0;

    for (auto& entry : report.pair_entries) {
        if (!entry.covered) continue;
        if (entry.witness1 < 0 || entry.witness2 < 0 ||
            entry.witness1 >= static_cast<int>(traced.size()) ||
            entry.witness2 >= static_cast<int>(traced.size()))
            throw InputError("coverage report witnesses do not reference this suite");
        const auto i1 = static_cast<std::size_t>(entry.witness1);
        const auto i2 = static_cast<std::size_t>(entry.witness2);
        const bool adv =
            close_inputs(traced.inputs[i1], traced.inputs[i2], oracle) &&
            traced.traces[i1].label != traced.traces[i2].label;
        entry.adversarial = adv;
        ++witnesses;
        auto& lb = layers[entry.pair.decision.layer];
        lb.layer = entry.pair.decision.layer;
        ++lb.total;
        if (adv) {
            ++adversarial;
            ++lb.covered;
            adversarial_distances.push_back(entry.linf_distance);
        }
    }

    if (witnesses > 0) {
        stats.ae_fraction = static_cast<double>(adversarial) / static_cast<double>(witnesses);
        report.ae_fraction = stats.ae_fraction;
    }
    std::sort(adversarial_distances.begin(), adversarial_distances.end());
    for (std::size_t i = 0; i < adversarial_distances.size(); ++i)
        stats.curve.emplace_back(adversarial_distances[i],
                                 static_cast<double>(i + 1) /
                                     static_cast<double>(adversarial_distances.size()));
    for (auto& [_, lb] : layers) stats.per_layer.push_back(lb);
    return stats;
}

std::string curve_to_csv(const AdversarialStats& stats) {
    std::ostringstream out;
    out << "distance,cumulative_fraction\n";
    out.precision(17);
    for (const auto& [d, f] : stats.curve) out << d << "," << f << "\n";
    return out.str();
}

long PatternSet::feasible_count() const {
    long n = 0;
    for (const auto& e : entries)
        if (e.feasible) ++n;
    return n;
}

std::vector<std::int8_t> hidden_sign_vector(const ActivationTrace& trace) {
    std::vector<std::int8_t> out;
    for (const auto& layer : trace.signs) out.insert(out.end(), layer.begin(), layer.end());
    return out;
}

PatternSet enumerate_patterns(const Network& net, int limit, double delta, int workers) {
    const int H = net.hidden_count();
    if (H > limit)
        throw InputError("pattern enumeration limit is " + std::to_string(limit) +
                         " hidden nodes, this network has " + std::to_string(H));

    PatternSet set;
    set.net_hash = net.hash();
    set.hidden_count = H;
    const long count = 1L << H;
    set.entries.resize(static_cast<std::size_t>(count));

    const int K = net.layer_count();
    const double margin = std::max(delta, 1e-7);
    parallel_for(static_cast<int>(count), workers, [&](int index) {
        PatternEntry& entry = set.entries[static_cast<std::size_t>(index)];
        entry.signs.resize(static_cast<std::size_t>(H));
        std::vector<std::vector<std::int8_t>> layered;
        int bit = 0;
        for (int k = 2; k <= K - 1; ++k) {
            std::vector<std::int8_t> layer(static_cast<std::size_t>(net.layer_size(k)));
            for (int i = 0; i < net.layer_size(k); ++i, ++bit) {
                const std::int8_t s = (index >> bit) & 1 ? -1 : 1;
                layer[static_cast<std::size_t>(i)] = s;
                entry.signs[static_cast<std::size_t>(bit)] = s;
            }
            layered.push_back(std::move(layer));
        }
        const LpModel model = build_pattern_model(net, layered, K - 1, delta);
        const LpSolution sol = solve(model);
        if (sol.status == LpStatus::optimal) {
            Vec witness = sol.input(model);
            if (hidden_sign_vector(evaluate(net, witness)) == entry.signs) {
                entry.feasible = true;
                entry.witness = std::move(witness);
            } else {
                // boundary witness: a u >= 0 constraint is active and the
                // forward pass rounds it negative; retry with an interior
                // margin on the activated nodes
                LpModel strict = model;
                for (int k = 2; k <= K - 1; ++k) {
                    for (int i = 1; i <= net.layer_size(k); ++i) {
                        if (layered[static_cast<std::size_t>(k - 2)]
                                   [static_cast<std::size_t>(i - 1)] != 1)
                            continue;
                        const std::string tag =
                            "sign:" + std::to_string(k) + ":" + std::to_string(i);
                        strict.remove_constraints_with_tag(tag);
                        strict.add_constraint({{strict.variable(lp_u_name(k, i)), 1.0}},
                                              LpCmp::ge, margin, tag);
                    }
                }
                const LpSolution interior = solve(strict);
                if (interior.status == LpStatus::optimal) {
                    Vec retry = interior.input(strict);
                    if (hidden_sign_vector(evaluate(net, retry)) == entry.signs) {
                        entry.feasible = true;
                        entry.witness = std::move(retry);
                    }
                }
                // patterns realizable only on the u = 0 boundary keep
                // feasible = false: no witness input reproduces them
            }
        }
    });
    return set;
}

CoverageReport safety_coverage(const Network& net, const TestSuite& suite,
                               const PatternSet& patterns) {
    if (patterns.net_hash != net.hash())
        throw InputError("pattern set was enumerated for a different network");
    const TracedSuite traced = trace_suite(net, suite);

    std::vector<std::vector<std::int8_t>> suite_patterns;
    suite_patterns.reserve(traced.size());
    for (const auto& trace : traced.traces) suite_patterns.push_back(hidden_sign_vector(trace));

    CoverageReport report;
    report.criterion = "safety";
    report.params = "one test per feasible activation pattern";
    for (const PatternEntry& entry : patterns.entries) {
        if (!entry.feasible) continue;
        ++report.total;
        for (const auto& sp : suite_patterns) {
            if (sp == entry.signs) {
                ++report.covered;
                break;
            }
        }
    }
    report.metric = report.total > 0
                        ? static_cast<double>(report.covered) / static_cast<double>(report.total)
                        : 1.0;
    return report;
}

} // namespace relucov
