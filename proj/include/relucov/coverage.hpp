#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relucov/features.hpp"
#include "relucov/network.hpp"
#include "relucov/suite.hpp"
#include "relucov/value_function.hpp"

namespace relucov {

enum class CoveringMethod { ss, vs, sv, vv };

std::string method_name(CoveringMethod m);
CoveringMethod parse_method(const std::string& name);

// Node sign extended to the output layer (u >= 0) so that pairs with output
// decisions can be evaluated when that option is enabled.
int node_sign_ext(const ActivationTrace& trace, int layer, int node);

// sign change / no sign change of a feature between two traces.
// Note nsc is not the negation of sc for features with more than one node.
bool sc(const Feature& feature, const ActivationTrace& t1, const ActivationTrace& t2);
bool nsc(const Feature& feature, const ActivationTrace& t1, const ActivationTrace& t2);

// no sign change over a whole layer except the listed nodes (empty rest is
// vacuously true)
bool nsc_layer_except(int layer, const std::vector<int>& excluded, const ActivationTrace& t1,
                      const ActivationTrace& t2);

// value change with respect to g; bounds required by the recorded-range kinds
bool vc(const ValueFunction& g, const Feature& feature, const ActivationTrace& t1,
        const ActivationTrace& t2, const NeuronBounds* bounds = nullptr);

bool ss_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2);
bool vs_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2,
                const ValueFunction& g, const NeuronBounds* bounds = nullptr);
bool sv_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2,
                const ValueFunction& g, const NeuronBounds* bounds = nullptr);
bool vv_covered(const FeaturePair& pair, const ActivationTrace& t1, const ActivationTrace& t2,
                const ValueFunction& g1, const ValueFunction& g2,
                const NeuronBounds* bounds = nullptr);

// A covering method plus its value functions: g1 constrains the condition
// side (VS, VV), g2 the decision side (SV, VV).
struct CoverageCriterion {
    CoveringMethod method = CoveringMethod::ss;
    std::optional<ValueFunction> g1;
    std::optional<ValueFunction> g2;
    const NeuronBounds* bounds = nullptr;

    void validate() const;
    bool evaluate(const FeaturePair& pair, const ActivationTrace& t1,
                  const ActivationTrace& t2) const;
    std::string describe() const;
};

struct PairCoverageEntry {
    FeaturePair pair;
    bool covered = false;
    int witness1 = -1; // 0-based suite indices
    int witness2 = -1;
    double linf_distance = 0.0;
    std::optional<bool> adversarial;
};

struct NodeCoverageEntry {
    int layer = 0;
    int node = 0;
    bool covered = false;
    int witness = -1;
    bool excluded = false; // multisection only: degenerate recorded interval
};

struct LayerBreakdown {
    int layer = 0;
    long covered = 0;
    long total = 0;
};

struct CoverageReport {
    std::string criterion;
    std::string params;
    long covered = 0;
    long total = 0;
    double metric = 0.0;
    std::vector<PairCoverageEntry> pair_entries;
    std::vector<NodeCoverageEntry> node_entries;
    std::vector<LayerBreakdown> per_layer;
    std::optional<double> ae_fraction;
};

// M_f over ordered distinct input pairs; the witness is the lexicographically
// first (x1, x2) by suite index.
CoverageReport coverage(const Network& net, const FeaturePairSet& pairs, const TestSuite& suite,
                        const CoverageCriterion& criterion, int workers = 1);
CoverageReport coverage(const TracedSuite& traced, const FeaturePairSet& pairs,
                        const CoverageCriterion& criterion, int workers = 1);

// Baseline per-node criteria.
CoverageReport neuron_coverage(const Network& net, const TestSuite& suite);
CoverageReport neuron_boundary_coverage(const Network& net, const TestSuite& suite,
                                        const NeuronBounds& bounds);
CoverageReport top_m_coverage(const Network& net, const TestSuite& suite, int m);
CoverageReport multisection_coverage(const Network& net, const TestSuite& suite,
                                     const NeuronBounds& bounds, int m,
                                     bool fraction_of_sections = false);

// exact per-node min/max of v over a non-empty reference suite
NeuronBounds compute_bounds(const Network& net, const TestSuite& reference);

// Per-node building blocks, shared with the lattice checker.
//
// value_rank counts how many same-layer values are strictly below and ranks
// from the top; equal values share the worse rank, so rank <= m means the
// value is strictly greater than at least s_k - m of them.
int value_rank(const ActivationTrace& trace, int layer, int node);
bool covers_neuron(const ActivationTrace& trace, int layer, int node);
bool covers_boundary(const ActivationTrace& trace, const NeuronBounds& bounds, int layer,
                     int node);
bool section_hit(const TracedSuite& traced, const NeuronBounds& bounds, int layer, int node,
                 int j, int m);

} // namespace relucov
