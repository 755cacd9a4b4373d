#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relucov/analysis.hpp"
#include "relucov/coverage.hpp"
#include "relucov/features.hpp"
#include "relucov/network.hpp"
#include "relucov/suite.hpp"

namespace relucov {

// The proven weaker-than relations between criteria. Naming: weaker_stronger.
enum class LatticeEdgeId {
    n_ss,  // neuron coverage     <= SS
    n_vs,  // neuron coverage     <= VS
    n_mn,  // neuron coverage     <= multisection
    mn_sv, // multisection        <= SV
    mn_vv, // multisection        <= VV
    nb_sv, // boundary            <= SV
    nb_vv, // boundary            <= VV
    tn_vv, // top-m               <= VV
    tn_vs, // top-m               <= VS
    ss_s,  // SS                  <= safety
};

struct LatticeEdge {
    LatticeEdgeId id = LatticeEdgeId::n_ss;
    int sections = 3; // m of the multisection criteria
    int top_m = 2;    // m of the top-m criteria

    std::string name() const;
    static LatticeEdge parse(const std::string& name, int sections, int top_m);
};

std::vector<LatticeEdge> default_lattice_edges(int sections = 3, int top_m = 2);

// Everything an edge check needs besides the suites. The node universes
// mirror the constructions behind each relation: value-function forcing acts
// on decision features (layers 3..K-1) for the multisection/boundary edges
// and on condition features (layers 2..K-2) for the top-m edges; the plain
// neuron-coverage edges range over every hidden node.
struct LatticeContext {
    const Network* net = nullptr;
    FeaturePairSet pairs; // singleton pairs over hidden layers
    NeuronBounds bounds;
    std::optional<PatternSet> patterns;   // required by ss_s
    std::vector<bool> pair_coverable;     // ss_s: pair has a feasible pattern flip
};

LatticeContext build_lattice_context(const Network& net, const TestSuite& reference,
                                     bool with_patterns = false, int pattern_limit = 16,
                                     double delta = 1e-6);

struct EdgeVerdict {
    LatticeEdge edge;
    bool pass = true;
    int failed_suite = -1;
    double weaker_metric = 1.0;
    double stronger_metric = 1.0;
    long suites_checked = 0;
    long antecedent_fired = 0; // suites where the stronger metric reached 1
    std::string note;
};

// Asserts, for every suite, not(stronger == 1 and weaker < 1); reports the
// first counterexample suite on failure.
EdgeVerdict check_lattice_edge(const Network& net, const LatticeEdge& edge,
                               const std::vector<TestSuite>& suites, const LatticeContext& ctx);

struct LatticeBatteryConfig {
    int num_nets = 50;
    int suites_per_net = 20;
    std::uint64_t seed = 20240;
    int sections = 3;
    int top_m = 2;
    int pattern_limit = 12;
    double delta = 1e-6;
    int reference_size = 60;
    int workers = 1;
};

struct EdgeRun {
    LatticeEdge edge;
    bool pass = true;
    int failed_net = -1;
    int failed_suite = -1;
    double weaker_metric = 1.0;
    double stronger_metric = 1.0;
    long suites_checked = 0;
    long antecedent_fired = 0;
};

struct LatticeBatteryResult {
    bool all_pass = true;
    std::uint64_t seed = 0;
    std::vector<EdgeRun> runs;
};

// Random nets x suites, screened so the relations' side conditions hold:
// every hidden node takes both signs on the reference set (which also makes
// every recorded interval non-trivial). Suites mix random draws, node- and
// section-starved filters, coverage-saturating growth, and pattern witnesses.
LatticeBatteryResult run_lattice_battery(const LatticeBatteryConfig& config);

} // namespace relucov
