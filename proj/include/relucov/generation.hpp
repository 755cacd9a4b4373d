#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relucov/coverage.hpp"
#include "relucov/features.hpp"
#include "relucov/lp.hpp"
#include "relucov/network.hpp"
#include "relucov/suite.hpp"
#include "relucov/value_function.hpp"

namespace relucov {

enum class Engine { lp, gradient };

std::string engine_name(Engine e);
Engine parse_engine(const std::string& name);

struct GenerationRequest {
    CoveringMethod method = CoveringMethod::ss;
    FeaturePair pair;
    std::optional<ValueFunction> g1;
    std::optional<ValueFunction> g2;
    const NeuronBounds* bounds = nullptr;

    Engine engine = Engine::lp;
    int budget_steps = 100; // gradient steps per seed
    int max_seeds = -1;     // -1: use the whole corpus
    double eps0 = 0.1;      // FGSM step and the epsilon ceiling
    double delta = 1e-6;    // LP strictness
    long lp_max_iterations = 100000;
    std::uint64_t rng_seed = 0;

    enum class Init { fgsm, uniform } init = Init::fgsm;
    // gradient scalar; defaults to the decision feature's pre-activation sum
    std::optional<GradientObjective> grad_objective;

    void validate() const;
    CoverageCriterion criterion() const { return {method, g1, g2, bounds}; }
};

struct GenerationResult {
    enum class Status { found, exhausted } status = Status::exhausted;
    Vec x1;
    Vec x2;
    double distance = 0.0; // L-inf between x1 and x2
    int steps = 0;         // gradient steps, or LP pivot count
    int seed_index = -1;   // corpus index of x1
    LpStatus last_lp_status = LpStatus::infeasible;
};

// The covering predicate with every clause on the named feature pair removed:
// only nsc over the rest of the condition layer remains.
bool widened_predicate(CoveringMethod method, const FeaturePair& pair, const ActivationTrace& t1,
                       const ActivationTrace& t2);

// Concolic generation: per corpus seed, fix the seed's activation pattern up
// to the decision layer, impose the test condition and the L-inf objective,
// solve, and re-verify the covering predicate on the solution.
GenerationResult generate_lp(const Network& net, const std::vector<Vec>& corpus,
                             const GenerationRequest& request);

// Heuristic search guided by the widened predicate and the scalar gradient;
// epsilon follows a halving/doubling schedule capped at eps0.
GenerationResult generate_gradient(const Network& net, const std::vector<Vec>& corpus,
                                   const GenerationRequest& request);

GenerationResult generate_pair(const Network& net, const std::vector<Vec>& corpus,
                               const GenerationRequest& request);

// Per-pair outcome inside a suite run.
struct ProvenanceEntry {
    int pair_index = 0;
    FeaturePair pair;
    // covered_by_suite: already covered by previously accumulated inputs;
    // corpus: a corpus pair covers it; found: an engine produced the pair
    enum class Status { covered_by_suite, corpus, found, uncovered } status = Status::uncovered;
    std::string engine;
    double distance = 0.0;
    int steps = 0;
    int seed_index = -1;
    std::vector<int> appended; // suite indices of inputs this pair added
};

struct SuiteGenConfig {
    Engine engine = Engine::lp;
    int budget_steps = 100;
    int max_seeds = -1;
    double eps0 = 0.1;
    double delta = 1e-6;
    long lp_max_iterations = 100000;
    std::uint64_t rng_seed = 0;
    GenerationRequest::Init init = GenerationRequest::Init::fgsm;
    int workers = 1;
};

struct SuiteGenResult {
    TestSuite suite;
    CoverageReport report;
    std::vector<ProvenanceEntry> provenance;
};

// Runs per-pair generation over the whole pair set, accumulating every found
// input into one suite. Pair tasks never read the accumulator, so the result
// is identical for any worker count.
SuiteGenResult generate_suite(const Network& net, const FeaturePairSet& pairs,
                              const CoverageCriterion& criterion, const std::vector<Vec>& corpus,
                              const SuiteGenConfig& config);

} // namespace relucov
