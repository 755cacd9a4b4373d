#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relucov/coverage.hpp"
#include "relucov/network.hpp"
#include "relucov/suite.hpp"
#include "relucov/value_function.hpp"

namespace relucov {

// Distance oracle: two inputs are close iff ||x - x'||_p <= b.
struct OracleConfig {
    Norm p = Norm::linf;
    double b = 0.0;

    void validate() const;
};

double input_distance(const Vec& x, const Vec& y, Norm p);
bool close_inputs(const Vec& x, const Vec& y, const OracleConfig& oracle);

// close(x, x') and the labels differ
bool is_adversarial(const Network& net, const Vec& x, const Vec& x_prime,
                    const OracleConfig& oracle);

struct AdversarialStats {
    std::optional<double> ae_fraction; // adversarial witness pairs / witness pairs
    // cumulative distribution of adversarial witness pairs over their
    // recorded L-inf distances: (distance, cumulative fraction)
    std::vector<std::pair<double, double>> curve;
    // per decision layer: covered = adversarial witnesses, total = witnesses
    std::vector<LayerBreakdown> per_layer;
};

// Fills the adversarial flags and AE fraction of a pair-based report and
// returns the distance curve and per-layer fractions.
AdversarialStats adversarial_stats(const Network& net, CoverageReport& report,
                                   const TestSuite& suite, const OracleConfig& oracle);

std::string curve_to_csv(const AdversarialStats& stats);

struct PatternEntry {
    std::vector<std::int8_t> signs; // one per hidden node, layer-major
    bool feasible = false;
    std::optional<Vec> witness;
};

struct PatternSet {
    std::uint64_t net_hash = 0;
    int hidden_count = 0;
    std::vector<PatternEntry> entries; // all 2^H patterns, enumeration order

    long feasible_count() const;
};

// flattened hidden sign vector of a trace, in pattern order
std::vector<std::int8_t> hidden_sign_vector(const ActivationTrace& trace);

// Decides feasibility of all 2^H hidden sign patterns by LP over the full
// hidden stack (plus input-domain bounds) and keeps a witness input for each
// feasible one. Refuses networks with more than `limit` hidden nodes.
PatternSet enumerate_patterns(const Network& net, int limit = 16, double delta = 1e-6,
                              int workers = 1);

// covered feasible patterns / feasible patterns
CoverageReport safety_coverage(const Network& net, const TestSuite& suite,
                               const PatternSet& patterns);

} // namespace relucov
