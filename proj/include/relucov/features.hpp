#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace relucov {

class Network;

// A non-empty set of nodes inside one layer, treated as a unit.
// Layers and node indices are 1-based throughout the public API.
struct Feature {
    int layer = 0;
    std::vector<int> nodes; // ascending, no duplicates

    static Feature single(int layer, int node) { return Feature{layer, {node}}; }

    bool is_singleton() const { return nodes.size() == 1; }
    bool contains(int node) const;
    std::string describe() const;

    // Checks index bounds and ordering against a concrete network.
    // Condition/decision layer placement is checked by FeaturePair.
    void validate(const Network& net) const;

    bool operator==(const Feature& other) const = default;
};

// condition at layer k, decision at layer k+1
struct FeaturePair {
    Feature condition;
    Feature decision;

    int condition_layer() const { return condition.layer; }
    int decision_layer() const { return decision.layer; }
    std::string describe() const;

    // Adjacency plus placement: conditions live in layers [2, K-2]; decisions
    // in [3, K-1], or [3, K] when output decisions are enabled.
    void validate(const Network& net, bool allow_output_decision = false) const;

    bool operator==(const FeaturePair& other) const = default;
};

class FeaturePairSet {
public:
    FeaturePairSet() = default;
    explicit FeaturePairSet(std::vector<FeaturePair> pairs);

    const std::vector<FeaturePair>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    const FeaturePair& operator[](std::size_t i) const { return pairs_[i]; }

    // rejects duplicates
    void add(FeaturePair pair);
    bool contains(const FeaturePair& pair) const;

private:
    std::vector<FeaturePair> pairs_;
};

struct PairEnumOptions {
    // Adds pairs whose decision is an output node; the output "sign" is then
    // taken to be u >= 0. Off by default.
    bool include_output_decisions = false;
};

// the full-layer feature P_k
Feature full_layer_feature(const Network& net, int layer);

// All singleton pairs over adjacent hidden layers:
// count = sum over k in [2..K-2] of s_k * s_{k+1}.
FeaturePairSet enumerate_singleton_pairs(const Network& net, const PairEnumOptions& opts = {});

// For each decision node, the min(kappa, s_k) condition singletons with the
// largest |w|; ties go to the lower node index. Pairs are ordered by
// (decision layer, decision node, descending |w|).
FeaturePairSet enumerate_top_weight_pairs(const Network& net, int kappa,
                                          const PairEnumOptions& opts = {});

// `count` pairs with singleton decisions and condition features of size
// max(1, floor(omega * s_k)), reproducible from `seed`.
FeaturePairSet enumerate_random_feature_pairs(const Network& net, double omega, int count,
                                              std::uint64_t seed,
                                              const PairEnumOptions& opts = {});

// JSON export/import: [{"k":2,"condition":[1],"decision":[1]}, ...]
std::string pair_set_to_json(const FeaturePairSet& set);
FeaturePairSet pair_set_from_json(const std::string& text, const Network& net,
                                  const PairEnumOptions& opts = {});

} // namespace relucov
