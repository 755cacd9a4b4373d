#include "relucov/features.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relucov/errors.hpp"
#include "relucov/network.hpp"
#include "relucov/rng.hpp"

namespace relucov {

namespace {
using Json = nlohmann::ordered_json;
}

bool Feature::contains(int node) const {
    return std::binary_search(nodes.begin(), nodes.end(), node);
}

std::string Feature::describe() const {
    std::ostringstream out;
    out << "{";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out << (i ? "," : "") << "n_" << layer << "," << nodes[i];
    out << "}";
    return out.str();
}

void Feature::validate(const Network& net) const {
    if (layer < 1 || layer > net.layer_count())
        throw InputError("feature layer " + std::to_string(layer) + " out of range");
    if (nodes.empty()) throw InputError("feature must be non-empty");
    int prev = 0;
    for (int n : nodes) {
        if (n < 1 || n > net.layer_size(layer))
            throw InputError("feature node " + std::to_string(n) + " out of range for layer " +
                             std::to_string(layer));
        if (n <= prev) throw InputError("feature nodes must be ascending and distinct");
        prev = n;
    }
}

std::string FeaturePair::describe() const {
    return "(" + condition.describe() + ", " + decision.describe() + ")";
}

void FeaturePair::validate(const Network& net, bool allow_output_decision) const {
    condition.validate(net);
    decision.validate(net);
    if (decision.layer != condition.layer + 1)
        throw InputError("feature pair layers must be adjacent, got " +
                         std::to_string(condition.layer) + " and " +
                         std::to_string(decision.layer));
    const int K = net.layer_count();
    if (condition.layer < 2)
        throw InputError("condition features must sit in a hidden layer");
    const int max_decision = allow_output_decision ? K : K - 1;
    if (decision.layer > max_decision)
        throw InputError("decision layer " + std::to_string(decision.layer) + " out of range");
}

FeaturePairSet::FeaturePairSet(std::vector<FeaturePair> pairs) {
    for (auto& p : pairs) add(std::move(p));
}

void FeaturePairSet::add(FeaturePair pair) {
    if (contains(pair)) throw InputError("duplicate feature pair " + pair.describe());
    pairs_.push_back(std::move(pair));
}

bool FeaturePairSet::contains(const FeaturePair& pair) const {
    return std::find(pairs_.begin(), pairs_.end(), pair) != pairs_.end();
}

Feature full_layer_feature(const Network& net, int layer) {
    Feature f;
    f.layer = layer;
    f.nodes.resize(static_cast<std::size_t>(net.layer_size(layer)));
    for (int i = 0; i < net.layer_size(layer); ++i) f.nodes[static_cast<std::size_t>(i)] = i + 1;
    return f;
}

FeaturePairSet enumerate_singleton_pairs(const Network& net, const PairEnumOptions& opts) {
    FeaturePairSet set;
    const int K = net.layer_count();
    const int last_decision = opts.include_output_decisions ? K : K - 1;
    for (int k = 2; k + 1 <= last_decision; ++k) {
        for (int j = 1; j <= net.layer_size(k + 1); ++j)
            for (int i = 1; i <= net.layer_size(k); ++i)
                set.add({Feature::single(k, i), Feature::single(k + 1, j)});
    }
    return set;
}

FeaturePairSet enumerate_top_weight_pairs(const Network& net, int kappa,
                                          const PairEnumOptions& opts) {
    if (kappa < 1) throw ConfigError("kappa must be >= 1");
    FeaturePairSet set;
    const int K = net.layer_count();
    const int last_decision = opts.include_output_decisions ? K : K - 1;
    for (int k = 2; k + 1 <= last_decision; ++k) {
        const int sk = net.layer_size(k);
        const int take = std::min(kappa, sk);
        for (int j = 1; j <= net.layer_size(k + 1); ++j) {
            std::vector<int> order(static_cast<std::size_t>(sk));
            for (int i = 0; i < sk; ++i) order[static_cast<std::size_t>(i)] = i + 1;
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                const double wa = std::abs(net.weight(k, a, j));
                const double wb = std::abs(net.weight(k, b, j));
                if (wa != wb) return wa > wb;
                return a < b;
            });
            for (int r = 0; r < take; ++r)
                set.add({Feature::single(k, order[static_cast<std::size_t>(r)]),
                         Feature::single(k + 1, j)});
        }
    }
    return set;
}

FeaturePairSet enumerate_random_feature_pairs(const Network& net, double omega, int count,
                                              std::uint64_t seed, const PairEnumOptions& opts) {
    if (!(omega > 0.0) || omega > 1.0) throw ConfigError("omega must be in (0, 1]");
    if (count < 1) throw ConfigError("count must be >= 1");
    const int K = net.layer_count();
    const int last_decision = opts.include_output_decisions ? K : K - 1;
    std::vector<int> condition_layers;
    for (int k = 2; k + 1 <= last_decision; ++k) condition_layers.push_back(k);
    if (condition_layers.empty())
        throw ConfigError("network has no adjacent hidden layers to pair");

    Rng rng(seed);
    FeaturePairSet set;
    const int max_attempts = count * 200 + 1000;
    int attempts = 0;
    while (static_cast<int>(set.size()) < count) {
        if (++attempts > max_attempts)
            throw ConfigError("could not sample " + std::to_string(count) +
                              " distinct feature pairs; the network may be too small");
        const int k = condition_layers[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<int>(condition_layers.size()) - 1))];
        const int sk = net.layer_size(k);
        // omega * s_k below 1 clamps to a single node
        const int width = std::max(1, static_cast<int>(omega * sk));
        Feature cond{k, rng.sample_without_replacement(sk, width)};
        Feature dec = Feature::single(k + 1, rng.uniform_int(1, net.layer_size(k + 1)));
        FeaturePair pair{std::move(cond), std::move(dec)};
        if (!set.contains(pair)) set.add(std::move(pair));
    }
    return set;
}

std::string pair_set_to_json(const FeaturePairSet& set) {
    Json doc = Json::array();
    for (const FeaturePair& p : set.pairs()) {
        Json entry;
        entry["k"] = p.condition.layer;
        entry["condition"] = p.condition.nodes;
        entry["decision"] = p.decision.nodes;
        doc.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

FeaturePairSet pair_set_from_json(const std::string& text, const Network& net,
                                  const PairEnumOptions& opts) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("malformed pair-set document: ") + e.what());
    }
    if (!doc.is_array()) throw InputError("pair-set document must be an array");
    FeaturePairSet set;
    for (const auto& entry : doc) {
        if (!entry.contains("k") || !entry.contains("condition") || !entry.contains("decision"))
            throw InputError("pair-set entries need 'k', 'condition' and 'decision'");
        const int k = entry["k"].get<int>();
        Feature cond{k, entry["condition"].get<std::vector<int>>()};
        Feature dec{k + 1, entry["decision"].get<std::vector<int>>()};
        FeaturePair pair{std::move(cond), std::move(dec)};
        pair.validate(net, opts.include_output_decisions);
        set.add(std::move(pair));
    }
    return set;
}

} // namespace relucov
