#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relucov/features.hpp"
#include "relucov/linalg.hpp"

namespace relucov {

// Per-dimension closed interval bounds on the input space.
struct InputDomain {
    Vec lo;
    Vec hi;

    double clamp(double value, int dim0) const;
};

// A fully connected feedforward ReLU network. Layers are numbered 1..K;
// layer 1 is the input, layer K the output (no ReLU on either). Immutable
// after construction, safe to share across threads.
class Network {
public:
    // weights[k-1] maps layer k to layer k+1 (s_k rows, s_{k+1} cols);
    // biases[k-2] belongs to layer k, k in [2..K].
    static Network create(std::vector<int> sizes, std::vector<Matrix> weights,
                          std::vector<Vec> biases,
                          std::optional<InputDomain> domain = std::nullopt);

    int layer_count() const { return static_cast<int>(sizes_.size()); }
    int layer_size(int k) const { return sizes_[static_cast<std::size_t>(k - 1)]; }
    const std::vector<int>& sizes() const { return sizes_; }
    int input_size() const { return sizes_.front(); }
    int output_size() const { return sizes_.back(); }
    int hidden_count() const;
    bool is_hidden_layer(int k) const { return k >= 2 && k <= layer_count() - 1; }

    // W_k, k in [1..K-1]
    const Matrix& weights(int k) const { return weights_[static_cast<std::size_t>(k - 1)]; }
    // b_k, k in [2..K]
    const Vec& biases(int k) const { return biases_[static_cast<std::size_t>(k - 2)]; }
    // w_{k,h,l}: connection from n_{k,h} to n_{k+1,l} (1-based)
    double weight(int k, int h, int l) const { return weights(k).at(h - 1, l - 1); }
    double bias(int k, int l) const { return biases(k)[static_cast<std::size_t>(l - 1)]; }

    const std::optional<InputDomain>& input_domain() const { return domain_; }

    // content hash, used to match traces/pattern sets to their network
    std::uint64_t hash() const { return hash_; }

private:
    Network() = default;

    std::vector<int> sizes_;
    std::vector<Matrix> weights_;
    std::vector<Vec> biases_;
    std::optional<InputDomain> domain_;
    std::uint64_t hash_ = 0;
};

// Values of one forward pass. `pre`/`post`/`signs` hold hidden layers
// 2..K-1 (index 0 = layer 2); sign is +1 iff u >= 0.
struct ActivationTrace {
    Vec input;
    std::vector<Vec> pre;
    std::vector<Vec> post;
    Vec output;
    std::vector<std::vector<std::int8_t>> signs;
    // per hidden layer, bit (i-1) set iff sign(n_{k,i}) == -1; valid for layers
    // with at most 64 nodes (wider layers fall back to the sign vectors)
    std::vector<std::uint64_t> sign_bits;
    int label = 0; // 1-based argmax of output, lowest index on ties
    std::uint64_t net_hash = 0;
    std::vector<int> sizes;

    int layer_count() const { return static_cast<int>(sizes.size()); }
    int layer_size(int k) const { return sizes[static_cast<std::size_t>(k - 1)]; }

    // u_{k,i}, k in [2..K] (layer K reads the output vector)
    double u(int k, int i) const;
    // v_{k,i}, k in [1..K-1] (layer 1 reads the input vector)
    double v(int k, int i) const;
    // hidden nodes only
    int sign(int k, int i) const;
};

// forward pass; throws InputError on dimension mismatch or non-finite input
ActivationTrace evaluate(const Network& net, const Vec& x);

// sign of a hidden node; throws InputError when out of range or not hidden
int sign(const ActivationTrace& trace, int layer, int node);

// Scalar objectives for differentiation.
struct GradientObjective {
    enum class Kind { logit, feature_sum };

    Kind kind = Kind::logit;
    int output_index = 1;     // for logit, 1-based
    Feature feature;          // for feature_sum: sum of the feature's u values

    static GradientObjective logit(int j) { return {Kind::logit, j, {}}; }
    static GradientObjective feature_sum(Feature f) {
        return {Kind::feature_sum, 1, std::move(f)};
    }
};

// Reverse-mode d(objective)/dx. The ReLU subgradient at u == 0 is taken as 0.
Vec gradient(const Network& net, const Vec& x, const GradientObjective& objective);

// Network file I/O (JSON, see README for the schema).
Network load_network(std::istream& in);
Network load_network_file(const std::string& path);
std::string save_network(const Network& net);

// Dataset I/O: JSON array of vectors, or CSV with one vector per row.
std::vector<Vec> load_dataset_file(const std::string& path);
std::vector<Vec> dataset_from_json(const std::string& text);
std::vector<Vec> dataset_from_csv(const std::string& text);
std::string dataset_to_json(const std::vector<Vec>& inputs);

} // namespace relucov
