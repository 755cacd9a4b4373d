#include "relucov/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "relucov/errors.hpp"

namespace relucov {

namespace {

using Json = nlohmann::ordered_json;

std::uint64_t fnv1a_init() { return 0xcbf29ce484222325ULL; }

void fnv1a_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

void fnv1a_double(std::uint64_t& h, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    fnv1a_bytes(h, &bits, sizeof bits);
}

void fnv1a_int(std::uint64_t& h, std::int64_t v) { fnv1a_bytes(h, &v, sizeof v); }

void require_finite(double v, const std::string& where) {
    if (!std::isfinite(v)) throw InputError("non-finite entry in " + where);
}

} // namespace

double InputDomain::clamp(double value, int dim0) const {
    const auto i = static_cast<std::size_t>(dim0);
    return std::min(hi[i], std::max(lo[i], value));
}

Network Network::create(std::vector<int> sizes, std::vector<Matrix> weights,
                        std::vector<Vec> biases, std::optional<InputDomain> domain) {
    const int K = static_cast<int>(sizes.size());
    if (K < 3) throw InputError("network needs at least 3 layers, got " + std::to_string(K));
    for (int k = 1; k <= K; ++k) {
        if (sizes[static_cast<std::size_t>(k - 1)] < 1)
            throw InputError("layer " + std::to_string(k) + ": size must be positive");
    }
    if (static_cast<int>(weights.size()) != K - 1)
        throw InputError("expected " + std::to_string(K - 1) + " weight matrices, got " +
                         std::to_string(weights.size()));
    if (static_cast<int>(biases.size()) != K - 1)
        throw InputError("expected " + std::to_string(K - 1) + " bias vectors, got " +
                         std::to_string(biases.size()));

    for (int k = 1; k < K; ++k) {
        const Matrix& w = weights[static_cast<std::size_t>(k - 1)];
        const int want_rows = sizes[static_cast<std::size_t>(k - 1)];
        const int want_cols = sizes[static_cast<std::size_t>(k)];
        if (w.rows() != want_rows || w.cols() != want_cols)
            throw InputError("layer " + std::to_string(k) + ": weight matrix is " +
                             std::to_string(w.rows()) + "x" + std::to_string(w.cols()) +
                             " but sizes declare " + std::to_string(want_rows) + "x" +
                             std::to_string(want_cols));
        const Vec& b = biases[static_cast<std::size_t>(k - 1)];
        if (static_cast<int>(b.size()) != want_cols)
            throw InputError("layer " + std::to_string(k + 1) + ": bias vector has length " +
                             std::to_string(b.size()) + " but the layer has " +
                             std::to_string(want_cols) + " nodes");
        for (double v : w.data()) require_finite(v, "weights of layer " + std::to_string(k));
        for (double v : b) require_finite(v, "biases of layer " + std::to_string(k + 1));
    }

    if (domain) {
        const auto n = static_cast<std::size_t>(sizes.front());
        if (domain->lo.size() != n || domain->hi.size() != n)
            throw InputError("input_domain must cover all " + std::to_string(n) + " inputs");
        for (std::size_t i = 0; i < n; ++i) {
            require_finite(domain->lo[i], "input_domain");
            require_finite(domain->hi[i], "input_domain");
            if (domain->lo[i] > domain->hi[i])
                throw InputError("input_domain: lo > hi at dimension " + std::to_string(i + 1));
        }
    }

    Network net;
    net.sizes_ = std::move(sizes);
    net.weights_ = std::move(weights);
    net.biases_ = std::move(biases);
    net.domain_ = std::move(domain);

    std::uint64_t h = fnv1a_init();
    fnv1a_int(h, net.layer_count());
    for (int s : net.sizes_) fnv1a_int(h, s);
    for (const Matrix& w : net.weights_)
        for (double v : w.data()) fnv1a_double(h, v);
    for (const Vec& b : net.biases_)
        for (double v : b) fnv1a_double(h, v);
    if (net.domain_) {
        for (double v : net.domain_->lo) fnv1a_double(h, v);
        for (double v : net.domain_->hi) fnv1a_double(h, v);
    }
    net.hash_ = h;
    return net;
}

int Network::hidden_count() const {
    int h = 0;
    for (int k = 2; k <= layer_count() - 1; ++k) h += layer_size(k);
    return h;
}

double ActivationTrace::u(int k, int i) const {
    if (k == layer_count()) return output[static_cast<std::size_t>(i - 1)];
    return pre[static_cast<std::size_t>(k - 2)][static_cast<std::size_t>(i - 1)];
}

double ActivationTrace::v(int k, int i) const {
    if (k == 1) return input[static_cast<std::size_t>(i - 1)];
    return post[static_cast<std::size_t>(k - 2)][static_cast<std::size_t>(i - 1)];
}

int ActivationTrace::sign(int k, int i) const {
    return signs[static_cast<std::size_t>(k - 2)][static_cast<std::size_t>(i - 1)];
}

ActivationTrace evaluate(const Network& net, const Vec& x) {
    const int K = net.layer_count();
    if (static_cast<int>(x.size()) != net.input_size())
        throw InputError("input has dimension " + std::to_string(x.size()) + " but s_1 is " +
                         std::to_string(net.input_size()));
    for (double v : x) require_finite(v, "input vector");

    ActivationTrace trace;
    trace.input = x;
    trace.sizes = net.sizes();
    trace.net_hash = net.hash();

    Vec prev = x; // post-activation values of the previous layer
    for (int k = 2; k <= K; ++k) {
        const Matrix& w = net.weights(k - 1);
        const Vec& b = net.biases(k);
        const int n = net.layer_size(k);
        Vec u(static_cast<std::size_t>(n));
        for (int l = 0; l < n; ++l) {
            double acc = b[static_cast<std::size_t>(l)];
            for (int h = 0; h < w.rows(); ++h) acc += w.at(h, l) * prev[static_cast<std::size_t>(h)];
            u[static_cast<std::size_t>(l)] = acc;
        }
        if (k == K) {
            trace.output = std::move(u);
            break;
        }
        Vec v(static_cast<std::size_t>(n));
        std::vector<std::int8_t> sg(static_cast<std::size_t>(n));
        std::uint64_t bits = 0;
        for (int l = 0; l < n; ++l) {
            const double uv = u[static_cast<std::size_t>(l)];
            const bool on = uv >= 0.0;
            v[static_cast<std::size_t>(l)] = on ? uv : 0.0;
            sg[static_cast<std::size_t>(l)] = on ? 1 : -1;
            if (!on && l < 64) bits |= (1ULL << l);
        }
        trace.pre.push_back(std::move(u));
        trace.post.push_back(v);
        trace.signs.push_back(std::move(sg));
        trace.sign_bits.push_back(bits);
        prev = std::move(v);
    }

    int best = 0;
    for (int l = 1; l < net.output_size(); ++l)
        if (trace.output[static_cast<std::size_t>(l)] > trace.output[static_cast<std::size_t>(best)])
            best = l;
    trace.label = best + 1;
    return trace;
}

int sign(const ActivationTrace& trace, int layer, int node) {
    const int K = trace.layer_count();
    if (layer < 2 || layer > K - 1)
        throw InputError("sign: layer " + std::to_string(layer) + " is not hidden");
    if (node < 1 || node > trace.layer_size(layer))
        throw InputError("sign: node " + std::to_string(node) + " out of range for layer " +
                         std::to_string(layer));
    return trace.sign(layer, node);
}

Vec gradient(const Network& net, const Vec& x, const GradientObjective& objective) {
    const int K = net.layer_count();
    const ActivationTrace trace = evaluate(net, x);

    // d(objective)/du per layer, filled top-down
    int start_layer = 0;
    Vec du;
    if (objective.kind == GradientObjective::Kind::logit) {
        const int j = objective.output_index;
        if (j < 1 || j > net.output_size())
            throw InputError("gradient: logit index " + std::to_string(j) + " out of range");
        start_layer = K;
        du.assign(static_cast<std::size_t>(net.output_size()), 0.0);
        du[static_cast<std::size_t>(j - 1)] = 1.0;
    } else {
        const Feature& f = objective.feature;
        f.validate(net);
        if (f.layer < 2 || f.layer > K)
            throw InputError("gradient: feature_sum layer must be in [2..K]");
        start_layer = f.layer;
        du.assign(static_cast<std::size_t>(net.layer_size(f.layer)), 0.0);
        for (int n : f.nodes) du[static_cast<std::size_t>(n - 1)] = 1.0;
    }

    // u_k = W_{k-1}^T v_{k-1} + b, so dL/dv_{k-1} = W_{k-1} dL/du_k, and the
    // ReLU gate passes only where u > 0 (derivative 0 at u == 0).
    for (int k = start_layer; k >= 2; --k) {
        const Matrix& w = net.weights(k - 1);
        Vec dv(static_cast<std::size_t>(w.rows()), 0.0);
        for (int h = 0; h < w.rows(); ++h) {
            double acc = 0.0;
            for (int l = 0; l < w.cols(); ++l) acc += w.at(h, l) * du[static_cast<std::size_t>(l)];
            dv[static_cast<std::size_t>(h)] = acc;
        }
        if (k == 2) return dv;
        Vec next(static_cast<std::size_t>(w.rows()));
        for (int h = 1; h <= w.rows(); ++h)
            next[static_cast<std::size_t>(h - 1)] =
                trace.u(k - 1, h) > 0.0 ? dv[static_cast<std::size_t>(h - 1)] : 0.0;
        du = std::move(next);
    }
    return du; // unreachable for K >= 3
}

namespace {

Matrix matrix_from_json(const Json& jw, int rows, int cols, int layer) {
    Matrix m(rows, cols);
    if (!jw.is_array()) throw InputError("layer " + std::to_string(layer) + ": weights must be an array");
    if (!jw.empty() && jw.front().is_array()) {
        if (static_cast<int>(jw.size()) != rows)
            throw InputError("layer " + std::to_string(layer) + ": weight matrix is " +
                             std::to_string(jw.size()) + "x" +
                             std::to_string(jw.empty() ? 0 : jw.front().size()) +
                             " but sizes declare " + std::to_string(rows) + "x" +
                             std::to_string(cols));
        for (int r = 0; r < rows; ++r) {
            const Json& row = jw[static_cast<std::size_t>(r)];
            if (static_cast<int>(row.size()) != cols)
                throw InputError("layer " + std::to_string(layer) + ": weight row " +
                                 std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                                 " entries, expected " + std::to_string(cols));
            for (int c = 0; c < cols; ++c) m.at(r, c) = row[static_cast<std::size_t>(c)].get<double>();
        }
    } else {
        // flat row-major
        if (static_cast<int>(jw.size()) != rows * cols)
            throw InputError("layer " + std::to_string(layer) + ": flat weight array has " +
                             std::to_string(jw.size()) + " entries, expected " +
                             std::to_string(rows * cols));
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                m.at(r, c) = jw[static_cast<std::size_t>(r * cols + c)].get<double>();
    }
    return m;
}

} // namespace

Network load_network(std::istream& in) {
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const std::exception& e) {
        throw InputError(std::string("malformed network document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("sizes") || !doc.contains("layers"))
        throw InputError("network document needs 'sizes' and 'layers'");

    std::vector<int> sizes;
    for (const auto& s : doc["sizes"]) sizes.push_back(s.get<int>());
    const int K = static_cast<int>(sizes.size());
    if (K < 3) throw InputError("network needs at least 3 layers, got " + std::to_string(K));

    const Json& layers = doc["layers"];
    if (static_cast<int>(layers.size()) != K - 1)
        throw InputError("expected " + std::to_string(K - 1) + " layer blocks, got " +
                         std::to_string(layers.size()));

    std::vector<Matrix> weights;
    std::vector<Vec> biases;
    for (int k = 1; k < K; ++k) {
        const Json& block = layers[static_cast<std::size_t>(k - 1)];
        if (!block.contains("weights") || !block.contains("biases"))
            throw InputError("layer block " + std::to_string(k) + " needs 'weights' and 'biases'");
        weights.push_back(matrix_from_json(block["weights"], sizes[static_cast<std::size_t>(k - 1)],
                                           sizes[static_cast<std::size_t>(k)], k));
        Vec b;
        for (const auto& v : block["biases"]) b.push_back(v.get<double>());
        biases.push_back(std::move(b));
    }

    std::optional<InputDomain> domain;
    if (doc.contains("input_domain") && !doc["input_domain"].is_null()) {
        const Json& jd = doc["input_domain"];
        InputDomain d;
        const auto n = static_cast<std::size_t>(sizes.front());
        if (jd.is_array() && jd.size() == 2 && jd[0].is_number()) {
            d.lo.assign(n, jd[0].get<double>());
            d.hi.assign(n, jd[1].get<double>());
        } else {
            for (const auto& pair : jd) {
                if (!pair.is_array() || pair.size() != 2)
                    throw InputError("input_domain entries must be [lo, hi] pairs");
                d.lo.push_back(pair[0].get<double>());
                d.hi.push_back(pair[1].get<double>());
            }
        }
        domain = std::move(d);
    }

    return Network::create(std::move(sizes), std::move(weights), std::move(biases),
                           std::move(domain));
}

Network load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open network file: " + path);
    return load_network(in);
}

std::string save_network(const Network& net) {
    Json doc;
    doc["sizes"] = net.sizes();
    Json layers = Json::array();
    for (int k = 1; k < net.layer_count(); ++k) {
        Json block;
        Json rows = Json::array();
        const Matrix& w = net.weights(k);
        for (int r = 0; r < w.rows(); ++r) {
            Json row = Json::array();
            for (int c = 0; c < w.cols(); ++c) row.push_back(w.at(r, c));
            rows.push_back(std::move(row));
        }
        block["weights"] = std::move(rows);
        block["biases"] = net.biases(k + 1);
        layers.push_back(std::move(block));
    }
    doc["layers"] = std::move(layers);
    if (net.input_domain()) {
        Json jd = Json::array();
        for (std::size_t i = 0; i < net.input_domain()->lo.size(); ++i)
            jd.push_back(Json::array({net.input_domain()->lo[i], net.input_domain()->hi[i]}));
        doc["input_domain"] = std::move(jd);
    }
    return doc.dump(2) + "\n";
}

std::vector<Vec> dataset_from_json(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("malformed dataset: ") + e.what());
    }
    if (doc.is_object() && doc.contains("inputs")) doc = doc["inputs"];
    if (!doc.is_array()) throw InputError("dataset must be an array of input vectors");
    std::vector<Vec> out;
    for (const auto& row : doc) {
        Vec x;
        for (const auto& v : row) x.push_back(v.get<double>());
        out.push_back(std::move(x));
    }
    return out;
}

std::vector<Vec> dataset_from_csv(const std::string& text) {
    std::vector<Vec> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        Vec x;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            try {
                x.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw InputError("dataset CSV line " + std::to_string(lineno) +
                                 ": cannot parse '" + cell + "'");
            }
        }
        if (!x.empty()) out.push_back(std::move(x));
    }
    return out;
}

std::vector<Vec> load_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return dataset_from_csv(buf.str());
    return dataset_from_json(buf.str());
}

std::string dataset_to_json(const std::vector<Vec>& inputs) {
    Json doc = Json::array();
    for (const Vec& x : inputs) doc.push_back(x);
    return doc.dump(2) + "\n";
}

} // namespace relucov
