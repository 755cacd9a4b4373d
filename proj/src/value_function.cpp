#include "relucov/value_function.hpp"

#include <cmath>
#include <sstream>

#include "relucov/errors.hpp"

namespace relucov {

ValueFunction ValueFunction::abs_change(double d) {
    if (!(d >= 0.0)) throw ConfigError("abs_change: d must be >= 0");
    ValueFunction g;
    g.kind_ = Kind::abs_change;
    g.d_ = d;
    return g;
}

ValueFunction ValueFunction::rel_change(double d) {
    if (!(d > 0.0)) throw ConfigError("rel_change: d must be > 0");
    ValueFunction g;
    g.kind_ = Kind::rel_change;
    g.d_ = d;
    return g;
}

ValueFunction ValueFunction::ratio_at_least(double sigma, RatioOrientation orient) {
    if (!(sigma > 0.0)) throw ConfigError("ratio_at_least: sigma must be > 0");
    ValueFunction g;
    g.kind_ = Kind::ratio_at_least;
    g.sigma_ = sigma;
    g.orient_ = orient;
    return g;
}

ValueFunction ValueFunction::upper_bound(double d) {
    ValueFunction g;
    g.kind_ = Kind::upper_bound;
    g.d_ = d;
    return g;
}

ValueFunction ValueFunction::exceeds_recorded_max() {
    ValueFunction g;
    g.kind_ = Kind::exceeds_recorded_max;
    return g;
}

ValueFunction ValueFunction::in_subsection(int j, int m) {
    if (m < 1) throw ConfigError("in_subsection: m must be >= 1");
    if (j < 1 || j > m) throw ConfigError("in_subsection: j must be in [1..m]");
    ValueFunction g;
    g.kind_ = Kind::in_subsection;
    g.j_ = j;
    g.m_ = m;
    return g;
}

ValueFunction ValueFunction::norm_distance(Norm p, double d, Cmp cmp) {
    if (!(d >= 0.0)) throw ConfigError("norm_distance: d must be >= 0");
    ValueFunction g;
    g.kind_ = Kind::norm_distance;
    g.p_ = p;
    g.d_ = d;
    g.cmp_ = cmp;
    return g;
}

ValueFunction ValueFunction::rank_at_most(int m) {
    if (m < 1) throw ConfigError("rank_at_most: m must be >= 1");
    ValueFunction g;
    g.kind_ = Kind::rank_at_most;
    g.m_ = m;
    return g;
}

ValueFunction ValueFunction::unconstrained() { return ValueFunction{}; }

bool ValueFunction::requires_singleton() const {
    switch (kind_) {
    case Kind::abs_change:
    case Kind::rel_change:
    case Kind::ratio_at_least:
    case Kind::upper_bound:
    case Kind::rank_at_most:
        return true;
    default:
        return false;
    }
}

bool ValueFunction::requires_bounds() const {
    return kind_ == Kind::exceeds_recorded_max || kind_ == Kind::in_subsection;
}

bool ValueFunction::lp_linearizable() const {
    switch (kind_) {
    case Kind::abs_change:
    case Kind::ratio_at_least:
    case Kind::upper_bound:
    case Kind::exceeds_recorded_max:
    case Kind::in_subsection:
    case Kind::unconstrained:
        return true;
    default:
        return false;
    }
}

bool ValueFunction::symmetric() const {
    switch (kind_) {
    case Kind::abs_change:
    case Kind::rel_change:
    case Kind::norm_distance:
    case Kind::unconstrained:
        return true;
    default:
        return false;
    }
}

std::string ValueFunction::describe() const {
    std::ostringstream out;
    switch (kind_) {
    case Kind::abs_change: out << "abs_change:d=" << d_; break;
    case Kind::rel_change: out << "rel_change:d=" << d_; break;
    case Kind::ratio_at_least:
        out << "ratio_at_least:sigma=" << sigma_ << ",orient="
            << (orient_ == RatioOrientation::second_over_first ? "second_over_first"
                                                               : "first_over_second");
        break;
    case Kind::upper_bound: out << "upper_bound:d=" << d_; break;
    case Kind::exceeds_recorded_max: out << "exceeds_recorded_max"; break;
    case Kind::in_subsection: out << "in_subsection:j=" << j_ << ",m=" << m_; break;
    case Kind::norm_distance:
        out << "norm_distance:p=" << (p_ == Norm::l1 ? "1" : p_ == Norm::l2 ? "2" : "inf")
            << ",d=" << d_ << ",cmp=" << (cmp_ == Cmp::le ? "le" : "ge");
        break;
    case Kind::rank_at_most: out << "rank_at_most:m=" << m_; break;
    case Kind::unconstrained: out << "unconstrained"; break;
    }
    return out.str();
}

namespace {

std::pair<std::string, std::string> split_once(const std::string& s, char sep) {
    const auto pos = s.find(sep);
    if (pos == std::string::npos) return {s, ""};
    return {s.substr(0, pos), s.substr(pos + 1)};
}

} // namespace

ValueFunction ValueFunction::parse(const std::string& text) {
    auto [kind, rest] = split_once(text, ':');
    double d = 0.0, sigma = 0.0;
    int j = 0, m = 0;
    Norm p = Norm::linf;
    Cmp cmp = Cmp::ge;
    RatioOrientation orient = RatioOrientation::second_over_first;
    bool have_cmp = false;

    std::istringstream args(rest);
    std::string item;
    while (std::getline(args, item, ',')) {
        if (item.empty()) continue;
        auto [key, value] = split_once(item, '=');
        try {
            if (key == "d") d = std::stod(value);
            else if (key == "sigma") sigma = std::stod(value);
            else if (key == "j") j = std::stoi(value);
            else if (key == "m") m = std::stoi(value);
            else if (key == "p") {
                if (value == "1") p = Norm::l1;
                else if (value == "2") p = Norm::l2;
                else if (value == "inf") p = Norm::linf;
                else throw ConfigError("value function: p must be 1, 2 or inf");
            } else if (key == "cmp") {
                if (value == "le") cmp = Cmp::le;
                else if (value == "ge") cmp = Cmp::ge;
                else throw ConfigError("value function: cmp must be le or ge");
                have_cmp = true;
            } else if (key == "orient") {
                if (value == "second_over_first") orient = RatioOrientation::second_over_first;
                else if (value == "first_over_second") orient = RatioOrientation::first_over_second;
                else throw ConfigError("value function: unknown orientation '" + value + "'");
            } else {
                throw ConfigError("value function: unknown parameter '" + key + "'");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("value function: cannot parse '" + item + "'");
        }
    }

    if (kind == "abs_change") return abs_change(d);
    if (kind == "rel_change") return rel_change(d);
    if (kind == "ratio_at_least") return ratio_at_least(sigma, orient);
    if (kind == "upper_bound") return upper_bound(d);
    if (kind == "exceeds_recorded_max") return exceeds_recorded_max();
    if (kind == "in_subsection") return in_subsection(j, m);
    if (kind == "norm_distance") {
        if (!have_cmp) cmp = Cmp::ge;
        return norm_distance(p, d, cmp);
    }
    if (kind == "rank_at_most") return rank_at_most(m);
    if (kind == "unconstrained") return unconstrained();
    throw ConfigError("unknown value function kind '" + kind + "'");
}

NeuronBounds::NeuronBounds(std::vector<std::vector<double>> lo,
                           std::vector<std::vector<double>> hi, std::uint64_t net_hash)
    : lo_(std::move(lo)), hi_(std::move(hi)), net_hash_(net_hash) {}

double NeuronBounds::lo(int layer, int node) const {
    return lo_[static_cast<std::size_t>(layer - 2)][static_cast<std::size_t>(node - 1)];
}

double NeuronBounds::hi(int layer, int node) const {
    return hi_[static_cast<std::size_t>(layer - 2)][static_cast<std::size_t>(node - 1)];
}

bool NeuronBounds::trivial(int layer, int node) const {
    return lo(layer, node) == 0.0 && hi(layer, node) == 0.0;
}

bool NeuronBounds::degenerate(int layer, int node) const {
    return lo(layer, node) == hi(layer, node);
}

std::pair<double, double> NeuronBounds::subsection(int layer, int node, int j, int m) const {
    const double a = lo(layer, node);
    const double b = hi(layer, node);
    const double w = (b - a) / m;
    return {a + w * (j - 1), j == m ? b : a + w * j};
}

int NeuronBounds::section_of(int layer, int node, double v, int m) const {
    const double a = lo(layer, node);
    const double b = hi(layer, node);
    if (v < a || v > b) return 0;
    if (a == b) return 1;
    const int j = 1 + static_cast<int>((v - a) / (b - a) * m);
    return std::min(j, m);
}

} // namespace relucov
