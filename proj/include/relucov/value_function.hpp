#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace relucov {

enum class Norm { l1, l2, linf };

// A declarative significance predicate over a feature's values across two
// inputs. Singleton kinds read pre-activation (u) values; the bounds- and
// norm-based kinds read post-activation (v) values.
class ValueFunction {
public:
    enum class Kind {
        abs_change,           // |u[x1] - u[x2]| >= d
        rel_change,           // u[x1]/u[x2] > d  or  < 1/d
        ratio_at_least,       // u[num]/u[den] >= sigma, roles per orientation
        upper_bound,          // u[x2] > d
        exceeds_recorded_max, // v[x2] > v_hi (per node)
        in_subsection,        // v[x2] in the j-th of m equal subsections (per node)
        norm_distance,        // ||v[x1] - v[x2]||_p  <=/>=  d
        rank_at_most,         // rank of v[x2] within its layer <= m
        unconstrained,        // always true
    };

    // The ratio can be read in either direction; the default puts the second
    // input in the numerator.
    enum class RatioOrientation { second_over_first, first_over_second };

    enum class Cmp { le, ge };

    static ValueFunction abs_change(double d);
    static ValueFunction rel_change(double d);
    static ValueFunction ratio_at_least(
        double sigma, RatioOrientation orient = RatioOrientation::second_over_first);
    static ValueFunction upper_bound(double d);
    static ValueFunction exceeds_recorded_max();
    static ValueFunction in_subsection(int j, int m);
    static ValueFunction norm_distance(Norm p, double d, Cmp cmp);
    static ValueFunction rank_at_most(int m);
    static ValueFunction unconstrained();

    Kind kind() const { return kind_; }
    double d() const { return d_; }
    double sigma() const { return sigma_; }
    int j() const { return j_; }
    int m() const { return m_; }
    Norm p() const { return p_; }
    Cmp cmp() const { return cmp_; }
    RatioOrientation orientation() const { return orient_; }

    bool requires_singleton() const;
    bool requires_bounds() const;
    // whether the LP engine can encode this kind as linear constraints
    bool lp_linearizable() const;
    bool symmetric() const;

    std::string describe() const;

    // compact form "kind:key=value,..." used by the CLI and config files
    static ValueFunction parse(const std::string& text);

private:
    ValueFunction() = default;

    Kind kind_ = Kind::unconstrained;
    double d_ = 0.0;
    double sigma_ = 0.0;
    int j_ = 0;
    int m_ = 0;
    Norm p_ = Norm::linf;
    Cmp cmp_ = Cmp::ge;
    RatioOrientation orient_ = RatioOrientation::second_over_first;
};

// Per hidden node recorded value range over a reference dataset.
class NeuronBounds {
public:
    NeuronBounds() = default;
    NeuronBounds(std::vector<std::vector<double>> lo, std::vector<std::vector<double>> hi,
                 std::uint64_t net_hash);

    double lo(int layer, int node) const;
    double hi(int layer, int node) const;
    bool trivial(int layer, int node) const; // interval is exactly [0, 0]
    bool degenerate(int layer, int node) const; // lo == hi (no width to subdivide)
    std::uint64_t net_hash() const { return net_hash_; }

    // [lo, hi] of the j-th of m equal subsections
    std::pair<double, double> subsection(int layer, int node, int j, int m) const;
    // which subsection v falls into, or 0 when v is outside [lo, hi];
    // sections are half-open except the last, which is closed
    int section_of(int layer, int node, double v, int m) const;

private:
    std::vector<std::vector<double>> lo_; // index 0 = layer 2
    std::vector<std::vector<double>> hi_;
    std::uint64_t net_hash_ = 0;
};

} // namespace relucov
