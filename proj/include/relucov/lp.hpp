#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "relucov/coverage.hpp"
#include "relucov/features.hpp"
#include "relucov/network.hpp"
#include "relucov/simplex.hpp"
#include "relucov/value_function.hpp"

namespace relucov {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

std::string lp_status_name(LpStatus s);

enum class LpCmp { le, eq, ge };

struct LpTerm {
    int var = 0;
    double coef = 0.0;
};

struct LpConstraint {
    std::vector<LpTerm> terms;
    LpCmp cmp = LpCmp::le;
    double rhs = 0.0;
    std::string tag;
};

// A named-variable linear model: minimize the objective subject to linear
// rows and per-variable bounds. Building and solving are pure per call.
class LpModel {
public:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    int add_variable(const std::string& name, double lo = -kInf, double hi = kInf);
    int variable(const std::string& name) const;      // throws when missing
    int find_variable(const std::string& name) const; // -1 when missing
    const std::string& variable_name(int v) const { return names_[static_cast<std::size_t>(v)]; }
    int num_variables() const { return static_cast<int>(names_.size()); }
    double lower_bound(int v) const { return lo_[static_cast<std::size_t>(v)]; }
    double upper_bound(int v) const { return hi_[static_cast<std::size_t>(v)]; }
    void set_bounds(int v, double lo, double hi);

    void add_constraint(std::vector<LpTerm> terms, LpCmp cmp, double rhs, std::string tag = "");
    void remove_constraints_with_tag(const std::string& tag);
    const std::vector<LpConstraint>& constraints() const { return rows_; }

    void set_objective(std::vector<LpTerm> terms) { objective_ = std::move(terms); }
    const std::vector<LpTerm>& objective() const { return objective_; }

    // rows plus finite variable bounds
    long num_constraints() const;
    long num_rows() const { return static_cast<long>(rows_.size()); }

    // human-readable dump: objective, one constraint per line, bounds
    std::string dump() const;

    int depth = 0;            // deepest encoded layer
    double strictness = 1e-6; // delta used for strict inequalities
    std::uint64_t net_hash = 0;

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
    std::vector<double> lo_;
    std::vector<double> hi_;
    std::vector<LpConstraint> rows_;
    std::vector<LpTerm> objective_;
};

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vec values; // one per model variable
    double objective = 0.0;
    double max_violation = 0.0;
    long iterations = 0;

    // extracts x_1..x_n from the assignment
    Vec input(const LpModel& model) const;
};

struct LpSolveOptions {
    long max_iterations = 100000;
};

LpSolution solve(const LpModel& model, const LpSolveOptions& opts = {});

// largest absolute violation of any row or bound at the given assignment
double constraint_violation(const LpModel& model, const Vec& values);

// Variable names used by the pattern encodings.
std::string lp_input_name(int i);
std::string lp_u_name(int k, int i);
std::string lp_v_name(int k, int i);

// Encodes the activation pattern of `trace` for layers 2..depth: per node an
// affine definition of u, the sign constraint (u >= 0, or u <= -delta for
// deactivated nodes), and the matching relu link (v = u or v = 0). Input
// variables carry the network's input domain as bounds when present.
LpModel build_pattern_model(const Network& net, const ActivationTrace& trace, int depth,
                            double delta = 1e-6);

// Same, from an explicit sign assignment (+1/-1 per hidden node, layers
// 2..depth, index 0 = layer 2).
LpModel build_pattern_model(const Network& net, const std::vector<std::vector<std::int8_t>>& signs,
                            int depth, double delta = 1e-6);

// Rewrites the pattern so a solution, paired with the seed, meets the
// covering method's test condition: sign flips for the SS/SV condition and
// SS/VS decision, plus linearized value-function constraints. Value-function
// kinds that cannot be expressed linearly are rejected.
LpModel add_test_condition(LpModel model, const FeaturePair& pair, CoveringMethod method,
                           const ActivationTrace& seed, const std::optional<ValueFunction>& g1,
                           const std::optional<ValueFunction>& g2,
                           const NeuronBounds* bounds = nullptr);

// Adds t >= 0 with -t <= x_i - x1_i <= t per input dimension and sets the
// objective to minimize t.
LpModel add_linf_objective(LpModel model, const Vec& x1);

} // namespace relucov
