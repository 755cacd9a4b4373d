#include "relucov/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relucov/errors.hpp"

namespace relucov {

std::string lp_status_name(LpStatus s) {
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration_limit";
    }
    return "?";
}

int LpModel::add_variable(const std::string& name, double lo, double hi) {
    if (index_.contains(name)) throw ConfigError("LP variable '" + name + "' already exists");
    const int id = static_cast<int>(names_.size());
    names_.push_back(name);
    index_[name] = id;
    lo_.push_back(lo);
    hi_.push_back(hi);
    return id;
}

int LpModel::variable(const std::string& name) const {
    const int id = find_variable(name);
    if (id < 0) throw ConfigError("unknown LP variable '" + name + "'");
    return id;
}

int LpModel::find_variable(const std::string& name) const {
    const auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

void LpModel::set_bounds(int v, double lo, double hi) {
    lo_[static_cast<std::size_t>(v)] = lo;
    hi_[static_cast<std::size_t>(v)] = hi;
}

void LpModel::add_constraint(std::vector<LpTerm> terms, LpCmp cmp, double rhs, std::string tag) {
    rows_.push_back(LpConstraint{std::move(terms), cmp, rhs, std::move(tag)});
}

void LpModel::remove_constraints_with_tag(const std::string& tag) {
    rows_.erase(std::remove_if(rows_.begin(), rows_.end(),
                               [&](const LpConstraint& c) { return c.tag == tag; }),
                rows_.end());
}

long LpModel::num_constraints() const {
    long n = num_rows();
    for (std::size_t v = 0; v < names_.size(); ++v) {
        if (std::isfinite(lo_[v])) ++n;
        if (std::isfinite(hi_[v])) ++n;
    }
    return n;
}

std::string LpModel::dump() const {
    std::ostringstream out;
    out << "minimize";
    if (objective_.empty()) out << " 0";
    for (const LpTerm& t : objective_)
        out << (t.coef >= 0 ? " +" : " -") << std::fabs(t.coef) << " " << variable_name(t.var);
    out << "\nsubject to\n";
    for (const LpConstraint& c : rows_) {
        out << "  ";
        if (!c.tag.empty()) out << c.tag << ": ";
        if (c.terms.empty()) out << "0";
        for (const LpTerm& t : c.terms)
            out << (t.coef >= 0 ? "+" : "-") << std::fabs(t.coef) << " " << variable_name(t.var)
                << " ";
        out << (c.cmp == LpCmp::le ? "<=" : c.cmp == LpCmp::eq ? "=" : ">=") << " " << c.rhs
            << "\n";
    }
    out << "bounds\n";
    for (std::size_t v = 0; v < names_.size(); ++v) {
        const bool has_lo = std::isfinite(lo_[v]);
        const bool has_hi = std::isfinite(hi_[v]);
        if (!has_lo && !has_hi) continue;
        out << "  ";
        if (has_lo) out << lo_[v] << " <= ";
        out << names_[v];
        if (has_hi) out << " <= " << hi_[v];
        out << "\n";
    }
    return out.str();
}

namespace {

constexpr double kPivotTol = 1e-11;

struct Expr {
    std::vector<LpTerm> terms; // sorted by var, merged, no zero coefs
    double constant = 0.0;
};

std::vector<LpTerm> normalize_terms(std::vector<LpTerm> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const LpTerm& a, const LpTerm& b) { return a.var < b.var; });
    std::vector<LpTerm> out;
    for (const LpTerm& t : terms) {
        if (!out.empty() && out.back().var == t.var) out.back().coef += t.coef;
        else out.push_back(t);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const LpTerm& t) { return t.coef == 0.0; }),
              out.end());
    return out;
}

Expr substitute(const std::vector<LpTerm>& terms, double constant,
                const std::vector<std::optional<Expr>>& defs) {
    Expr out;
    out.constant = constant;
    for (const LpTerm& t : terms) {
        const auto& def = defs[static_cast<std::size_t>(t.var)];
        if (def) {
            out.constant += t.coef * def->constant;
            for (const LpTerm& d : def->terms) out.terms.push_back({d.var, t.coef * d.coef});
        } else {
            out.terms.push_back(t);
        }
    }
    out.terms = normalize_terms(std::move(out.terms));
    return out;
}

// replace `var` inside `e` with `repl`
void substitute_one(Expr& e, int var, const Expr& repl) {
    double coef = 0.0;
    for (const LpTerm& t : e.terms)
        if (t.var == var) coef = t.coef;
    if (coef == 0.0) return;
    std::vector<LpTerm> terms;
    for (const LpTerm& t : e.terms)
        if (t.var != var) terms.push_back(t);
    for (const LpTerm& t : repl.terms) terms.push_back({t.var, coef * t.coef});
    e.constant += coef * repl.constant;
    e.terms = normalize_terms(std::move(terms));
}

enum class VarMap { shift_lo, mirror_hi, split };

} // namespace

double constraint_violation(const LpModel& model, const Vec& values) {
    double worst = 0.0;
    for (const LpConstraint& c : model.constraints()) {
        double lhs = 0.0;
        for (const LpTerm& t : c.terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
        double v = 0.0;
        switch (c.cmp) {
        case LpCmp::le: v = lhs - c.rhs; break;
        case LpCmp::ge: v = c.rhs - lhs; break;
        case LpCmp::eq: v = std::fabs(lhs - c.rhs); break;
        }
        worst = std::max(worst, v);
    }
    for (int v = 0; v < model.num_variables(); ++v) {
        const double x = values[static_cast<std::size_t>(v)];
        if (std::isfinite(model.lower_bound(v))) worst = std::max(worst, model.lower_bound(v) - x);
        if (std::isfinite(model.upper_bound(v))) worst = std::max(worst, x - model.upper_bound(v));
    }
    return worst;
}

Vec LpSolution::input(const LpModel& model) const {
    Vec x;
    for (int i = 1;; ++i) {
        const int v = model.find_variable(lp_input_name(i));
        if (v < 0) break;
        x.push_back(values[static_cast<std::size_t>(v)]);
    }
    return x;
}

LpSolution solve(const LpModel& model, const LpSolveOptions& opts) {
    LpSolution solution;
    const int nv = model.num_variables();

    // Equality rows are eliminated by substitution before the tableau is
    // built; the pattern encodings are triangular, so this reduces a model
    // to the input variables plus the objective bound.
    std::vector<std::optional<Expr>> defs(static_cast<std::size_t>(nv));
    struct RawRow {
        std::vector<LpTerm> terms;
        LpCmp cmp;
        double rhs;
    };
    std::vector<RawRow> raw_rows;

    for (const LpConstraint& c : model.constraints()) {
        if (c.cmp != LpCmp::eq) {
            raw_rows.push_back({c.terms, c.cmp, c.rhs});
            continue;
        }
        Expr e = substitute(c.terms, -c.rhs, defs); // e == 0
        if (e.terms.empty()) {
            if (std::fabs(e.constant) > 1e-9 * std::max(1.0, std::fabs(c.rhs))) {
                solution.status = LpStatus::infeasible;
                return solution;
            }
            continue;
        }
        double max_coef = 0.0;
        for (const LpTerm& t : e.terms) max_coef = std::max(max_coef, std::fabs(t.coef));
        int pivot = -1;
        bool pivot_free = false;
        double pivot_coef = 0.0;
        for (const LpTerm& t : e.terms) {
            if (std::fabs(t.coef) < std::max(kPivotTol, 1e-7 * max_coef)) continue;
            const bool is_free = !std::isfinite(model.lower_bound(t.var)) &&
                                 !std::isfinite(model.upper_bound(t.var));
            const bool better =
                pivot == -1 || (is_free && !pivot_free) ||
                (is_free == pivot_free && std::fabs(t.coef) > std::fabs(pivot_coef));
            if (better) {
                pivot = t.var;
                pivot_free = is_free;
                pivot_coef = t.coef;
            }
        }
        if (pivot == -1) {
            // numerically vacuous row
            continue;
        }
        Expr def;
        def.constant = -e.constant / pivot_coef;
        for (const LpTerm& t : e.terms)
            if (t.var != pivot) def.terms.push_back({t.var, -t.coef / pivot_coef});
        def.terms = normalize_terms(std::move(def.terms));
        for (auto& existing : defs)
            if (existing) substitute_one(*existing, pivot, def);
        defs[static_cast<std::size_t>(pivot)] = std::move(def);
        if (!pivot_free) {
            // keep the eliminated variable's bounds as rows
            if (std::isfinite(model.lower_bound(pivot)))
                raw_rows.push_back({{{pivot, 1.0}}, LpCmp::ge, model.lower_bound(pivot)});
            if (std::isfinite(model.upper_bound(pivot)))
                raw_rows.push_back({{{pivot, 1.0}}, LpCmp::le, model.upper_bound(pivot)});
        }
    }

    // Substitute definitions into the inequality rows.
    struct ReducedRow {
        Expr lhs;
        LpCmp cmp;
        double rhs;
    };
    std::vector<ReducedRow> rows;
    for (const RawRow& r : raw_rows) {
        Expr e = substitute(r.terms, 0.0, defs);
        const double rhs = r.rhs - e.constant;
        e.constant = 0.0;
        if (e.terms.empty()) {
            const double tol = 1e-9 * std::max(1.0, std::fabs(r.rhs));
            const bool ok = r.cmp == LpCmp::le ? 0.0 <= rhs + tol : 0.0 >= rhs - tol;
            if (!ok) {
                solution.status = LpStatus::infeasible;
                return solution;
            }
            continue;
        }
        rows.push_back({std::move(e), r.cmp, rhs});
    }

    // Map every remaining variable onto nonnegative tableau columns.
    std::vector<VarMap> mapping(static_cast<std::size_t>(nv), VarMap::split);
    std::vector<int> col_of(static_cast<std::size_t>(nv), -1);
    int ncols = 0;
    for (int v = 0; v < nv; ++v) {
        if (defs[static_cast<std::size_t>(v)]) continue;
        const double lo = model.lower_bound(v);
        const double hi = model.upper_bound(v);
        if (std::isfinite(lo)) {
            mapping[static_cast<std::size_t>(v)] = VarMap::shift_lo;
            col_of[static_cast<std::size_t>(v)] = ncols;
            ncols += 1;
            if (std::isfinite(hi)) rows.push_back({Expr{{{v, 1.0}}, 0.0}, LpCmp::le, hi});
        } else if (std::isfinite(hi)) {
            mapping[static_cast<std::size_t>(v)] = VarMap::mirror_hi;
            col_of[static_cast<std::size_t>(v)] = ncols;
            ncols += 1;
        } else {
            mapping[static_cast<std::size_t>(v)] = VarMap::split;
            col_of[static_cast<std::size_t>(v)] = ncols;
            ncols += 2;
        }
    }

    DenseLp dense;
    dense.num_vars = ncols;
    dense.objective.assign(static_cast<std::size_t>(ncols), 0.0);

    auto emit_row = [&](const ReducedRow& r) {
        Vec row(static_cast<std::size_t>(ncols), 0.0);
        double rhs = r.rhs;
        for (const LpTerm& t : r.lhs.terms) {
            const auto v = static_cast<std::size_t>(t.var);
            const int col = col_of[v];
            switch (mapping[v]) {
            case VarMap::shift_lo:
                row[static_cast<std::size_t>(col)] += t.coef;
                rhs -= t.coef * model.lower_bound(t.var);
                break;
            case VarMap::mirror_hi:
                row[static_cast<std::size_t>(col)] -= t.coef;
                rhs -= t.coef * model.upper_bound(t.var);
                break;
            case VarMap::split:
                row[static_cast<std::size_t>(col)] += t.coef;
                row[static_cast<std::size_t>(col + 1)] -= t.coef;
                break;
            }
        }
        if (r.cmp == LpCmp::ge) {
            for (double& c : row) c = -c;
            rhs = -rhs;
        }
        dense.rows.push_back(std::move(row));
        dense.rhs.push_back(rhs);
    };
    for (const ReducedRow& r : rows) emit_row(r);

    {
        const Expr obj = substitute(model.objective(), 0.0, defs);
        for (const LpTerm& t : obj.terms) {
            const auto v = static_cast<std::size_t>(t.var);
            const int col = col_of[v];
            switch (mapping[v]) {
            case VarMap::shift_lo: dense.objective[static_cast<std::size_t>(col)] += t.coef; break;
            case VarMap::mirror_hi: dense.objective[static_cast<std::size_t>(col)] -= t.coef; break;
            case VarMap::split:
                dense.objective[static_cast<std::size_t>(col)] += t.coef;
                dense.objective[static_cast<std::size_t>(col + 1)] -= t.coef;
                break;
            }
        }
    }

    const SimplexResult core = solve_dense(dense, opts.max_iterations);
    solution.iterations = core.iterations;
    switch (core.status) {
    case SimplexStatus::optimal: solution.status = LpStatus::optimal; break;
    case SimplexStatus::infeasible: solution.status = LpStatus::infeasible; return solution;
    case SimplexStatus::unbounded: solution.status = LpStatus::unbounded; return solution;
    case SimplexStatus::iteration_limit:
        solution.status = LpStatus::iteration_limit;
        return solution;
    }

    solution.values.assign(static_cast<std::size_t>(nv), 0.0);
    for (int v = 0; v < nv; ++v) {
        if (defs[static_cast<std::size_t>(v)]) continue;
        const int col = col_of[static_cast<std::size_t>(v)];
        double value = 0.0;
        switch (mapping[static_cast<std::size_t>(v)]) {
        case VarMap::shift_lo:
            value = model.lower_bound(v) + core.y[static_cast<std::size_t>(col)];
            break;
        case VarMap::mirror_hi:
            value = model.upper_bound(v) - core.y[static_cast<std::size_t>(col)];
            break;
        case VarMap::split:
            value = core.y[static_cast<std::size_t>(col)] - core.y[static_cast<std::size_t>(col + 1)];
            break;
        }
        solution.values[static_cast<std::size_t>(v)] = value;
    }
    for (int v = 0; v < nv; ++v) {
        const auto& def = defs[static_cast<std::size_t>(v)];
        if (!def) continue;
        double value = def->constant;
        for (const LpTerm& t : def->terms)
            value += t.coef * solution.values[static_cast<std::size_t>(t.var)];
        solution.values[static_cast<std::size_t>(v)] = value;
    }

    double obj = 0.0;
    for (const LpTerm& t : normalize_terms(model.objective()))
        obj += t.coef * solution.values[static_cast<std::size_t>(t.var)];
    solution.objective = obj;
    solution.max_violation = constraint_violation(model, solution.values);
    return solution;
}

std::string lp_input_name(int i) { return "x_" + std::to_string(i); }
std::string lp_u_name(int k, int i) {
    return "u_" + std::to_string(k) + "_" + std::to_string(i);
}
std::string lp_v_name(int k, int i) {
    return "v_" + std::to_string(k) + "_" + std::to_string(i);
}

namespace {

std::string sign_tag(int k, int i) { return "sign:" + std::to_string(k) + ":" + std::to_string(i); }
std::string relu_tag(int k, int i) { return "relu:" + std::to_string(k) + ":" + std::to_string(i); }
std::string def_tag(int k, int i) { return "def:" + std::to_string(k) + ":" + std::to_string(i); }

// (Re)writes the sign and relu-link constraints of one encoded node.
void apply_node_sign(LpModel& model, int k, int i, int sign, double delta) {
    model.remove_constraints_with_tag(sign_tag(k, i));
    model.remove_constraints_with_tag(relu_tag(k, i));
    const int u = model.variable(lp_u_name(k, i));
    const int v = model.variable(lp_v_name(k, i));
    if (sign > 0) {
        model.add_constraint({{u, 1.0}}, LpCmp::ge, 0.0, sign_tag(k, i));
        model.add_constraint({{v, 1.0}, {u, -1.0}}, LpCmp::eq, 0.0, relu_tag(k, i));
    } else {
        model.add_constraint({{u, 1.0}}, LpCmp::le, -delta, sign_tag(k, i));
        model.add_constraint({{v, 1.0}}, LpCmp::eq, 0.0, relu_tag(k, i));
    }
}

} // namespace

LpModel build_pattern_model(const Network& net,
                            const std::vector<std::vector<std::int8_t>>& signs, int depth,
                            double delta) {
    const int K = net.layer_count();
    if (depth < 2 || depth > K - 1)
        throw ConfigError("pattern depth must be in [2.." + std::to_string(K - 1) + "]");
    if (static_cast<int>(signs.size()) < depth - 1)
        throw InputError("sign assignment does not reach layer " + std::to_string(depth));
    if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");

    LpModel model;
    model.depth = depth;
    model.strictness = delta;
    model.net_hash = net.hash();

    for (int i = 1; i <= net.input_size(); ++i) {
        double lo = -LpModel::kInf;
        double hi = LpModel::kInf;
        if (net.input_domain()) {
            lo = net.input_domain()->lo[static_cast<std::size_t>(i - 1)];
            hi = net.input_domain()->hi[static_cast<std::size_t>(i - 1)];
        }
        model.add_variable(lp_input_name(i), lo, hi);
    }

    for (int k = 2; k <= depth; ++k) {
        const auto& layer_signs = signs[static_cast<std::size_t>(k - 2)];
        if (static_cast<int>(layer_signs.size()) != net.layer_size(k))
            throw InputError("sign assignment for layer " + std::to_string(k) +
                             " has wrong length");
        for (int i = 1; i <= net.layer_size(k); ++i) {
            const int u = model.add_variable(lp_u_name(k, i));
            model.add_variable(lp_v_name(k, i));
            std::vector<LpTerm> def{{u, 1.0}};
            for (int h = 1; h <= net.layer_size(k - 1); ++h) {
                const int prev = k == 2 ? model.variable(lp_input_name(h))
                                        : model.variable(lp_v_name(k - 1, h));
                const double w = net.weight(k - 1, h, i);
                if (w != 0.0) def.push_back({prev, -w});
            }
            model.add_constraint(std::move(def), LpCmp::eq, net.bias(k, i), def_tag(k, i));
            apply_node_sign(model, k, i, layer_signs[static_cast<std::size_t>(i - 1)], delta);
        }
    }
    return model;
}

LpModel build_pattern_model(const Network& net, const ActivationTrace& trace, int depth,
                            double delta) {
    if (trace.net_hash != net.hash())
        throw InputError("trace comes from a different network");
    return build_pattern_model(net, trace.signs, depth, delta);
}

namespace {

void add_infeasible_marker(LpModel& model, const std::string& tag) {
    model.add_constraint({}, LpCmp::ge, 1.0, tag);
}

// Linearizes one value-function constraint on a sign-kept feature. u1 is the
// seed's pre-activation value of the node; sections and recorded maxima read
// the v variable instead.
void add_vc_constraints(LpModel& model, const ValueFunction& g, const Feature& feature,
                        const ActivationTrace& seed, const NeuronBounds* bounds,
                        const std::string& tag) {
    if (!g.lp_linearizable())
        throw ConfigError("value function '" + g.describe() +
                          "' cannot be encoded linearly; use the gradient engine");
    if (g.requires_singleton() && !feature.is_singleton())
        throw ConfigError(g.describe() + " requires a singleton feature");
    if (g.requires_bounds()) {
        if (bounds == nullptr) throw ConfigError(g.describe() + " needs recorded neuron bounds");
        if (bounds->net_hash() != seed.net_hash)
            throw InputError("neuron bounds come from a different network");
    }
    const int k = feature.layer;
    const double delta = model.strictness;

    switch (g.kind()) {
    case ValueFunction::Kind::unconstrained:
        return;
    case ValueFunction::Kind::upper_bound: {
        const int u = model.variable(lp_u_name(k, feature.nodes.front()));
        model.add_constraint({{u, 1.0}}, LpCmp::ge, g.d() + delta, tag);
        return;
    }
    case ValueFunction::Kind::abs_change: {
        const int n = feature.nodes.front();
        const int u = model.variable(lp_u_name(k, n));
        const double u1 = seed.u(k, n);
        // |u - u1| >= d is disjunctive; pick the branch that stays on the
        // node's kept sign, preferring the move toward zero
        const int sign = seed.sign(k, n);
        bool decrease;
        if (sign > 0) decrease = u1 - g.d() >= 0.0;
        else decrease = !(u1 + g.d() <= -delta);
        if (decrease) model.add_constraint({{u, 1.0}}, LpCmp::le, u1 - g.d(), tag);
        else model.add_constraint({{u, 1.0}}, LpCmp::ge, u1 + g.d(), tag);
        return;
    }
    case ValueFunction::Kind::ratio_at_least: {
        const int n = feature.nodes.front();
        const int u = model.variable(lp_u_name(k, n));
        const double u1 = seed.u(k, n);
        if (u1 == 0.0) {
            add_infeasible_marker(model, tag);
            return;
        }
        if (g.orientation() == ValueFunction::RatioOrientation::second_over_first) {
            // u/u1 >= sigma
            if (u1 > 0.0) model.add_constraint({{u, 1.0}}, LpCmp::ge, g.sigma() * u1, tag);
            else model.add_constraint({{u, 1.0}}, LpCmp::le, g.sigma() * u1, tag);
        } else {
            // u1/u >= sigma, which keeps u on u1's side of zero
            if (u1 > 0.0) model.add_constraint({{u, 1.0}}, LpCmp::le, u1 / g.sigma(), tag);
            else model.add_constraint({{u, 1.0}}, LpCmp::ge, u1 / g.sigma(), tag);
        }
        return;
    }
    case ValueFunction::Kind::exceeds_recorded_max: {
        for (int n : feature.nodes) {
            const int v = model.variable(lp_v_name(k, n));
            model.add_constraint({{v, 1.0}}, LpCmp::ge, bounds->hi(k, n) + delta, tag);
        }
        return;
    }
    case ValueFunction::Kind::in_subsection: {
        for (int n : feature.nodes) {
            const int v = model.variable(lp_v_name(k, n));
            const auto [lo, hi] = bounds->subsection(k, n, g.j(), g.m());
            model.add_constraint({{v, 1.0}}, LpCmp::ge, lo, tag);
            // interior sections are half-open on the right
            const double right = g.j() < g.m() ? hi - delta : hi;
            model.add_constraint({{v, 1.0}}, LpCmp::le, right, tag);
        }
        return;
    }
    default:
        throw ConfigError("value function '" + g.describe() + "' cannot be encoded linearly");
    }
}

} // namespace

LpModel add_test_condition(LpModel model, const FeaturePair& pair, CoveringMethod method,
                           const ActivationTrace& seed, const std::optional<ValueFunction>& g1,
                           const std::optional<ValueFunction>& g2, const NeuronBounds* bounds) {
    if (seed.net_hash != model.net_hash)
        throw InputError("seed trace comes from a different network");
    if (pair.decision.layer != model.depth)
        throw ConfigError("model depth is " + std::to_string(model.depth) +
                          " but the pair's decision layer is " +
                          std::to_string(pair.decision.layer));
    CoverageCriterion criterion{method, g1, g2, bounds};
    criterion.validate();

    const double delta = model.strictness;
    const auto flip = [&](const Feature& f) {
        for (int n : f.nodes) apply_node_sign(model, f.layer, n, -seed.sign(f.layer, n), delta);
    };
    // The covering methods say nothing about decision-layer nodes outside the
    // decision feature, so their sign pins are lifted; their u stays defined.
    const int dk = pair.decision.layer;
    for (int n = 1; n <= seed.layer_size(dk); ++n) {
        if (pair.decision.contains(n)) continue;
        model.remove_constraints_with_tag("sign:" + std::to_string(dk) + ":" + std::to_string(n));
        model.remove_constraints_with_tag("relu:" + std::to_string(dk) + ":" + std::to_string(n));
    }

    switch (method) {
    case CoveringMethod::ss:
        flip(pair.condition);
        flip(pair.decision);
        break;
    case CoveringMethod::vs:
        flip(pair.decision);
        add_vc_constraints(model, *g1, pair.condition, seed, bounds, "cond:g1");
        break;
    case CoveringMethod::sv:
        flip(pair.condition);
        add_vc_constraints(model, *g2, pair.decision, seed, bounds, "cond:g2");
        break;
    case CoveringMethod::vv:
        add_vc_constraints(model, *g1, pair.condition, seed, bounds, "cond:g1");
        add_vc_constraints(model, *g2, pair.decision, seed, bounds, "cond:g2");
        break;
    }
    return model;
}

LpModel add_linf_objective(LpModel model, const Vec& x1) {
    const int t = model.add_variable("t", 0.0);
    for (int i = 1; i <= static_cast<int>(x1.size()); ++i) {
        const int x = model.find_variable(lp_input_name(i));
        if (x < 0)
            throw ConfigError("objective input vector is longer than the model's input");
        const double c = x1[static_cast<std::size_t>(i - 1)];
        model.add_constraint({{x, 1.0}, {t, -1.0}}, LpCmp::le, c,
                             "obj:hi:" + std::to_string(i));
        model.add_constraint({{x, 1.0}, {t, 1.0}}, LpCmp::ge, c,
                             "obj:lo:" + std::to_string(i));
    }
    if (model.find_variable(lp_input_name(static_cast<int>(x1.size()) + 1)) >= 0)
        throw ConfigError("objective input vector is shorter than the model's input");
    model.set_objective({{t, 1.0}});
    return model;
}

} // namespace relucov
