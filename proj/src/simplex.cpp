#include "relucov/simplex.hpp"

#include <cmath>
#include <utility>

namespace relucov {

namespace {

constexpr double kEps = 1e-9;

// Dictionary-form tableau. Column ids: structural j in [0, n); slack of row i
// is n + i; the phase-1 artificial is -1 and starts in column n. Row m holds
// the phase-2 objective, row m+1 the phase-1 objective.
class Tableau {
public:
    Tableau(const DenseLp& lp, long max_iterations)
        : m_(static_cast<int>(lp.rows.size())), n_(lp.num_vars), max_iter_(max_iterations),
          d_(static_cast<std::size_t>(m_ + 2), Vec(static_cast<std::size_t>(n_ + 2), 0.0)),
          basic_(static_cast<std::size_t>(m_)), nonbasic_(static_cast<std::size_t>(n_ + 1)) {
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j)
                at(i, j) = lp.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            at(i, n_) = -1.0;
            at(i, n_ + 1) = lp.rhs[static_cast<std::size_t>(i)];
            basic_[static_cast<std::size_t>(i)] = n_ + i;
        }
        // minimize c.y realized as maximize -c.y; the optimum is -at(m, n+1)
        for (int j = 0; j < n_; ++j) {
            at(m_, j) = lp.objective[static_cast<std::size_t>(j)];
            nonbasic_[static_cast<std::size_t>(j)] = j;
        }
        nonbasic_[static_cast<std::size_t>(n_)] = -1;
        at(m_ + 1, n_) = 1.0;
    }

    SimplexResult run() {
        SimplexResult result;
        int worst = 0;
        for (int i = 1; i < m_; ++i)
            if (at(i, n_ + 1) < at(worst, n_ + 1)) worst = i;
        if (m_ > 0 && at(worst, n_ + 1) < -kEps) {
            pivot(worst, n_);
            if (!optimize(m_ + 1, /*allow_artificial=*/true)) {
                result.status = SimplexStatus::iteration_limit;
                result.iterations = iterations_;
                return result;
            }
            if (at(m_ + 1, n_ + 1) < -kEps) {
                result.status = SimplexStatus::infeasible;
                result.iterations = iterations_;
                return result;
            }
            drive_out_artificial();
        }
        const bool done = optimize(m_, /*allow_artificial=*/false);
        result.iterations = iterations_;
        if (!done) {
            result.status = SimplexStatus::iteration_limit;
            return result;
        }
        if (unbounded_) {
            result.status = SimplexStatus::unbounded;
            return result;
        }
        result.status = SimplexStatus::optimal;
        result.y.assign(static_cast<std::size_t>(n_), 0.0);
        for (int i = 0; i < m_; ++i) {
            const int id = basic_[static_cast<std::size_t>(i)];
            if (id >= 0 && id < n_) result.y[static_cast<std::size_t>(id)] = at(i, n_ + 1);
        }
        result.objective = -at(m_, n_ + 1);
        return result;
    }

private:
    double& at(int r, int c) {
        return d_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    double at(int r, int c) const {
        return d_[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }

    void pivot(int r, int s) {
        Vec& prow = d_[static_cast<std::size_t>(r)];
        const double inv = 1.0 / prow[static_cast<std::size_t>(s)];
        for (int i = 0; i < m_ + 2; ++i) {
            if (i == r) continue;
            Vec& row = d_[static_cast<std::size_t>(i)];
            const double coef = row[static_cast<std::size_t>(s)];
            if (std::fabs(coef) > 1e-14) {
                const double factor = coef * inv;
                for (int j = 0; j < n_ + 2; ++j)
                    row[static_cast<std::size_t>(j)] -= prow[static_cast<std::size_t>(j)] * factor;
                // the subtraction zeroed the pivot column; put the original
                // value back so the column rescale below lands on -coef*inv
                row[static_cast<std::size_t>(s)] = coef;
            }
        }
        for (int j = 0; j < n_ + 2; ++j)
            if (j != s) prow[static_cast<std::size_t>(j)] *= inv;
        for (int i = 0; i < m_ + 2; ++i)
            if (i != r) d_[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] *= -inv;
        prow[static_cast<std::size_t>(s)] = inv;
        std::swap(basic_[static_cast<std::size_t>(r)], nonbasic_[static_cast<std::size_t>(s)]);
        ++iterations_;
    }

    // Maximizes objective row `obj`. Returns false on hitting the iteration
    // limit; sets unbounded_ when no leaving row exists.
    bool optimize(int obj, bool allow_artificial) {
        long stall = 0;
        double last = at(obj, n_ + 1);
        const long stall_limit = 2L * (m_ + n_) + 100;
        for (;;) {
            if (iterations_ >= max_iter_) return false;
            const bool bland = stall > stall_limit;
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                const int id = nonbasic_[static_cast<std::size_t>(j)];
                if (!allow_artificial && id == -1) continue;
                if (bland) {
                    if (at(obj, j) < -kEps &&
                        (s == -1 || id < nonbasic_[static_cast<std::size_t>(s)]))
                        s = j;
                } else {
                    if (s == -1 ||
                        std::make_pair(at(obj, j), id) <
                            std::make_pair(at(obj, s), nonbasic_[static_cast<std::size_t>(s)]))
                        s = j;
                }
            }
            if (s == -1 || at(obj, s) >= -kEps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (at(i, s) <= kEps) continue;
                if (r == -1 ||
                    std::make_pair(at(i, n_ + 1) / at(i, s), basic_[static_cast<std::size_t>(i)]) <
                        std::make_pair(at(r, n_ + 1) / at(r, s),
                                       basic_[static_cast<std::size_t>(r)]))
                    r = i;
            }
            if (r == -1) {
                unbounded_ = true;
                return true;
            }
            pivot(r, s);
            const double now = at(obj, n_ + 1);
            if (now > last + kEps) {
                stall = 0;
                last = now;
            } else {
                ++stall;
            }
        }
    }

    // After a successful phase 1 the artificial may still sit in the basis at
    // value zero; pivot it out, or drop its row when the row carries no other
    // usable coefficient.
    void drive_out_artificial() {
        for (int i = 0; i < m_; ++i) {
            if (basic_[static_cast<std::size_t>(i)] != -1) continue;
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (std::fabs(at(i, j)) <= kEps) continue;
                if (s == -1 ||
                    std::make_pair(at(i, j), nonbasic_[static_cast<std::size_t>(j)]) <
                        std::make_pair(at(i, s), nonbasic_[static_cast<std::size_t>(s)]))
                    s = j;
            }
            if (s != -1) {
                pivot(i, s);
            } else {
                d_.erase(d_.begin() + i);
                basic_.erase(basic_.begin() + i);
                --m_;
            }
            return;
        }
    }

    int m_;
    int n_;
    long max_iter_;
    long iterations_ = 0;
    bool unbounded_ = false;
    std::vector<Vec> d_;
    std::vector<int> basic_;
    std::vector<int> nonbasic_;
};

} // namespace

SimplexResult solve_dense(const DenseLp& lp, long max_iterations) {
    SimplexResult result;
    if (lp.num_vars == 0) {
        for (double b : lp.rhs) {
            if (b < -kEps) {
                result.status = SimplexStatus::infeasible;
                return result;
            }
        }
        result.status = SimplexStatus::optimal;
        return result;
    }
    Tableau tableau(lp, max_iterations);
    return tableau.run();
}

} // namespace relucov
