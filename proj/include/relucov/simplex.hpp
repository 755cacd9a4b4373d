#pragma once

#include <vector>

#include "relucov/linalg.hpp"

namespace relucov {

enum class SimplexStatus { optimal, infeasible, unbounded, iteration_limit };

// minimize c.y  subject to  A y <= b,  y >= 0
struct DenseLp {
    int num_vars = 0;
    std::vector<Vec> rows; // each of length num_vars
    Vec rhs;
    Vec objective;
};

struct SimplexResult {
    SimplexStatus status = SimplexStatus::optimal;
    Vec y;
    double objective = 0.0;
    long iterations = 0;
};

// Two-phase dense tableau simplex. Deterministic: entering/leaving choices
// break ties by variable id, and the entering rule degrades to Bland's rule
// after a long degenerate stall so cycling cannot occur.
SimplexResult solve_dense(const DenseLp& lp, long max_iterations = 100000);

} // namespace relucov
