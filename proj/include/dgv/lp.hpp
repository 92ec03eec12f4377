#pragma once

#include <optional>
#include <vector>

#include "dgv/common.hpp"

namespace dgv::opt {

enum class Rel { le, eq, ge };

enum class LpStatus { optimal, unbounded, infeasible };

struct LpRow {
    Vec coeffs;
    Rel rel = Rel::le;
    double rhs = 0.0;
};

struct VarBound {
    std::optional<double> lower;  // absent: unbounded below
    std::optional<double> upper;  // absent: unbounded above
};

// max (or min) objective . x subject to rows and per-variable bounds.
// Variables without an entry in var_bounds are free.
struct LinearProgram {
    Vec objective;
    std::vector<LpRow> rows;
    std::vector<VarBound> var_bounds;  // empty, or one entry per variable
    bool maximize = true;
    int max_iterations = 50000;
};

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double value = 0.0;
    Vec solution;
    // One multiplier per input row (order preserved): for the optimal basis,
    // objective . solution == sum_i row_duals[i] * rhs_i + bound terms, and on
    // equality-constrained programs these are the classical dual variables.
    Vec row_duals;
    int iterations = 0;
};

// Dense two-phase simplex. Degeneracy is guarded by switching the entering
// rule to Bland's after a stall, which makes cycling impossible; exceeding
// max_iterations raises ResourceError.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace dgv::opt
