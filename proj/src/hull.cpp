#include "dgv/hull.hpp"

#include <stdexcept>

#include "dgv/lp.hpp"

namespace dgv::opt {

namespace {

// Least infeasibility of the convex recombination: minimize t subject to
// sum(w) = 1, |sum_i w_i g_i[d] - p[d]| <= t, w >= 0, t >= 0.
// Always feasible and bounded, so a zero-ish optimum decides membership and
// hands back the weights in one solve.
LpResult recombination_gap(const Vec& p, const std::vector<Vec>& gens) {
    const std::size_t m = gens.size();
    const std::size_t d = p.size();
    LinearProgram lp;
    lp.maximize = false;
    lp.objective.assign(m + 1, 0.0);
    lp.objective[m] = 1.0;
    lp.var_bounds.assign(m + 1, VarBound{0.0, std::nullopt});

    LpRow total;
    total.coeffs.assign(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) total.coeffs[i] = 1.0;
    total.rel = Rel::eq;
    total.rhs = 1.0;
    lp.rows.push_back(std::move(total));

    for (std::size_t k = 0; k < d; ++k) {
        LpRow hi, lo;
        hi.coeffs.assign(m + 1, 0.0);
        for (std::size_t i = 0; i < m; ++i) hi.coeffs[i] = gens[i][k];
        lo.coeffs = hi.coeffs;
        hi.coeffs[m] = -1.0;
        hi.rel = Rel::le;
        hi.rhs = p[k];
        lo.coeffs[m] = 1.0;
        lo.rel = Rel::ge;
        lo.rhs = p[k];
        lp.rows.push_back(std::move(hi));
        lp.rows.push_back(std::move(lo));
    }
    return solve_lp(lp);
}

// Best separation achievable with a box-bounded functional:
// maximize y.p - s subject to y.g_i <= s, -1 <= y_j <= 1, s free.
// The optimum is the l1 distance from p to the hull; positive iff p is outside.
LpResult separation(const Vec& p, const std::vector<Vec>& gens) {
    const std::size_t m = gens.size();
    const std::size_t d = p.size();
    LinearProgram lp;
    lp.maximize = true;
    lp.objective = p;
    lp.objective.push_back(-1.0);
    lp.var_bounds.assign(d, VarBound{-1.0, 1.0});
    lp.var_bounds.push_back(VarBound{});

    for (std::size_t i = 0; i < m; ++i) {
        LpRow row;
        row.coeffs = gens[i];
        row.coeffs.push_back(-1.0);
        row.rel = Rel::le;
        row.rhs = 0.0;
        lp.rows.push_back(std::move(row));
    }
    return solve_lp(lp);
}

}  // namespace

HullMembership hull_membership(const Vec& point, const std::vector<Vec>& generators) {
    if (generators.empty()) throw std::invalid_argument("hull_membership: no generators");
    for (const Vec& g : generators)
        if (g.size() != point.size())
            throw std::invalid_argument("hull_membership: dimension mismatch");

    HullMembership out;
    const LpResult gap = recombination_gap(point, generators);
    if (gap.status != LpStatus::optimal)
        throw std::runtime_error("hull_membership: recombination LP not optimal");
    if (gap.value <= kCertTol) {
        out.inside = true;
        out.weights.assign(gap.solution.begin(), gap.solution.begin() + generators.size());
        // Simplex roundoff can leave weights a hair negative; clamp and renormalize.
        double total = 0.0;
        for (double& w : out.weights) {
            if (w < 0.0) w = 0.0;
            total += w;
        }
        for (double& w : out.weights) w /= total;
        return out;
    }

    const LpResult sep = separation(point, generators);
    if (sep.status != LpStatus::optimal)
        throw std::runtime_error("hull_membership: separation LP not optimal");
    out.inside = false;
    out.separator.assign(sep.solution.begin(), sep.solution.begin() + point.size());
    out.margin = sep.value;
    return out;
}

}  // namespace dgv::opt
