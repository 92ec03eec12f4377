#include "dgv/lp.hpp"

#include <cmath>
#include <limits>

namespace dgv::opt {

namespace {

constexpr double kPivotTol = 1e-9;
// Reduced cost above this is a real improving direction, not round-off.
constexpr double kSolidTol = 1e-7;
// Consecutive non-improving pivots tolerated before Bland's rule takes over.
constexpr int kStallLimit = 200;

// Standard-form program: max c.z, A z = b, z >= 0, b >= 0.
// Tableau layout: row i holds A[i][0..cols-1] | b[i]; an extra objective row
// keeps reduced costs c_j - z_j. Basis stores the basic column of each row.
struct Tableau {
    int rows = 0, cols = 0;
    std::vector<Vec> a;  // rows x (cols+1), last entry is rhs
    Vec reduced;         // cols+1, last entry is -objective value
    std::vector<int> basis;

    void pivot(int pr, int pc) {
        Vec& prow = a[pr];
        const double inv = 1.0 / prow[pc];
        for (double& v : prow) v *= inv;
        prow[pc] = 1.0;  // kill round-off on the pivot itself
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            const double f = a[r][pc];
            if (f == 0.0) continue;
            Vec& row = a[r];
            for (int j = 0; j <= cols; ++j) row[j] -= f * prow[j];
            row[pc] = 0.0;
        }
        const double f = reduced[pc];
        if (f != 0.0) {
            for (int j = 0; j <= cols; ++j) reduced[j] -= f * prow[j];
            reduced[pc] = 0.0;
        }
        basis[pr] = pc;
    }
};

struct SimplexDriver {
    Tableau& t;
    const std::vector<char>& barred;  // columns forbidden from entering
    int iterations = 0;
    int budget;

    // Returns false when no entering column exists (optimum reached).
    // Throws on unboundedness via sentinel -1 row handled by caller? No:
    // returns via status flag.
    enum class Step { optimal, unbounded, pivoted };

    Step step(bool bland) {
        // A column whose reduced cost barely clears the tolerance can be pure
        // round-off on a nearly dependent column; if its ratio test finds no
        // row it must not be read as an unbounded direction. Such columns are
        // skipped; only a solidly improving column with an empty ratio test
        // certifies unboundedness.
        std::vector<char> skip;
        for (;;) {
            int pc = -1;
            if (bland) {
                for (int j = 0; j < t.cols; ++j) {
                    if (barred[j] || (!skip.empty() && skip[j])) continue;
                    if (t.reduced[j] > kPivotTol) { pc = j; break; }
                }
            } else {
                double best = kPivotTol;
                for (int j = 0; j < t.cols; ++j) {
                    if (barred[j] || (!skip.empty() && skip[j])) continue;
                    if (t.reduced[j] > best) { best = t.reduced[j]; pc = j; }
                }
            }
            if (pc < 0) return Step::optimal;

            int pr = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (int r = 0; r < t.rows; ++r) {
                const double arc = t.a[r][pc];
                if (arc <= kPivotTol) continue;
                const double ratio = t.a[r][t.cols] / arc;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 && (pr < 0 || t.basis[r] < t.basis[pr]))) {
                    best_ratio = ratio;
                    pr = r;
                }
            }
            if (pr < 0) {
                if (t.reduced[pc] > kSolidTol) return Step::unbounded;
                if (skip.empty()) skip.assign(t.cols, 0);
                skip[pc] = 1;
                continue;
            }
            t.pivot(pr, pc);
            return Step::pivoted;
        }
    }

    Step run() {
        bool bland = false;
        int stall = 0;
        double last = t.reduced[t.cols];
        for (;;) {
            const Step s = step(bland);
            if (s != Step::pivoted) return s;
            if (++iterations > budget)
                throw ResourceError("solve_lp: iteration cap exceeded");
            // reduced[cols] tracks -objective, so progress means it shrinks
            const double cur = t.reduced[t.cols];
            if (cur < last - 1e-12) {
                stall = 0;
                last = cur;
            } else if (++stall >= kStallLimit) {
                bland = true;
            }
        }
    }
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp) {
    const int n = static_cast<int>(lp.objective.size());
    if (n == 0) throw std::invalid_argument("solve_lp: empty objective");
    for (const auto& row : lp.rows)
        if (static_cast<int>(row.coeffs.size()) != n)
            throw std::invalid_argument("solve_lp: row width does not match objective");
    if (!lp.var_bounds.empty() && static_cast<int>(lp.var_bounds.size()) != n)
        throw std::invalid_argument("solve_lp: var_bounds size does not match objective");

    // --- translate to standard form ---------------------------------------
    // Each original variable becomes one shifted column, a flipped column, or
    // a pair of columns (free split). Finite two-sided bounds add a row.
    struct VarMap {
        int col_pos = -1, col_neg = -1;
        double offset = 0.0;
        double sign = 1.0;  // x = offset + sign*z_pos (+ split handled via col_neg)
    };
    std::vector<VarMap> vmap(static_cast<std::size_t>(n));
    int std_cols = 0;
    std::vector<LpRow> extra_rows;
    for (int j = 0; j < n; ++j) {
        VarBound b = lp.var_bounds.empty() ? VarBound{} : lp.var_bounds[static_cast<std::size_t>(j)];
        VarMap& m = vmap[static_cast<std::size_t>(j)];
        if (b.lower && b.upper && *b.upper < *b.lower - kFeasTol) {
            return {LpStatus::infeasible, 0.0, {}, {}, 0};
        }
        if (b.lower) {
            m.col_pos = std_cols++;
            m.offset = *b.lower;
            m.sign = 1.0;
            if (b.upper) {
                LpRow r;
                r.coeffs.assign(static_cast<std::size_t>(n), 0.0);
                r.coeffs[static_cast<std::size_t>(j)] = 1.0;
                r.rel = Rel::le;
                r.rhs = *b.upper;
                extra_rows.push_back(std::move(r));
            }
        } else if (b.upper) {
            m.col_pos = std_cols++;
            m.offset = *b.upper;
            m.sign = -1.0;
        } else {
            m.col_pos = std_cols++;
            m.col_neg = std_cols++;
            m.offset = 0.0;
            m.sign = 1.0;
        }
    }

    std::vector<LpRow> all_rows = lp.rows;
    all_rows.insert(all_rows.end(), extra_rows.begin(), extra_rows.end());
    const int m_rows = static_cast<int>(all_rows.size());
    const int n_orig_rows = static_cast<int>(lp.rows.size());

    // Row in standard columns: sum_j a_j x_j rel rhs with x substituted.
    struct StdRow {
        Vec coeffs;  // over std_cols (+ aux later)
        Rel rel;
        double rhs;
        double dual_sign = 1.0;  // accumulated sign flips for dual recovery
    };
    std::vector<StdRow> srows(static_cast<std::size_t>(m_rows));
    for (int i = 0; i < m_rows; ++i) {
        const LpRow& row = all_rows[static_cast<std::size_t>(i)];
        StdRow& sr = srows[static_cast<std::size_t>(i)];
        sr.coeffs.assign(static_cast<std::size_t>(std_cols), 0.0);
        sr.rel = row.rel;
        sr.rhs = row.rhs;
        for (int j = 0; j < n; ++j) {
            const double aj = row.coeffs[static_cast<std::size_t>(j)];
            if (aj == 0.0) continue;
            const VarMap& m = vmap[static_cast<std::size_t>(j)];
            sr.rhs -= aj * m.offset;
            sr.coeffs[static_cast<std::size_t>(m.col_pos)] += aj * m.sign;
            if (m.col_neg >= 0) sr.coeffs[static_cast<std::size_t>(m.col_neg)] -= aj;
        }
    }

    // ge -> le, then normalize rhs >= 0.
    for (auto& sr : srows) {
        if (sr.rel == Rel::ge) {
            for (double& v : sr.coeffs) v = -v;
            sr.rhs = -sr.rhs;
            sr.rel = Rel::le;
            sr.dual_sign = -sr.dual_sign;
        }
    }

    // slack columns, then rhs normalization, then artificials.
    const int slack_base = std_cols;
    int n_slacks = 0;
    std::vector<int> slack_of(static_cast<std::size_t>(m_rows), -1);
    for (int i = 0; i < m_rows; ++i) {
        if (srows[static_cast<std::size_t>(i)].rel == Rel::le)
            slack_of[static_cast<std::size_t>(i)] = slack_base + n_slacks++;
    }
    std::vector<double> slack_sign(static_cast<std::size_t>(m_rows), 1.0);
    for (int i = 0; i < m_rows; ++i) {
        auto& sr = srows[static_cast<std::size_t>(i)];
        if (sr.rhs < 0.0) {
            for (double& v : sr.coeffs) v = -v;
            sr.rhs = -sr.rhs;
            sr.dual_sign = -sr.dual_sign;
            slack_sign[static_cast<std::size_t>(i)] = -1.0;
        }
    }
    const int art_base = slack_base + n_slacks;
    int n_arts = 0;
    std::vector<int> art_of(static_cast<std::size_t>(m_rows), -1);
    for (int i = 0; i < m_rows; ++i) {
        const bool slack_usable =
            slack_of[static_cast<std::size_t>(i)] >= 0 && slack_sign[static_cast<std::size_t>(i)] > 0.0;
        if (!slack_usable) art_of[static_cast<std::size_t>(i)] = art_base + n_arts++;
    }
    const int total_cols = art_base + n_arts;

    Tableau t;
    t.rows = m_rows;
    t.cols = total_cols;
    t.a.assign(static_cast<std::size_t>(m_rows), Vec(static_cast<std::size_t>(total_cols) + 1, 0.0));
    t.basis.assign(static_cast<std::size_t>(m_rows), -1);
    for (int i = 0; i < m_rows; ++i) {
        const auto& sr = srows[static_cast<std::size_t>(i)];
        Vec& row = t.a[static_cast<std::size_t>(i)];
        for (int j = 0; j < std_cols; ++j) row[static_cast<std::size_t>(j)] = sr.coeffs[static_cast<std::size_t>(j)];
        const int sc = slack_of[static_cast<std::size_t>(i)];
        if (sc >= 0) row[static_cast<std::size_t>(sc)] = slack_sign[static_cast<std::size_t>(i)];
        const int ac = art_of[static_cast<std::size_t>(i)];
        if (ac >= 0) row[static_cast<std::size_t>(ac)] = 1.0;
        row[static_cast<std::size_t>(total_cols)] = sr.rhs;
        t.basis[static_cast<std::size_t>(i)] = ac >= 0 ? ac : sc;
    }

    std::vector<char> barred(static_cast<std::size_t>(total_cols), 0);
    LpResult result;

    // --- phase 1: drive artificials to zero --------------------------------
    if (n_arts > 0) {
        t.reduced.assign(static_cast<std::size_t>(total_cols) + 1, 0.0);
        for (int j = art_base; j < total_cols; ++j) t.reduced[static_cast<std::size_t>(j)] = -1.0;
        // make reduced costs basis-consistent: add rows with artificial basis
        for (int i = 0; i < m_rows; ++i) {
            if (art_of[static_cast<std::size_t>(i)] < 0) continue;
            const Vec& row = t.a[static_cast<std::size_t>(i)];
            for (int j = 0; j <= total_cols; ++j) t.reduced[static_cast<std::size_t>(j)] += row[static_cast<std::size_t>(j)];
        }
        SimplexDriver d1{t, barred, 0, lp.max_iterations};
        const auto s1 = d1.run();
        result.iterations += d1.iterations;
        if (s1 == SimplexDriver::Step::unbounded)
            throw ResourceError("solve_lp: phase 1 unbounded (numerical failure)");
        // objective row rhs carries -(phase 1 objective) = sum of artificials
        const double infeas = t.reduced[static_cast<std::size_t>(total_cols)];
        if (infeas > kFeasTol * (1.0 + infeas)) {
            result.status = LpStatus::infeasible;
            return result;
        }
        // pivot leftover basic artificials out where the row has structure left
        for (int i = 0; i < m_rows; ++i) {
            const int b = t.basis[static_cast<std::size_t>(i)];
            if (b < art_base) continue;
            int pc = -1;
            for (int j = 0; j < art_base; ++j) {
                if (std::abs(t.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 1e-7) { pc = j; break; }
            }
            if (pc >= 0) t.pivot(i, pc);
        }
        for (int j = art_base; j < total_cols; ++j) barred[static_cast<std::size_t>(j)] = 1;
    }

    // --- phase 2 ------------------------------------------------------------
    Vec cost(static_cast<std::size_t>(total_cols), 0.0);
    const double obj_sign = lp.maximize ? 1.0 : -1.0;
    double const_term = 0.0;
    for (int j = 0; j < n; ++j) {
        const double cj = obj_sign * lp.objective[static_cast<std::size_t>(j)];
        if (cj == 0.0) continue;
        const VarMap& m = vmap[static_cast<std::size_t>(j)];
        const_term += cj * m.offset;
        cost[static_cast<std::size_t>(m.col_pos)] += cj * m.sign;
        if (m.col_neg >= 0) cost[static_cast<std::size_t>(m.col_neg)] -= cj;
    }
    t.reduced.assign(static_cast<std::size_t>(total_cols) + 1, 0.0);
    for (int j = 0; j < total_cols; ++j) t.reduced[static_cast<std::size_t>(j)] = cost[static_cast<std::size_t>(j)];
    for (int i = 0; i < m_rows; ++i) {
        const int b = t.basis[static_cast<std::size_t>(i)];
        const double cb = b >= 0 ? cost[static_cast<std::size_t>(b)] : 0.0;
        if (cb == 0.0) continue;
        const Vec& row = t.a[static_cast<std::size_t>(i)];
        for (int j = 0; j <= total_cols; ++j) t.reduced[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
        t.reduced[static_cast<std::size_t>(b)] = 0.0;
    }
    SimplexDriver d2{t, barred, 0, lp.max_iterations - result.iterations};
    const auto s2 = d2.run();
    result.iterations += d2.iterations;
    if (s2 == SimplexDriver::Step::unbounded) {
        result.status = LpStatus::unbounded;
        return result;
    }

    // --- extract primal, value, duals ---------------------------------------
    Vec z(static_cast<std::size_t>(total_cols), 0.0);
    for (int i = 0; i < m_rows; ++i) {
        const int b = t.basis[static_cast<std::size_t>(i)];
        if (b >= 0) z[static_cast<std::size_t>(b)] = t.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(total_cols)];
    }
    result.solution.assign(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
        const VarMap& m = vmap[static_cast<std::size_t>(j)];
        double x = m.offset + m.sign * z[static_cast<std::size_t>(m.col_pos)];
        if (m.col_neg >= 0) x -= z[static_cast<std::size_t>(m.col_neg)];
        result.solution[static_cast<std::size_t>(j)] = x;
    }
    double v = const_term;
    for (int j = 0; j < total_cols; ++j) v += cost[static_cast<std::size_t>(j)] * z[static_cast<std::size_t>(j)];
    result.value = obj_sign * v;

    // Multiplier of row i sits in the objective row under the column that was
    // born as that row's identity column (slack or artificial, cost 0):
    // reduced[col] = -y_i there. Sign flips applied during normalization are
    // undone through dual_sign; the minimize flip is undone through obj_sign.
    result.row_duals.assign(static_cast<std::size_t>(n_orig_rows), 0.0);
    for (int i = 0; i < n_orig_rows; ++i) {
        const int ac = art_of[static_cast<std::size_t>(i)];
        const int sc = slack_of[static_cast<std::size_t>(i)];
        const int col = ac >= 0 ? ac : sc;
        double y = -t.reduced[static_cast<std::size_t>(col)];
        if (ac < 0) y *= slack_sign[static_cast<std::size_t>(i)];  // slack column carries the flip
        result.row_duals[static_cast<std::size_t>(i)] =
            obj_sign * srows[static_cast<std::size_t>(i)].dual_sign * y;
    }

    result.status = LpStatus::optimal;
    return result;
}

}  // namespace dgv::opt
