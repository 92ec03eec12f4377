#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "dgv/common.hpp"

namespace dgv {

// Dense square solve by Gaussian elimination with partial pivoting.
// Returns nullopt when the matrix is numerically singular.
inline std::optional<Vec> solve_linear(std::vector<Vec> a, Vec b, double pivot_tol = 1e-11) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t best = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
        if (std::abs(a[best][col]) < pivot_tol) return std::nullopt;
        std::swap(a[col], a[best]);
        std::swap(b[col], b[best]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double m = a[r][col] / a[col][col];
            if (m == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

// Numerical rank by the same elimination, used to detect degenerate vertex sets.
inline std::size_t matrix_rank(std::vector<Vec> rows, double tol = 1e-9) {
    if (rows.empty()) return 0;
    const std::size_t ncols = rows[0].size();
    std::size_t rank = 0;
    for (std::size_t col = 0; col < ncols && rank < rows.size(); ++col) {
        std::size_t best = rank;
        for (std::size_t r = rank + 1; r < rows.size(); ++r)
            if (std::abs(rows[r][col]) > std::abs(rows[best][col])) best = r;
        if (std::abs(rows[best][col]) < tol) continue;
        std::swap(rows[rank], rows[best]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            const double m = rows[r][col] / rows[rank][col];
            for (std::size_t c = col; c < ncols; ++c) rows[r][c] -= m * rows[rank][c];
        }
        ++rank;
    }
    return rank;
}

}  // namespace dgv
