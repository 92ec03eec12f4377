#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dgv {

using Vec = std::vector<double>;

// Shared tolerances. Feasibility/optimality checks use kFeasTol, certificate
// reproduction uses kCertTol, strict separation requires more than kSepMargin.
inline constexpr double kFeasTol = 1e-9;
inline constexpr double kCertTol = 1e-8;
inline constexpr double kSepMargin = 1e-10;
inline constexpr double kVertexTol = 1e-9;

// Thrown when an operation needs structure a space variant does not carry
// (e.g. vertex enumeration of a smooth ball).
struct UnsupportedVariant : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an input is structurally valid but too large for the exact
// combinatorial paths (dimension caps, iteration caps).
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("add: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: dimension mismatch");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scaled(const Vec& a, double t) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = t * a[i];
    return r;
}

inline double norm_1(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
}

inline double norm_2(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

inline double norm_inf(const Vec& a) {
    double s = 0.0;
    for (double v : a) s = std::max(s, std::abs(v));
    return s;
}

inline bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline bool nearly_equal(const Vec& a, const Vec& b, double tol) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > tol) return false;
    return true;
}

inline Vec concat(const Vec& a, const Vec& b) {
    Vec r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

}  // namespace dgv
