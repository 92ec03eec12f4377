#include "dgv/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>

namespace dgv::cf {

namespace {

void require_in_ball_inf(const Vec& x) {
  for (double v : x) {
    if (std::fabs(v) > 1.0) throw std::invalid_argument("coordinate outside [-1, 1]");
  }
}

Rational rat_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// Sum of the atom masses w_i |c_i|, shared by the formula and the per-atom
// bound so their outputs agree bitwise.
double atomic_mass_sum(const Vec& coeffs, const Vec& weights) {
  if (coeffs.empty() || coeffs.size() != weights.size()) {
    throw std::invalid_argument("coefficient and weight lengths differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (!(weights[i] > 0.0)) throw std::invalid_argument("weights must be positive");
    s += weights[i] * std::fabs(coeffs[i]);
  }
  if (s > 1.0 + kFeasTol) throw std::invalid_argument("point outside the unit ball");
  return s;
}

}  // namespace

std::vector<Vec> C0Witnesses::rounded() const {
  std::vector<Vec> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    Vec v;
    v.reserve(row.size());
    for (const Rational& q : row) v.push_back(q.convert_to<double>());
    out.push_back(std::move(v));
  }
  return out;
}

double C0Witnesses::bound_value() const { return bound.convert_to<double>(); }

double dc_linf_n(const Vec& x) {
  if (x.empty()) throw std::invalid_argument("empty vector");
  require_in_ball_inf(x);
  double best = 0.0;
  for (double v : x) best = std::max(best, 1.0 - std::fabs(v));
  return best;
}

double dc_c0(const C0View& x) {
  require_in_ball_inf(x.coords);
  return 1.0;
}

double f_n(double t, int n) {
  if (n < 3) throw std::invalid_argument("ramp needs n >= 3");
  const double a = std::fabs(t);
  if (a > 1.0) throw std::invalid_argument("|t| > 1");
  if (a <= 1.0 - 2.0 / static_cast<double>(n)) return 1.0 + a;
  return static_cast<double>(n - 1) * (1.0 - a);
}

Rational f_n_exact(const Rational& t, int n) {
  if (n < 3) throw std::invalid_argument("ramp needs n >= 3");
  const Rational a = rat_abs(t);
  if (a > 1) throw std::invalid_argument("|t| > 1");
  if (a <= Rational(n - 2, n)) return 1 + a;
  return Rational(n - 1) * (1 - a);
}

C0Witnesses dec_c0_witnesses(const C0View& view, const std::vector<std::size_t>& indices,
                             int n0) {
  const Vec& x = view.coords;
  if (n0 < 3) throw std::invalid_argument("need n0 >= 3");
  if (indices.size() != static_cast<std::size_t>(n0)) {
    throw std::invalid_argument("index count must equal n0");
  }
  require_in_ball_inf(x);
  {
    std::set<std::size_t> uniq(indices.begin(), indices.end());
    if (uniq.size() != indices.size()) throw std::invalid_argument("indices repeat");
  }

  // Work on the coordinate span that covers the prefix and every selected
  // index; coordinates past the prefix are zero.
  std::size_t len = x.size();
  for (std::size_t i : indices) len = std::max(len, i + 1);

  std::vector<int> sign(len, 1);
  std::vector<Rational> ax(len, Rational(0));
  std::vector<Rational> base(len, Rational(0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    base[i] = Rational(x[i]);
    sign[i] = x[i] < 0.0 ? -1 : 1;
    ax[i] = rat_abs(base[i]);
  }

  const Rational threshold(n0 - 2, n0);
  std::vector<bool> small(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    small[j] = ax[indices[j]] <= threshold;
  }

  C0Witnesses out;
  out.x = x;
  out.indices = indices;
  out.n0 = n0;
  out.rows.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    std::vector<Rational> row = ax;
    for (std::size_t j = 0; j < indices.size(); ++j) {
      const Rational& t = ax[indices[j]];
      if (j == k) {
        row[indices[j]] = small[j] ? Rational(-1) : Rational(n0) * t - (n0 - 1);
      } else {
        row[indices[j]] = small[j] ? (Rational(n0) * t + 1) / (n0 - 1) : Rational(1);
      }
    }
    for (std::size_t i = 0; i < len; ++i) {
      if (sign[i] < 0) row[i] = -row[i];
    }
    out.rows.push_back(std::move(row));
  }

  out.bound = Rational(2);
  for (std::size_t j = 0; j < indices.size(); ++j) {
    out.bound = std::min(out.bound, f_n_exact(ax[indices[j]], n0));
  }

  // The whole point of the rational construction: these hold exactly.
  for (std::size_t i = 0; i < len; ++i) {
    Rational sum(0);
    for (const auto& row : out.rows) sum += row[i];
    if (sum != Rational(n0) * base[i]) throw std::logic_error("witness mean broken");
  }
  for (std::size_t k = 0; k < out.rows.size(); ++k) {
    Rational dist(0);
    for (std::size_t i = 0; i < len; ++i) {
      const Rational& e = out.rows[k][i];
      if (rat_abs(e) > 1) throw std::logic_error("witness left the ball");
      dist = std::max(dist, rat_abs(e - base[i]));
    }
    if (dist < f_n_exact(ax[indices[k]], n0)) {
      throw std::logic_error("witness distance below ramp");
    }
  }
  return out;
}

double dec_c0_uniform(double t, int n) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  const double a = std::fabs(t);
  if (a > 1.0) throw std::invalid_argument("|t| > 1");
  return std::min(1.0 + a, std::max(1.0, (1.0 - a) * static_cast<double>(n - 1)));
}

double dc_weighted_l1(const Vec& coeffs, const Vec& weights) {
  const double s = atomic_mass_sum(coeffs, weights);
  double biggest = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    biggest = std::max(biggest, weights[i] * std::fabs(coeffs[i]));
  }
  return 1.0 + s - 2.0 * biggest;
}

double dec_upper_atom(const Vec& coeffs, const Vec& weights, std::size_t atom_index) {
  const double s = atomic_mass_sum(coeffs, weights);
  if (atom_index >= coeffs.size()) throw std::invalid_argument("atom index out of range");
  if (coeffs[atom_index] == 0.0) {
    throw std::invalid_argument("atom outside the support");
  }
  return 1.0 + s - 2.0 * weights[atom_index] * std::fabs(coeffs[atom_index]);
}

HilbertDelta dec_hilbert(const Vec& x) {
  if (x.empty()) throw std::invalid_argument("empty vector");
  const double r = norm_2(x);
  if (r > 1.0 + kFeasTol) throw std::invalid_argument("point outside the unit ball");
  HilbertDelta out;
  if (x.size() == 1) {
    out.value = 1.0 - std::min(r, 1.0);
    out.dim_one_rule = true;
    return out;
  }
  out.value = std::sqrt(std::max(0.0, 1.0 - r * r));
  return out;
}

double dc_lur(const Vec& x) {
  if (x.empty()) throw std::invalid_argument("empty vector");
  const double r = norm_2(x);
  if (r > 1.0 + kFeasTol) throw std::invalid_argument("point outside the unit ball");
  return 1.0 - std::min(r, 1.0);
}

double wdc_linf(const Vec& prefix, double tail_limsup) {
  require_in_ball_inf(prefix);
  if (tail_limsup < 0.0 || tail_limsup > 1.0) {
    throw std::invalid_argument("tail limsup outside [0, 1]");
  }
  return 1.0 + tail_limsup;
}

ExtremeUpperBound dec_upper_extreme(const spaces::NormedSpace& space, const Vec& x) {
  if (!space.has_dual_vertices()) {
    throw UnsupportedVariant("needs an explicit dual vertex list");
  }
  if (std::fabs(space.norm(x) - 1.0) > 1e-9) {
    throw std::invalid_argument("point must lie on the unit sphere");
  }
  ExtremeUpperBound out;
  double alpha = -1.0;
  for (const Vec& f : space.dual_vertices()) {
    const double v = std::fabs(dot(f, x));
    if (v < 1.0 - 1e-9) alpha = std::max(alpha, v);
  }
  if (alpha < 0.0) {
    out.vacuous = true;
    out.bound = 2.0;
    return out;
  }
  out.bound = 1.0 + alpha;
  return out;
}

}  // namespace dgv::cf
