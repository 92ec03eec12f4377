#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dgv/closedform.hpp"
#include "dgv/common.hpp"
#include "dgv/rng.hpp"
#include "dgv/spaces.hpp"
#include "test_oracles.hpp"

using dgv::Vec;
using dgv::cf::C0View;
using dgv::spaces::AbsoluteNormProfile;
using dgv::spaces::NormedSpace;

namespace {

// Minimal exact fraction over 64-bit integers, independent of the library's
// arbitrary-precision arithmetic. Inputs in the tests are dyadic with small
// denominators, so nothing here can overflow, but intermediates go through
// 128 bits anyway.
struct Rat {
  long long n = 0;
  long long d = 1;

  static Rat make(__int128 num, __int128 den) {
    REQUIRE(den != 0);
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const __int128 g = std::gcd(static_cast<long long>(num < 0 ? -num : num),
                                static_cast<long long>(den));
    if (g > 1) {
      num /= g;
      den /= g;
    }
    REQUIRE(num <= std::numeric_limits<long long>::max());
    REQUIRE(num >= std::numeric_limits<long long>::min());
    REQUIRE(den <= std::numeric_limits<long long>::max());
    return {static_cast<long long>(num), static_cast<long long>(den)};
  }
  static Rat of(long long v) { return {v, 1}; }
  // Exact conversion of a double that is known to be a multiple of 1/1024.
  static Rat dyadic(double v) {
    const double scaled = v * 1024.0;
    const long long num = std::llround(scaled);
    REQUIRE(static_cast<double>(num) == scaled);
    return make(num, 1024);
  }
  Rat operator+(const Rat& o) const {
    return make(static_cast<__int128>(n) * o.d + static_cast<__int128>(o.n) * d,
                static_cast<__int128>(d) * o.d);
  }
  Rat operator-(const Rat& o) const {
    return make(static_cast<__int128>(n) * o.d - static_cast<__int128>(o.n) * d,
                static_cast<__int128>(d) * o.d);
  }
  Rat operator*(const Rat& o) const {
    return make(static_cast<__int128>(n) * o.n, static_cast<__int128>(d) * o.d);
  }
  Rat operator/(const Rat& o) const {
    REQUIRE(o.n != 0);
    return make(static_cast<__int128>(n) * o.d, static_cast<__int128>(d) * o.n);
  }
  bool operator==(const Rat& o) const { return n == o.n && d == o.d; }
  bool operator<(const Rat& o) const {
    return static_cast<__int128>(n) * o.d < static_cast<__int128>(o.n) * d;
  }
  bool operator<=(const Rat& o) const { return *this < o || *this == o; }
  Rat abs() const { return n < 0 ? Rat{-n, d} : *this; }
};

Rat rat_ramp(const Rat& t, int n) {
  const Rat a = t.abs();
  REQUIRE(a <= Rat::of(1));
  if (a <= Rat::make(n - 2, n)) return Rat::of(1) + a;
  return Rat::of(n - 1) * (Rat::of(1) - a);
}

// Pulls a library rational into the test fraction; every entry in these
// tests has a small reduced form.
Rat from_lib(const dgv::cf::Rational& q) {
  const long long num = boost::multiprecision::numerator(q).convert_to<long long>();
  const long long den = boost::multiprecision::denominator(q).convert_to<long long>();
  return Rat::make(num, den);
}

}  // namespace

TEST_CASE("closed form: max-norm daugavet constant") {
  // Two frozen corners.
  CHECK(dgv::cf::dc_linf_n({1.0, 1.0, 1.0}) == 0.0);
  CHECK(dgv::cf::dc_linf_n({0.0, 0.0}) == 1.0);

  // Family (2/3, 2/3, t): the constant is max{1/3, 1 - |t|}.
  for (int k = 0; k <= 100; ++k) {
    const double t = static_cast<double>(k) / 100.0;
    const double expect = std::max(1.0 - 2.0 / 3.0, 1.0 - t);
    CHECK(dgv::cf::dc_linf_n({2.0 / 3.0, 2.0 / 3.0, t}) == expect);
    CHECK(dgv::cf::dc_linf_n({2.0 / 3.0, 2.0 / 3.0, -t}) == expect);
  }

  // Agreement with the generic vertex-distance view: on the max-norm cube the
  // nearest vertex realizes the same value.
  dgv::Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    Vec x(3);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const double direct = dgv::cf::dc_linf_n(x);
    double vert = std::numeric_limits<double>::infinity();
    for (const Vec& v : oracle::cube_vertices(3)) {
      vert = std::min(vert, oracle::o_norminf(dgv::sub(x, v)));
    }
    CHECK(direct == doctest::Approx(vert).epsilon(1e-12));
  }

  CHECK_THROWS_AS(dgv::cf::dc_linf_n({1.2, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dc_linf_n({}), std::invalid_argument);
}

TEST_CASE("closed form: c0 daugavet constant is one") {
  CHECK(dgv::cf::dc_c0({{0.0, 0.0, 0.0}}) == 1.0);
  CHECK(dgv::cf::dc_c0({{1.0, 0.0}}) == 1.0);
  CHECK(dgv::cf::dc_c0({{0.5, 0.5, 0.5, 0.5}}) == 1.0);
  CHECK_THROWS_AS(dgv::cf::dc_c0({{1.5}}), std::invalid_argument);
}

TEST_CASE("closed form: ramp profile") {
  CHECK(dgv::cf::f_n(0.0, 3) == 1.0);
  CHECK(dgv::cf::f_n(1.0 / 3.0, 3) == 4.0 / 3.0);
  CHECK(dgv::cf::f_n(1.0, 3) == 0.0);
  CHECK(dgv::cf::f_n(-1.0 / 3.0, 3) == dgv::cf::f_n(1.0 / 3.0, 3));

  // Both branch formulas agree exactly at dyadic breakpoints.
  for (int n : {4, 8, 16, 32}) {
    const double tb = 1.0 - 2.0 / static_cast<double>(n);
    CHECK((1.0 + tb) - static_cast<double>(n - 1) * (1.0 - tb) == 0.0);
    CHECK(dgv::cf::f_n(tb, n) == 1.0 + tb);
  }
  // And within an ulp everywhere else.
  for (int n = 3; n <= 12; ++n) {
    const double tb = 1.0 - 2.0 / static_cast<double>(n);
    const double lo = dgv::cf::f_n(std::nextafter(tb, 0.0), n);
    const double hi = dgv::cf::f_n(std::nextafter(tb, 2.0), n);
    CHECK(std::fabs(lo - hi) <= 5e-15);
    // Peak value at the breakpoint.
    CHECK(dgv::cf::f_n(tb, n) == doctest::Approx(2.0 - 2.0 / n).epsilon(1e-15));
  }

  // Exact variant agrees with the test fraction on a dyadic grid.
  for (int n : {3, 5, 8}) {
    for (int k = -64; k <= 64; ++k) {
      const Rat t = Rat::make(k, 64);
      const Rat lib = from_lib(dgv::cf::f_n_exact(
          dgv::cf::Rational(k) / dgv::cf::Rational(64), n));
      CHECK(lib == rat_ramp(t, n));
    }
  }

  CHECK_THROWS_AS(dgv::cf::f_n(1.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::f_n(0.5, 2), std::invalid_argument);
}

TEST_CASE("closed form: witness families") {
  // Head example: two large coordinates and one zero.
  {
    const auto w = dgv::cf::dec_c0_witnesses({{2.0 / 3.0, 2.0 / 3.0, 0.0}}, {0, 1, 2}, 3);
    CHECK(w.rows.size() == 3);
    CHECK(w.bound_value() == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }

  // Uniform block at the breakpoint: bound is exactly 2 - 2/n.
  for (int n : {4, 8}) {
    Vec x(static_cast<std::size_t>(n) + 1, 1.0 - 2.0 / static_cast<double>(n));
    x[0] = 1.0;
    std::vector<std::size_t> idx;
    for (int k = 1; k <= n; ++k) idx.push_back(static_cast<std::size_t>(k));
    const auto w = dgv::cf::dec_c0_witnesses({x}, idx, n);
    CHECK(from_lib(w.bound) == Rat::make(2 * n - 2, n));
  }

  // Zero point: every ramp value is 1.
  {
    const auto w = dgv::cf::dec_c0_witnesses({{0.0, 0.0, 0.0, 0.0}}, {0, 2, 3}, 3);
    CHECK(from_lib(w.bound) == Rat::of(1));
  }

  // Randomized exact verification on a dyadic grid, negative coordinates and
  // indices beyond the stored prefix included.
  dgv::Rng rng(7171);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t dim = 4 + rng.index(7);
    const int n0 = 3 + static_cast<int>(rng.index(6));
    Vec x(dim);
    for (double& v : x) {
      v = static_cast<double>(static_cast<long long>(rng.index(2049)) - 1024) / 1024.0;
    }
    // Distinct indices, occasionally past the prefix.
    std::vector<std::size_t> pool(dim + 2);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = pool.size(); i > 1; --i) {
      std::swap(pool[i - 1], pool[rng.index(i)]);
    }
    if (pool.size() < static_cast<std::size_t>(n0)) continue;
    std::vector<std::size_t> idx(pool.begin(), pool.begin() + n0);

    const auto w = dgv::cf::dec_c0_witnesses({x}, idx, n0);
    REQUIRE(w.rows.size() == static_cast<std::size_t>(n0));
    const std::size_t len = w.rows[0].size();
    REQUIRE(len >= dim);

    std::vector<Rat> base(len, Rat::of(0));
    for (std::size_t i = 0; i < dim; ++i) base[i] = Rat::dyadic(x[i]);

    // Mean identity, ball membership, ramp distances: all exact.
    for (std::size_t i = 0; i < len; ++i) {
      Rat sum = Rat::of(0);
      for (const auto& row : w.rows) sum = sum + from_lib(row[i]);
      CHECK(sum == Rat::of(n0) * base[i]);
    }
    Rat min_ramp = Rat::of(2);
    for (int k = 0; k < n0; ++k) {
      Rat dist = Rat::of(0);
      for (std::size_t i = 0; i < len; ++i) {
        const Rat e = from_lib(w.rows[static_cast<std::size_t>(k)][i]);
        CHECK(e.abs() <= Rat::of(1));
        dist = std::max(dist, (e - base[i]).abs(),
                        [](const Rat& a, const Rat& b) { return a < b; });
      }
      const Rat ramp = rat_ramp(base[idx[static_cast<std::size_t>(k)]], n0);
      CHECK(ramp <= dist);
      min_ramp = std::min(min_ramp, ramp, [](const Rat& a, const Rat& b) { return a < b; });
    }
    CHECK(from_lib(w.bound) == min_ramp);

    // Double rendition stays within rounding of the exact rows.
    const auto rows = w.rounded();
    for (int k = 0; k < n0; ++k) {
      for (std::size_t i = 0; i < len; ++i) {
        const Rat e = from_lib(w.rows[static_cast<std::size_t>(k)][i]);
        const double ref = static_cast<double>(e.n) / static_cast<double>(e.d);
        CHECK(rows[static_cast<std::size_t>(k)][i] ==
              doctest::Approx(ref).epsilon(1e-15));
      }
    }
  }

  CHECK_THROWS_AS(dgv::cf::dec_c0_witnesses({{0.0, 0.0}}, {0, 1}, 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_c0_witnesses({{0.0, 0.0, 0.0}}, {0, 0, 1}, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_c0_witnesses({{0.0, 0.0, 0.0}}, {0, 1}, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_c0_witnesses({{2.0, 0.0, 0.0}}, {0, 1, 2}, 3),
                  std::invalid_argument);
}

TEST_CASE("closed form: uniform block delta value") {
  CHECK(dgv::cf::dec_c0_uniform(1.0 / 3.0, 3) == 4.0 / 3.0);
  CHECK(dgv::cf::dec_c0_uniform(1.0, 3) == 1.0);
  for (int n = 2; n <= 9; ++n) CHECK(dgv::cf::dec_c0_uniform(0.0, n) == 1.0);
  CHECK(dgv::cf::dec_c0_uniform(0.5, 1) == 1.0);

  for (int n = 1; n <= 9; ++n) {
    for (int k = 0; k <= 100; ++k) {
      const double t = static_cast<double>(k) / 100.0;
      const double expect =
          std::min(1.0 + t, std::max(1.0, (1.0 - t) * static_cast<double>(n - 1)));
      CHECK(dgv::cf::dec_c0_uniform(t, n) == expect);
      CHECK(dgv::cf::dec_c0_uniform(-t, n) == expect);
    }
  }

  CHECK_THROWS_AS(dgv::cf::dec_c0_uniform(1.5, 3), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_c0_uniform(0.5, 0), std::invalid_argument);
}

TEST_CASE("closed form: atomic l1 constants") {
  CHECK(dgv::cf::dc_weighted_l1({1.0, 1.0}, {0.5, 0.5}) == 1.0);
  CHECK(dgv::cf::dc_weighted_l1({1.0, 0.0, 0.0}, {1.0, 1.0, 1.0}) == 0.0);
  CHECK(dgv::cf::dc_weighted_l1({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {1.0, 1.0, 1.0}) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  // Per-atom bounds: tight at the heaviest atom, conservative elsewhere.
  CHECK(dgv::cf::dec_upper_atom({0.5, 0.0}, {1.0, 1.0}, 0) == 0.5);
  CHECK(dgv::cf::dec_upper_atom({1.0, 1.0}, {0.5, 0.5}, 0) == 1.0);
  CHECK(dgv::cf::dec_upper_atom({1.0, 1.0}, {0.5, 0.5}, 1) == 1.0);

  dgv::Rng rng(88);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t dim = 2 + rng.index(5);
    Vec w(dim), c(dim);
    for (std::size_t i = 0; i < dim; ++i) w[i] = rng.uniform(0.1, 2.0);
    for (std::size_t i = 0; i < dim; ++i) c[i] = rng.uniform(-1.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += w[i] * std::fabs(c[i]);
    const double scale = rng.uniform(0.2, 1.0) / s;
    for (double& v : c) v *= scale;

    const double dc = dgv::cf::dc_weighted_l1(c, w);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dim; ++i) {
      if (c[i] == 0.0) continue;
      best = std::min(best, dgv::cf::dec_upper_atom(c, w, i));
    }
    // Identical arithmetic on both paths: exact agreement.
    CHECK(dc == best);

    double nrm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) nrm += w[i] * std::fabs(c[i]);
    CHECK(dc >= 1.0 - nrm - 1e-12);
    CHECK(dc <= 1.0 + nrm + 1e-12);
  }

  CHECK_THROWS_AS(dgv::cf::dc_weighted_l1({2.0, 2.0}, {1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dc_weighted_l1({0.5}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dc_weighted_l1({0.5, 0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_upper_atom({0.5, 0.0}, {1.0, 1.0}, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_upper_atom({0.5, 0.0}, {1.0, 1.0}, 5),
                  std::invalid_argument);
}

TEST_CASE("closed form: euclidean values") {
  {
    const auto d = dgv::cf::dec_hilbert({0.6, 0.0, 0.0});
    CHECK_FALSE(d.dim_one_rule);
    CHECK(d.value == doctest::Approx(0.8).epsilon(1e-15));
  }
  CHECK(dgv::cf::dec_hilbert({1.0, 0.0}).value == 0.0);
  CHECK(dgv::cf::dec_hilbert({0.0, 0.0}).value == 1.0);
  {
    const auto d = dgv::cf::dec_hilbert({0.25});
    CHECK(d.dim_one_rule);
    CHECK(d.value == 0.75);
  }

  dgv::Rng rng(303);
  for (int trial = 0; trial < 40; ++trial) {
    Vec x = rng.gauss_vec(3);
    const double r = oracle::o_norm2(x);
    const double target = rng.uniform(0.0, 1.0);
    if (r < 1e-9) continue;
    x = dgv::scaled(x, target / r);
    CHECK(dgv::cf::dc_lur(x) == doctest::Approx(1.0 - target).epsilon(1e-10));
    const auto d = dgv::cf::dec_hilbert(x);
    CHECK(d.value ==
          doctest::Approx(std::sqrt(std::max(0.0, 1.0 - target * target))).epsilon(1e-8));
    // The two constants order correctly and respect the trivial envelope.
    CHECK(dgv::cf::dc_lur(x) <= d.value + 1e-12);
    CHECK(d.value <= 1.0 + target + 1e-12);
  }

  CHECK_THROWS_AS(dgv::cf::dec_hilbert({1.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dc_lur({1.5, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::dec_hilbert({}), std::invalid_argument);
}

TEST_CASE("closed form: weak-star constant") {
  CHECK(dgv::cf::wdc_linf({0.3, 0.9}, 1.0) == 2.0);
  CHECK(dgv::cf::wdc_linf({0.3, 0.9}, 0.0) == 1.0);
  CHECK(dgv::cf::wdc_linf({1.0, 1.0, 1.0}, 0.5) == 1.5);
  // The prefix never matters.
  CHECK(dgv::cf::wdc_linf({}, 0.25) == dgv::cf::wdc_linf({0.7, -0.2, 0.1}, 0.25));
  CHECK_THROWS_AS(dgv::cf::wdc_linf({0.3}, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::wdc_linf({0.3}, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(dgv::cf::wdc_linf({1.3}, 0.5), std::invalid_argument);
}

TEST_CASE("closed form: extreme dual upper bound") {
  const auto li3 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
  {
    const auto r = dgv::cf::dec_upper_extreme(li3, {1.0, 0.5, 0.0});
    CHECK_FALSE(r.vacuous);
    CHECK(r.bound == doctest::Approx(1.5).epsilon(1e-12));
  }
  {
    const auto r = dgv::cf::dec_upper_extreme(li3, {1.0, 1.0, 1.0});
    CHECK(r.vacuous);
    CHECK(r.bound == 2.0);
  }
  {
    const auto l12 = NormedSpace::lp(1.0, 2);
    const auto r = dgv::cf::dec_upper_extreme(l12, {1.0, 0.0});
    CHECK(r.vacuous);
    CHECK(r.bound == 2.0);
  }

  // Polygonal ball: compare against a by-hand scan of the dual vertices.
  const std::vector<Vec> hexv = {{1.0, 0.0},  {0.2, 0.9},   {-0.5, 0.8},
                                 {-1.0, 0.0}, {-0.2, -0.9}, {0.5, -0.8}};
  const auto hexsp = NormedSpace::polyhedral(hexv);
  const Vec x = {1.0, 0.0};
  double alpha = -1.0;
  for (const Vec& f : hexsp.dual_vertices()) {
    const double v = std::fabs(dgv::dot(f, x));
    if (v < 1.0 - 1e-9) alpha = std::max(alpha, v);
  }
  REQUIRE(alpha >= 0.0);
  const auto r = dgv::cf::dec_upper_extreme(hexsp, x);
  CHECK_FALSE(r.vacuous);
  CHECK(r.bound == doctest::Approx(1.0 + alpha).epsilon(1e-12));

  // On weighted l1 spaces the exact constant respects the bound.
  const Vec wts = {0.5, 0.25, 0.25};
  const auto wsp = NormedSpace::weighted_l1(wts);
  {
    const auto b = dgv::cf::dec_upper_extreme(wsp, {1.0, 1.0, 1.0});
    CHECK_FALSE(b.vacuous);
    CHECK(dgv::cf::dc_weighted_l1({1.0, 1.0, 1.0}, wts) <= b.bound + 1e-12);
  }
  dgv::Rng rng(515);
  for (int trial = 0; trial < 30; ++trial) {
    Vec c(3);
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += wts[i] * std::fabs(c[i]);
    if (s < 1e-6) continue;
    for (double& v : c) v /= s;
    const auto b = dgv::cf::dec_upper_extreme(wsp, c);
    const double exact = dgv::cf::dc_weighted_l1(c, wts);
    CHECK(exact <= b.bound + 1e-9);
    CHECK(b.bound >= 1.0 - 1e-12);
    CHECK(b.bound <= 2.0 + 1e-12);
  }

  CHECK_THROWS_AS(dgv::cf::dec_upper_extreme(li3, {0.5, 0.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      dgv::cf::dec_upper_extreme(NormedSpace::lp(2.0, 3), {1.0, 0.0, 0.0}),
      dgv::UnsupportedVariant);
}
