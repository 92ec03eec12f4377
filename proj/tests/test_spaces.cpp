#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "dgv/common.hpp"
#include "dgv/hull.hpp"
#include "dgv/profile.hpp"
#include "dgv/rng.hpp"
#include "dgv/spaces.hpp"
#include "test_oracles.hpp"

using dgv::Vec;
using dgv::spaces::AbsoluteNormProfile;
using dgv::spaces::NormedSpace;
using dgv::spaces::ProfileKind;

namespace {

bool contains_vec(const std::vector<Vec>& set, const Vec& v, double tol = 1e-9) {
  return std::any_of(set.begin(), set.end(),
                     [&](const Vec& w) { return dgv::nearly_equal(w, v, tol); });
}

bool same_vec_set(std::vector<Vec> a, std::vector<Vec> b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end(), dgv::lex_less);
  std::sort(b.begin(), b.end(), dgv::lex_less);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!dgv::nearly_equal(a[i], b[i], tol)) return false;
  }
  return true;
}

// Checks that (a, b) satisfies the octahedrality witness system for the
// profile: the witness lies on the unit curve and pairing it with the far
// corner of the other summand doubles the norm in both directions.
void check_aoh_witness(const AbsoluteNormProfile& prof, double a, double b) {
  CHECK(prof.eval(a, b) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(prof.eval(prof.c() + a, 1.0 + b) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(prof.eval(1.0 + a, prof.d() + b) == doctest::Approx(2.0).epsilon(1e-6));
}

// Independent gauge evaluation for a polygonal profile: the quadrant piece of
// the unit ball is the polygon spanned by the origin and the boundary chain,
// so N(q) is found by bisecting the dilation factor with a hull membership
// test. Slower than the facet form, but shares no code path with it.
double gauge_by_hull(const AbsoluteNormProfile& prof, double a, double b) {
  std::vector<Vec> gens = prof.boundary();
  gens.push_back({0.0, 0.0});
  const Vec q = {std::fabs(a), std::fabs(b)};
  double lo = 0.0, hi = 1.0;
  while (!dgv::opt::hull_membership({q[0] / hi, q[1] / hi}, gens).inside) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (dgv::opt::hull_membership({q[0] / mid, q[1] / mid}, gens).inside) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

const std::vector<Vec> kHexBoundary = {
    {1.0, 0.0}, {0.9, 0.5}, {0.4, 0.9}, {0.0, 1.0}};

}  // namespace

TEST_CASE("profile: l1 and linf closed parameters") {
  const auto l1 = AbsoluteNormProfile::l1();
  CHECK(l1.kind() == ProfileKind::l1);
  CHECK(l1.eval(0.25, 0.5) == 0.75);
  CHECK(l1.conjugate(0.25, 0.5) == 0.5);
  CHECK(l1.gamma() == 1.0);
  CHECK(l1.big_gamma() == 2.0);
  CHECK(l1.c() == 0.0);
  CHECK(l1.d() == 0.0);
  CHECK(l1.axis_extreme(0));
  CHECK(l1.axis_extreme(1));
  REQUIRE(l1.aoh_witness().has_value());
  check_aoh_witness(l1, l1.aoh_witness()->a, l1.aoh_witness()->b);

  const auto li = AbsoluteNormProfile::linf();
  CHECK(li.kind() == ProfileKind::linf);
  CHECK(li.eval(0.25, 0.5) == 0.5);
  CHECK(li.conjugate(0.25, 0.5) == 0.75);
  CHECK(li.gamma() == 0.5);
  CHECK(li.big_gamma() == 1.0);
  CHECK(li.c() == 1.0);
  CHECK(li.d() == 1.0);
  CHECK_FALSE(li.axis_extreme(0));
  CHECK_FALSE(li.axis_extreme(1));
  REQUIRE(li.aoh_witness().has_value());
  CHECK(li.aoh_witness()->a == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(li.aoh_witness()->b == doctest::Approx(1.0).epsilon(1e-7));
  check_aoh_witness(li, li.aoh_witness()->a, li.aoh_witness()->b);

  // p folds into the exact variants at the endpoints.
  CHECK(AbsoluteNormProfile::lp(1.0).kind() == ProfileKind::l1);
  CHECK(AbsoluteNormProfile::lp(std::numeric_limits<double>::infinity()).kind() ==
        ProfileKind::linf);
}

TEST_CASE("profile: lp(2) parameters against direct search") {
  const auto p2 = AbsoluteNormProfile::lp(2.0);
  CHECK(p2.kind() == ProfileKind::lp);
  CHECK(p2.p() == 2.0);
  CHECK(p2.eval(3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(p2.conjugate(3.0, 4.0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(p2.big_gamma() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // gamma is the minimum of s |-> N(s, 1 - s); scan then compare with the
  // symmetric closed value 1/sqrt(2).
  double grid_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 10000; ++i) {
    const double s = static_cast<double>(i) / 10000.0;
    grid_min = std::min(grid_min, std::hypot(s, 1.0 - s));
  }
  CHECK(p2.gamma() == doctest::Approx(grid_min).epsilon(1e-8));
  CHECK(p2.gamma() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));

  // Strict convexity pushes c and d to the axis; the bisection stops within
  // the square-root smear of its own tolerance.
  CHECK(std::fabs(p2.c()) <= 1e-4);
  CHECK(std::fabs(p2.d()) <= 1e-4);
  CHECK(p2.axis_extreme(0));
  CHECK(p2.axis_extreme(1));
  CHECK_FALSE(p2.aoh_witness().has_value());

  CHECK_THROWS_AS(AbsoluteNormProfile::lp(0.5), std::invalid_argument);
  CHECK_THROWS_AS(AbsoluteNormProfile::lp(0.0), std::invalid_argument);
}

TEST_CASE("profile: polygonal square and diamond reduce to max and sum") {
  const auto sq = AbsoluteNormProfile::polygonal({{1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
  dgv::Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
    CHECK(sq.eval(a, b) == doctest::Approx(std::max(a, b)).epsilon(1e-12));
    CHECK(sq.conjugate(a, b) == doctest::Approx(a + b).epsilon(1e-12));
  }
  CHECK(sq.gamma() == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(sq.big_gamma() == 1.0);
  CHECK(sq.c() == 1.0);
  CHECK(sq.d() == 1.0);
  CHECK_FALSE(sq.axis_extreme(0));
  CHECK_FALSE(sq.axis_extreme(1));
  REQUIRE(sq.aoh_witness().has_value());
  check_aoh_witness(sq, sq.aoh_witness()->a, sq.aoh_witness()->b);

  const auto dm = AbsoluteNormProfile::polygonal({{1.0, 0.0}, {0.0, 1.0}});
  for (int t = 0; t < 200; ++t) {
    const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
    CHECK(dm.eval(a, b) == doctest::Approx(a + b).epsilon(1e-12));
    CHECK(dm.conjugate(a, b) == doctest::Approx(std::max(a, b)).epsilon(1e-12));
  }
  CHECK(dm.gamma() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(dm.big_gamma() == 2.0);
  CHECK(std::fabs(dm.c()) <= 1e-9);
  CHECK(std::fabs(dm.d()) <= 1e-9);
  CHECK(dm.axis_extreme(0));
  CHECK(dm.axis_extreme(1));
  REQUIRE(dm.aoh_witness().has_value());
  check_aoh_witness(dm, dm.aoh_witness()->a, dm.aoh_witness()->b);

  // Conjugation swaps the two shapes and is an involution on them.
  const auto sq_dual = sq.conjugate_profile();
  REQUIRE(sq_dual.kind() == ProfileKind::polygonal);
  CHECK(same_vec_set(sq_dual.boundary(), dm.boundary()));
  const auto dm_dual = dm.conjugate_profile();
  CHECK(same_vec_set(dm_dual.boundary(), sq.boundary()));
}

TEST_CASE("profile: hexagonal boundary against hull gauge") {
  const auto hex = AbsoluteNormProfile::polygonal(kHexBoundary);
  CHECK(hex.big_gamma() == doctest::Approx(hex.eval(1.0, 1.0)).epsilon(1e-15));

  dgv::Rng rng(77);
  for (int t = 0; t < 25; ++t) {
    const double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
    if (a + b < 1e-3) continue;
    const double direct = hex.eval(a, b);
    const double gauged = gauge_by_hull(hex, a, b);
    CHECK(direct == doctest::Approx(gauged).epsilon(1e-7));
  }

  // gamma: dense scan upper-bounds the true minimum, and the piecewise
  // linear restriction keeps the grid error below the slope times the step.
  double grid_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20000; ++i) {
    const double s = static_cast<double>(i) / 20000.0;
    grid_min = std::min(grid_min, hex.eval(s, 1.0 - s));
  }
  CHECK(hex.gamma() <= grid_min + 1e-12);
  CHECK(hex.gamma() == doctest::Approx(grid_min).epsilon(1e-3));

  // Bipolar: conjugating twice restores the boundary and the values.
  const auto bip = hex.conjugate_profile().conjugate_profile();
  REQUIRE(bip.kind() == ProfileKind::polygonal);
  CHECK(same_vec_set(bip.boundary(), hex.boundary(), 1e-8));
  for (int t = 0; t < 50; ++t) {
    const double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
    CHECK(bip.eval(a, b) == doctest::Approx(hex.eval(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("profile: conjugate pairing and attainment") {
  const std::vector<AbsoluteNormProfile> profs = {
      AbsoluteNormProfile::l1(), AbsoluteNormProfile::linf(),
      AbsoluteNormProfile::lp(2.0), AbsoluteNormProfile::lp(3.0),
      AbsoluteNormProfile::polygonal(kHexBoundary)};
  dgv::Rng rng(5150);
  for (const auto& prof : profs) {
    const auto curve = prof.unit_curve(4001);
    for (int t = 0; t < 40; ++t) {
      const double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
      const double s = rng.uniform(0.0, 2.0), u = rng.uniform(0.0, 2.0);
      // Pairing inequality.
      CHECK(a * s + b * u <= prof.eval(a, b) * prof.conjugate(s, u) + 1e-9);
      // The conjugate value is attained along the unit curve.
      double best = 0.0;
      for (const Vec& q : curve) best = std::max(best, q[0] * s + q[1] * u);
      CHECK(best == doctest::Approx(prof.conjugate(s, u)).epsilon(1e-5));
      CHECK(best <= prof.conjugate(s, u) + 1e-9);
    }
  }
}

TEST_CASE("profile: unit curve and norm sandwich") {
  const std::vector<AbsoluteNormProfile> profs = {
      AbsoluteNormProfile::l1(), AbsoluteNormProfile::linf(),
      AbsoluteNormProfile::lp(2.0), AbsoluteNormProfile::lp(1.5),
      AbsoluteNormProfile::polygonal(kHexBoundary)};
  dgv::Rng rng(31);
  for (const auto& prof : profs) {
    const auto curve = prof.unit_curve(257);
    REQUIRE(curve.size() >= 2);
    CHECK(dgv::nearly_equal(curve.front(), {1.0, 0.0}, 1e-12));
    CHECK(dgv::nearly_equal(curve.back(), {0.0, 1.0}, 1e-12));
    for (const Vec& q : curve) {
      CHECK(q[0] >= -1e-15);
      CHECK(q[1] >= -1e-15);
      CHECK(prof.eval(q[0], q[1]) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int t = 0; t < 100; ++t) {
      const double a = rng.uniform(0.0, 2.0), b = rng.uniform(0.0, 2.0);
      const double n = prof.eval(a, b);
      CHECK(prof.gamma() * (a + b) <= n + 1e-12);
      CHECK(n <= prof.big_gamma() * std::max(a, b) + 1e-12);
      // Monotone in each coordinate.
      CHECK(prof.eval(a * 0.5, b) <= n + 1e-15);
      CHECK(prof.eval(a, b * 0.5) <= n + 1e-15);
    }
  }
  // The polygonal curve passes through its own breakpoints exactly.
  const auto hex = AbsoluteNormProfile::polygonal(kHexBoundary);
  const auto curve = hex.unit_curve(64);
  for (const Vec& v : kHexBoundary) CHECK(contains_vec(curve, v, 1e-15));
}

TEST_CASE("profile: invalid boundaries rejected") {
  using P = AbsoluteNormProfile;
  // Must start at (1,0) and end at (0,1).
  CHECK_THROWS_AS(P::polygonal({{0.9, 0.0}, {0.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}, {0.0, 0.9}}), std::invalid_argument);
  // Single point.
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}}), std::invalid_argument);
  // Monotonicity violations.
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}, {1.1, 0.5}, {0.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}, {0.5, -0.2}, {0.0, 1.0}}),
                  std::invalid_argument);
  // Collinear interior point is not extreme.
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}, {0.5, 0.5}, {0.0, 1.0}}),
                  std::invalid_argument);
  // Concave turn.
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}, {0.4, 0.4}, {0.0, 1.0}}),
                  std::invalid_argument);
  // Repeated point.
  CHECK_THROWS_AS(P::polygonal({{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("spaces: norms match closed formulas") {
  const auto li3 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
  CHECK(li3.norm({2.0 / 3.0, 2.0 / 3.0, 1.0}) == 1.0);
  CHECK(li3.dim() == 3);

  const auto w = NormedSpace::weighted_l1({0.5, 0.5});
  CHECK(w.norm({1.0, 1.0}) == 1.0);

  const auto sum = NormedSpace::sum(
      NormedSpace::lp(std::numeric_limits<double>::infinity(), 2),
      NormedSpace::lp(1.0, 2), AbsoluteNormProfile::l1());
  CHECK(sum.dim() == 4);
  CHECK(sum.norm({1.0, 0.0, 0.5, -0.5}) == 2.0);

  dgv::Rng rng(91);
  const auto l13 = NormedSpace::lp(1.0, 3);
  const auto l23 = NormedSpace::lp(2.0, 3);
  const auto c08 = NormedSpace::c0(8);
  for (int t = 0; t < 100; ++t) {
    const Vec x = rng.gauss_vec(3);
    CHECK(l13.norm(x) == doctest::Approx(oracle::o_norm1(x)).epsilon(1e-14));
    CHECK(l23.norm(x) == doctest::Approx(oracle::o_norm2(x)).epsilon(1e-14));
    CHECK(li3.norm(x) == doctest::Approx(oracle::o_norminf(x)).epsilon(1e-14));
    const Vec x8 = rng.gauss_vec(8);
    CHECK(c08.norm(x8) == doctest::Approx(oracle::o_norminf(x8)).epsilon(1e-14));
    const Vec x2 = rng.gauss_vec(2);
    CHECK(w.norm(x2) ==
          doctest::Approx(0.5 * std::fabs(x2[0]) + 0.5 * std::fabs(x2[1]))
              .epsilon(1e-14));
    // Sum norms are the exact composite of the component norms.
    const Vec xs = rng.gauss_vec(4);
    const Vec xl = {xs[0], xs[1]}, xr = {xs[2], xs[3]};
    CHECK(sum.norm(xs) == oracle::o_norminf(xl) + oracle::o_norm1(xr));
  }
  const auto sum_inf = NormedSpace::sum(
      NormedSpace::lp(std::numeric_limits<double>::infinity(), 2),
      NormedSpace::lp(1.0, 2), AbsoluteNormProfile::linf());
  for (int t = 0; t < 50; ++t) {
    const Vec xs = rng.gauss_vec(4);
    const Vec xl = {xs[0], xs[1]}, xr = {xs[2], xs[3]};
    CHECK(sum_inf.norm(xs) ==
          std::max(oracle::o_norminf(xl), oracle::o_norm1(xr)));
  }

  // Norm axioms on a sampled triple, for every variant.
  const auto hexsp = NormedSpace::polyhedral(
      {{1.0, 0.0}, {0.2, 0.9}, {-0.5, 0.8}, {-1.0, 0.0}, {-0.2, -0.9}, {0.5, -0.8}});
  const std::vector<const NormedSpace*> all = {&li3, &l13, &l23, &w,
                                               &sum, &sum_inf, &hexsp, &c08};
  for (const NormedSpace* sp : all) {
    for (int t = 0; t < 40; ++t) {
      const Vec x = rng.gauss_vec(sp->dim());
      const Vec y = rng.gauss_vec(sp->dim());
      const double lam = rng.uniform(-2.0, 2.0);
      CHECK(sp->norm(dgv::add(x, y)) <= sp->norm(x) + sp->norm(y) + 1e-10);
      CHECK(sp->norm(dgv::scaled(x, lam)) ==
            doctest::Approx(std::fabs(lam) * sp->norm(x)).epsilon(1e-12));
      if (sp->norm(x) < 1e-12) CHECK(oracle::o_norm2(x) < 1e-9);
    }
  }
}

TEST_CASE("spaces: dual norms pair with primal norms") {
  const auto l13 = NormedSpace::lp(1.0, 3);
  CHECK(l13.dual_norm({1.0, -1.0, 1.0}) == 1.0);

  const auto cube = NormedSpace::polyhedral(oracle::cube_vertices(3));
  CHECK(cube.dual_norm({1.0, 1.0, 1.0}) == 3.0);

  const auto sum = NormedSpace::sum(
      NormedSpace::lp(std::numeric_limits<double>::infinity(), 2),
      NormedSpace::lp(1.0, 2), AbsoluteNormProfile::l1());
  dgv::Rng rng(14);
  for (int t = 0; t < 50; ++t) {
    const Vec f = rng.gauss_vec(4);
    const Vec fl = {f[0], f[1]}, fr = {f[2], f[3]};
    // Dual of an l1-sum takes the max of the component dual norms.
    CHECK(sum.dual_norm(f) ==
          doctest::Approx(std::max(oracle::o_norm1(fl), oracle::o_norminf(fr)))
              .epsilon(1e-14));
  }

  const auto w = NormedSpace::weighted_l1({0.5, 1.0 / 3.0});
  const auto l23 = NormedSpace::lp(2.0, 3);
  const auto c05 = NormedSpace::c0(5);
  const std::vector<const NormedSpace*> all = {&l13, &cube, &sum, &w, &l23, &c05};
  for (const NormedSpace* sp : all) {
    for (int t = 0; t < 60; ++t) {
      const Vec x = rng.gauss_vec(sp->dim());
      const Vec f = rng.gauss_vec(sp->dim());
      // Pairing inequality.
      CHECK(std::fabs(dgv::dot(f, x)) <=
            sp->dual_norm(f) * sp->norm(x) * (1.0 + 1e-12) + 1e-12);
    }
    if (!sp->has_vertex_list()) continue;
    // Attainment: the dual norm is reached at a ball vertex.
    const auto& verts = sp->ball_vertices();
    for (int t = 0; t < 20; ++t) {
      const Vec f = rng.gauss_vec(sp->dim());
      double best = 0.0;
      for (const Vec& v : verts) best = std::max(best, std::fabs(dgv::dot(f, v)));
      CHECK(best == doctest::Approx(sp->dual_norm(f)).epsilon(1e-10));
    }
  }
}

TEST_CASE("spaces: ball vertices for every extremal variant") {
  const auto li2 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 2);
  CHECK(same_vec_set(li2.ball_vertices(), oracle::cube_vertices(2)));

  const auto l14 = NormedSpace::lp(1.0, 4);
  CHECK(same_vec_set(l14.ball_vertices(), oracle::cross_vertices(4)));

  const auto w = NormedSpace::weighted_l1({0.5, 1.0 / 3.0});
  CHECK(same_vec_set(w.ball_vertices(),
                     {{2.0, 0.0}, {-2.0, 0.0}, {0.0, 3.0}, {0.0, -3.0}}));

  const auto c03 = NormedSpace::c0(3);
  CHECK(same_vec_set(c03.ball_vertices(), oracle::cube_vertices(3)));

  // l1-sum: the ball is the convex hull of both factors' vertices embedded on
  // their own block with the other block zero. Cross-check the claimed list
  // by re-canonicalizing it together with interior junk.
  const auto sum1 = NormedSpace::sum(
      li2, NormedSpace::lp(1.0, 2), AbsoluteNormProfile::l1());
  std::vector<Vec> expect1;
  for (const Vec& v : oracle::cube_vertices(2)) expect1.push_back({v[0], v[1], 0.0, 0.0});
  for (const Vec& v : oracle::cross_vertices(2)) expect1.push_back({0.0, 0.0, v[0], v[1]});
  CHECK(sum1.ball_vertices().size() == 8);
  CHECK(same_vec_set(sum1.ball_vertices(), dgv::opt::canonical_vertices(expect1)));
  for (const Vec& v : sum1.ball_vertices()) {
    CHECK(sum1.norm(v) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // linf-sum: the ball is the product, so vertices are all pairs.
  const auto sumI = NormedSpace::sum(
      li2, NormedSpace::lp(1.0, 2), AbsoluteNormProfile::linf());
  std::vector<Vec> expectI;
  for (const Vec& v : oracle::cube_vertices(2)) {
    for (const Vec& u : oracle::cross_vertices(2)) {
      expectI.push_back({v[0], v[1], u[0], u[1]});
    }
  }
  CHECK(sumI.ball_vertices().size() == 16);
  CHECK(same_vec_set(sumI.ball_vertices(), expectI));

  // Polygonal-profile sum of two lines: vertices sit at profile breakpoints
  // with all sign choices, and each one is strictly outside the hull of the
  // rest (independent extremeness check through the LP layer).
  const auto line = NormedSpace::lp(std::numeric_limits<double>::infinity(), 1);
  const auto hexp = AbsoluteNormProfile::polygonal(kHexBoundary);
  const auto sumP = NormedSpace::sum(line, line, hexp);
  const auto& pverts = sumP.ball_vertices();
  CHECK(pverts.size() == 4 * kHexBoundary.size() - 4);
  for (const Vec& v : pverts) {
    CHECK(sumP.norm(v) == doctest::Approx(1.0).epsilon(1e-9));
    std::vector<Vec> rest;
    for (const Vec& u : pverts) {
      if (!dgv::nearly_equal(u, v, 1e-12)) rest.push_back(u);
    }
    CHECK_FALSE(dgv::opt::hull_membership(v, rest).inside);
  }

  // Smooth factors have no vertex list.
  const auto l23 = NormedSpace::lp(2.0, 3);
  CHECK_FALSE(l23.has_vertex_list());
  CHECK_THROWS_AS(l23.ball_vertices(), dgv::UnsupportedVariant);
  const auto sum2 = NormedSpace::sum(li2, li2, AbsoluteNormProfile::lp(2.0));
  CHECK_FALSE(sum2.has_vertex_list());
  CHECK_THROWS_AS(sum2.ball_vertices(), dgv::UnsupportedVariant);
}

TEST_CASE("spaces: dual vertices and exact polytopes") {
  const auto li3 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
  REQUIRE(li3.has_dual_vertices());
  CHECK(same_vec_set(li3.dual_vertices(), oracle::cross_vertices(3)));

  const auto l13 = NormedSpace::lp(1.0, 3);
  REQUIRE(l13.has_dual_vertices());
  CHECK(same_vec_set(l13.dual_vertices(), oracle::cube_vertices(3)));

  const auto w = NormedSpace::weighted_l1({0.5, 1.0 / 3.0});
  REQUIRE(w.has_dual_vertices());
  CHECK(same_vec_set(w.dual_vertices(),
                     {{0.5, 1.0 / 3.0},
                      {0.5, -1.0 / 3.0},
                      {-0.5, 1.0 / 3.0},
                      {-0.5, -1.0 / 3.0}}));

  // Polyhedral duals run through the polar-vertex enumeration.
  const auto cross2 = NormedSpace::polyhedral(oracle::cross_vertices(2));
  CHECK(same_vec_set(cross2.dual_vertices(), oracle::cube_vertices(2)));

  // Dual of an l1-sum is the linf-sum of the duals: a product list.
  const auto sum1 = NormedSpace::sum(
      NormedSpace::lp(std::numeric_limits<double>::infinity(), 2),
      NormedSpace::lp(1.0, 2), AbsoluteNormProfile::l1());
  REQUIRE(sum1.has_dual_vertices());
  std::vector<Vec> expectD;
  for (const Vec& f : oracle::cross_vertices(2)) {
    for (const Vec& g : oracle::cube_vertices(2)) {
      expectD.push_back({f[0], f[1], g[0], g[1]});
    }
  }
  CHECK(same_vec_set(sum1.dual_vertices(), expectD));
  for (const Vec& f : sum1.dual_vertices()) {
    CHECK(sum1.dual_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
    double best = 0.0;
    for (const Vec& v : sum1.ball_vertices()) best = std::max(best, dgv::dot(f, v));
    CHECK(best == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Exact polytope availability respects the dimension and vertex caps.
  CHECK(li3.has_exact_polytope());
  CHECK(li3.ball_polytope().vertices.size() == 8);
  CHECK_FALSE(li3.ball_polytope().edges.empty());
  const auto li5 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 5);
  CHECK(li5.has_vertex_list());
  CHECK_FALSE(li5.has_exact_polytope());
  const auto li4 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 4);
  CHECK(li4.has_exact_polytope());
}

TEST_CASE("spaces: face vertices") {
  const auto li3 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
  const auto face1 = li3.face_vertices({1.0, 0.0, 0.0});
  CHECK(face1.size() == 4);
  for (const Vec& v : face1) CHECK(v[0] == 1.0);

  const auto l13 = NormedSpace::lp(1.0, 3);
  const auto face2 = l13.face_vertices({1.0, 1.0, 1.0});
  CHECK(same_vec_set(face2, {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}));

  // A functional strictly between two adjacent facet normals exposes exactly
  // the shared vertex of a polygon.
  const std::vector<Vec> hexv = {{1.0, 0.0},  {0.2, 0.9},   {-0.5, 0.8},
                                 {-1.0, 0.0}, {-0.2, -0.9}, {0.5, -0.8}};
  const auto hexsp = NormedSpace::polyhedral(hexv);
  const Vec target = {0.2, 0.9};
  Vec f0 = {0.0, 0.0};
  // Average the normals of the two facets meeting at the target vertex.
  {
    const auto facets = oracle::polygon_facets(hexv);
    std::vector<Vec> normals;
    for (const auto& fc : facets) {
      const Vec& a = fc.first;
      const Vec& b = fc.second;
      const double det = a[0] * b[1] - a[1] * b[0];
      REQUIRE(std::fabs(det) > 1e-12);
      const Vec n = {(b[1] - a[1]) / det, (a[0] - b[0]) / det};
      if (std::fabs(dgv::dot(n, target) - 1.0) < 1e-9) normals.push_back(n);
    }
    REQUIRE(normals.size() == 2);
    f0 = dgv::add(normals[0], normals[1]);
  }
  const Vec f = dgv::scaled(f0, 1.0 / hexsp.dual_norm(f0));
  const auto face3 = hexsp.face_vertices(f);
  REQUIRE(face3.size() == 1);
  CHECK(dgv::nearly_equal(face3[0], target, 1e-9));
  // Slicing just below the supporting level collapses onto the same vertex.
  const auto near = dgv::opt::slice_vertices(hexsp.ball_polytope(), f, 1.0 - 1e-7);
  REQUIRE(!near.empty());
  for (const Vec& y : near) {
    CHECK(oracle::o_norm2(dgv::sub(y, target)) < 1e-3);
  }

  // Non-unit functionals are rejected.
  CHECK_THROWS_AS(li3.face_vertices({2.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("spaces: sampled dual sphere") {
  const auto li3 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
  const auto small = li3.sample_dual_sphere(6, 7);
  REQUIRE(small.size() >= 6);
  for (int i = 0; i < 3; ++i) {
    Vec e(3, 0.0), me(3, 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    me[static_cast<std::size_t>(i)] = -1.0;
    CHECK(contains_vec(small, e, 1e-12));
    CHECK(contains_vec(small, me, 1e-12));
  }

  // Vertex inclusion and exact unit dual norm on a polyhedral space.
  const auto cube = NormedSpace::polyhedral(oracle::cube_vertices(2));
  const auto cs = cube.sample_dual_sphere(40, 11);
  for (const Vec& f : cube.dual_vertices()) CHECK(contains_vec(cs, f, 1e-12));
  for (const Vec& f : cs) {
    CHECK(cube.dual_norm(f) == doctest::Approx(1.0).epsilon(1e-10));
  }

  // Weighted axis functionals are rescaled to the dual sphere.
  const auto w = NormedSpace::weighted_l1({0.5, 1.0 / 3.0});
  const auto ws = w.sample_dual_sphere(4, 3);
  CHECK(contains_vec(ws, {0.5, 0.0}, 1e-12));
  CHECK(contains_vec(ws, {0.0, 1.0 / 3.0}, 1e-12));
  for (const Vec& f : ws) CHECK(w.dual_norm(f) == doctest::Approx(1.0).epsilon(1e-10));

  // Determinism: identical seeds agree bitwise, different seeds differ.
  const auto l23 = NormedSpace::lp(2.0, 3);
  const auto a = l23.sample_dual_sphere(500, 42);
  const auto b = l23.sample_dual_sphere(500, 42);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  const auto c = l23.sample_dual_sphere(500, 43);
  bool differs = c.size() != a.size();
  for (std::size_t i = 0; !differs && i < a.size(); ++i) differs = !(a[i] == c[i]);
  CHECK(differs);
  for (const Vec& f : a) {
    CHECK(l23.dual_norm(f) == doctest::Approx(1.0).epsilon(1e-10));
  }

  // Coverage on the Euclidean sphere: every probe direction has a sample
  // within a tenth of a radian.
  const auto big = l23.sample_dual_sphere(10000, 4242);
  dgv::Rng rng(999);
  double worst = 0.0;
  for (int t = 0; t < 2000; ++t) {
    Vec g = rng.gauss_vec(3);
    const double n2 = oracle::o_norm2(g);
    if (n2 < 1e-9) continue;
    g = dgv::scaled(g, 1.0 / n2);
    double best = -1.0;
    for (const Vec& f : big) best = std::max(best, dgv::dot(f, g));
    worst = std::max(worst, std::acos(std::clamp(best, -1.0, 1.0)));
  }
  CHECK(worst < 0.1);

  CHECK_THROWS_AS(li3.sample_dual_sphere(0, 1), std::invalid_argument);
}

TEST_CASE("spaces: norm is the supremum over sampled dual functionals") {
  dgv::Rng rng(606);
  const auto li3 = NormedSpace::lp(std::numeric_limits<double>::infinity(), 3);
  const auto l13 = NormedSpace::lp(1.0, 3);
  const auto sum1 = NormedSpace::sum(
      NormedSpace::lp(std::numeric_limits<double>::infinity(), 2),
      NormedSpace::lp(1.0, 2), AbsoluteNormProfile::l1());
  for (const NormedSpace* sp : {&li3, &l13, &sum1}) {
    const auto fs = sp->sample_dual_sphere(64, 5);
    for (int t = 0; t < 30; ++t) {
      const Vec x = rng.gauss_vec(sp->dim());
      double best = 0.0;
      for (const Vec& f : fs) best = std::max(best, std::fabs(dgv::dot(f, x)));
      // Extremal spaces: the dual vertices are in the sample, so the sup is
      // attained exactly.
      CHECK(best == doctest::Approx(sp->norm(x)).epsilon(1e-9));
    }
  }
  const auto l23 = NormedSpace::lp(2.0, 3);
  const auto fs = l23.sample_dual_sphere(4000, 5);
  for (int t = 0; t < 20; ++t) {
    const Vec x = rng.gauss_vec(3);
    double best = 0.0;
    for (const Vec& f : fs) best = std::max(best, std::fabs(dgv::dot(f, x)));
    CHECK(best <= l23.norm(x) * (1.0 + 1e-12));
    CHECK(best >= l23.norm(x) * (1.0 - 0.02));
  }
}

TEST_CASE("spaces: json loading") {
  using dgv::spaces::profile_from_json;
  using dgv::spaces::space_from_json;

  const auto li = space_from_json(R"({"type":"lp","p":"inf","dim":3})");
  CHECK(li.kind() == dgv::spaces::SpaceKind::lp);
  CHECK(li.dim() == 3);
  CHECK(li.norm({2.0 / 3.0, 2.0 / 3.0, 1.0}) == 1.0);

  const auto poly = space_from_json(
      R"({"type":"polyhedral","vertices":[[1,0],[0,1],[-1,0],[0,-1]]})");
  CHECK(poly.kind() == dgv::spaces::SpaceKind::polyhedral);
  CHECK(poly.norm({0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-12));

  const auto w = space_from_json(R"({"type":"weighted_l1","weights":[0.5,0.5]})");
  CHECK(w.norm({1.0, 1.0}) == 1.0);

  const auto c0 = space_from_json(R"({"type":"c0","dim":8})");
  CHECK(c0.kind() == dgv::spaces::SpaceKind::c0);
  CHECK(c0.dim() == 8);

  const auto sum = space_from_json(
      R"({"type":"sum","norm":{"type":"l1"},)"
      R"("left":{"type":"lp","p":"inf","dim":2},)"
      R"("right":{"type":"lp","p":1,"dim":2}})");
  CHECK(sum.kind() == dgv::spaces::SpaceKind::sum);
  CHECK(sum.norm({1.0, 0.0, 0.5, -0.5}) == 2.0);

  // Nested sums and every profile type parse.
  const auto nested = space_from_json(
      R"({"type":"sum","norm":{"type":"polygonal","boundary":[[1,0],[0.9,0.5],[0,1]]},)"
      R"("left":{"type":"sum","norm":{"type":"linf"},)"
      R"("left":{"type":"lp","p":"inf","dim":1},"right":{"type":"lp","p":1,"dim":1}},)"
      R"("right":{"type":"c0","dim":2}})");
  CHECK(nested.dim() == 4);
  CHECK(nested.norm({1.0, 0.0, 0.0, 0.0}) > 0.0);

  const auto p2 = profile_from_json(R"({"type":"lp","p":2})");
  CHECK(p2.kind() == ProfileKind::lp);
  CHECK(p2.p() == 2.0);

  // Strictness: unknown keys, missing keys, wrong types, malformed text.
  CHECK_THROWS_AS(space_from_json(R"({"type":"lp","p":2,"dim":3,"extra":1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"lp","p":2})"), std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"lp","p":"two","dim":3})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"lp","p":0.5,"dim":3})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"lp","p":2,"dim":2.5})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"lp","p":2,"dim":0})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"mystery"})"), std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"weighted_l1","weights":[0.5,0]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(space_from_json(R"({"type":"polyhedral","vertices":[[1,0],[0,1]]})"),
                  std::invalid_argument);  // not symmetric
  CHECK_THROWS_AS(space_from_json("not json at all"), std::invalid_argument);
  CHECK_THROWS_AS(space_from_json("[1,2,3]"), std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json(R"({"type":"l1","p":1})"), std::invalid_argument);
  CHECK_THROWS_AS(profile_from_json(R"({"type":"lp"})"), std::invalid_argument);
}

TEST_CASE("spaces: polyhedral validation and descriptions") {
  // Asymmetric or flat vertex sets are rejected.
  CHECK_THROWS_AS(NormedSpace::polyhedral({{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      NormedSpace::polyhedral({{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0},
                               {0.0, -1.0, 0.0}}),
      std::invalid_argument);
  CHECK_THROWS_AS(NormedSpace::weighted_l1({}), std::invalid_argument);
  CHECK_THROWS_AS(NormedSpace::lp(2.0, 0), std::invalid_argument);

  // Canonicalization strips redundant generators before validation.
  const auto sq = NormedSpace::polyhedral(
      {{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {0.0, 0.0}, {1.0, 0.0}});
  CHECK(sq.ball_vertices().size() == 4);

  CHECK(NormedSpace::c0(4).describe().find("c0") != std::string::npos);
  CHECK(NormedSpace::lp(2.0, 3).describe().find("2") != std::string::npos);
  const auto sum = NormedSpace::sum(
      NormedSpace::lp(std::numeric_limits<double>::infinity(), 2),
      NormedSpace::lp(1.0, 2), AbsoluteNormProfile::l1());
  CHECK(sum.describe().find("sum") != std::string::npos);
}
