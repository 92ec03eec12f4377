#include "dgv/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dgv/hull.hpp"
#include "dgv/polytope.hpp"
#include "dgv/profile.hpp"
#include "dgv/rng.hpp"
#include "dgv/threads.hpp"

namespace dgv::con {

namespace {

using spaces::AbsoluteNormProfile;
using spaces::NormedSpace;
using spaces::ProfileKind;
using spaces::SpaceKind;

constexpr double kDecLevelSlack = 1e-12;

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

void check_point(const NormedSpace& space, const Vec& x) {
  if (x.size() != static_cast<std::size_t>(space.dim())) {
    throw std::invalid_argument("point dimension mismatch");
  }
  if (space.norm(x) > 1.0 + kFeasTol) {
    throw std::invalid_argument("point outside the unit ball");
  }
}

bool is_euclidean(const NormedSpace& space) {
  return space.kind() == SpaceKind::lp && space.p() == 2.0;
}

// Maximizer of s*a + t*b over the profile's unit ball, exact for every
// profile kind (boundary vertices carry the extreme points; the lp case has
// the standard conjugate-alignment form).
std::pair<double, double> profile_norming(const AbsoluteNormProfile& prof, double a,
                                          double b) {
  switch (prof.kind()) {
    case ProfileKind::l1:
      return a >= b ? std::make_pair(1.0, 0.0) : std::make_pair(0.0, 1.0);
    case ProfileKind::linf:
      return {1.0, 1.0};
    case ProfileKind::lp: {
      if (a <= 0.0 && b <= 0.0) return {1.0, 0.0};
      const double p = prof.p();
      const double s0 = std::pow(std::max(a, 0.0), 1.0 / (p - 1.0));
      const double t0 = std::pow(std::max(b, 0.0), 1.0 / (p - 1.0));
      const double d = prof.eval(s0, t0);
      if (d < 1e-300) return {1.0, 0.0};
      return {s0 / d, t0 / d};
    }
    case ProfileKind::polygonal: {
      double best = -std::numeric_limits<double>::infinity();
      std::pair<double, double> arg{1.0, 0.0};
      for (const Vec& q : prof.boundary()) {
        const double v = q[0] * a + q[1] * b;
        if (v > best) {
          best = v;
          arg = {q[0], q[1]};
        }
      }
      return arg;
    }
  }
  return {1.0, 0.0};
}

// A unit vector u with f(u) = ||f||* (dual norm one assumed for f). Used to
// pull search iterates back into slices.
Vec norming_point(const NormedSpace& space, const Vec& f);

Vec norming_point_lp(double p, const Vec& f) {
  const std::size_t n = f.size();
  Vec y(n, 0.0);
  if (p == 1.0) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (std::fabs(f[i]) > std::fabs(f[arg])) arg = i;
    }
    y[arg] = sign_of(f[arg]);
    return y;
  }
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < n; ++i) y[i] = sign_of(f[i]);
    return y;
  }
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = sign_of(f[i]) * std::pow(std::fabs(f[i]), 1.0 / (p - 1.0));
    scale += std::pow(std::fabs(y[i]), p);
  }
  scale = std::pow(scale, 1.0 / p);
  if (scale < 1e-300) {
    y.assign(n, 0.0);
    y[0] = 1.0;
    return y;
  }
  for (double& v : y) v /= scale;
  return y;
}

Vec norming_point(const NormedSpace& space, const Vec& f) {
  switch (space.kind()) {
    case SpaceKind::lp:
      return norming_point_lp(space.p(), f);
    case SpaceKind::c0:
      return norming_point_lp(std::numeric_limits<double>::infinity(), f);
    case SpaceKind::polyhedral:
    case SpaceKind::weighted_l1: {
      const auto verts = space.ball_vertices();
      std::size_t arg = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < verts.size(); ++i) {
        const double v = dot(f, verts[i]);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      return verts[arg];
    }
    case SpaceKind::sum: {
      const std::size_t ld = static_cast<std::size_t>(space.left().dim());
      const Vec fl(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(ld));
      const Vec fr(f.begin() + static_cast<std::ptrdiff_t>(ld), f.end());
      const Vec ul = norming_point(space.left(), fl);
      const Vec ur = norming_point(space.right(), fr);
      const auto [s, t] = profile_norming(space.profile(), space.left().dual_norm(fl),
                                          space.right().dual_norm(fr));
      return concat(scaled(ul, s), scaled(ur, t));
    }
  }
  throw std::logic_error("unhandled space kind");
}

// A dual-unit functional attaining f(x) = ||x||. For x = 0 falls back to the
// first axis functional.
Vec norming_functional(const NormedSpace& space, const Vec& x) {
  switch (space.kind()) {
    case SpaceKind::lp: {
      const double p = space.p();
      const std::size_t n = x.size();
      Vec f(n, 0.0);
      if (p == 1.0) {
        for (std::size_t i = 0; i < n; ++i) f[i] = sign_of(x[i]);
        return f;
      }
      if (std::isinf(p)) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < n; ++i) {
          if (std::fabs(x[i]) > std::fabs(x[arg])) arg = i;
        }
        f[arg] = sign_of(x[arg]);
        return f;
      }
      const double r = space.norm(x);
      if (r < 1e-12) {
        f[0] = 1.0;
        return f;
      }
      for (std::size_t i = 0; i < n; ++i) {
        f[i] = sign_of(x[i]) * std::pow(std::fabs(x[i]) / r, p - 1.0);
      }
      return f;
    }
    case SpaceKind::c0: {
      Vec f(x.size(), 0.0);
      std::size_t arg = 0;
      for (std::size_t i = 1; i < x.size(); ++i) {
        if (std::fabs(x[i]) > std::fabs(x[arg])) arg = i;
      }
      f[arg] = sign_of(x[arg]);
      return f;
    }
    case SpaceKind::weighted_l1: {
      Vec f(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        f[i] = sign_of(x[i]) * space.weights()[i];
      }
      return f;
    }
    case SpaceKind::polyhedral: {
      const auto& duals = space.dual_vertices();
      std::size_t arg = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < duals.size(); ++i) {
        const double v = dot(duals[i], x);
        if (v > best) {
          best = v;
          arg = i;
        }
      }
      return duals[arg];
    }
    case SpaceKind::sum: {
      const std::size_t ld = static_cast<std::size_t>(space.left().dim());
      const Vec xl(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(ld));
      const Vec xr(x.begin() + static_cast<std::ptrdiff_t>(ld), x.end());
      const Vec gl = norming_functional(space.left(), xl);
      const Vec gr = norming_functional(space.right(), xr);
      const auto [s, t] = profile_norming(space.profile().conjugate_profile(),
                                          space.left().norm(xl), space.right().norm(xr));
      return concat(scaled(gl, s), scaled(gr, t));
    }
  }
  throw std::logic_error("unhandled space kind");
}

// Largest Euclidean distance from x to the cap {y : ||y|| <= 1, f.y >= level}
// for Euclidean-unit f. Extreme points of the cap sit on the sphere arc, so
// the problem reduces to minimizing c*a - sqrt(1-c^2)*b over c in [level, 1].
double cap_max_dist(const Vec& x, const Vec& f, double level) {
  const double a = dot(x, f);
  const double xx = dot(x, x);
  const double b = std::sqrt(std::max(0.0, xx - a * a));
  level = std::clamp(level, -1.0, 1.0);

  const auto g = [&](double c) {
    return c * a - std::sqrt(std::max(0.0, 1.0 - c * c)) * b;
  };
  double m = std::min(g(level), g(1.0));
  const double hyp = std::hypot(a, b);
  if (hyp > 1e-300) {
    const double crit = -a / hyp;
    if (crit > level && crit < 1.0) m = std::min(m, g(crit));
  }
  return std::sqrt(std::max(0.0, xx + 1.0 - 2.0 * m));
}

// Moves a sphere point y along the normalized chord toward the norming point
// u of f (f.u = 1, so the endpoint is always feasible) until the slice
// constraint f.y >= level holds. Bisection lands on the slice rim; every
// returned point has norm one.
Vec sphere_pull(const NormedSpace& space, const Vec& y, const Vec& u, const Vec& f,
                double level) {
  if (dot(f, y) >= level) return y;
  const auto at = [&](double t) {
    Vec z = add(scaled(y, 1.0 - t), scaled(u, t));
    const double nn = space.norm(z);
    if (nn < 1e-9) return Vec{};
    return scaled(z, 1.0 / nn);
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 25; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec z = at(mid);
    if (!z.empty() && dot(f, z) >= level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const Vec z = at(hi);
  if (z.empty() || dot(f, z) < level) return u;
  return z;
}

// Derivative-free inner maximization of ||x - y|| over the slice
// {y in B : f.y >= level} for spaces without enumerable structure. Extreme
// points of the slice lie on the sphere, so the walk stays there and the
// feasibility pull moves along it.
double ascent_max_dist(const NormedSpace& space, const Vec& x, const Vec& f,
                       double level, int iters, Rng& rng) {
  const Vec u = norming_point(space, f);
  std::vector<Vec> starts;
  starts.push_back(u);
  const double rx = space.norm(x);
  if (rx > 1e-9) {
    starts.push_back(sphere_pull(space, scaled(x, -1.0 / rx), u, f, level));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec e(x.size(), 0.0);
    e[i] = 1.0;
    const double nn = space.norm(e);
    starts.push_back(sphere_pull(space, scaled(e, 1.0 / nn), u, f, level));
    starts.push_back(sphere_pull(space, scaled(e, -1.0 / nn), u, f, level));
  }
  for (int k = 0; k < 2; ++k) {
    Vec g = rng.gauss_vec(x.size());
    const double nn = space.norm(g);
    if (nn < 1e-12) continue;
    starts.push_back(sphere_pull(space, scaled(g, 1.0 / nn), u, f, level));
  }

  double best = 0.0;
  Vec y = u;
  for (const Vec& s : starts) {
    const double v = space.norm(sub(x, s));
    if (v > best) {
      best = v;
      y = s;
    }
  }

  double sigma = 0.5;
  for (int it = 0; it < iters; ++it) {
    Vec dir = rng.gauss_vec(x.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] += 0.7 * (y[i] - x[i]);
    Vec cand = add(y, scaled(dir, sigma));
    const double nn = space.norm(cand);
    if (nn < 1e-12) continue;
    cand = sphere_pull(space, scaled(cand, 1.0 / nn), u, f, level);
    const double v = space.norm(sub(x, cand));
    if (v > best) {
      best = v;
      y = cand;
      sigma = std::min(sigma * 1.15, 1.0);
    } else {
      sigma = std::max(sigma * 0.85, 1e-4);
    }
  }
  return best;
}

struct InnerEval {
  const NormedSpace& space;
  const Vec& x;
  const SearchConfig& cfg;
  bool for_dec = false;
  bool faces_exact = false;   // dc path: face vertex enumeration
  bool slices_exact = false;  // dec path: slice vertex enumeration
  bool euclid = false;
  int ascent_iters = 48;

  double level_for(const Vec& f) const {
    if (for_dec) return dot(f, x) - kDecLevelSlack;
    return 1.0 - cfg.delta;
  }

  // f must have dual norm one.
  double operator()(const Vec& f, Rng& rng) const {
    if (!for_dec && faces_exact) {
      double best = 0.0;
      for (const Vec& v : space.face_vertices(f)) {
        best = std::max(best, space.norm(sub(x, v)));
      }
      return best;
    }
    if (for_dec && slices_exact) {
      double best = 0.0;
      const double level = std::min(dot(f, x), 1.0) - kDecLevelSlack;
      for (const Vec& y : opt::slice_vertices(space.ball_polytope(), f, level)) {
        best = std::max(best, space.norm(sub(x, y)));
      }
      return best;
    }
    if (euclid) return cap_max_dist(x, f, level_for(f));
    return ascent_max_dist(space, x, f, level_for(f), ascent_iters, rng);
  }
};

// Functional candidates for the outer minimization: the seeded dual-sphere
// sample (axis functionals and dual vertices included), plus exposing
// functionals of the faces through x for the dec search, plus vertex-exposing
// centroids when the polytope structure is available.
std::vector<Vec> outer_candidates(const NormedSpace& space, const Vec& x,
                                  const SearchConfig& cfg, bool for_dec,
                                  std::uint64_t salt) {
  int want = std::max(cfg.dual_samples, 8);
  if (for_dec && space.has_exact_polytope()) want = std::min(want, 4000);
  auto cands = space.sample_dual_sphere(want, derive_seed(cfg.seed, salt));

  const double rx = space.norm(x);
  if (for_dec && rx > 1e-9) {
    cands.push_back(norming_functional(space, x));
    if (space.has_dual_vertices()) {
      Vec centroid(x.size(), 0.0);
      int hits = 0;
      for (const Vec& g : space.dual_vertices()) {
        if (dot(g, x) >= rx - 1e-9) {
          centroid = add(centroid, g);
          ++hits;
        }
      }
      if (hits > 1) {
        const double dn = space.dual_norm(centroid);
        if (dn > 1e-9) cands.push_back(scaled(centroid, 1.0 / dn));
      }
    }
  }
  if (!for_dec && space.has_exact_polytope() && space.has_dual_vertices()) {
    const auto verts = space.ball_vertices();
    const auto& duals = space.dual_vertices();
    for (const Vec& v : verts) {
      Vec centroid(x.size(), 0.0);
      int hits = 0;
      for (const Vec& g : duals) {
        if (std::fabs(dot(g, v) - 1.0) <= 1e-9) {
          centroid = add(centroid, g);
          ++hits;
        }
      }
      if (hits > 0) {
        const double dn = space.dual_norm(centroid);
        if (dn > 1e-9) cands.push_back(scaled(centroid, 1.0 / dn));
      }
    }
  }
  return cands;
}

double outer_minimize(const NormedSpace& space, const Vec& x, const SearchConfig& cfg,
                      const InnerEval& inner, bool for_dec, int* evaluated) {
  const auto cands = outer_candidates(space, x, cfg, for_dec, for_dec ? 0xDE0 : 0xDC0);
  std::vector<double> vals(cands.size());
  parallel_for(cands.size(), [&](std::size_t i) {
    Rng rng(derive_seed(cfg.seed, 0xA100 + i));
    vals[i] = inner(cands[i], rng);
  });
  std::size_t arg = 0;
  for (std::size_t i = 1; i < vals.size(); ++i) {
    if (vals[i] < vals[arg]) arg = i;
  }
  double best = vals.empty() ? 2.0 : vals[arg];
  Vec f = cands.empty() ? Vec(x.size(), 0.0) : cands[arg];

  // Direct search over the dual sphere around the best candidate.
  Rng rng(derive_seed(cfg.seed, for_dec ? 0xEF1 : 0xEF0));
  double sigma = 0.4;
  for (int it = 0; it < cfg.refine_iters; ++it) {
    Vec cand = add(f, scaled(rng.gauss_vec(x.size()), sigma));
    const double dn = space.dual_norm(cand);
    if (dn < 1e-9) continue;
    cand = scaled(cand, 1.0 / dn);
    Rng inner_rng(derive_seed(derive_seed(cfg.seed, 0xB2), static_cast<std::uint64_t>(it)));
    const double v = inner(cand, inner_rng);
    if (v < best) {
      best = v;
      f = cand;
      sigma = std::min(sigma * 1.1, 1.0);
    } else {
      sigma = std::max(sigma * 0.92, 1e-5);
    }
  }
  if (evaluated) *evaluated = static_cast<int>(cands.size()) + cfg.refine_iters;
  return best;
}

ConstantEstimate sampled_estimate(const NormedSpace& space, const Vec& x,
                                  const SearchConfig& cfg, bool for_dec) {
  check_point(space, x);
  if (cfg.dual_samples <= 0 || cfg.delta <= 0.0 || cfg.refine_iters < 0) {
    throw std::invalid_argument("search configuration must be positive");
  }
  InnerEval inner{space, x, cfg, for_dec};
  inner.faces_exact = !for_dec && space.has_vertex_list();
  inner.slices_exact = for_dec && space.has_exact_polytope();
  inner.euclid = is_euclidean(space);
  inner.ascent_iters = std::clamp(cfg.refine_iters, 32, 160);

  int evaluated = 0;
  double value = outer_minimize(space, x, cfg, inner, for_dec, &evaluated);

  // The definition floor and ceiling are valid envelopes; searches on smooth
  // spaces may drift slightly below the floor.
  const double rx = space.norm(x);
  value = std::clamp(value, std::max(0.0, 1.0 - rx), 1.0 + rx);

  ConstantEstimate out;
  out.value = value;
  out.upper = value;
  out.method = Method::sampled;
  out.samples = evaluated;
  out.seed = cfg.seed;
  out.delta = (inner.faces_exact || inner.slices_exact) ? 0.0 : cfg.delta;
  return out;
}

// Shared far-point machinery for the hull certificates.
struct FarSet {
  std::vector<Vec> generators;
  double tau = 0.0;
};

FarSet collect_far_points(const NormedSpace& space, const Vec& x, double alpha,
                          double eps, const SearchConfig& cfg) {
  FarSet far;
  far.tau = alpha - eps;
  if (space.has_vertex_list()) {
    for (const Vec& v : space.ball_vertices()) {
      if (space.norm(sub(v, x)) >= far.tau - 1e-12) far.generators.push_back(v);
    }
  }
  const double rx = space.norm(x);
  if (rx > 1e-9) {
    const Vec anti = scaled(x, -1.0 / rx);
    if (space.norm(sub(anti, x)) >= far.tau - 1e-12) far.generators.push_back(anti);
  }
  const int budget = std::clamp(cfg.dual_samples / 40, 120, 600);
  Rng rng(derive_seed(cfg.seed, 0xFA2));
  int accepted = 0;
  for (int tries = 0; tries < 60 * budget && accepted < budget; ++tries) {
    Vec g = rng.gauss_vec(x.size());
    const double nn = space.norm(g);
    if (nn < 1e-12) continue;
    g = scaled(g, 1.0 / nn);
    if (space.norm(sub(g, x)) >= far.tau - 1e-12) {
      far.generators.push_back(std::move(g));
      ++accepted;
    }
  }
  return far;
}

HullCertificate run_certificate(const NormedSpace& space, const Vec& x, double alpha,
                                double eps, const SearchConfig& cfg,
                                const std::vector<Vec>& targets,
                                const std::vector<Vec>& extra) {
  if (!(alpha > 0.0) || alpha > 2.0) throw std::invalid_argument("alpha outside (0, 2]");
  if (!(eps > 0.0) || eps > 2.0) throw std::invalid_argument("eps outside (0, 2]");
  check_point(space, x);

  FarSet far = collect_far_points(space, x, alpha, eps, cfg);
  for (const Vec& w : extra) {
    if (w.size() != x.size()) continue;
    if (space.norm(w) > 1.0 + kFeasTol) continue;
    if (space.norm(sub(w, x)) < far.tau - 1e-12) continue;
    far.generators.push_back(w);
  }
  std::sort(far.generators.begin(), far.generators.end(),
            [](const Vec& a, const Vec& b) { return lex_less(a, b); });
  far.generators.erase(
      std::unique(far.generators.begin(), far.generators.end(),
                  [](const Vec& a, const Vec& b) { return nearly_equal(a, b, 1e-9); }),
      far.generators.end());

  HullCertificate cert;
  cert.alpha = alpha;
  cert.eps = eps;
  cert.witnesses = far.generators;
  cert.targets = static_cast<int>(targets.size());
  if (far.generators.empty()) {
    cert.certified = false;
    return cert;
  }
  std::vector<char> ok(targets.size(), 0);
  parallel_for(targets.size(), [&](std::size_t i) {
    ok[i] = opt::hull_membership(targets[i], far.generators).inside ? 1 : 0;
  });
  cert.certified = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  return cert;
}

// Containment of the closed ball in a closed hull is equivalent to
// containment of any dense subset of the open ball, so on smooth spaces the
// membership targets sit slightly inside the sphere; a sphere point itself
// can never lie in the hull of finitely many other points of a strictly
// convex ball.
std::vector<Vec> ball_cover_targets(const NormedSpace& space, const Vec& x,
                                    const SearchConfig& cfg) {
  if (space.has_vertex_list()) return space.ball_vertices();
  constexpr double kShrink = 0.9;
  std::vector<Vec> targets;
  targets.emplace_back(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vec e(x.size(), 0.0);
    e[i] = 1.0;
    const double nn = space.norm(e);
    targets.push_back(scaled(e, kShrink / nn));
    targets.push_back(scaled(e, -kShrink / nn));
  }
  const int count = std::clamp(cfg.dual_samples / 100, 60, 200);
  Rng rng(derive_seed(cfg.seed, 0x7A6));
  while (targets.size() < static_cast<std::size_t>(count)) {
    Vec g = rng.gauss_vec(x.size());
    const double nn = space.norm(g);
    if (nn < 1e-12) continue;
    targets.push_back(scaled(g, kShrink / nn));
  }
  return targets;
}

double pointwise_constant(const NormedSpace& space, const Vec& x, ThicknessKind kind,
                          const SearchConfig& point_cfg);

}  // namespace

ConstantEstimate dc_exact_polyhedral(const NormedSpace& space, const Vec& x) {
  if (!space.has_vertex_list()) {
    throw UnsupportedVariant("exact value needs enumerable ball vertices");
  }
  check_point(space, x);
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& v : space.ball_vertices()) {
    best = std::min(best, space.norm(sub(x, v)));
  }
  ConstantEstimate out;
  out.value = best;
  out.certified_lower = best;
  out.upper = best;
  out.method = Method::exact_polyhedral;
  return out;
}

ConstantEstimate dc_sampled(const NormedSpace& space, const Vec& x,
                            const SearchConfig& cfg) {
  return sampled_estimate(space, x, cfg, false);
}

ConstantEstimate dec_sampled(const NormedSpace& space, const Vec& x,
                             const SearchConfig& cfg) {
  return sampled_estimate(space, x, cfg, true);
}

HullCertificate dc_lower_certificate(const NormedSpace& space, const Vec& x,
                                     double alpha, double eps, const SearchConfig& cfg) {
  return run_certificate(space, x, alpha, eps, cfg, ball_cover_targets(space, x, cfg),
                         {});
}

HullCertificate dec_lower_certificate(const NormedSpace& space, const Vec& x,
                                      double alpha, double eps, const SearchConfig& cfg,
                                      const std::vector<Vec>& extra_witnesses) {
  return run_certificate(space, x, alpha, eps, cfg, {x}, extra_witnesses);
}

namespace {

double pointwise_constant(const NormedSpace& space, const Vec& x, ThicknessKind kind,
                          const SearchConfig& point_cfg) {
  if (kind == ThicknessKind::tdelta) return dec_sampled(space, x, point_cfg).value;
  if (space.has_vertex_list()) return dc_exact_polyhedral(space, x).value;
  return dc_sampled(space, x, point_cfg).value;
}

}  // namespace

ConstantEstimate thickness_index(const NormedSpace& space, ThicknessKind kind,
                                 const SearchConfig& cfg) {
  const bool maximize = kind == ThicknessKind::sup_dc;
  const std::size_t dim = static_cast<std::size_t>(space.dim());

  std::vector<Vec> points;
  if (space.has_vertex_list()) {
    auto verts = space.ball_vertices();
    if (verts.size() <= 4096) {
      points.insert(points.end(), verts.begin(), verts.end());
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    Vec e(dim, 0.0);
    e[i] = 1.0;
    const double nn = space.norm(e);
    points.push_back(scaled(e, 1.0 / nn));
    points.push_back(scaled(e, -1.0 / nn));
  }
  {
    const int extra = std::clamp(cfg.dual_samples / 20, 50, 400);
    Rng rng(derive_seed(cfg.seed, 0x571));
    for (int k = 0; k < extra; ++k) {
      Vec g = rng.gauss_vec(dim);
      const double nn = space.norm(g);
      if (nn < 1e-12) continue;
      points.push_back(scaled(g, 1.0 / nn));
    }
  }

  const auto point_cfg_for = [&](std::uint64_t tag) {
    SearchConfig pc;
    pc.dual_samples = std::min(cfg.dual_samples, space.has_vertex_list() ? 2000 : 1500);
    pc.delta = cfg.delta;
    pc.refine_iters = std::min(cfg.refine_iters, 80);
    pc.seed = derive_seed(cfg.seed, 0xCE11 ^ tag);
    return pc;
  };

  std::vector<double> vals(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    vals[i] = pointwise_constant(space, points[i], kind, point_cfg_for(i));
  });
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return maximize ? vals[a] > vals[b] : vals[a] < vals[b];
  });

  double best = vals[order[0]];
  const std::size_t restarts = std::min<std::size_t>(3, order.size());
  for (std::size_t r = 0; r < restarts; ++r) {
    Vec y = points[order[r]];
    double local = vals[order[r]];
    Rng rng(derive_seed(cfg.seed, 0x572 + r));
    double sigma = 0.3;
    for (int it = 0; it < cfg.refine_iters; ++it) {
      Vec cand = add(y, scaled(rng.gauss_vec(dim), sigma));
      const double nn = space.norm(cand);
      if (nn < 1e-12) continue;
      cand = scaled(cand, 1.0 / nn);
      const double v = pointwise_constant(
          space, cand, kind,
          point_cfg_for(0x9000 + 0x400 * r + static_cast<std::uint64_t>(it)));
      if (maximize ? v > local : v < local) {
        local = v;
        y = cand;
        sigma = std::min(sigma * 1.1, 1.0);
      } else {
        sigma = std::max(sigma * 0.9, 1e-4);
      }
    }
    if (maximize ? local > best : local < best) best = local;
  }

  ConstantEstimate out;
  out.value = best;
  out.method = Method::sampled;
  out.samples = static_cast<int>(points.size()) + cfg.refine_iters;
  out.seed = cfg.seed;
  out.delta = cfg.delta;
  if (maximize) {
    out.upper = 2.0;
    if (space.has_vertex_list()) out.certified_lower = best;
  } else {
    out.upper = best;
  }
  return out;
}

bool is_denting(const NormedSpace& space, const Vec& x, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (x.size() != static_cast<std::size_t>(space.dim())) {
    throw std::invalid_argument("point dimension mismatch");
  }
  if (std::fabs(space.norm(x) - 1.0) > 1e-9) {
    throw std::invalid_argument("point must lie on the unit sphere");
  }
  if (space.has_vertex_list()) {
    for (const Vec& v : space.ball_vertices()) {
      if (nearly_equal(v, x, kVertexTol)) return true;
    }
    return false;
  }
  SearchConfig cfg;
  cfg.dual_samples = 1500;
  cfg.refine_iters = 80;
  cfg.seed = 77;
  return dec_sampled(space, x, cfg).value < tol;
}

OperatorCheck operator_inequality_check(const NormedSpace& space, const Vec& x,
                                        const Vec& xstar) {
  if (space.dim() < 2) throw std::invalid_argument("needs dimension at least 2");
  check_point(space, x);
  if (xstar.size() != x.size()) throw std::invalid_argument("functional dimension mismatch");
  const double fs = space.dual_norm(xstar);
  if (fs < 1.0 - 1e-9) {
    throw std::invalid_argument("functional norm must be at least 1");
  }

  const auto op_norm = [&](double sgn) {
    if (space.has_vertex_list()) {
      double best = 0.0;
      for (const Vec& v : space.ball_vertices()) {
        best = std::max(best, space.norm(add(v, scaled(x, sgn * dot(xstar, v)))));
      }
      return best;
    }
    Rng rng(derive_seed(4242, sgn > 0 ? 1 : 2));
    double best = 0.0;
    Vec y(x.size(), 0.0);
    for (int k = 0; k < 4000; ++k) {
      Vec g = rng.gauss_vec(x.size());
      const double nn = space.norm(g);
      if (nn < 1e-12) continue;
      g = scaled(g, 1.0 / nn);
      const double v = space.norm(add(g, scaled(x, sgn * dot(xstar, g))));
      if (v > best) {
        best = v;
        y = g;
      }
    }
    double sigma = 0.3;
    for (int it = 0; it < 200; ++it) {
      Vec cand = add(y, scaled(rng.gauss_vec(x.size()), sigma));
      const double nn = space.norm(cand);
      if (nn < 1e-12) continue;
      cand = scaled(cand, 1.0 / nn);
      const double v = space.norm(add(cand, scaled(x, sgn * dot(xstar, cand))));
      if (v > best) {
        best = v;
        y = cand;
        sigma = std::min(sigma * 1.1, 1.0);
      } else {
        sigma = std::max(sigma * 0.9, 1e-4);
      }
    }
    return best;
  };

  SearchConfig cfg;
  cfg.dual_samples = 2000;
  cfg.refine_iters = 100;
  cfg.seed = 4242;

  OperatorCheck out;
  out.lhs_T = op_norm(1.0);
  const double dcx = space.has_vertex_list() ? dc_exact_polyhedral(space, x).value
                                             : dc_sampled(space, x, cfg).value;
  out.rhs_T = (dcx - 1.0) * fs + 1.0;

  out.part_b_applicable = std::fabs(dot(xstar, x) - 1.0) <= 1e-9;
  if (out.part_b_applicable) {
    out.lhs_P = op_norm(-1.0);
    out.rhs_P = dec_sampled(space, x, cfg).value;
  }

  const double slack = space.has_vertex_list() ? 1e-7 : 0.02;
  out.pass = out.lhs_T >= out.rhs_T - slack &&
             (!out.part_b_applicable || out.lhs_P >= out.rhs_P - slack);
  return out;
}

}  // namespace dgv::con
