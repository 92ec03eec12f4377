#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dgv/common.hpp"
#include "dgv/spaces.hpp"

// Estimation and certification of Daugavet constants dc(x), Delta constants
// dec(x), and thickness indices. Values are exact for spaces with enumerable
// ball vertices; elsewhere they come from seeded, deterministic searches and
// are labeled as such.

namespace dgv::con {

enum class Method { exact_polyhedral, sampled, closed_form, certificate };

struct SearchConfig {
  int dual_samples = 20000;  // outer functional candidates
  double delta = 1e-3;       // slice width on smooth spaces
  int refine_iters = 200;    // local refinement budget
  std::uint64_t seed = 1;
};

struct ConstantEstimate {
  double value = 0.0;
  std::optional<double> certified_lower;
  double upper = 0.0;
  Method method = Method::sampled;
  int samples = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;  // effective slice width (0 when faces are exact)
};

// Exact Daugavet constant for a ball with enumerable vertices: every vertex
// of a polytope ball is denting, so dc(x) is the least vertex distance in
// the space's own norm.
ConstantEstimate dc_exact_polyhedral(const spaces::NormedSpace& space, const Vec& x);

// Estimates dc(x) = inf over slices of sup over the slice of ||x - y||.
// Extremal variants evaluate the slice limit exactly through face vertex
// enumeration; smooth variants use a spherical-cap closed form (Euclidean)
// or projected direct search. The result is an upper estimate; a certified
// lower bound requires dc_lower_certificate.
ConstantEstimate dc_sampled(const spaces::NormedSpace& space, const Vec& x,
                            const SearchConfig& cfg);

// Same scheme for dec(x): only slices containing x count, so the inner
// region for a functional f is B intersected with {f . y >= f . x - 1e-12}.
ConstantEstimate dec_sampled(const spaces::NormedSpace& space, const Vec& x,
                             const SearchConfig& cfg);

struct HullCertificate {
  bool certified = false;
  double alpha = 0.0;
  double eps = 0.0;
  // Far points used as hull generators: all lie in the ball at distance at
  // least alpha - eps from x.
  std::vector<Vec> witnesses;
  // How many membership targets were tested (ball vertices, sampled sphere
  // points, or x itself).
  int targets = 0;
};

// Certifies dc(x) >= alpha - eps by checking that the ball is contained in
// the hull of far points. A negative outcome means "not certified at this
// resolution", never a disproof.
HullCertificate dc_lower_certificate(const spaces::NormedSpace& space, const Vec& x,
                                     double alpha, double eps, const SearchConfig& cfg);

// Certifies dec(x) >= alpha - eps: only x itself must lie in the hull of the
// far points. Caller-supplied candidate witnesses are admitted after being
// checked against the ball and distance constraints.
HullCertificate dec_lower_certificate(const spaces::NormedSpace& space, const Vec& x,
                                      double alpha, double eps, const SearchConfig& cfg,
                                      const std::vector<Vec>& extra_witnesses = {});

enum class ThicknessKind { ts, tdelta, sup_dc };

// Extremizes the pointwise constant over the unit sphere: ts = inf dc,
// tdelta = inf dec, sup_dc = sup dc. Seeded with ball vertices and axis
// points, then refined by direct search.
ConstantEstimate thickness_index(const spaces::NormedSpace& space, ThicknessKind kind,
                                 const SearchConfig& cfg);

// Denting points are exactly the unit vectors with dec(x) = 0. Extremal
// variants test vertex membership exactly; smooth variants compare a
// sampled dec estimate against tol.
bool is_denting(const spaces::NormedSpace& space, const Vec& x, double tol);

struct OperatorCheck {
  double lhs_T = 0.0;  // ||Id + T||, T = xstar (x) x
  double rhs_T = 0.0;  // (dc(x) - 1) ||xstar|| + 1
  double lhs_P = 0.0;  // ||Id - P||, P = xstar (x) x
  double rhs_P = 0.0;  // dec(x)
  bool part_b_applicable = false;  // requires xstar(x) = 1
  bool pass = false;
};

// Checks the rank-one operator inequalities at (x, xstar). Operator norms
// are exact maxima over ball vertices for extremal variants and sampled
// maxima otherwise; pass allows 1e-7 slack on exact paths and estimator
// slack on sampled ones.
OperatorCheck operator_inequality_check(const spaces::NormedSpace& space, const Vec& x,
                                        const Vec& xstar);

}  // namespace dgv::con
