#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dgv/common.hpp"
#include "dgv/constants.hpp"
#include "dgv/profile.hpp"
#include "dgv/spaces.hpp"

// Stability bounds for Daugavet and Delta constants of points in absolute
// sums, and a brute-force harness that checks every applicable bound against
// search estimates on the sum space.

namespace dgv::sums {

enum class BoundSide { lower_dc, lower_dec, upper_dc, equality_dec };

struct BoundEntry {
  std::string rule;  // which stability result produced the entry
  bool applicable = false;
  double bound = 0.0;
  BoundSide side = BoundSide::lower_dc;
  std::string note;  // failed hypothesis when not applicable
};

// Lower bounds for dc((x,y)) at a point of the unit sphere of the N-sum.
// dcx and dcy are Daugavet constants of the normalized components x/||x||
// and y/||y||; the one matching a vanishing component is ignored.
std::vector<BoundEntry> dc_sum_lower_bounds(const spaces::NormedSpace& space_x,
                                            const spaces::NormedSpace& space_y,
                                            const spaces::AbsoluteNormProfile& profile,
                                            const Vec& x, const Vec& y, double dcx,
                                            double dcy);

// Lower bounds (and the l1 equality) for dec((a x, b y)) with N(a,b) = 1 and
// ball points x, y; decx and decy are Delta constants of x and y themselves.
std::vector<BoundEntry> dec_sum_lower_bounds(const spaces::NormedSpace& space_x,
                                             const spaces::NormedSpace& space_y,
                                             const spaces::AbsoluteNormProfile& profile,
                                             double a, double b, const Vec& x,
                                             const Vec& y, double decx, double decy);

enum class UnitSide { left_unit, right_unit };

// Upper bound dc((x,0)) <= Gamma = N(1,1) for unit x, valid when the
// opposite axis point is an extreme point of the profile ball; absent when
// that hypothesis fails (the max-norm profile, flat-topped polygons).
std::optional<double> dc_sum_upper(const spaces::AbsoluteNormProfile& profile,
                                   UnitSide which);

struct AohAnalysis {
  double c = 0.0;
  double d = 0.0;
  // A pair (a,b) on the profile sphere pushing both (c,1) and (1,d) to norm
  // 2; its existence makes the profile A-octahedral at this resolution.
  std::optional<std::pair<double, double>> witness;
  // The l1 profile admits the whole segment a + b = 1; other kinds carry at
  // most the single verified witness.
  bool witness_family = false;
};

AohAnalysis aoh_analyze(const spaces::AbsoluteNormProfile& profile);

struct StabilityReport {
  Vec x;
  Vec y;
  std::vector<BoundEntry> entries;
  con::ConstantEstimate brute_dc;
  con::ConstantEstimate brute_dec;
  std::vector<std::string> findings;  // bound violations beyond the slack
};

// Runs `trials` points of the N-sum sphere (the two one-component axis
// points first, then seeded random points), computes brute-force dc and dec
// on the sum space, and checks every applicable bound with slack 0.05.
// Violations land in findings, estimator-resolution suspects included.
std::vector<StabilityReport> verify_stability(const spaces::NormedSpace& space_x,
                                              const spaces::NormedSpace& space_y,
                                              const spaces::AbsoluteNormProfile& profile,
                                              int trials, const con::SearchConfig& cfg);

}  // namespace dgv::sums
