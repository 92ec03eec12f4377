#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dgv/common.hpp"

namespace dgv::spaces {

enum class ProfileKind { l1, linf, lp, polygonal };

// Unit vector (a, b) of the profile lying at distance 2 from both (c, 1) and
// (1, d); its existence unlocks the octahedrality-style lower bounds for sums.
struct AohWitness {
    double a = 0.0;
    double b = 0.0;
};

// An absolute normalized norm N on the plane: N(x, y) = N(|x|, |y|) and
// N(1, 0) = N(0, 1) = 1. Derived parameters:
//   gamma: largest g with N >= g * (|x| + |y|)
//   big_gamma: N(1, 1), the smallest G with N <= G * max(|x|, |y|)
//   c = max{s : N(s, 1) = 1},  d = max{t : N(1, t) = 1}
class AbsoluteNormProfile {
  public:
    static AbsoluteNormProfile l1();
    static AbsoluteNormProfile linf();
    static AbsoluteNormProfile lp(double p);  // p in [1, inf]; the ends fold into l1/linf
    // Positive-quadrant unit sphere polyline from (1,0) to (0,1); points must
    // be in strictly convex position with x decreasing and y increasing.
    static AbsoluteNormProfile polygonal(std::vector<Vec> boundary);

    ProfileKind kind() const { return kind_; }
    double p() const { return p_; }
    const std::vector<Vec>& boundary() const { return boundary_; }

    double eval(double a, double b) const;
    // N*(s, t) = max{ as + bt : N(a, b) <= 1 }
    double conjugate(double s, double t) const;
    // Profile of the dual norm N*; a polygonal profile dualizes to the polar
    // polygon, whose quadrant vertices are the primal facet normals.
    AbsoluteNormProfile conjugate_profile() const;

    double gamma() const { return gamma_; }
    double big_gamma() const { return big_gamma_; }
    double c() const { return c_; }
    double d() const { return d_; }
    const std::optional<AohWitness>& aoh_witness() const { return aoh_witness_; }

    // Extremality of the unit vectors in the profile ball; which is 0 for
    // (1, 0) and 1 for (0, 1).
    bool axis_extreme(int which) const;

    // Points of the positive-quadrant unit sphere from (1,0) to (0,1);
    // polygonal boundary vertices always appear exactly.
    std::vector<Vec> unit_curve(int count) const;

    std::string describe() const;

  private:
    AbsoluteNormProfile() = default;
    void derive();

    ProfileKind kind_ = ProfileKind::l1;
    double p_ = 1.0;
    std::vector<Vec> boundary_;        // polygonal only
    std::vector<Vec> facet_normals_;   // polygonal only
    double gamma_ = 1.0;
    double big_gamma_ = 1.0;
    double c_ = 0.0;
    double d_ = 0.0;
    std::optional<AohWitness> aoh_witness_;
};

}  // namespace dgv::spaces
