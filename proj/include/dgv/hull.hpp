#pragma once

#include <vector>

#include "dgv/common.hpp"

namespace dgv::opt {

// Certificate-carrying answer to "is p in the convex hull of the generators?".
// Exactly one of the two certificates is populated.
struct HullMembership {
    bool inside = false;
    // inside: nonnegative, sums to 1, recombines to p within kCertTol.
    Vec weights;
    // outside: functional with max |coordinate| <= 1 satisfying
    // separator.p >= max_i separator.g_i + margin.
    Vec separator;
    double margin = 0.0;
};

HullMembership hull_membership(const Vec& point, const std::vector<Vec>& generators);

}  // namespace dgv::opt
