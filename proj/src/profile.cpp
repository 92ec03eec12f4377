#include "dgv/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dgv::spaces {

namespace {

constexpr double kAohTol = 1e-8;
constexpr int kAohGrid = 10000;

double lerp(double a, double b, double t) { return a + (b - a) * t; }

}  // namespace

AbsoluteNormProfile AbsoluteNormProfile::l1() {
    AbsoluteNormProfile n;
    n.kind_ = ProfileKind::l1;
    n.p_ = 1.0;
    n.derive();
    return n;
}

AbsoluteNormProfile AbsoluteNormProfile::linf() {
    AbsoluteNormProfile n;
    n.kind_ = ProfileKind::linf;
    n.p_ = std::numeric_limits<double>::infinity();
    n.derive();
    return n;
}

AbsoluteNormProfile AbsoluteNormProfile::lp(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("profile: p must be at least 1");
    if (p == 1.0) return l1();
    if (std::isinf(p)) return linf();
    AbsoluteNormProfile n;
    n.kind_ = ProfileKind::lp;
    n.p_ = p;
    n.derive();
    return n;
}

AbsoluteNormProfile AbsoluteNormProfile::polygonal(std::vector<Vec> boundary) {
    if (boundary.size() < 2) throw std::invalid_argument("profile: boundary needs two points");
    for (Vec& q : boundary) {
        if (q.size() != 2) throw std::invalid_argument("profile: boundary points must be planar");
        for (double& comp : q) {
            if (comp < -1e-12) throw std::invalid_argument("profile: boundary leaves the quadrant");
            comp = std::max(comp, 0.0);
        }
    }
    if (!nearly_equal(boundary.front(), {1.0, 0.0}, 1e-9) ||
        !nearly_equal(boundary.back(), {0.0, 1.0}, 1e-9))
        throw std::invalid_argument("profile: boundary must run from (1,0) to (0,1)");
    boundary.front() = {1.0, 0.0};
    boundary.back() = {0.0, 1.0};
    for (std::size_t i = 0; i + 1 < boundary.size(); ++i) {
        if (boundary[i + 1][0] > boundary[i][0] + 1e-12 ||
            boundary[i + 1][1] < boundary[i][1] - 1e-12)
            throw std::invalid_argument("profile: boundary not monotone");
        if (nearly_equal(boundary[i], boundary[i + 1], 1e-12))
            throw std::invalid_argument("profile: repeated boundary point");
    }
    for (std::size_t i = 0; i + 2 < boundary.size(); ++i) {
        const Vec d1 = sub(boundary[i + 1], boundary[i]);
        const Vec d2 = sub(boundary[i + 2], boundary[i + 1]);
        if (d1[0] * d2[1] - d1[1] * d2[0] <= 1e-12)
            throw std::invalid_argument("profile: boundary point not extreme");
    }

    AbsoluteNormProfile n;
    n.kind_ = ProfileKind::polygonal;
    n.boundary_ = std::move(boundary);
    for (std::size_t i = 0; i + 1 < n.boundary_.size(); ++i) {
        const Vec& q1 = n.boundary_[i];
        const Vec& q2 = n.boundary_[i + 1];
        const double det = q1[0] * q2[1] - q1[1] * q2[0];
        if (std::abs(det) < 1e-12)
            throw std::invalid_argument("profile: facet through the origin");
        n.facet_normals_.push_back({(q2[1] - q1[1]) / det, (q1[0] - q2[0]) / det});
    }
    n.derive();
    return n;
}

double AbsoluteNormProfile::eval(double a, double b) const {
    a = std::abs(a);
    b = std::abs(b);
    switch (kind_) {
        case ProfileKind::l1: return a + b;
        case ProfileKind::linf: return std::max(a, b);
        case ProfileKind::lp: return std::pow(std::pow(a, p_) + std::pow(b, p_), 1.0 / p_);
        case ProfileKind::polygonal: {
            double best = 0.0;
            for (const Vec& n : facet_normals_) best = std::max(best, n[0] * a + n[1] * b);
            return best;
        }
    }
    return 0.0;
}

double AbsoluteNormProfile::conjugate(double s, double t) const {
    s = std::abs(s);
    t = std::abs(t);
    switch (kind_) {
        case ProfileKind::l1: return std::max(s, t);
        case ProfileKind::linf: return s + t;
        case ProfileKind::lp: {
            const double q = p_ / (p_ - 1.0);
            return std::pow(std::pow(s, q) + std::pow(t, q), 1.0 / q);
        }
        case ProfileKind::polygonal: {
            // the maximum of a linear functional over the ball sits at a vertex
            double best = 0.0;
            for (const Vec& v : boundary_) best = std::max(best, v[0] * s + v[1] * t);
            return best;
        }
    }
    return 0.0;
}

AbsoluteNormProfile AbsoluteNormProfile::conjugate_profile() const {
    switch (kind_) {
        case ProfileKind::l1: return linf();
        case ProfileKind::linf: return l1();
        case ProfileKind::lp: return lp(p_ / (p_ - 1.0));
        case ProfileKind::polygonal: break;
    }
    std::vector<Vec> polar = {{1.0, 0.0}};
    for (const Vec& n : facet_normals_)
        if (!nearly_equal(n, {1.0, 0.0}, 1e-9) && !nearly_equal(n, {0.0, 1.0}, 1e-9))
            polar.push_back(n);
    polar.push_back({0.0, 1.0});
    return polygonal(std::move(polar));
}

bool AbsoluteNormProfile::axis_extreme(int which) const {
    switch (kind_) {
        case ProfileKind::l1: return true;
        case ProfileKind::linf: return false;
        case ProfileKind::lp: return true;  // strictly convex ball
        case ProfileKind::polygonal:
            // (1,0) stops being extreme exactly when the first facet is vertical
            // (then it is the midpoint of that facet and its mirror image);
            // symmetrically for (0,1) and a horizontal last facet.
            if (which == 0) return boundary_[1][0] < 1.0 - 1e-12;
            return boundary_[boundary_.size() - 2][1] < 1.0 - 1e-12;
    }
    return false;
}

std::vector<Vec> AbsoluteNormProfile::unit_curve(int count) const {
    if (count < 2) throw std::invalid_argument("unit_curve: need at least two points");
    std::vector<Vec> polyline;
    switch (kind_) {
        case ProfileKind::l1: polyline = {{1.0, 0.0}, {0.0, 1.0}}; break;
        case ProfileKind::linf: polyline = {{1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}; break;
        case ProfileKind::polygonal: polyline = boundary_; break;
        case ProfileKind::lp: {
            std::vector<Vec> out;
            out.reserve(static_cast<std::size_t>(count));
            const double half_pi = std::acos(0.0);
            for (int i = 0; i < count; ++i) {
                const double th = half_pi * i / (count - 1);
                const double a = std::cos(th), b = std::sin(th);
                const double r = eval(a, b);
                out.push_back({a / r, b / r});
            }
            return out;
        }
    }
    const std::size_t segs = polyline.size() - 1;
    const int per = std::max(1, static_cast<int>((static_cast<std::size_t>(count) - 1) / segs));
    std::vector<Vec> out;
    for (std::size_t s = 0; s < segs; ++s)
        for (int k = 0; k < per; ++k) {
            const double t = static_cast<double>(k) / per;
            out.push_back({lerp(polyline[s][0], polyline[s + 1][0], t),
                           lerp(polyline[s][1], polyline[s + 1][1], t)});
        }
    out.push_back(polyline.back());
    return out;
}

std::string AbsoluteNormProfile::describe() const {
    switch (kind_) {
        case ProfileKind::l1: return "l1";
        case ProfileKind::linf: return "linf";
        case ProfileKind::lp: return "lp p=" + std::to_string(p_);
        case ProfileKind::polygonal:
            return "polygonal k=" + std::to_string(boundary_.size());
    }
    return "";
}

void AbsoluteNormProfile::derive() {
    big_gamma_ = eval(1.0, 1.0);

    switch (kind_) {
        case ProfileKind::l1:
            gamma_ = 1.0;
            c_ = d_ = 0.0;
            aoh_witness_ = AohWitness{0.5, 0.5};  // any unit sum works; fix the midpoint
            return;
        case ProfileKind::linf:
            gamma_ = 0.5;
            c_ = d_ = 1.0;
            aoh_witness_ = AohWitness{1.0, 1.0};
            return;
        case ProfileKind::lp:
            // swap symmetry puts the simplex minimum at the midpoint
            gamma_ = eval(0.5, 0.5);
            break;
        case ProfileKind::polygonal:
            // N restricted to the simplex is piecewise linear; it can only
            // bend where the ray through a boundary vertex crosses.
            gamma_ = std::min(eval(1.0, 0.0), eval(0.0, 1.0));
            for (const Vec& q : boundary_) {
                const double s = q[0] + q[1];
                if (s > 1e-12) gamma_ = std::min(gamma_, eval(q[0] / s, q[1] / s));
            }
            break;
    }

    // c = max{s : N(s,1) = 1} by bisection; N(s,1) is nondecreasing in s, so
    // the sub-level set is an interval starting at 0. Same for d by symmetry.
    auto axis_max = [this](bool first) {
        if (eval(1.0, 1.0) <= 1.0 + 1e-12) return 1.0;
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-12) {
            const double mid = (lo + hi) / 2.0;
            const double v = first ? eval(mid, 1.0) : eval(1.0, mid);
            if (v - 1.0 <= 1e-12) lo = mid;
            else hi = mid;
        }
        return lo;
    };
    c_ = axis_max(true);
    d_ = axis_max(false);

    // Witness search on the unit curve: both sup-distance equalities hold iff
    // the defect (2 - N((c,1)+(a,b))) + (2 - N((1,d)+(a,b))) vanishes.
    auto defect = [this](double a, double b) {
        return std::abs(2.0 - eval(c_ + a, 1.0 + b)) + std::abs(2.0 - eval(1.0 + a, d_ + b));
    };
    const std::vector<Vec> grid = unit_curve(kAohGrid);
    std::size_t best = 0;
    double best_defect = std::numeric_limits<double>::infinity();
    // Among qualifying witnesses prefer the most balanced one: a witness with
    // both coordinates positive also serves points with two live components.
    std::size_t chosen = grid.size();
    double chosen_min = -1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = defect(grid[i][0], grid[i][1]);
        if (r <= kAohTol) {
            const double balance = std::min(grid[i][0], grid[i][1]);
            if (balance > chosen_min) {
                chosen_min = balance;
                chosen = i;
            }
        }
        if (r < best_defect) {
            best_defect = r;
            best = i;
        }
    }
    if (chosen < grid.size()) {
        aoh_witness_ = AohWitness{grid[chosen][0], grid[chosen][1]};
        return;
    }
    // refine between the neighbors of the best grid point, sweeping the sphere
    // radially by angle
    auto at_angle = [this](double th) {
        const double a = std::cos(th), b = std::sin(th);
        const double r = eval(a, b);
        return Vec{a / r, b / r};
    };
    const Vec& lo_pt = grid[best == 0 ? 0 : best - 1];
    const Vec& hi_pt = grid[std::min(best + 1, grid.size() - 1)];
    double lo = std::atan2(lo_pt[1], lo_pt[0]);
    double hi = std::atan2(hi_pt[1], hi_pt[0]);
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        const Vec p1 = at_angle(m1), p2 = at_angle(m2);
        if (defect(p1[0], p1[1]) <= defect(p2[0], p2[1])) hi = m2;
        else lo = m1;
    }
    const Vec p = at_angle((lo + hi) / 2.0);
    if (defect(p[0], p[1]) <= kAohTol) aoh_witness_ = AohWitness{p[0], p[1]};
}

}  // namespace dgv::spaces
