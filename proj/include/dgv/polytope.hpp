#pragma once

#include <utility>
#include <vector>

#include "dgv/common.hpp"

namespace dgv::opt {

// Exact combinatorial paths are capped: beyond this, callers must fall back to
// the sampled estimators.
inline constexpr std::size_t kMaxExactDim = 4;
inline constexpr std::size_t kMaxExactVertices = 128;

struct Polytope {
    std::vector<Vec> vertices;               // extreme points only, lex sorted
    std::vector<std::pair<int, int>> edges;  // index pairs a < b, lex sorted
};

// Dedup, drop points interior to the hull of the rest, lex sort.
std::vector<Vec> canonical_vertices(std::vector<Vec> generators);

// Pairs (a, b) such that [v_a, v_b] is an edge, certified by a functional that
// exposes exactly those two vertices with positive margin.
std::vector<std::pair<int, int>> polytope_edges(const std::vector<Vec>& vertices);

Polytope make_polytope(std::vector<Vec> generators);

// Vertices of poly cut to {y : f.y >= level}: surviving vertices plus edge
// crossings with the hyperplane f.y = level. Tangency is resolved by relaxing
// the constraint by 1e-12.
std::vector<Vec> slice_vertices(const Polytope& poly, const Vec& f, double level);

// Extreme points of the polar {f : f.v <= 1 for all v}. Requires a symmetric,
// full-dimensional vertex set of dimension <= kMaxExactDim.
std::vector<Vec> dual_ball_vertices(const std::vector<Vec>& ball_vertices);

}  // namespace dgv::opt
