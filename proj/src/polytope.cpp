#include "dgv/polytope.hpp"

#include <algorithm>
#include <stdexcept>

#include "dgv/hull.hpp"
#include "dgv/linsolve.hpp"
#include "dgv/lp.hpp"

namespace dgv::opt {

namespace {

constexpr double kEdgeTol = 1e-7;
constexpr double kSliceSlack = 1e-12;

void check_caps(const std::vector<Vec>& vertices) {
    if (vertices.empty()) throw std::invalid_argument("polytope: empty vertex set");
    const std::size_t dim = vertices[0].size();
    for (const Vec& v : vertices)
        if (v.size() != dim) throw std::invalid_argument("polytope: dimension mismatch");
    if (dim == 0 || dim > kMaxExactDim)
        throw ResourceError("polytope: dimension outside exact range");
    if (vertices.size() > kMaxExactVertices)
        throw ResourceError("polytope: vertex count above exact cap");
}

void push_unique(std::vector<Vec>& out, const Vec& v, double tol) {
    for (const Vec& w : out)
        if (nearly_equal(w, v, tol)) return;
    out.push_back(v);
}

}  // namespace

std::vector<Vec> canonical_vertices(std::vector<Vec> generators) {
    check_caps(generators);
    std::vector<Vec> uniq;
    for (const Vec& g : generators) push_unique(uniq, g, kVertexTol);

    // A generator is extreme iff it is outside the hull of the others; dropping
    // a redundant generator never changes that hull, so one pass suffices.
    std::vector<Vec> kept;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        std::vector<Vec> others;
        others.reserve(uniq.size() - 1);
        for (std::size_t j = 0; j < uniq.size(); ++j)
            if (j != i) others.push_back(uniq[j]);
        if (others.empty() || !hull_membership(uniq[i], others).inside)
            kept.push_back(uniq[i]);
    }
    std::sort(kept.begin(), kept.end(), lex_less);
    return kept;
}

std::vector<std::pair<int, int>> polytope_edges(const std::vector<Vec>& vertices) {
    check_caps(vertices);
    const std::size_t m = vertices.size();
    const std::size_t d = vertices[0].size();
    std::vector<std::pair<int, int>> edges;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            // Look for a functional constant on [v_a, v_b] and strictly larger
            // there than on every other vertex. Variables: f (boxed), then the
            // margin t, free.
            LinearProgram lp;
            lp.maximize = true;
            lp.objective.assign(d + 1, 0.0);
            lp.objective[d] = 1.0;
            lp.var_bounds.assign(d, VarBound{-1.0, 1.0});
            lp.var_bounds.push_back(VarBound{});

            LpRow along;
            along.coeffs = sub(vertices[a], vertices[b]);
            along.coeffs.push_back(0.0);
            along.rel = Rel::eq;
            along.rhs = 0.0;
            lp.rows.push_back(std::move(along));

            for (std::size_t c = 0; c < m; ++c) {
                if (c == a || c == b) continue;
                LpRow row;
                row.coeffs = sub(vertices[c], vertices[a]);
                row.coeffs.push_back(1.0);
                row.rel = Rel::le;
                row.rhs = 0.0;
                lp.rows.push_back(std::move(row));
            }

            const LpResult res = solve_lp(lp);
            // With no competing vertex the margin is unbounded; the pair spans
            // the whole polytope and counts as an edge.
            const bool adjacent = res.status == LpStatus::unbounded ||
                                  (res.status == LpStatus::optimal && res.value > kEdgeTol);
            if (adjacent) edges.emplace_back(static_cast<int>(a), static_cast<int>(b));
        }
    }
    return edges;
}

Polytope make_polytope(std::vector<Vec> generators) {
    Polytope poly;
    poly.vertices = canonical_vertices(std::move(generators));
    poly.edges = polytope_edges(poly.vertices);
    return poly;
}

std::vector<Vec> slice_vertices(const Polytope& poly, const Vec& f, double level) {
    if (poly.vertices.empty()) throw std::invalid_argument("slice_vertices: empty polytope");
    if (f.size() != poly.vertices[0].size())
        throw std::invalid_argument("slice_vertices: dimension mismatch");

    std::vector<double> score(poly.vertices.size());
    for (std::size_t i = 0; i < poly.vertices.size(); ++i)
        score[i] = dot(f, poly.vertices[i]);

    std::vector<Vec> out;
    for (std::size_t i = 0; i < poly.vertices.size(); ++i)
        if (score[i] >= level - kSliceSlack) push_unique(out, poly.vertices[i], kVertexTol);
    if (out.empty()) throw std::invalid_argument("slice_vertices: empty slice");

    for (const auto& [a, b] : poly.edges) {
        const double sa = score[a] - level;
        const double sb = score[b] - level;
        if (sa * sb >= 0.0) continue;
        const double t = sa / (sa - sb);
        Vec p = add(poly.vertices[a], scaled(sub(poly.vertices[b], poly.vertices[a]), t));
        push_unique(out, p, kVertexTol);
    }
    std::sort(out.begin(), out.end(), lex_less);
    return out;
}

std::vector<Vec> dual_ball_vertices(const std::vector<Vec>& ball_vertices) {
    check_caps(ball_vertices);
    const std::size_t m = ball_vertices.size();
    const std::size_t d = ball_vertices[0].size();

    for (const Vec& v : ball_vertices) {
        bool mirrored = false;
        for (const Vec& w : ball_vertices)
            if (nearly_equal(w, scaled(v, -1.0), kVertexTol)) {
                mirrored = true;
                break;
            }
        if (!mirrored) throw std::invalid_argument("dual_ball_vertices: not symmetric");
    }
    if (matrix_rank(ball_vertices) < d)
        throw std::invalid_argument("dual_ball_vertices: vertex set not full-dimensional");

    // Each polar vertex has d linearly independent active constraints f.v = 1,
    // so scanning d-subsets finds them all; feasible solutions are kept.
    std::vector<Vec> found;
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    while (true) {
        std::vector<Vec> rows;
        rows.reserve(d);
        for (std::size_t i : idx) rows.push_back(ball_vertices[i]);
        if (auto f = solve_linear(std::move(rows), Vec(d, 1.0))) {
            bool feasible = true;
            for (const Vec& v : ball_vertices)
                if (dot(*f, v) > 1.0 + kFeasTol) {
                    feasible = false;
                    break;
                }
            if (feasible) found.push_back(*f);
        }

        // next d-combination of {0..m-1}
        std::size_t k = d;
        while (k > 0 && idx[k - 1] == m - d + (k - 1)) --k;
        if (k == 0) break;
        ++idx[k - 1];
        for (std::size_t i = k; i < d; ++i) idx[i] = idx[i - 1] + 1;
    }

    std::sort(found.begin(), found.end(), lex_less);
    std::vector<Vec> out;
    for (const Vec& f : found)
        if (out.empty() || !nearly_equal(out.back(), f, 1e-7)) out.push_back(f);
    return out;
}

}  // namespace dgv::opt
