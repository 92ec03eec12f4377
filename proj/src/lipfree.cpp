#include "dgv/lipfree.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "dgv/lp.hpp"
#include "dgv/threads.hpp"

namespace dgv::lip {

namespace {

using json = nlohmann::json;

constexpr int kMaxFreePoints = 64;    // dense simplex tableau cap
constexpr double kMetricTol = 1e-12;  // slack for symmetry and triangle checks on input

// delta grid for interval coverage searches, as fractions of d(u,v)
constexpr double kDeltaFractions[] = {0.1, 0.01, 0.001};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

[[noreturn]] void bad_metric(const std::string& what) {
    throw std::invalid_argument("metric space: " + what);
}

}  // namespace

FiniteMetricSpace FiniteMetricSpace::make(std::vector<std::string> labels, std::string base,
                                          std::vector<Vec> dist) {
    const std::size_t n = labels.size();
    if (n == 0) bad_metric("needs at least one point");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (labels[i] == labels[j]) bad_metric("duplicate label '" + labels[i] + "'");
    if (dist.size() != n) bad_metric("distance matrix does not match the point count");
    for (const Vec& row : dist)
        if (row.size() != n) bad_metric("distance matrix does not match the point count");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dij = dist[i][j];
            if (!std::isfinite(dij)) bad_metric("distances must be finite");
            if (i == j && dij != 0.0) bad_metric("nonzero self distance at '" + labels[i] + "'");
            if (i != j && !(dij > 0.0))
                bad_metric("points '" + labels[i] + "' and '" + labels[j] + "' are not separated");
            if (std::abs(dij - dist[j][i]) > kMetricTol)
                bad_metric("asymmetric distances between '" + labels[i] + "' and '" + labels[j] + "'");
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (dist[i][j] > dist[i][k] + dist[k][j] + kMetricTol)
                    bad_metric("triangle inequality fails at '" + labels[i] + "', '" + labels[j] +
                               "', '" + labels[k] + "'");
    int base_ix = -1;
    for (std::size_t i = 0; i < n; ++i)
        if (labels[i] == base) base_ix = static_cast<int>(i);
    if (base_ix < 0) bad_metric("base '" + base + "' is not among the points");

    FiniteMetricSpace m;
    m.labels_ = std::move(labels);
    m.base_ = base_ix;
    m.dist_ = std::move(dist);
    return m;
}

int FiniteMetricSpace::index(const std::string& label) const {
    for (int i = 0; i < size(); ++i)
        if (labels_[static_cast<std::size_t>(i)] == label) return i;
    throw std::invalid_argument("metric space: unknown label '" + label + "'");
}

FiniteMetricSpace metric_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("metric json: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("metric json: expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "points" && key != "base" && key != "dist")
            throw std::invalid_argument("metric json: unknown key '" + key + "'");
    }
    for (const char* key : {"points", "base", "dist"})
        if (!j.contains(key))
            throw std::invalid_argument(std::string("metric json: missing key '") + key + "'");

    const json& pts = j.at("points");
    if (!pts.is_array() || pts.empty())
        throw std::invalid_argument("metric json: 'points' must be a nonempty array");
    std::vector<std::string> labels;
    labels.reserve(pts.size());
    for (const json& p : pts) {
        if (!p.is_string()) throw std::invalid_argument("metric json: point labels must be strings");
        labels.push_back(p.get<std::string>());
    }
    if (!j.at("base").is_string()) throw std::invalid_argument("metric json: 'base' must be a string");
    const json& dj = j.at("dist");
    if (!dj.is_array() || dj.size() != labels.size())
        throw std::invalid_argument("metric json: 'dist' must be a square matrix over the points");
    std::vector<Vec> dist;
    dist.reserve(dj.size());
    for (const json& rowj : dj) {
        if (!rowj.is_array() || rowj.size() != labels.size())
            throw std::invalid_argument("metric json: 'dist' must be a square matrix over the points");
        Vec row;
        row.reserve(rowj.size());
        for (const json& e : rowj) {
            if (!e.is_number()) throw std::invalid_argument("metric json: distances must be numbers");
            row.push_back(e.get<double>());
        }
        dist.push_back(std::move(row));
    }
    return FiniteMetricSpace::make(std::move(labels), j.at("base").get<std::string>(), std::move(dist));
}

FreeElement FreeElement::from_support(const FiniteMetricSpace& space,
                                      const std::vector<std::pair<std::string, double>>& support) {
    Vec acc(static_cast<std::size_t>(space.size()), 0.0);
    for (const auto& [label, w] : support) {
        if (!std::isfinite(w)) throw std::invalid_argument("free element: weights must be finite");
        acc[static_cast<std::size_t>(space.index(label))] += w;
    }
    FreeElement e;
    for (int i = 0; i < space.size(); ++i)
        if (i != space.base() && acc[static_cast<std::size_t>(i)] != 0.0)
            e.support_.emplace_back(i, acc[static_cast<std::size_t>(i)]);
    return e;
}

FreeElement combine(const FreeElement& a, double ca, const FreeElement& b, double cb) {
    FreeElement out;
    const auto& sa = a.support_;
    const auto& sb = b.support_;
    auto push = [&out](int p, double w) {
        if (w != 0.0) out.support_.emplace_back(p, w);
    };
    std::size_t i = 0, j = 0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i].first < sb[j].first) {
            push(sa[i].first, ca * sa[i].second);
            ++i;
        } else if (sb[j].first < sa[i].first) {
            push(sb[j].first, cb * sb[j].second);
            ++j;
        } else {
            push(sa[i].first, ca * sa[i].second + cb * sb[j].second);
            ++i;
            ++j;
        }
    }
    for (; i < sa.size(); ++i) push(sa[i].first, ca * sa[i].second);
    for (; j < sb.size(); ++j) push(sb[j].first, cb * sb[j].second);
    return out;
}

namespace {

Molecule molecule_ix(const FiniteMetricSpace& space, int iu, int iv) {
    if (iu == iv) throw std::invalid_argument("molecule: needs two distinct points");
    Molecule m;
    m.u = iu;
    m.v = iv;
    const double scale = 1.0 / space.d(iu, iv);
    m.element = FreeElement::from_support(
        space, {{space.label(iu), scale}, {space.label(iv), -scale}});
    return m;
}

std::vector<int> interval_ix(const FiniteMetricSpace& space, int iu, int iv, double delta) {
    std::vector<int> out;
    const double duv = space.d(iu, iv);
    for (int p = 0; p < space.size(); ++p)
        if (space.d(iu, p) + space.d(iv, p) < duv + delta) out.push_back(p);
    return out;
}

double nearest_other(const FiniteMetricSpace& space, int c) {
    double best = std::numeric_limits<double>::infinity();
    for (int p = 0; p < space.size(); ++p)
        if (p != c) best = std::min(best, space.d(c, p));
    return best;
}

// Candidate ball radii: halves and quarters of the occurring distance values.
std::vector<double> radius_grid(const FiniteMetricSpace& space) {
    std::vector<double> grid;
    for (int i = 0; i < space.size(); ++i)
        for (int j = i + 1; j < space.size(); ++j) {
            grid.push_back(0.5 * space.d(i, j));
            grid.push_back(0.25 * space.d(i, j));
        }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

DentingCertificate denting_ix(const FiniteMetricSpace& space, int iu, int iv) {
    const double duv = space.d(iu, iv);
    const std::vector<double> grid = radius_grid(space);
    // Largest grid radius keeping the closed ball a singleton while r + s
    // stays below d(u,v). The quarter of the smallest distance always
    // qualifies, so the picks are positive.
    auto pick = [&](int c) {
        const double cap = std::min(nearest_other(space, c), 0.5 * duv);
        double best = 0.0;
        for (double x : grid)
            if (x < cap) best = std::max(best, x);
        return best;
    };
    DentingCertificate out;
    out.r = pick(iu);
    out.s = pick(iv);
    for (double frac : kDeltaFractions) {
        const double delta = frac * duv;
        bool covered = true;
        for (int p : interval_ix(space, iu, iv, delta))
            covered = covered && (p == iu || p == iv);
        if (covered) {
            out.denting = true;
            out.delta = delta;
            return out;
        }
    }
    return DentingCertificate{};
}

}  // namespace

Molecule molecule(const FiniteMetricSpace& space, const std::string& u, const std::string& v) {
    return molecule_ix(space, space.index(u), space.index(v));
}

FreeNorm free_norm_detail(const FiniteMetricSpace& space, const FreeElement& mu) {
    const int n = space.size();
    if (n > kMaxFreePoints)
        throw ResourceError("free norm: space exceeds " + std::to_string(kMaxFreePoints) +
                            " points");
    const int b = space.base();
    for (const auto& [p, w] : mu.support()) {
        (void)w;
        if (p < 0 || p >= n || p == b)
            throw std::invalid_argument("free norm: element does not live on this space");
    }
    FreeNorm out;
    out.function.assign(static_cast<std::size_t>(n), 0.0);
    if (mu.zero()) return out;

    // max sum a_i f(x_i) over 1-Lipschitz f with f(base) = 0. One free
    // variable per non-base point, one constraint per ordered pair; the
    // all-zero function is a feasible start.
    auto var = [b](int p) { return static_cast<std::size_t>(p < b ? p : p - 1); };
    const std::size_t nv = static_cast<std::size_t>(n - 1);
    opt::LinearProgram lp;
    lp.objective.assign(nv, 0.0);
    for (const auto& [p, w] : mu.support()) lp.objective[var(p)] = w;
    lp.maximize = true;
    lp.rows.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1));
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            if (p == q) continue;
            opt::LpRow row;
            row.coeffs.assign(nv, 0.0);
            if (p != b) row.coeffs[var(p)] += 1.0;
            if (q != b) row.coeffs[var(q)] -= 1.0;
            row.rel = opt::Rel::le;
            row.rhs = space.d(p, q);
            lp.rows.push_back(std::move(row));
        }
    const opt::LpResult res = opt::solve_lp(lp);
    if (res.status != opt::LpStatus::optimal)
        throw std::runtime_error("free norm: LP did not reach an optimum");
    out.value = res.value;
    for (int p = 0; p < n; ++p)
        if (p != b) out.function[static_cast<std::size_t>(p)] = res.solution[var(p)];
    return out;
}

double free_norm(const FiniteMetricSpace& space, const FreeElement& mu) {
    return free_norm_detail(space, mu).value;
}

MoleculePairNorm molecule_pair_norm(const FiniteMetricSpace& space,
                                    const std::pair<std::string, std::string>& xy,
                                    const std::pair<std::string, std::string>& uv) {
    const int ix = space.index(xy.first), iy = space.index(xy.second);
    const int iu = space.index(uv.first), iv = space.index(uv.second);
    const Molecule mxy = molecule_ix(space, ix, iy);
    const Molecule muv = molecule_ix(space, iu, iv);

    MoleculePairNorm out;
    out.value = free_norm(space, combine(mxy.element, 1.0, muv.element, 1.0));
    const double dxy = space.d(ix, iy), duv = space.d(iu, iv);
    const double longer = std::max(dxy, duv);
    out.closed_form = (space.d(ix, iv) + space.d(iu, iy) + std::abs(dxy - duv)) / longer;
    // closed_form equals 2 - eps for the defect eps of
    // d(x,v) + d(u,y) >= d(x,y) + d(u,v) - eps * longer, so the
    // near-diametral regime is exactly value >= closed_form.
    out.formula_applies = out.value >= out.closed_form - 1e-9;
    return out;
}

std::vector<std::string> interval_delta(const FiniteMetricSpace& space, const std::string& u,
                                        const std::string& v, double delta) {
    const int iu = space.index(u), iv = space.index(v);
    if (iu == iv) throw std::invalid_argument("interval: needs two distinct points");
    if (!(delta > 0.0)) throw std::invalid_argument("interval: delta must be positive");
    std::vector<std::string> out;
    for (int p : interval_ix(space, iu, iv, delta)) out.push_back(space.label(p));
    return out;
}

DentingCertificate denting_certificate(const FiniteMetricSpace& space, const std::string& u,
                                       const std::string& v) {
    const int iu = space.index(u), iv = space.index(v);
    if (iu == iv) throw std::invalid_argument("denting certificate: needs two distinct points");
    return denting_ix(space, iu, iv);
}

CharacterizationReport check_dc_characterization(const FiniteMetricSpace& space,
                                                 const FreeElement& mu, double alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("characterization: alpha must lie in (0, 2]");
    if (std::abs(free_norm(space, mu) - 1.0) > 1e-9)
        throw std::invalid_argument("characterization: needs a unit element");

    const int n = space.size();
    std::vector<std::pair<int, int>> pairs;
    for (int iu = 0; iu < n; ++iu)
        for (int iv = 0; iv < n; ++iv)
            if (iu != iv) pairs.emplace_back(iu, iv);

    struct Coverage {
        double delta = 0.0, r = 0.0, s = 0.0;  // r, s relative to d(u,v)
    };
    struct Scan {
        double nrm = 0.0;
        bool denting = false;
        Coverage cov[3];
    };
    std::vector<Scan> scans(pairs.size());

    parallel_for(pairs.size(), [&](std::size_t t) {
        const auto [iu, iv] = pairs[t];
        const double duv = space.d(iu, iv);
        Scan scan;
        scan.nrm = free_norm(space, combine(mu, 1.0, molecule_ix(space, iu, iv).element, -1.0));
        scan.denting = denting_ix(space, iu, iv).denting;
        for (int k = 0; k < 3; ++k) {
            const double delta = kDeltaFractions[k] * duv;
            const std::vector<int> interval = interval_ix(space, iu, iv, delta);
            // Tightest covering radii for [u,v]_delta: split the interval at
            // a cut radius around u and absorb the rest around v. Only the
            // smallest r + s binds; every coarser covering asserts a weaker
            // floor for the same norm.
            double best_r = 0.0, best_s = 0.0;
            double best = std::numeric_limits<double>::infinity();
            std::vector<double> cuts = {0.0};
            for (int p : interval) cuts.push_back(space.d(iu, p));
            for (double ra : cuts) {
                double sa = 0.0;
                for (int p : interval)
                    if (space.d(iu, p) > ra) sa = std::max(sa, space.d(iv, p));
                if (ra + sa < best) {
                    best = ra + sa;
                    best_r = ra;
                    best_s = sa;
                }
            }
            scan.cov[k] = Coverage{delta, best_r / duv, best_s / duv};
        }
        scans[t] = scan;
    });

    CharacterizationReport rep;
    rep.alpha = alpha;
    for (std::size_t t = 0; t < pairs.size(); ++t) {
        const auto [iu, iv] = pairs[t];
        const Scan& scan = scans[t];
        const std::string name = "(" + space.label(iu) + "," + space.label(iv) + ")";
        for (const Coverage& c : scan.cov) {
            const double floor = alpha - 2.0 * (c.r + c.s);
            rep.coverage_checks += 1;
            rep.alpha_upper = std::min(rep.alpha_upper, scan.nrm + 2.0 * (c.r + c.s));
            if (scan.nrm < floor - 1e-9)
                rep.violations.push_back("coverage at " + name + ", delta=" + fmt(c.delta) +
                                         ": distance " + fmt(scan.nrm) + " is below " +
                                         fmt(floor));
        }
        if (scan.denting) {
            rep.denting_checks += 1;
            rep.alpha_upper = std::min(rep.alpha_upper, scan.nrm);
            if (scan.nrm < alpha - 1e-9)
                rep.violations.push_back("denting molecule " + name + ": distance " +
                                         fmt(scan.nrm) + " is below alpha");
        }
    }
    rep.consistent = rep.violations.empty();
    return rep;
}

DistanceBound molecule_distance_bound(const FiniteMetricSpace& space,
                                      const std::pair<std::string, std::string>& uv,
                                      const std::pair<std::string, std::string>& xy) {
    const int iu = space.index(uv.first), iv = space.index(uv.second);
    const int ix = space.index(xy.first), iy = space.index(xy.second);
    const Molecule muv = molecule_ix(space, iu, iv);
    const Molecule mxy = molecule_ix(space, ix, iy);

    DistanceBound out;
    out.lhs = free_norm(space, combine(muv.element, 1.0, mxy.element, -1.0));
    out.rhs = 2.0 * (space.d(ix, iu) + space.d(iy, iv)) / std::max(space.d(ix, iy), space.d(iu, iv));
    out.pass = out.lhs <= out.rhs + 1e-9;
    return out;
}

FiniteMetricSpace segment_space(int grid_k) {
    if (grid_k < 1) throw std::invalid_argument("segment space: needs grid_k >= 1");
    const int n = grid_k + 1;
    std::vector<std::string> labels(static_cast<std::size_t>(n));
    labels[0] = "0";
    for (int i = 1; i < n; ++i) labels[static_cast<std::size_t>(i)] = "s" + std::to_string(i);
    std::vector<Vec> dist(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = static_cast<double>(j - i) / grid_k;
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }
    return FiniteMetricSpace::make(std::move(labels), "0", std::move(dist));
}

FiniteMetricSpace ladder_space(int rungs, int grid_k) {
    if (rungs < 1) throw std::invalid_argument("ladder space: needs at least one rung");
    if (grid_k < 2) throw std::invalid_argument("ladder space: needs grid_k >= 2");
    const int n = grid_k + 1 + 2 * rungs;
    if (n > kMaxFreePoints)
        throw ResourceError("ladder space: " + std::to_string(n) + " points exceed the " +
                            std::to_string(kMaxFreePoints) + " point cap");

    std::vector<std::string> labels;
    std::vector<std::pair<double, double>> pts;
    labels.reserve(static_cast<std::size_t>(n));
    pts.reserve(static_cast<std::size_t>(n));
    labels.emplace_back("0");
    pts.emplace_back(0.0, 0.0);
    for (int i = 1; i <= grid_k; ++i) {
        labels.push_back("s" + std::to_string(i));
        pts.emplace_back(static_cast<double>(i) / grid_k, 0.0);
    }
    for (int m = 1; m <= rungs; ++m) {
        labels.push_back("u" + std::to_string(m));
        pts.emplace_back(1.0, 1.0 / m);
        labels.push_back("v" + std::to_string(m));
        pts.emplace_back(0.0, 1.0 / m);
    }
    std::vector<Vec> dist(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto& [ax, ay] = pts[static_cast<std::size_t>(i)];
            const auto& [bx, by] = pts[static_cast<std::size_t>(j)];
            const double d = std::hypot(ax - bx, ay - by);
            dist[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
            dist[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = d;
        }
    return FiniteMetricSpace::make(std::move(labels), "0", std::move(dist));
}

std::vector<LadderRow> ladder_experiment(int rungs, int grid_k) {
    const FiniteMetricSpace M = ladder_space(rungs, grid_k);
    const FiniteMetricSpace seg = segment_space(grid_k);
    const std::string x = "s" + std::to_string(grid_k), y = "0";

    // Replay the l1 identification on the bare segment before trusting the
    // certificate: the edge molecules m_j = k (delta_{s_j} - delta_{s_{j-1}})
    // have unit norm, average to m_{x,y} = delta_{s_k}, and each sits at
    // distance exactly 2 - 2/k from it.
    const double expect = 2.0 - 2.0 / grid_k;
    const Molecule mxy_seg = molecule(seg, x, y);
    FreeElement average;
    std::vector<FreeElement> edges;
    for (int j = 1; j <= grid_k; ++j) {
        const std::string hi = "s" + std::to_string(j);
        const std::string lo = j == 1 ? y : "s" + std::to_string(j - 1);
        const Molecule mj = molecule(seg, hi, lo);
        if (std::abs(free_norm(seg, mj.element) - 1.0) > 1e-7 ||
            std::abs(free_norm(seg, combine(mxy_seg.element, 1.0, mj.element, -1.0)) - expect) >
                1e-7)
            throw std::runtime_error("ladder experiment: segment l1 identification failed");
        average = combine(average, 1.0, mj.element, 1.0 / grid_k);
        edges.push_back(molecule(M, hi, lo).element);
    }
    if (free_norm(seg, combine(average, 1.0, mxy_seg.element, -1.0)) > 1e-9)
        throw std::runtime_error("ladder experiment: edge molecules do not average to the molecule");

    // The average of the unit vectors m_j is m_{x,y}, so any slice containing
    // m_{x,y} contains one of them: min_j ||m_{x,y} - m_j|| certifies a Delta
    // lower bound. The subset inclusion of free spaces is isometric, so the
    // distances survive the move from the segment to the full ladder.
    const Molecule mxy = molecule(M, x, y);
    Vec gaps(edges.size(), 0.0);
    parallel_for(edges.size(), [&](std::size_t j) {
        gaps[j] = free_norm(M, combine(mxy.element, 1.0, edges[j], -1.0));
    });
    const double cert = *std::min_element(gaps.begin(), gaps.end());

    std::vector<LadderRow> rows(static_cast<std::size_t>(rungs));
    parallel_for(static_cast<std::size_t>(rungs), [&](std::size_t t) {
        const int n = static_cast<int>(t) + 1;
        const std::string un = "u" + std::to_string(n), vn = "v" + std::to_string(n);
        const DistanceBound db = molecule_distance_bound(M, {un, vn}, {x, y});
        LadderRow row;
        row.n = n;
        row.distance = db.lhs;
        row.bound = db.rhs;
        row.denting = denting_certificate(M, un, vn).denting;
        row.delta_cert = cert;
        rows[t] = row;
    });
    return rows;
}

}  // namespace dgv::lip
