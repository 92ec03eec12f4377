#include "dgv/spaces.hpp"

#include <cmath>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "dgv/linsolve.hpp"
#include "dgv/rng.hpp"

namespace dgv::spaces {

namespace {

constexpr std::size_t kMaxEnumerationDim = 16;  // 2^dim vertex lists stop here

std::vector<Vec> cube_list(int dim) {
    if (static_cast<std::size_t>(dim) > kMaxEnumerationDim)
        throw ResourceError("ball_vertices: sign enumeration too large");
    std::vector<Vec> out;
    out.reserve(std::size_t{1} << dim);
    for (std::size_t mask = 0; mask < (std::size_t{1} << dim); ++mask) {
        Vec v(static_cast<std::size_t>(dim));
        for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? 1.0 : -1.0;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<Vec> scaled_axes(const Vec& scale) {
    std::vector<Vec> out;
    for (std::size_t i = 0; i < scale.size(); ++i)
        for (double s : {1.0, -1.0}) {
            Vec v(scale.size(), 0.0);
            v[i] = s * scale[i];
            out.push_back(std::move(v));
        }
    return out;
}

std::vector<Vec> signed_boxes(const Vec& half_sides) {
    const int dim = static_cast<int>(half_sides.size());
    auto out = cube_list(dim);
    for (Vec& v : out)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] *= half_sides[i];
    return out;
}

// Positive-quadrant vertex list of a (non-smooth) profile ball, from (1,0)
// to (0,1) inclusive.
std::vector<Vec> quadrant_vertices(const AbsoluteNormProfile& prof) {
    switch (prof.kind()) {
        case ProfileKind::l1: return {{1.0, 0.0}, {0.0, 1.0}};
        case ProfileKind::linf: return {{1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
        case ProfileKind::polygonal: return prof.boundary();
        case ProfileKind::lp: break;
    }
    throw UnsupportedVariant("profile has a smooth unit sphere");
}

// Extreme points of the N-sum ball from component extreme points. Candidates
// (a v, b w) over profile quadrant vertices always cover the extreme set;
// l1 and linf profiles admit exact join/product lists, the rest is pruned.
std::vector<Vec> sum_ball(const AbsoluteNormProfile& prof, const std::vector<Vec>& lv,
                          const std::vector<Vec>& rv, int ldim, int rdim) {
    const Vec zl(static_cast<std::size_t>(ldim), 0.0);
    const Vec zr(static_cast<std::size_t>(rdim), 0.0);
    std::vector<Vec> out;
    switch (prof.kind()) {
        case ProfileKind::l1:
            for (const Vec& v : lv) out.push_back(concat(v, zr));
            for (const Vec& w : rv) out.push_back(concat(zl, w));
            return out;
        case ProfileKind::linf:
            for (const Vec& v : lv)
                for (const Vec& w : rv) out.push_back(concat(v, w));
            return out;
        case ProfileKind::polygonal: break;
        case ProfileKind::lp: throw UnsupportedVariant("sum over a smooth profile has no vertex list");
    }
    for (const Vec& ab : quadrant_vertices(prof)) {
        const double a = ab[0], b = ab[1];
        if (b <= 1e-12) {
            for (const Vec& v : lv) out.push_back(concat(scaled(v, a), zr));
        } else if (a <= 1e-12) {
            for (const Vec& w : rv) out.push_back(concat(zl, scaled(w, b)));
        } else {
            for (const Vec& v : lv)
                for (const Vec& w : rv) out.push_back(concat(scaled(v, a), scaled(w, b)));
        }
    }
    return opt::canonical_vertices(std::move(out));
}

}  // namespace

struct NormedSpace::Cache {
    std::once_flag verts_once;
    std::vector<Vec> verts;
    std::once_flag ball_once;
    std::unique_ptr<const opt::Polytope> ball;
    std::once_flag dual_once;
    std::vector<Vec> duals;
};

NormedSpace NormedSpace::lp(double p, int dim) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp space: p must be at least 1");
    if (dim < 1) throw std::invalid_argument("lp space: dimension must be positive");
    NormedSpace s;
    s.kind_ = SpaceKind::lp;
    s.p_ = p;
    s.dim_ = dim;
    s.cache_ = std::make_shared<Cache>();
    return s;
}

NormedSpace NormedSpace::polyhedral(std::vector<Vec> vertices) {
    if (vertices.empty()) throw std::invalid_argument("polyhedral space: no vertices");
    const std::size_t dim = vertices[0].size();
    auto canon = opt::canonical_vertices(std::move(vertices));
    for (const Vec& v : canon) {
        bool mirrored = false;
        for (const Vec& w : canon)
            if (nearly_equal(w, scaled(v, -1.0), kVertexTol)) {
                mirrored = true;
                break;
            }
        if (!mirrored) throw std::invalid_argument("polyhedral space: ball not symmetric");
    }
    if (matrix_rank(canon) < dim)
        throw std::invalid_argument("polyhedral space: ball not full-dimensional");
    NormedSpace s;
    s.kind_ = SpaceKind::polyhedral;
    s.dim_ = static_cast<int>(dim);
    s.vertices_ = std::move(canon);
    s.cache_ = std::make_shared<Cache>();
    return s;
}

NormedSpace NormedSpace::weighted_l1(Vec weights) {
    if (weights.empty()) throw std::invalid_argument("weighted_l1: no weights");
    for (double w : weights)
        if (!(w > 0.0)) throw std::invalid_argument("weighted_l1: weights must be positive");
    NormedSpace s;
    s.kind_ = SpaceKind::weighted_l1;
    s.dim_ = static_cast<int>(weights.size());
    s.weights_ = std::move(weights);
    s.cache_ = std::make_shared<Cache>();
    return s;
}

NormedSpace NormedSpace::c0(int dim) {
    if (dim < 1) throw std::invalid_argument("c0 space: dimension must be positive");
    NormedSpace s;
    s.kind_ = SpaceKind::c0;
    s.p_ = std::numeric_limits<double>::infinity();
    s.dim_ = dim;
    s.cache_ = std::make_shared<Cache>();
    return s;
}

NormedSpace NormedSpace::sum(NormedSpace left, NormedSpace right, AbsoluteNormProfile profile) {
    NormedSpace s;
    s.kind_ = SpaceKind::sum;
    s.dim_ = left.dim_ + right.dim_;
    s.left_ = std::make_shared<const NormedSpace>(std::move(left));
    s.right_ = std::make_shared<const NormedSpace>(std::move(right));
    s.profile_ = std::move(profile);
    s.cache_ = std::make_shared<Cache>();
    return s;
}

void NormedSpace::ensure_dim(std::size_t got) const {
    if (got != static_cast<std::size_t>(dim_))
        throw std::invalid_argument("space: vector dimension mismatch");
}

double NormedSpace::norm(const Vec& x) const {
    ensure_dim(x.size());
    switch (kind_) {
        case SpaceKind::lp:
            if (p_ == 1.0) return norm_1(x);
            if (std::isinf(p_)) return norm_inf(x);
            {
                double s = 0.0;
                for (double v : x) s += std::pow(std::abs(v), p_);
                return std::pow(s, 1.0 / p_);
            }
        case SpaceKind::c0: return norm_inf(x);
        case SpaceKind::polyhedral: {
            // gauge of the ball: max over dual ball vertices
            double best = 0.0;
            for (const Vec& f : dual_vertices()) best = std::max(best, dot(f, x));
            return best;
        }
        case SpaceKind::weighted_l1: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) s += weights_[i] * std::abs(x[i]);
            return s;
        }
        case SpaceKind::sum: {
            const Vec xl(x.begin(), x.begin() + left_->dim_);
            const Vec xr(x.begin() + left_->dim_, x.end());
            return profile_.eval(left_->norm(xl), right_->norm(xr));
        }
    }
    return 0.0;
}

double NormedSpace::dual_norm(const Vec& f) const {
    ensure_dim(f.size());
    switch (kind_) {
        case SpaceKind::lp:
            if (p_ == 1.0) return norm_inf(f);
            if (std::isinf(p_)) return norm_1(f);
            {
                const double q = p_ / (p_ - 1.0);
                double s = 0.0;
                for (double v : f) s += std::pow(std::abs(v), q);
                return std::pow(s, 1.0 / q);
            }
        case SpaceKind::c0: return norm_1(f);
        case SpaceKind::polyhedral: {
            double best = 0.0;
            for (const Vec& v : vertices_) best = std::max(best, dot(f, v));
            return best;
        }
        case SpaceKind::weighted_l1: {
            double s = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) s = std::max(s, std::abs(f[i]) / weights_[i]);
            return s;
        }
        case SpaceKind::sum: {
            const Vec fl(f.begin(), f.begin() + left_->dim_);
            const Vec fr(f.begin() + left_->dim_, f.end());
            return profile_.conjugate(left_->dual_norm(fl), right_->dual_norm(fr));
        }
    }
    return 0.0;
}

bool NormedSpace::has_vertex_list() const {
    switch (kind_) {
        case SpaceKind::lp: return p_ == 1.0 || std::isinf(p_);
        case SpaceKind::c0:
        case SpaceKind::polyhedral:
        case SpaceKind::weighted_l1: return true;
        case SpaceKind::sum:
            return profile_.kind() != ProfileKind::lp && left_->has_vertex_list() &&
                   right_->has_vertex_list();
    }
    return false;
}

std::vector<Vec> NormedSpace::ball_vertices() const {
    if (!has_vertex_list())
        throw UnsupportedVariant("ball_vertices: smooth unit ball has no vertex list");
    std::call_once(cache_->verts_once, [this] {
        switch (kind_) {
            case SpaceKind::lp:
                cache_->verts = p_ == 1.0 ? scaled_axes(Vec(static_cast<std::size_t>(dim_), 1.0))
                                          : cube_list(dim_);
                break;
            case SpaceKind::c0: cache_->verts = cube_list(dim_); break;
            case SpaceKind::polyhedral: cache_->verts = vertices_; break;
            case SpaceKind::weighted_l1: {
                Vec scale(weights_.size());
                for (std::size_t i = 0; i < weights_.size(); ++i) scale[i] = 1.0 / weights_[i];
                cache_->verts = scaled_axes(scale);
                break;
            }
            case SpaceKind::sum:
                cache_->verts = sum_ball(profile_, left_->ball_vertices(), right_->ball_vertices(),
                                         left_->dim_, right_->dim_);
                break;
        }
    });
    return cache_->verts;
}

bool NormedSpace::has_exact_polytope() const {
    if (!has_vertex_list() || static_cast<std::size_t>(dim_) > opt::kMaxExactDim) return false;
    return ball_vertices().size() <= opt::kMaxExactVertices;
}

const opt::Polytope& NormedSpace::ball_polytope() const {
    std::call_once(cache_->ball_once, [this] {
        cache_->ball = std::make_unique<const opt::Polytope>(opt::make_polytope(ball_vertices()));
    });
    return *cache_->ball;
}

bool NormedSpace::has_dual_vertices() const {
    switch (kind_) {
        case SpaceKind::lp:
            if (std::isinf(p_)) return true;
            return p_ == 1.0 && static_cast<std::size_t>(dim_) <= kMaxEnumerationDim;
        case SpaceKind::c0: return true;
        case SpaceKind::polyhedral: return true;
        case SpaceKind::weighted_l1:
            return static_cast<std::size_t>(dim_) <= kMaxEnumerationDim;
        case SpaceKind::sum:
            if (!left_->has_dual_vertices() || !right_->has_dual_vertices()) return false;
            if (profile_.kind() == ProfileKind::lp) return false;
            // pruning the polar candidates runs through the exact hull paths
            return profile_.kind() != ProfileKind::polygonal ||
                   static_cast<std::size_t>(dim_) <= opt::kMaxExactDim;
    }
    return false;
}

const std::vector<Vec>& NormedSpace::dual_vertices() const {
    if (!has_dual_vertices())
        throw UnsupportedVariant("dual_vertices: dual ball has no exact vertex list");
    std::call_once(cache_->dual_once, [this] {
        switch (kind_) {
            case SpaceKind::lp:
                cache_->duals = std::isinf(p_)
                                    ? scaled_axes(Vec(static_cast<std::size_t>(dim_), 1.0))
                                    : cube_list(dim_);
                break;
            case SpaceKind::c0:
                cache_->duals = scaled_axes(Vec(static_cast<std::size_t>(dim_), 1.0));
                break;
            case SpaceKind::polyhedral: cache_->duals = opt::dual_ball_vertices(vertices_); break;
            case SpaceKind::weighted_l1: cache_->duals = signed_boxes(weights_); break;
            case SpaceKind::sum:
                cache_->duals = sum_ball(profile_.conjugate_profile(), left_->dual_vertices(),
                                         right_->dual_vertices(), left_->dim_, right_->dim_);
                break;
        }
    });
    return cache_->duals;
}

std::vector<Vec> NormedSpace::face_vertices(const Vec& f) const {
    ensure_dim(f.size());
    if (std::abs(dual_norm(f) - 1.0) > 1e-6)
        throw std::invalid_argument("face_vertices: functional must have dual norm 1");
    std::vector<Vec> out;
    for (const Vec& v : ball_vertices())
        if (dot(f, v) >= 1.0 - 1e-9) out.push_back(v);
    return out;
}

std::vector<Vec> NormedSpace::sample_dual_sphere(int count, std::uint64_t seed) const {
    if (count < 1) throw std::invalid_argument("sample_dual_sphere: count must be positive");
    std::vector<Vec> out;
    auto push_unique = [&out](const Vec& f) {
        for (const Vec& g : out)
            if (nearly_equal(g, f, 1e-9)) return;
        out.push_back(f);
    };
    for (int i = 0; i < dim_; ++i) {
        Vec e(static_cast<std::size_t>(dim_), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        const double nf = dual_norm(e);
        push_unique(scaled(e, 1.0 / nf));
        push_unique(scaled(e, -1.0 / nf));
    }
    if (has_dual_vertices())
        for (const Vec& v : dual_vertices()) push_unique(v);

    Rng rng(derive_seed(seed, 0x5d5a17));
    while (out.size() < static_cast<std::size_t>(count)) {
        const Vec g = rng.gauss_vec(static_cast<std::size_t>(dim_));
        const double nf = dual_norm(g);
        if (nf < 1e-9) continue;
        out.push_back(scaled(g, 1.0 / nf));
    }
    return out;
}

std::string NormedSpace::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case SpaceKind::lp:
            if (p_ == 1.0) os << "l1";
            else if (std::isinf(p_)) os << "linf";
            else os << "l" << p_;
            os << " dim=" << dim_;
            break;
        case SpaceKind::c0: os << "c0 window dim=" << dim_; break;
        case SpaceKind::polyhedral:
            os << "polyhedral dim=" << dim_ << " vertices=" << vertices_.size();
            break;
        case SpaceKind::weighted_l1:
            os << "weighted l1 weights=[";
            for (std::size_t i = 0; i < weights_.size(); ++i)
                os << (i ? "," : "") << weights_[i];
            os << "]";
            break;
        case SpaceKind::sum:
            os << "sum{" << profile_.describe() << "}(" << left_->describe() << ", "
               << right_->describe() << ")";
            break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// strict JSON loading

namespace {

using nlohmann::json;

void require_keys(const json& j, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw std::invalid_argument("space json: expected an object");
    for (const char* k : keys)
        if (!j.contains(k))
            throw std::invalid_argument(std::string("space json: missing key '") + k + "'");
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* want : keys) known = known || k == want;
        if (!known) throw std::invalid_argument("space json: unknown key '" + k + "'");
    }
}

double parse_p(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("space json: p must be a number or \"inf\"");
    }
    if (!j.is_number()) throw std::invalid_argument("space json: p must be a number or \"inf\"");
    return j.get<double>();
}

std::vector<Vec> parse_vector_list(const json& j, const char* what) {
    if (!j.is_array() || j.empty())
        throw std::invalid_argument(std::string("space json: ") + what + " must be a nonempty array");
    std::vector<Vec> out;
    for (const auto& row : j) {
        if (!row.is_array()) throw std::invalid_argument(std::string("space json: ") + what +
                                                         " entries must be arrays of numbers");
        Vec v;
        for (const auto& c : row) {
            if (!c.is_number()) throw std::invalid_argument(std::string("space json: ") + what +
                                                            " entries must be arrays of numbers");
            v.push_back(c.get<double>());
        }
        out.push_back(std::move(v));
    }
    return out;
}

AbsoluteNormProfile build_profile(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("profile json: missing type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "l1") {
        require_keys(j, {"type"});
        return AbsoluteNormProfile::l1();
    }
    if (type == "linf") {
        require_keys(j, {"type"});
        return AbsoluteNormProfile::linf();
    }
    if (type == "lp") {
        require_keys(j, {"type", "p"});
        return AbsoluteNormProfile::lp(parse_p(j.at("p")));
    }
    if (type == "polygonal") {
        require_keys(j, {"type", "boundary"});
        return AbsoluteNormProfile::polygonal(parse_vector_list(j.at("boundary"), "boundary"));
    }
    throw std::invalid_argument("profile json: unknown type '" + type + "'");
}

NormedSpace build_space(const json& j) {
    if (!j.is_object() || !j.contains("type"))
        throw std::invalid_argument("space json: missing type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "lp") {
        require_keys(j, {"type", "p", "dim"});
        if (!j.at("dim").is_number_integer())
            throw std::invalid_argument("space json: dim must be an integer");
        return NormedSpace::lp(parse_p(j.at("p")), j.at("dim").get<int>());
    }
    if (type == "polyhedral") {
        require_keys(j, {"type", "vertices"});
        return NormedSpace::polyhedral(parse_vector_list(j.at("vertices"), "vertices"));
    }
    if (type == "weighted_l1") {
        require_keys(j, {"type", "weights"});
        const json& w = j.at("weights");
        if (!w.is_array() || w.empty())
            throw std::invalid_argument("space json: weights must be a nonempty array");
        Vec weights;
        for (const auto& c : w) {
            if (!c.is_number()) throw std::invalid_argument("space json: weights must be numbers");
            weights.push_back(c.get<double>());
        }
        return NormedSpace::weighted_l1(std::move(weights));
    }
    if (type == "c0") {
        require_keys(j, {"type", "dim"});
        if (!j.at("dim").is_number_integer())
            throw std::invalid_argument("space json: dim must be an integer");
        return NormedSpace::c0(j.at("dim").get<int>());
    }
    if (type == "sum") {
        require_keys(j, {"type", "norm", "left", "right"});
        return NormedSpace::sum(build_space(j.at("left")), build_space(j.at("right")),
                                build_profile(j.at("norm")));
    }
    throw std::invalid_argument("space json: unknown type '" + type + "'");
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw std::invalid_argument("space json: malformed document");
    return j;
}

}  // namespace

NormedSpace space_from_json(const std::string& text) { return build_space(parse_text(text)); }

AbsoluteNormProfile profile_from_json(const std::string& text) {
    return build_profile(parse_text(text));
}

}  // namespace dgv::spaces
