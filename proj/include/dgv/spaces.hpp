#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dgv/common.hpp"
#include "dgv/polytope.hpp"
#include "dgv/profile.hpp"

namespace dgv::spaces {

enum class SpaceKind { lp, polyhedral, weighted_l1, c0, sum };

// Immutable finite-dimensional normed space. Construction validates the
// variant; extremal structure (ball polytope, dual vertices) is built lazily
// and shared between copies, so the object stays cheap to pass around.
class NormedSpace {
  public:
    static NormedSpace lp(double p, int dim);  // p in [1, inf]
    static NormedSpace polyhedral(std::vector<Vec> vertices);
    static NormedSpace weighted_l1(Vec weights);
    // Max norm plus a flag telling the closed-form layer to treat the vector
    // as a finitely supported element of the sequence space; nothing else
    // changes.
    static NormedSpace c0(int dim);
    static NormedSpace sum(NormedSpace left, NormedSpace right, AbsoluteNormProfile profile);

    SpaceKind kind() const { return kind_; }
    int dim() const { return dim_; }
    double p() const { return p_; }
    const Vec& weights() const { return weights_; }
    const NormedSpace& left() const { return *left_; }
    const NormedSpace& right() const { return *right_; }
    const AbsoluteNormProfile& profile() const { return profile_; }

    double norm(const Vec& x) const;
    double dual_norm(const Vec& f) const;

    // Extreme points of the unit ball; exact list or UnsupportedVariant for
    // smooth variants (lp with 1 < p < inf, and sums over smooth profiles).
    bool has_vertex_list() const;
    std::vector<Vec> ball_vertices() const;

    // Ball with edge structure, available when has_vertex_list() and the
    // exact combinatorial caps (dimension, vertex count) are met.
    bool has_exact_polytope() const;
    const opt::Polytope& ball_polytope() const;

    // Extreme points of the dual ball.
    bool has_dual_vertices() const;
    const std::vector<Vec>& dual_vertices() const;

    // Ball vertices v with f.v >= 1 - 1e-9 for a dual-unit functional f.
    std::vector<Vec> face_vertices(const Vec& f) const;

    // Deterministic dual-sphere sample: the signed axis functionals and every
    // dual ball vertex (when available) are always present, Gaussian
    // directions normalized in the dual norm fill up the requested count.
    std::vector<Vec> sample_dual_sphere(int count, std::uint64_t seed) const;

    std::string describe() const;

  private:
    struct Cache;
    NormedSpace() = default;
    void ensure_dim(std::size_t got) const;

    SpaceKind kind_ = SpaceKind::lp;
    int dim_ = 0;
    double p_ = 2.0;
    Vec weights_;
    std::vector<Vec> vertices_;  // polyhedral: canonical ball vertices
    std::shared_ptr<const NormedSpace> left_, right_;
    AbsoluteNormProfile profile_ = AbsoluteNormProfile::l1();
    std::shared_ptr<Cache> cache_;
};

// Strict JSON loaders: unknown keys are rejected, all fields validated.
NormedSpace space_from_json(const std::string& text);
AbsoluteNormProfile profile_from_json(const std::string& text);

}  // namespace dgv::spaces
