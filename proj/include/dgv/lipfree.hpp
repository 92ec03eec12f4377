#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dgv/common.hpp"

// Lipschitz-free spaces over finite pointed metric spaces: free norms by
// linear programming against the unit ball of base-vanishing Lipschitz
// functions, molecules, denting certification through interval coverage, and
// the ladder construction separating the Delta constant from the Daugavet
// constant.

namespace dgv::lip {

class FiniteMetricSpace {
  public:
    // Validates symmetry, zero diagonal, positivity off the diagonal, the
    // triangle inequality (within 1e-12) and the presence of the base label.
    static FiniteMetricSpace make(std::vector<std::string> labels, std::string base,
                                  std::vector<Vec> dist);

    int size() const { return static_cast<int>(labels_.size()); }
    const std::string& label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<std::string>& labels() const { return labels_; }
    int base() const { return base_; }
    int index(const std::string& label) const;  // throws on an unknown label
    double d(int i, int j) const { return dist_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }

  private:
    FiniteMetricSpace() = default;
    std::vector<std::string> labels_;
    int base_ = 0;
    std::vector<Vec> dist_;
};

// Strict loader for {"points": [...], "base": "0", "dist": [[...], ...]}.
FiniteMetricSpace metric_from_json(const std::string& text);

// A finitely supported element sum a_i delta_{x_i} of the free space.
// Canonical form: support sorted by point index, duplicates merged, zero
// weights dropped, and any mass at the base dropped (delta_base = 0).
class FreeElement {
  public:
    FreeElement() = default;
    static FreeElement from_support(const FiniteMetricSpace& space,
                                    const std::vector<std::pair<std::string, double>>& support);

    const std::vector<std::pair<int, double>>& support() const { return support_; }
    bool zero() const { return support_.empty(); }

    friend FreeElement combine(const FreeElement& a, double ca, const FreeElement& b, double cb);

  private:
    std::vector<std::pair<int, double>> support_;
};

// ca * a + cb * b in canonical form.
FreeElement combine(const FreeElement& a, double ca, const FreeElement& b, double cb);

struct Molecule {
    int u = 0, v = 0;
    FreeElement element;  // (delta_u - delta_v) / d(u, v)
};

Molecule molecule(const FiniteMetricSpace& space, const std::string& u, const std::string& v);

struct FreeNorm {
    double value = 0.0;
    // Norming Lipschitz function, one entry per label in space order, zero at
    // the base.
    Vec function;
};

// ||mu|| = max{ sum a_i f(x_i) : f 1-Lipschitz, f(base) = 0 }, solved as an
// LP with one variable per non-base point and one constraint per ordered
// pair. Spaces are capped at 64 points to keep the dense tableau bounded.
FreeNorm free_norm_detail(const FiniteMetricSpace& space, const FreeElement& mu);
double free_norm(const FiniteMetricSpace& space, const FreeElement& mu);

struct MoleculePairNorm {
    double value = 0.0;         // ||m_xy + m_uv|| by LP
    bool formula_applies = false;
    double closed_form = 0.0;   // [d(x,v)+d(u,y)+|d(x,y)-d(u,v)|] / max of the pair lengths
};

// The pair-of-molecules norm with the two-sided closed form. The formula
// holds exactly in the near-diametral regime ||m_xy + m_uv|| >= 2 - eps with
// eps the defect of d(x,v)+d(u,y) >= d(x,y)+d(u,v) - eps max{...}.
MoleculePairNorm molecule_pair_norm(const FiniteMetricSpace& space,
                                    const std::pair<std::string, std::string>& xy,
                                    const std::pair<std::string, std::string>& uv);

// [u,v]_delta = {p : d(u,p) + d(v,p) < d(u,v) + delta}, exact enumeration,
// returned in space label order.
std::vector<std::string> interval_delta(const FiniteMetricSpace& space, const std::string& u,
                                        const std::string& v, double delta);

struct DentingCertificate {
    bool denting = false;  // certified at this grid resolution; false is not a disproof
    double r = 0.0, s = 0.0, delta = 0.0;
};

// Certifies m_{u,v} denting by finding r + s < d(u,v) and delta > 0 with
// [u,v]_delta inside B(u,r) union B(v,s) where both balls are singletons.
DentingCertificate denting_certificate(const FiniteMetricSpace& space, const std::string& u,
                                       const std::string& v);

struct CharacterizationReport {
    double alpha = 0.0;        // requested level
    bool consistent = false;   // no tested instance contradicts dc(mu) >= alpha
    // Largest level consistent with every observed constraint: the least of
    // ||mu - nu|| over certified denting molecules and ||mu - m_uv|| + 2(r+s)
    // over coverage instances. An upper estimate for dc(mu).
    double alpha_upper = 2.0;
    int denting_checks = 0;
    int coverage_checks = 0;
    std::vector<std::string> violations;
};

// Finite-instance checks of the slice characterization of dc on free spaces:
// distance at least alpha to certified denting molecules, and the coverage
// implication ||mu - m_uv|| >= alpha - 2(r+s) whenever [u,v]_delta lies in
// B(u, r d(u,v)) union B(v, s d(u,v)).
CharacterizationReport check_dc_characterization(const FiniteMetricSpace& space,
                                                 const FreeElement& mu, double alpha);

struct DistanceBound {
    double lhs = 0.0;  // ||m_uv - m_xy|| by LP
    double rhs = 0.0;  // 2 (d(x,u) + d(y,v)) / max{d(x,y), d(u,v)}
    bool pass = false;
};

DistanceBound molecule_distance_bound(const FiniteMetricSpace& space,
                                      const std::pair<std::string, std::string>& uv,
                                      const std::pair<std::string, std::string>& xy);

// The unit segment discretized to grid_k + 1 points 0, 1/k, ..., 1 with
// labels "0", "s1", ..., "sk". Its free space is isometric to l1 over the
// edge coordinates.
FiniteMetricSpace segment_space(int grid_k);

// Truncated ladder in the plane: the discretized segment [0,1] x {0} plus
// rung endpoints u_n = (1, 1/n), v_n = (0, 1/n) for n = 1..rungs, Euclidean
// distance, base (0,0).
FiniteMetricSpace ladder_space(int rungs, int grid_k);

struct LadderRow {
    int n = 0;
    double distance = 0.0;   // ||m_{u_n, v_n} - m_{x, y}||
    double bound = 0.0;      // 4/n, the closed-form distance bound
    bool denting = false;    // certificate for m_{u_n, v_n}
    double delta_cert = 0.0; // Delta lower bound for m_{x,y} from segment witnesses
};

// Per-rung distances, bounds and denting certificates for the ladder, plus
// the Delta certificate min_j ||m_{x,y} - m_j|| over the edge molecules m_j,
// whose average is m_{x,y}. The segment identification with l1 is replayed
// by LP before the main run.
std::vector<LadderRow> ladder_experiment(int rungs, int grid_k);

}  // namespace dgv::lip
