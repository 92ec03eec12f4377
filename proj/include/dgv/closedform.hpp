#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <vector>

#include "dgv/common.hpp"
#include "dgv/spaces.hpp"

// Closed-form evaluators for Daugavet and Delta constants, and the exact
// witness construction behind the c0-type lower bounds.

namespace dgv::cf {

using Rational = boost::multiprecision::cpp_rational;

// Marks a finite coordinate vector as a finitely supported element of c0.
// The tag only changes which formulas are considered applicable; the
// coordinates themselves are shared with the ambient finite-dimensional view.
struct C0View {
  Vec coords;
};

// A family of n0 vectors averaging to the base point whose distances to it
// witness a Delta-constant lower bound. Entries are kept as exact rationals:
// the averaging identity is an equality, not a tolerance.
struct C0Witnesses {
  Vec x;                                    // base point, original signs
  std::vector<std::size_t> indices;         // selected coordinates
  int n0 = 0;
  std::vector<std::vector<Rational>> rows;  // one witness vector per row
  Rational bound;                           // min over selected ramp values

  std::vector<Vec> rounded() const;  // double rendition of the rows
  double bound_value() const;
};

// max over coordinates of 1 - |x_n|; the Daugavet constant on a
// finite-dimensional max-norm space. For two coordinates the same value is
// also the Delta constant.
double dc_linf_n(const Vec& x);

// Daugavet constant of any point of the c0 unit ball: identically 1.
double dc_c0(const C0View& x);

// Ramp profile behind the c0 witness bounds:
//   1 + |t|            for |t| <= 1 - 2/n,
//   (n - 1)(1 - |t|)   for 1 - 2/n <= |t| <= 1.
// Both branches meet at the breakpoint with value 2 - 2/n.
double f_n(double t, int n);
Rational f_n_exact(const Rational& t, int n);

// Builds the witness family for the selected coordinates. Negative
// coordinates are handled by conjugating with sign flips, which are
// isometries of the max norm. All invariants are verified in exact
// arithmetic before returning.
C0Witnesses dec_c0_witnesses(const C0View& x, const std::vector<std::size_t>& indices,
                             int n0);

// Delta constant of t times the sum of the first n unit vectors in c0:
// min{1 + |t|, max{1, (1 - |t|)(n - 1)}}.
double dec_c0_uniform(double t, int n);

// Daugavet constant (equal to the Delta constant) of a point of a weighted
// l1 space: 1 + sum w|c| - 2 max w|c|.
double dc_weighted_l1(const Vec& coeffs, const Vec& weights);

// Per-atom upper bound 1 + ||f|| - 2 w_a |c_a|; the minimum over the support
// equals dc_weighted_l1 exactly.
double dec_upper_atom(const Vec& coeffs, const Vec& weights, std::size_t atom_index);

struct HilbertDelta {
  double value = 0.0;
  // In one dimension there is no orthogonal witness direction and the value
  // degenerates to 1 - |x|.
  bool dim_one_rule = false;
};

// Delta constant in Euclidean space: sqrt(1 - ||x||^2) in dimension >= 2.
HilbertDelta dec_hilbert(const Vec& x);

// Daugavet constant at a locally uniformly rotund point: 1 - ||x||. Every
// point of a Euclidean space qualifies, so the Euclidean norm is used.
double dc_lur(const Vec& x);

// Weak-star Daugavet constant of a bounded sequence given as a finite prefix
// plus the limsup of the tail moduli: 1 + tail_limsup. The prefix cannot
// change the value; it is accepted only to validate the encoding.
double wdc_linf(const Vec& prefix, double tail_limsup);

struct ExtremeUpperBound {
  double bound = 2.0;
  // Every extreme dual functional attains modulus 1 at x, so the bound
  // degenerates to the trivial 2.
  bool vacuous = false;
};

// Upper bound for the Delta constant of a unit vector through the extreme
// points of the dual ball: 1 + max{|e*(x)| : e* extreme, |e*(x)| < 1}.
// Requires a space with an explicit dual vertex list.
ExtremeUpperBound dec_upper_extreme(const spaces::NormedSpace& space, const Vec& x);

}  // namespace dgv::cf
