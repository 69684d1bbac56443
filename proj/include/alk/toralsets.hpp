#pragma once

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alk/matrix.hpp"
#include "alk/numfield.hpp"
#include "alk/quartic.hpp"

namespace alk {

using CMat = Matrix<std::complex<double>>;

// Element A + B sqrt(delta) of K = F(sqrt delta).
struct RelElem {
  QFElem A, B;
};

// K = F(sqrt delta) over F = Q or a quadratic field.
struct RelQuadExt {
  QuadField F = QuadField::rationals();
  QFElem delta;

  static RelQuadExt make(const QuadField& F, const QFElem& delta);
  static RelQuadExt from_tower(const QuarticTower& T) { return make(T.F, T.delta); }
  int degree() const { return 2 * F.degree(); }
  // delta times a rational square, integral with squarefree rational content
  QFElem delta_normalized() const;
  RelElem mul(const RelElem& x, const RelElem& y) const;
  Q trace(const RelElem& x) const;  // down to Q
  bool is_integral(const RelElem& x) const;
  std::string str() const;
};

// Z-basis of O_K found by saturating Z[omega_F, sqrt delta] one prime at a
// time: any integral element of (1/p)L outside L is adjoined until none is
// left. D_K is the trace-form discriminant of the result.
struct MaximalOrder {
  std::vector<RelElem> basis;
  Z disc;        // signed
  Z start_disc;  // disc of the starting order
  std::vector<std::pair<Z, int>> index;  // p -> log_p [O_K : Z[omega, sqrt delta]]
};
MaximalOrder maximal_order(const RelQuadExt& K);
Q trace_form_disc(const RelQuadExt& K, const std::vector<RelElem>& basis);

// Relative discriminant exponent v_u(d_{K/F}) at a finite place, from the
// local square class of delta (mod 4 search at dyadic places).
int relative_disc_valuation(const RelQuadExt& K, const Place& u);

struct ToralSetDescriptor {
  RelQuadExt K;
  // p -> conductor element of O_F; its valuations at the places above p
  // give the local conductors. Missing primes have conductor 1.
  std::map<Z, QFElem> conductors;
  // one per infinite place of F, or one shared by all; may be empty
  std::vector<CMat> arch_generators;

  bool maximal_type() const;
};

struct LocalDiscRow {
  Place place;
  int rel_disc_val = 0;   // v_u(d_{K/F})
  int conductor_val = 0;  // v_u(f)
  Z disc_u;               // q_u^(rel + 2 cond)
};
struct DiscReport {
  std::vector<LocalDiscRow> finite;
  Z disc_fin;
  std::vector<double> arch;  // per infinite place of F, empty without generators
  double disc = 0;           // disc_fin times the Archimedean factors
  bool maximal_type = true;
};
DiscReport nonarch_and_global_disc(const ToralSetDescriptor& desc);

// det(<k_i, k_j>) / |det Tr(k_i k_j)| for a basis of the centralizer.
double arch_disc_basis(const std::vector<CMat>& basis);
// basis I, k, ..., k^(n-1) of the algebra generated by k
std::vector<CMat> power_basis(const CMat& k);
double arch_disc(const CMat& k);
std::complex<double> cdet(CMat m);

struct QuarticClassification {
  std::string group;  // V4, C4, D4, A4, S4
  std::optional<GaloisType> type;  // unset for A4 / S4
  int resolvent_rational_roots = 0;
  bool disc_square = false;
  std::string name() const { return type ? to_string(*type) : "other"; }
};
// Resolvent cubic route for a monic irreducible quartic c0 + ... + x^4.
QuarticClassification classify_quartic(const std::vector<Q>& coeffs);
bool quartic_irreducible(const std::vector<Q>& coeffs);

struct TowerClassification {
  QuarticClassification resolvent;
  int quadratic_subfields = 0;  // 3 iff delta in Q^x F^x2
  std::optional<QFElem> witness;  // m with delta m a square in F
  GaloisType by_norm;             // from Nr(delta)
  bool consistent = false;
  GaloisType type() const { return by_norm; }
};
TowerClassification classify_galois_type(const QuarticTower& T);

struct CyclicDiscCheck {
  Z D_K, D_F;
  Q D_rel;
  bool pass = false;
  // D_K = W^2 d^3, D_F = d or 4d, D_{K/F} = W^2 d or (W/4)^2 d
  Z W, d;
  bool shape_ok = false;
};
CyclicDiscCheck cyclic_disc_check(const QuarticTower& T);

struct LinnikRhs {
  double value = 0, log_value = 0;
  double tau_max = 0;
  bool in_hypothesis = true;
  // special case with disc ~ D_K / D_F^2 and vol = D_K^(1/2)
  double special = 0;
  // maximal-type proxy vol = disc^(1/2)
  double proxy = 0;
};
// All arguments in log form except tau, h and eps.
LinnikRhs linnik_rhs(double log_disc, double log_vol, double tau, double h, double eps,
                     double log_c = 0, double log_DF = 0, double log_DK = -1);

// D_K^dk D_F^df exp(decay tau h)
struct LinnikMonomial {
  double dk = 0, df = 0, decay = 0;
  double log_eval(double log_DK, double log_DF, double tau_h) const {
    return dk * log_DK + df * log_DF + decay * tau_h;
  }
};
// The two terms after substituting disc = D_K / D_F^2, vol = D_K^(1/2),
// against the stated special-case terms; dominated means exponentwise <=.
struct LinnikShape {
  std::array<LinnikMonomial, 2> substituted, stated;
  bool dominated = false;
};
LinnikShape linnik_special_shape(double eps);

struct DivisorBound {
  int b = 0;
  Z two_b, tau_disc;
  bool pass = false;  // 2^b <= tau(disc_fin)
  // divisor count of the discriminant ideal of O in O_F; at least 2^b always.
  // tau(disc_fin) can fall below 2^b when both places above a split prime
  // ramify (p^2 has 3 divisors, the ideal u u' has 4).
  Z tau_ideal;
  bool pass_ideal = false;
};
DivisorBound divisor_bound_check(const ToralSetDescriptor& desc);

}  // namespace alk
