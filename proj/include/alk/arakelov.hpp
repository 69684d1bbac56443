#pragma once

#include <vector>

#include "alk/lattice.hpp"
#include "alk/numfield.hpp"

namespace alk {

// Fractional ideal of O_F as the Z-module with basis n1, m + n2*omega
// (coordinates in (1, omega), Hermite normal form with 0 <= m < n1).
// Over Q only n1 is used.
class FracIdeal {
 public:
  static FracIdeal unit(const QuadField& F);
  static FracIdeal principal(const QuadField& F, const QFElem& x);
  // Z-span of the O_F-multiples of the generators.
  static FracIdeal generated(const QuadField& F, const std::vector<QFElem>& gens);
  // Prime ideal attached to a finite place.
  static FracIdeal prime(const QuadField& F, const Place& v);
  static FracIdeal inverse_different(const QuadField& F);

  const QuadField& field() const { return F_; }
  std::vector<QFElem> basis() const;
  Q norm() const { return F_.is_rational() ? Q(abs(n1_)) : Q(n1_ * n2_); }
  bool contains(const QFElem& x) const;
  int valuation(const Place& v) const;  // min over the basis

  FracIdeal operator*(const FracIdeal& o) const;
  FracIdeal inverse() const;
  FracIdeal pow(long k) const;
  bool operator==(const FracIdeal& o) const;

  std::string str() const;

 private:
  FracIdeal(const QuadField& F) : F_(F) {}
  QuadField F_;
  Q n1_ = 1, m_ = 0, n2_ = 1;
};

// Line bundle over O_F: ideal L with ||x||_sigma^2 = |sigma(x)|^2 / radius_sq[sigma]
// for the [F:Q] embeddings sigma (a complex pair stores the same value twice).
// radius_sq is the square of the ball radius in which unit-norm sections sit.
struct HermitianLineBundle {
  FracIdeal ideal;
  std::vector<Q> radius_sq;

  static HermitianLineBundle trivial(const QuadField& F);
  const QuadField& field() const { return ideal.field(); }
  void validate() const;

  double adeg() const;                         // closed form
  double adeg_via_section(const QFElem& s) const;
  HermitianLineBundle dual() const;
  HermitianLineBundle tensor(const HermitianLineBundle& o) const;
  static HermitianLineBundle canonical(const QuadField& F);
  // ||s||_sigma^2 at embedding sigma, as a double
  double norm2_at(const QFElem& s, int sigma) const;
};

// |sigma(x)| for the k-th embedding of F (k < [F:Q]).
double embedding_abs(const QFElem& x, int k);

EuclideanLattice direct_image(const HermitianLineBundle& L);

// #{s in L : ||s||_sigma <= 1 for all sigma}, exact comparison at the boundary.
long long count_unit_sections(const HermitianLineBundle& L, long long budget = kDefaultBudget,
                              bool parallel = true);

struct BundleTheta {
  ThetaReport report;        // h0, h1 of the direct image
  double h1_duality = 0;     // h0 of dual(L) tensor omega
  double h0_ar = 0;
  long long sections = 0;
  double pi_n = 0;           // pi * [F:Q]
  bool comparison_holds = false;  // h0_ar <= h0 + pi n
};
BundleTheta bundle_theta_and_h0ar(const HermitianLineBundle& L, const ThetaOptions& opt = {});

double f_bound(double t);  // 1 + t for t >= 0, exp(2 pi t) otherwise

struct BoundCheck {
  const char* name;
  bool applies = false;
  double lhs = 0, rhs = 0;
  bool holds = true;
};
struct ThetaBounds {
  double f_value = 0;
  std::vector<BoundCheck> checks;
  bool all_hold() const;
};
ThetaBounds theta_bounds(double t, const HermitianLineBundle& L, const ThetaOptions& opt = {});

}  // namespace alk
