#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "alk/intarith.hpp"

namespace alk {

// a + b*sqrt(d) with exact rational coordinates. d == 1 encodes Q itself
// (b is then kept at 0).
class QFElem {
 public:
  QFElem() = default;
  QFElem(long d, Q a, Q b = 0);

  long d() const { return d_; }
  const Q& a() const { return a_; }
  const Q& b() const { return b_; }

  QFElem conj() const { return QFElem(d_, a_, -b_); }
  Q norm() const { return a_ * a_ - Q(d_) * b_ * b_; }
  Q trace() const { return d_ == 1 ? a_ : Q(2 * a_); }
  bool is_zero() const { return a_ == 0 && b_ == 0; }
  bool is_rational() const { return b_ == 0; }

  // embedding 0: sqrt(d) -> +sqrt(d) (i*sqrt(|d|) if d < 0); 1: the other one
  std::complex<double> embed(int idx) const;

  QFElem operator+(const QFElem& o) const;
  QFElem operator-(const QFElem& o) const;
  QFElem operator*(const QFElem& o) const;
  QFElem operator/(const QFElem& o) const;
  QFElem operator-() const { return QFElem(d_, -a_, -b_); }
  bool operator==(const QFElem& o) const { return d_ == o.d_ && a_ == o.a_ && b_ == o.b_; }
  bool operator!=(const QFElem& o) const { return !(*this == o); }

  std::string str() const;

 private:
  void check(const QFElem& o) const;
  long d_ = 1;
  Q a_, b_;
};

// F = Q(sqrt d), or Q when d == 1 (built through rationals()).
class QuadField {
 public:
  explicit QuadField(long d);
  static QuadField rationals();

  long d() const { return d_; }
  int degree() const { return d_ == 1 ? 1 : 2; }
  bool is_rational() const { return d_ == 1; }
  bool is_real() const { return d_ > 0; }
  bool d_one_mod_4() const;
  const Z& disc() const { return disc_; }

  QFElem elem(const Q& a, const Q& b = 0) const { return QFElem(d_, a, b); }
  QFElem one() const { return elem(1); }
  QFElem zero() const { return elem(0); }
  QFElem omega() const;
  std::vector<QFElem> integral_basis() const;

  // coordinates (x, y) of z = x + y*omega
  std::pair<Q, Q> omega_coords(const QFElem& z) const;
  QFElem from_omega_coords(const Q& x, const Q& y) const { return elem(x) + omega() * elem(y); }
  bool is_integral(const QFElem& z) const;

  bool operator==(const QuadField& o) const { return d_ == o.d_; }

 private:
  QuadField() = default;
  long d_ = 1;
  Z disc_ = 1;
};

enum class PrimeType { Rational, Split1, Split2, Inert, Ramified };
const char* to_string(PrimeType t);

struct Place {
  bool finite = true;
  // finite
  Z p;
  PrimeType type = PrimeType::Rational;
  Z root;            // split: sqrt(d) in Z_p, known modulo p^precision
  int precision = 0;  // bits of p-adic precision carried by root
  Z omega_residue;    // image of omega in F_p for split / ramified / rational
  // infinite
  int embedding = 0;
  bool complex = false;

  Z q() const;  // residue field size; 0 at infinity
  int local_degree() const;  // [F_v : Q_p] or [F_v : R]
  std::string label() const;
  bool operator<(const Place& o) const {
    if (finite != o.finite) return finite;
    if (!finite) return embedding < o.embedding;
    if (p != o.p) return p < o.p;
    return type < o.type;
  }
  bool operator==(const Place& o) const { return !(*this < o) && !(o < *this); }
};

constexpr int kDefaultHenselPrecision = 64;

PrimeType splitting_type(const QuadField& F, const Z& p);
std::vector<Place> places_above(const QuadField& F, const Z& p, int M = kDefaultHenselPrecision);
std::vector<Place> infinite_places(const QuadField& F);

// v_P(x) at a finite place; kInfValuation for x == 0.
int valuation(const QFElem& x, const Place& v);

struct PlaceValue {
  int valuation = 0;  // finite places only
  Q abs_exact = 1;     // finite places
  double abs = 1;
};
PlaceValue place_data(const QuadField& F, const QFElem& x, const Place& v);

struct Content {
  Q finite;        // exact product over finite places
  double infinite;  // product over Archimedean places
  double value;     // finite * infinite
  std::vector<Place> support;  // finite places with nonzero valuation
};
// Product of normalized absolute values over all places. bits > 53 evaluates
// the Archimedean factor with GMP floats.
Content content(const QuadField& F, const QFElem& x, int bits = 53);

// Square root of x in F when it exists.
std::optional<QFElem> sqrt_in(const QuadField& F, const QFElem& x);

// det(Tr(b_i b_j)) for elements of F (trace to Q).
Q trace_form_disc(const std::vector<QFElem>& basis);

}  // namespace alk
