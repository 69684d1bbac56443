#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "alk/intarith.hpp"

namespace alk {

// Iterated quadratic extension Q(r_1)(r_2)...(r_n) with r_k^2 = c_k, c_k in
// the previous level. Elements are coordinate vectors of length 2^n over the
// monomial basis prod_{j in mask} r_{j+1}; bit j of the index selects r_{j+1}.
struct TowerSpec {
  std::vector<std::vector<Q>> radicand;  // radicand[k] has length 2^k
};

class TowerElem;

class Tower {
 public:
  Tower();
  int levels() const { return static_cast<int>(spec_->radicand.size()); }
  std::size_t dim() const { return std::size_t(1) << levels(); }

  // New tower with r_{n+1}^2 = c. Throws if c is zero. Whether the result is
  // a field is the caller's business (inverse() throws on zero divisors).
  Tower extend(const TowerElem& c) const;

  TowerElem zero() const;
  TowerElem one() const;
  TowerElem rational(const Q& q) const;
  TowerElem gen(int k) const;  // r_k, 1-based
  TowerElem from_coords(std::vector<Q> c) const;
  // Embed an element of a prefix tower.
  TowerElem lift(const TowerElem& x) const;

  bool same(const Tower& o) const;
  const TowerSpec& spec() const { return *spec_; }
  const std::shared_ptr<const TowerSpec>& handle() const { return spec_; }

 private:
  explicit Tower(std::shared_ptr<const TowerSpec> s) : spec_(std::move(s)) {}
  std::shared_ptr<const TowerSpec> spec_;
  friend class TowerElem;
};

class TowerElem {
 public:
  TowerElem() = default;
  TowerElem(std::shared_ptr<const TowerSpec> s, std::vector<Q> c);

  const std::vector<Q>& coords() const { return c_; }
  Tower tower() const;
  int levels() const { return static_cast<int>(spec_->radicand.size()); }

  bool is_zero() const;
  bool is_rational() const;
  Q rational_value() const;  // throws unless is_rational()
  Q trace() const;           // trace down to Q

  TowerElem operator+(const TowerElem& o) const;
  TowerElem operator-(const TowerElem& o) const;
  TowerElem operator-() const;
  TowerElem operator*(const TowerElem& o) const;
  TowerElem operator/(const TowerElem& o) const;
  TowerElem inverse() const;
  bool operator==(const TowerElem& o) const;
  bool operator!=(const TowerElem& o) const { return !(*this == o); }

  std::string str() const;

 private:
  void check(const TowerElem& o) const;
  std::shared_ptr<const TowerSpec> spec_;
  std::vector<Q> c_;
};

// Field homomorphism of a tower into itself, given by generator images.
class TowerAuto {
 public:
  TowerAuto() = default;
  explicit TowerAuto(std::vector<TowerElem> images);
  static TowerAuto identity(const Tower& T);

  TowerElem apply(const TowerElem& x) const;
  TowerAuto compose(const TowerAuto& inner) const;  // this o inner
  const std::vector<TowerElem>& images() const { return img_; }
  bool operator==(const TowerAuto& o) const { return img_ == o.img_; }
  // r_k -> images[k-1] respects every relation r_k^2 = c_k.
  bool well_defined() const;

 private:
  std::vector<TowerElem> img_;
  std::vector<TowerElem> mono_;  // images of the monomial basis
};

// Numerical evaluation through one fixed complex embedding (principal square
// roots level by level).
std::vector<std::complex<double>> generator_values(const Tower& T);
std::complex<double> evaluate(const TowerElem& x, const std::vector<std::complex<double>>& gens);

// Same with GMP floats of the given precision; returns (re, im) as strings of
// significant digits alongside doubles.
struct HighPrecComplex {
  mpf_class re, im;
};
std::vector<HighPrecComplex> generator_values_mpf(const Tower& T, int bits);
HighPrecComplex evaluate_mpf(const TowerElem& x, const std::vector<HighPrecComplex>& gens, int bits);

}  // namespace alk
