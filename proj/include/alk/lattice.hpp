#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "alk/intarith.hpp"
#include "alk/matrix.hpp"

namespace alk {

constexpr long long kDefaultBudget = 50'000'000;

// Z^n with a positive definite Gram matrix. The exact rational Gram is kept
// whenever the lattice came from exact data; gram() is always available.
class EuclideanLattice {
 public:
  static EuclideanLattice from_rational(const Matrix<Q>& gram);
  static EuclideanLattice from_double(const std::vector<double>& gram, int n);

  int rank() const { return n_; }
  double gram(int i, int j) const { return g_[i * n_ + j]; }
  const std::vector<double>& gram() const { return g_; }
  const std::optional<Matrix<Q>>& exact_gram() const { return exact_; }

  double log_det() const { return log_det_; }
  double log_covol() const { return 0.5 * log_det_; }
  double adeg() const { return -log_covol(); }
  double norm2(const long* x) const;

  EuclideanLattice dual() const;
  EuclideanLattice scaled(double s) const;  // gram * s^2

  // Upper triangular Cholesky factor R with gram = R^T R (row-major).
  const std::vector<double>& cholesky() const { return chol_; }

 private:
  EuclideanLattice() = default;
  void factor();
  int n_ = 0;
  std::vector<double> g_;
  std::vector<double> chol_;
  std::optional<Matrix<Q>> exact_;
  double log_det_ = 0;
};

// Points x in Z^n with x^T G x <= r2 (plus a relative safety margin, so every
// point of the closed ball is visited; a few just outside may be visited too).
namespace enumeration {

struct Stats {
  long long points = 0;
};

using Visitor = std::function<void(const long* x, double q)>;

// Single recursion over the whole ball. Reference implementation.
Stats enumerate_serial(const EuclideanLattice& L, double r2, const Visitor& visit,
                       long long budget = kDefaultBudget);

// Rough point count of the ball, used to refuse oversized jobs up front.
double estimate_points(const EuclideanLattice& L, double r2);

// Outermost coordinate split into slices processed with OpenMP. Each slice
// owns an accumulator produced by make(); results come back in slice order
// so any reduction done by the caller is deterministic.
template <class Acc>
std::vector<Acc> enumerate_slices(const EuclideanLattice& L, double r2,
                                  const std::function<Acc()>& make,
                                  const std::function<void(Acc&, const long*, double)>& visit,
                                  long long budget = kDefaultBudget);

}  // namespace enumeration

// Gaussian mass sum_{v} exp(-pi |v|^2) over the ball of squared radius r2.
double gaussian_sum_serial(const EuclideanLattice& L, double r2, long long budget = kDefaultBudget);
double gaussian_sum_parallel(const EuclideanLattice& L, double r2, long long budget = kDefaultBudget);

// Banaszczyk: for c >= 1/sqrt(2 pi), rho(L \ c sqrt(n) B) <= eps(c) rho(L)
// with eps(c) = (c sqrt(2 pi e) exp(-pi c^2))^n.
double banaszczyk_eps(int n, double c);

struct ThetaReport {
  double h0 = 0, h1 = 0, adeg = 0;
  double truncation_radius = 0;
  double tail_bound = 0;  // bound on the neglected mass, for both sums
  long long points = 0;
};

struct ThetaOptions {
  double tail_target = 1e-13;
  long long budget = kDefaultBudget;
  bool parallel = true;
};

// h0 with a certified absolute tail below opt.tail_target; returns
// (h0, radius, tail bound, points enumerated).
struct H0Result {
  double h0 = 0, radius = 0, tail = 0;
  long long points = 0;
};
H0Result theta_h0(const EuclideanLattice& L, const ThetaOptions& opt = {});
ThetaReport theta_invariants(const EuclideanLattice& L, const ThetaOptions& opt = {});

}  // namespace alk

#include "alk/lattice_impl.hpp"
