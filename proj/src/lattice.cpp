#include "alk/lattice.hpp"

#include <cmath>
#include <numbers>

namespace alk {

EuclideanLattice EuclideanLattice::from_rational(const Matrix<Q>& gram) {
  const std::size_t n = gram.rows();
  if (n == 0 || gram.cols() != n) throw InputError("Gram matrix must be square and nonempty");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (gram(i, j) != gram(j, i)) throw InputError("Gram matrix is not symmetric");
  for (std::size_t k = 1; k <= n; ++k) {
    Matrix<Q> m(k, k, Q(0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m(i, j) = gram(i, j);
    if (det(m, Q(0), Q(1)) <= 0)
      throw InputError("Gram matrix is not positive definite (leading minor " + std::to_string(k) +
                       ")");
  }
  EuclideanLattice L;
  L.n_ = static_cast<int>(n);
  L.g_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) L.g_[i * n + j] = gram(i, j).get_d();
  L.exact_ = gram;
  L.factor();
  L.log_det_ = log_abs(det(gram, Q(0), Q(1)));
  return L;
}

EuclideanLattice EuclideanLattice::from_double(const std::vector<double>& gram, int n) {
  if (n <= 0 || gram.size() != static_cast<std::size_t>(n * n))
    throw InputError("Gram matrix must be square and nonempty");
  EuclideanLattice L;
  L.n_ = n;
  L.g_ = gram;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double a = gram[i * n + j], b = gram[j * n + i];
      if (std::fabs(a - b) > 1e-12 * (std::fabs(a) + std::fabs(b) + 1))
        throw InputError("Gram matrix is not symmetric");
      L.g_[i * n + j] = L.g_[j * n + i] = 0.5 * (a + b);
    }
  L.factor();
  double ld = 0;
  for (int i = 0; i < n; ++i) ld += 2 * std::log(L.chol_[i * n + i]);
  L.log_det_ = ld;
  return L;
}

void EuclideanLattice::factor() {
  const int n = n_;
  chol_.assign(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    double s = g_[i * n + i];
    for (int k = 0; k < i; ++k) s -= chol_[k * n + i] * chol_[k * n + i];
    if (!(s > 0)) throw InputError("Gram matrix is not positive definite");
    const double rii = std::sqrt(s);
    chol_[i * n + i] = rii;
    for (int j = i + 1; j < n; ++j) {
      double t = g_[i * n + j];
      for (int k = 0; k < i; ++k) t -= chol_[k * n + i] * chol_[k * n + j];
      chol_[i * n + j] = t / rii;
    }
  }
}

double EuclideanLattice::norm2(const long* x) const {
  double s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      s += g_[i * n_ + j] * static_cast<double>(x[i]) * static_cast<double>(x[j]);
  return s;
}

EuclideanLattice EuclideanLattice::dual() const {
  if (exact_) return from_rational(inverse(*exact_, Q(0), Q(1)));
  Matrix<double> m(n_, n_, 0.0);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = g_[i * n_ + j];
  Matrix<double> inv = inverse(m, 0.0, 1.0);
  std::vector<double> g(static_cast<std::size_t>(n_ * n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) g[i * n_ + j] = inv(i, j);
  return from_double(g, n_);
}

EuclideanLattice EuclideanLattice::scaled(double s) const {
  std::vector<double> g = g_;
  for (auto& v : g) v *= s * s;
  return from_double(g, n_);
}

namespace enumeration {

Stats enumerate_serial(const EuclideanLattice& L, double r2, const Visitor& visit,
                       long long budget) {
  if (estimate_points(L, r2) > static_cast<double>(budget))
    throw BudgetExceeded("ball of squared radius " + std::to_string(r2) + " exceeds budget " +
                         std::to_string(budget));
  const int n = L.rank();
  std::vector<long> x(static_cast<std::size_t>(n), 0);
  Stats st;
  auto f = [&](const long* v, double q) { visit(v, q); };
  detail::walk(L.cholesky().data(), n, detail::padded(r2), n - 1, x.data(), 0.0, f, st.points,
               budget);
  return st;
}

double estimate_points(const EuclideanLattice& L, double r2) {
  const int n = L.rank();
  const double r = std::sqrt(std::max(r2, 0.0));
  // volume of the ball over the covolume, plus a boundary allowance
  double lv = n / 2.0 * std::log(std::numbers::pi) - std::lgamma(n / 2.0 + 1) + n * std::log(r + 1) -
              L.log_covol();
  return std::exp(lv) + 1;
}

}  // namespace enumeration

namespace {

// Mass of the nonzero vectors; the origin's 1 is added back through log1p
// so tiny theta invariants keep their digits.
struct Mass {
  long double sum = 0;
  long long points = 0;
};

inline long double weight(double q) { return q > 0 ? std::exp(-std::numbers::pi * q) : 0.0L; }

}  // namespace

double gaussian_sum_serial(const EuclideanLattice& L, double r2, long long budget) {
  long double s = 0;
  enumeration::enumerate_serial(L, r2, [&](const long*, double q) { s += weight(q); }, budget);
  return static_cast<double>(1 + s);
}

double gaussian_sum_parallel(const EuclideanLattice& L, double r2, long long budget) {
  auto parts = enumeration::enumerate_slices<Mass>(
      L, r2, [] { return Mass{}; },
      [](Mass& m, const long*, double q) {
        m.sum += weight(q);
        ++m.points;
      },
      budget);
  long double s = 0;
  for (const auto& m : parts) s += m.sum;
  return static_cast<double>(1 + s);
}

double banaszczyk_eps(int n, double c) {
  const double pi = std::numbers::pi;
  if (c < 1 / std::sqrt(2 * pi)) return 1.0;
  return std::pow(c * std::sqrt(2 * pi * std::exp(1.0)) * std::exp(-pi * c * c), n);
}

H0Result theta_h0(const EuclideanLattice& L, const ThetaOptions& opt) {
  const int n = L.rank();
  // Start from the smallest c meeting the target with unit mass, then grow
  // until the tail is small both absolutely and against the nonzero mass
  // (so a sparse lattice still gets its first shells), or until the weights
  // at the radius underflow.
  double c = 1.0;
  while (banaszczyk_eps(n, c) > opt.tail_target) c += 0.05;
  for (int round = 0; round < 80; ++round, c *= 1.1) {
    const double eps = banaszczyk_eps(n, c);
    const double R = c * std::sqrt(static_cast<double>(n));
    long long pts = 0;
    double mass;
    if (opt.parallel) {
      auto parts = enumeration::enumerate_slices<Mass>(
          L, R * R, [] { return Mass{}; },
          [](Mass& m, const long*, double q) {
            m.sum += weight(q);
            ++m.points;
          },
          opt.budget);
      long double s = 0;
      for (const auto& m : parts) {
        s += m.sum;
        pts += m.points;
      }
      mass = static_cast<double>(s);
    } else {
      long double s = 0;
      auto st = enumeration::enumerate_serial(
          L, R * R, [&](const long*, double q) { s += weight(q); }, opt.budget);
      pts = st.points;
      mass = static_cast<double>(s);
    }
    const double tail = eps / (1 - eps) * (1 + mass);
    const bool underflow = std::numbers::pi * R * R > 700;
    if (tail < opt.tail_target && (tail < 1e-6 * mass || underflow))
      return {std::log1p(mass), R, tail, pts};
  }
  throw PrecisionError("theta tail bound did not reach the target");
}

ThetaReport theta_invariants(const EuclideanLattice& L, const ThetaOptions& opt) {
  H0Result a = theta_h0(L, opt);
  H0Result b = theta_h0(L.dual(), opt);
  ThetaReport r;
  r.h0 = a.h0;
  r.h1 = b.h0;
  r.adeg = L.adeg();
  r.truncation_radius = std::max(a.radius, b.radius);
  r.tail_bound = std::max(a.tail, b.tail);
  r.points = a.points + b.points;
  return r;
}

}  // namespace alk
