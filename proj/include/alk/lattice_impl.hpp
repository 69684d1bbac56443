#pragma once

#include <atomic>
#include <cmath>
#include <string>

#include "alk/error.hpp"

namespace alk {
namespace enumeration {
namespace detail {

// Squared radius actually walked: a hair above r2 so rounding in the
// Cholesky partial sums never drops a boundary point.
inline double padded(double r2) { return r2 * (1 + 1e-9) + 1e-12; }

// Fix x[level], ..., x[0] given x[level+1 ..] and the squared length
// contributed by those outer levels.
template <class Fn>
void walk(const double* R, int n, double r2, int level, long* x, double partial, Fn& f,
          long long& count, long long budget) {
  const double rii = R[level * n + level];
  double s = 0;
  for (int j = level + 1; j < n; ++j) s += R[level * n + j] * static_cast<double>(x[j]);
  const double c = -s / rii;
  const double rem = r2 - partial;
  if (rem < 0) return;
  const double w = std::sqrt(rem) / rii;
  const long lo = static_cast<long>(std::ceil(c - w)), hi = static_cast<long>(std::floor(c + w));
  for (long k = lo; k <= hi; ++k) {
    x[level] = k;
    const double t = rii * (static_cast<double>(k) - c);
    const double p = partial + t * t;
    if (p > r2) continue;
    if (level == 0) {
      if (++count > budget)
        throw BudgetExceeded("enumeration visited more than " + std::to_string(budget) + " points");
      f(static_cast<const long*>(x), p);
    } else {
      walk(R, n, r2, level - 1, x, p, f, count, budget);
    }
  }
}

}  // namespace detail

template <class Acc>
std::vector<Acc> enumerate_slices(const EuclideanLattice& L, double r2,
                                  const std::function<Acc()>& make,
                                  const std::function<void(Acc&, const long*, double)>& visit,
                                  long long budget) {
  const int n = L.rank();
  if (estimate_points(L, r2) > static_cast<double>(budget))
    throw BudgetExceeded("ball of squared radius " + std::to_string(r2) + " holds about " +
                         std::to_string(estimate_points(L, r2)) + " points, budget " +
                         std::to_string(budget));
  const double* R = L.cholesky().data();
  const double r2p = detail::padded(r2);
  const double rtop = R[(n - 1) * n + (n - 1)];
  const long B = static_cast<long>(std::floor(std::sqrt(r2p) / rtop));
  const long slices = 2 * B + 1;
  std::vector<Acc> out(static_cast<std::size_t>(slices));
  for (auto& a : out) a = make();
  std::atomic<long long> total{0};
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < slices; ++s) {
    if (failed.load()) continue;
    std::vector<long> x(static_cast<std::size_t>(n), 0);
    x[n - 1] = s - B;
    const double t = rtop * static_cast<double>(x[n - 1]);
    const double p = t * t;
    if (p > r2p) continue;
    Acc& acc = out[static_cast<std::size_t>(s)];
    long long count = 0;
    auto f = [&](const long* v, double q) { visit(acc, v, q); };
    try {
      if (n == 1) {
        ++count;
        f(x.data(), p);
      } else {
        detail::walk(R, n, r2p, n - 2, x.data(), p, f, count, budget);
      }
    } catch (const BudgetExceeded&) {
      failed = true;
    }
    if (total.fetch_add(count) + count > budget) failed = true;
  }
  if (failed)
    throw BudgetExceeded("enumeration visited more than " + std::to_string(budget) + " points");
  return out;
}

}  // namespace enumeration
}  // namespace alk
