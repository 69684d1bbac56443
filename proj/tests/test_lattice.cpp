#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "alk/error.hpp"
#include "alk/lattice.hpp"
#include "alk/oracles.hpp"
#include "doctest.h"

using namespace alk;

namespace {

Matrix<Q> gram1(long a) {
  Matrix<Q> g(1, 1, Q(a));
  return g;
}

using alk::oracle::random_gram;

}  // namespace

TEST_CASE("theta of Z and 2Z") {
  double direct = 0;
  for (int k = -10; k <= 10; ++k) direct += std::exp(-std::numbers::pi * k * k);
  auto r = theta_invariants(EuclideanLattice::from_rational(gram1(1)));
  CHECK(r.h0 == doctest::Approx(std::log(direct)).epsilon(1e-14));
  CHECK(r.h0 == doctest::Approx(0.08290).epsilon(1e-4));
  CHECK(std::fabs(r.h0 - r.h1) < 1e-13);
  CHECK(r.tail_bound < 1e-12);
  auto r2 = theta_invariants(EuclideanLattice::from_rational(gram1(4)));
  CHECK(std::fabs(r2.h0 - r2.h1 + std::log(2.0)) < 1e-12);
}

TEST_CASE("unimodular lattices are self dual") {
  Matrix<Q> g(2, 2, Q(0));
  g(0, 0) = 2;
  g(0, 1) = g(1, 0) = 1;
  g(1, 1) = 1;  // det 1
  auto r = theta_invariants(EuclideanLattice::from_rational(g));
  CHECK(std::fabs(r.h0 - r.h1) < 1e-12);
}

TEST_CASE("non positive definite grams are rejected") {
  Matrix<Q> g(2, 2, Q(1));
  CHECK_THROWS_AS(EuclideanLattice::from_rational(g), InputError);
  g(0, 1) = 2;
  CHECK_THROWS_AS(EuclideanLattice::from_rational(g), InputError);
  CHECK_THROWS_AS(EuclideanLattice::from_double({1, 0, 0, -1}, 2), InputError);
}

TEST_CASE("enumeration matches a naive box scan") {
  std::mt19937_64 rng(1);
  for (int it = 0; it < 30; ++it) {
    int n = 1 + it % 3;
    auto L = EuclideanLattice::from_rational(random_gram(n, rng));
    double r2 = 4.0 + it % 5;
    std::set<std::vector<long>> got;
    enumeration::enumerate_serial(L, r2, [&](const long* x, double) {
      got.insert(std::vector<long>(x, x + n));
    });
    // every coordinate of a point in the ball is bounded by sqrt(r2 * (G^-1)_ii)
    auto inv = inverse(*L.exact_gram(), Q(0), Q(1));
    std::vector<long> B(n);
    for (int i = 0; i < n; ++i) B[i] = static_cast<long>(std::ceil(std::sqrt(r2 * inv(i, i).get_d()))) + 1;
    std::set<std::vector<long>> want;
    std::vector<long> x(n);
    std::function<void(int)> rec = [&](int k) {
      if (k == n) {
        if (L.norm2(x.data()) <= r2 * (1 + 1e-12)) want.insert(x);
        return;
      }
      for (long v = -B[k]; v <= B[k]; ++v) {
        x[k] = v;
        rec(k + 1);
      }
    };
    rec(0);
    for (const auto& p : want) CHECK(got.count(p) == 1);
    for (const auto& p : got) CHECK(L.norm2(p.data()) <= r2 * (1 + 1e-6));
  }
}

TEST_CASE("serial and parallel kernels agree") {
  std::mt19937_64 rng(2);
  for (int it = 0; it < 20; ++it) {
    auto L = EuclideanLattice::from_rational(random_gram(1 + it % 4, rng));
    double a = gaussian_sum_serial(L, 30.0), b = gaussian_sum_parallel(L, 30.0);
    CHECK(std::fabs(a - b) < 1e-13 * a);
    ThetaOptions s;
    s.parallel = false;
    CHECK(std::fabs(theta_h0(L, s).h0 - theta_h0(L).h0) < 1e-13);
  }
}

TEST_CASE("Poisson Riemann Roch on random lattices") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 25; ++it) {
    auto L = EuclideanLattice::from_rational(random_gram(1 + it % 3, rng));
    auto r = theta_invariants(L);
    CHECK(r.tail_bound < 1e-12);
    CHECK(r.h0 >= 0);
    CHECK(std::fabs(r.h0 - r.h1 - r.adeg) < 1e-9);
  }
}

TEST_CASE("theta grows with the lattice scale") {
  auto L = EuclideanLattice::from_rational(gram1(3));
  double prev = theta_h0(L.scaled(2.0)).h0;
  for (double s : {1.5, 1.0, 0.7, 0.3}) {
    double h = theta_h0(L.scaled(s)).h0;
    CHECK(h > prev);
    prev = h;
  }
}

TEST_CASE("budget is enforced") {
  auto L = EuclideanLattice::from_double({1e-6, 0, 0, 1e-6}, 2);
  CHECK_THROWS_AS(gaussian_sum_serial(L, 100.0, 1000), BudgetExceeded);
  CHECK_THROWS_AS(gaussian_sum_parallel(L, 100.0, 1000), BudgetExceeded);
}

TEST_CASE("banaszczyk eps") {
  CHECK(banaszczyk_eps(1, 0.1) == 1.0);
  CHECK(banaszczyk_eps(2, 3.0) < 1e-10);
  CHECK(banaszczyk_eps(3, 3.0) < banaszczyk_eps(2, 3.0));
}
