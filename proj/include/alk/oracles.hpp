#pragma once

// Samplers and brute-force oracles shared by the unit tests and the
// acceptance harness. Oracles here avoid the code paths they check.

#include <cmath>
#include <random>

#include "alk/arakelov.hpp"
#include "alk/boxcount.hpp"
#include "alk/error.hpp"
#include "alk/localgeom.hpp"

namespace alk::oracle {

inline QuadField field_of(long d) { return d == 1 ? QuadField::rationals() : QuadField(d); }

// Random positive definite rational Gram of rank n, entries in [-5, 5]
// (off-diagonal halves allowed), diagonal bumped by one.
inline Matrix<Q> random_gram(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(-5, 5);
  for (;;) {
    Matrix<Q> g(n, n, Q(0));
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        Q v(c(rng), (j == i) ? 1 : 2);
        v.canonicalize();
        if (i == j) v = abs(v) + 1;
        g(i, j) = g(j, i) = v;
      }
    try {
      EuclideanLattice::from_rational(g);
      return g;
    } catch (const InputError&) {
    }
  }
}

// Product of small prime powers, a rational twist and random radii in [1/4, 4].
inline HermitianLineBundle random_bundle(const QuadField& F, std::mt19937_64& rng, int spread = 1) {
  std::uniform_int_distribution<int> e(-spread, spread), pick(0, 4), num(1, 8), den(1, 4);
  FracIdeal I = FracIdeal::unit(F);
  for (long p : {2, 3, 5, 7}) {
    auto pl = places_above(F, Z(p));
    const Place& v = pl[pick(rng) % pl.size()];
    I = I * FracIdeal::prime(F, v).pow(e(rng));
  }
  std::vector<Q> r(F.degree());
  for (auto& q : r) q = Q(num(rng), den(rng) * 2);
  for (auto& q : r) q.canonicalize();
  if (F.degree() == 2 && !F.is_real()) r[1] = r[0];
  return {I, r};
}

inline RadiusFamily random_radius_family(const QuadField& F, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> k(-1, 1), num(1, 12), den(1, 3), pick(0, 3);
  RadiusFamily r = RadiusFamily::unit(F);
  for (long p : {2, 3, 5}) {
    auto pl = places_above(F, Z(p));
    const Place& v = pl[pick(rng) % pl.size()];
    int e = k(rng);
    if (e != 0) r.set_finite(v, qpow(Q(v.q()), e));
  }
  for (auto& x : r.infinite) {
    x = Q(num(rng), den(rng));
    x.canonicalize();
  }
  return r;
}

// -r <= a + b sqrt d <= r, decided as two signs of u + v sqrt d.
inline bool within(const Q& a, const Q& b, long d, const Q& r) {
  auto nonneg = [d](const Q& u, const Q& v) {
    if (v == 0) return u >= 0;
    if (u >= 0 && v >= 0) return true;
    if (u <= 0 && v <= 0) return false;
    Q du = u * u, dv = Q(d) * v * v;
    return u > 0 ? du >= dv : dv >= du;
  };
  return nonneg(r - a, -b) && nonneg(r + a, b);
}

// Box count by a double loop over ideal-basis coefficients; the bounds come
// from inverting the real coordinate matrix of the basis.
inline long long naive_box_count(const RadiusFamily& rf) {
  HermitianLineBundle L = line_bundle_from_radii(rf);
  const QuadField& F = rf.field;
  auto B = L.ideal.basis();
  if (F.is_rational()) {
    Q r = rf.infinite[0], e = abs(B[0].a());
    long k = static_cast<long>(std::floor(Q(r / e).get_d() + 1e-9));
    while (Q(k + 1) * e <= r) ++k;
    while (Q(k) * e > r) --k;
    return 2 * k + 1;
  }
  double m[2][2];
  double bound[2];
  double sd = std::sqrt(std::fabs(static_cast<double>(F.d())));
  if (F.is_real()) {
    for (int j = 0; j < 2; ++j) {
      m[0][j] = B[j].a().get_d() + B[j].b().get_d() * sd;
      m[1][j] = B[j].a().get_d() - B[j].b().get_d() * sd;
    }
    bound[0] = rf.infinite[0].get_d();
    bound[1] = rf.infinite[1].get_d();
  } else {
    for (int j = 0; j < 2; ++j) {
      m[0][j] = B[j].a().get_d();
      m[1][j] = B[j].b().get_d() * sd;
    }
    bound[0] = bound[1] = std::sqrt(rf.infinite[0].get_d());
  }
  double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  double inv[2][2] = {{m[1][1] / det, -m[0][1] / det}, {-m[1][0] / det, m[0][0] / det}};
  long X[2];
  for (int i = 0; i < 2; ++i)
    X[i] = static_cast<long>(std::ceil(std::fabs(inv[i][0]) * bound[0] + std::fabs(inv[i][1]) * bound[1])) + 1;
  long long count = 0;
  for (long x = -X[0]; x <= X[0]; ++x)
    for (long y = -X[1]; y <= X[1]; ++y) {
      QFElem s = B[0] * F.elem(x) + B[1] * F.elem(y);
      bool ok;
      if (F.is_real())
        ok = within(s.a(), s.b(), F.d(), rf.infinite[0]) &&
             within(s.a(), -s.b(), F.d(), rf.infinite[1]);
      else
        ok = s.norm() <= rf.infinite[0];
      count += ok;
    }
  return count;
}

inline QMat random_rational(std::mt19937_64& rng, std::size_t n, const std::vector<long>& dens) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<std::size_t> pick(0, dens.size() - 1);
  for (;;) {
    QMat m = qmat(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) = Q(num(rng), dens[pick(rng)]);
        m(i, j).canonicalize();
      }
    if (qdet(m) != 0) return m;
  }
}

// integer matrix with determinant prime to p
inline QMat random_glzp(std::mt19937_64& rng, std::size_t n, long p) {
  for (;;) {
    QMat m = random_rational(rng, n, {1});
    if (vp(qdet(m), Z(p)) == 0) return m;
  }
}

inline QMat random_int(std::mt19937_64& rng, std::size_t n = 4, int lo = -5, int hi = 5) {
  std::uniform_int_distribution<int> u(lo, hi);
  for (;;) {
    QMat m = qmat(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) = u(rng);
    if (qdet(m) != 0) return m;
  }
}

// M = [[x1, x2], [y2, y1]] in split coordinates: number of (b, c, d) modulo
// the diagonal with diag(1, p^b) M diag(p^c, p^d) in GL2(Z_p).
inline long split_orbital_oracle(const Q& x1, const Q& x2, const Q& y1, const Q& y2, long p) {
  Q det = x1 * y1 - x2 * y2;
  long n = 0;
  const int W = 25;
  for (int c = -W; c <= W; ++c)
    for (int d = -W; d <= W; ++d) {
      int b = -vp(det, Z(p)) - c - d;
      if (vp(x1, Z(p)) + c >= 0 && vp(x2, Z(p)) + d >= 0 && vp(y2, Z(p)) + b + c >= 0 &&
          vp(y1, Z(p)) + b + d >= 0)
        ++n;
    }
  return n;
}

}  // namespace alk::oracle
