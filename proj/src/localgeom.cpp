#include "alk/localgeom.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <set>

#include "alk/error.hpp"

namespace alk {

QMat qmat(std::size_t r, std::size_t c) { return QMat(r, c, Q(0)); }

QMat qmat(const std::vector<std::vector<Q>>& rows) {
  QMat m(rows.size(), rows.at(0).size(), Q(0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InputError("ragged matrix");
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

Q qdet(const QMat& m) { return det(m, Q(0), Q(1)); }

namespace {

KMat lift(const QuadField& K, const QMat& m) {
  return m.map([&](const Q& q) { return K.elem(q); });
}

QMat lower(const KMat& m) {
  return m.map([](const QFElem& x) {
    if (!x.is_rational()) throw std::logic_error("matrix expected to be rational: " + x.str());
    return x.a();
  });
}

KMat kinv(const QuadField& K, const KMat& m) { return inverse(m, K.zero(), K.one()); }

// coordinates (u, v) of y = u + v alpha
std::pair<Q, Q> alpha_coords(const QFElem& y, const QFElem& alpha) {
  if (alpha.b() == 0) throw InputError("alpha must generate K");
  Q v = y.b() / alpha.b();
  return {y.a() - v * alpha.a(), v};
}

bool pint(const Q& q, const Z& p) { return q == 0 || vp(q, p) >= 0; }

bool in_order(const QFElem& y, const QFElem& alpha, const Z& p) {
  auto [u, v] = alpha_coords(y, alpha);
  return pint(u, p) && pint(v, p);
}

long squarefree_part(const Q& x) {
  Z n = x.get_num() * x.get_den();
  long s = n < 0 ? -1 : 1;
  Z part = 1;
  for (const auto& [p, e] : factor(n))
    if (e % 2) part *= p;
  if (!part.fits_slong_p()) throw InputError("discriminant too large");
  return s * part.get_si();
}

}  // namespace

LocalQuadExt different_and_orders(const QuadField& K, const Z& p, const Z& f) {
  if (f == 0) throw InputError("conductor must be nonzero");
  if (K.is_rational()) throw InputError("need a quadratic extension");
  LocalQuadExt E;
  E.order = QuadOrder{K, abs(f)};
  E.p = p;
  E.type = splitting_type(K, p);
  E.alpha = E.order.alpha();
  E.delta = E.order.different();
  int v = vp(E.delta.norm(), p);
  E.disc_local = ipow(p, v);
  return E;
}

TorusData TorusData::from_order(const QuadOrder& O) {
  QFElem a = O.alpha();
  QMat X = qmat({{Q(0), Q(1)}, {-a.norm(), a.trace()}});
  return from_generator(X);
}

TorusData TorusData::from_generator(const QMat& X) {
  if (X.rows() != 2 || X.cols() != 2) throw InputError("torus generator must be 2x2");
  Q tr = X(0, 0) + X(1, 1), dt = qdet(X);
  Q disc = tr * tr - 4 * dt;
  if (disc == 0 || (disc > 0 && is_square(disc)))
    throw InputError("characteristic polynomial of the generator splits over Q");
  long D = squarefree_part(disc);
  QuadField K(D);
  Q s2 = disc / Q(D);
  Q s(isqrt(s2.get_num()), isqrt(s2.get_den()));
  QFElem alpha = K.elem(tr / 2, s / 2);
  TorusData T{K, X, alpha, {}, {}};
  T.cinv = KMat(2, 2, K.zero());
  T.cinv(0, 0) = T.cinv(0, 1) = K.elem(X(0, 1));
  T.cinv(1, 0) = alpha - K.elem(X(0, 0));
  T.cinv(1, 1) = alpha.conj() - K.elem(X(0, 0));
  T.c = kinv(K, T.cinv);
  return T;
}

QMat TorusData::element(const Q& x, const Q& y) const {
  QMat m = X;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) m(i, j) = y * X(i, j) + (i == j ? x : Q(0));
  return m;
}

QMat TorusData::normalizer_rep() const {
  KMat w(2, 2, K.zero());
  w(0, 1) = w(1, 0) = K.one();
  return lower(cinv * w * c);
}

LocalCoords local_coords(const TorusData& T, const QMat& gamma) {
  KMat m = T.c * lift(T.K, gamma) * T.cinv;
  LocalCoords b{m(0, 0), m(0, 1)};
  if (m(1, 0) != b.b2.conj() || m(1, 1) != b.b1.conj())
    throw std::logic_error("conjugate does not have the local coordinate pattern");
  return b;
}

QMat reconstruct(const TorusData& T, const LocalCoords& b) {
  KMat m(2, 2, T.K.zero());
  m(0, 0) = b.b1;
  m(0, 1) = b.b2;
  m(1, 0) = b.b2.conj();
  m(1, 1) = b.b1.conj();
  return lower(T.cinv * m * T.c);
}

Q psi_invariant(const TorusData& T, const QMat& gamma) {
  Q d = qdet(gamma);
  if (d == 0) throw InputError("gamma must be invertible");
  return local_coords(T, gamma).b2.norm() / d;
}

ArchCoords arch_coords(const TorusData& T, const QMat& gamma) {
  using C = std::complex<double>;
  using M2 = std::array<std::array<C, 2>, 2>;
  auto mul = [](const M2& x, const M2& y) {
    M2 r{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return r;
  };
  auto inv = [](const M2& x) {
    C d = x[0][0] * x[1][1] - x[0][1] * x[1][0];
    return M2{{{x[1][1] / d, -x[0][1] / d}, {-x[1][0] / d, x[0][0] / d}}};
  };
  const double t = Q(T.X(0, 0) + T.X(1, 1)).get_d() / 2;
  double f[2][2];
  double fro = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      f[i][j] = T.X(i, j).get_d() - (i == j ? t : 0.0);
      fro += f[i][j] * f[i][j];
    }
  fro = std::sqrt(fro);
  for (auto& row : f)
    for (auto& v : row) v /= fro;
  // pre-conjugation h so that the upper right entry of h f h^-1 is >= 1/2
  M2 h{{{1, 0}, {0, 1}}};
  if (std::fabs(f[0][1]) < 0.5) {
    if (std::fabs(f[1][0]) >= 0.5) {
      h = M2{{{0, 1}, {1, 0}}};
    } else {
      double s = (f[0][0] >= 0 ? 1.0 : -1.0) * (f[0][1] >= 0 ? 1.0 : -1.0);
      h = M2{{{1, -s}, {0, 1}}};
    }
  }
  M2 fm{{{f[0][0], f[0][1]}, {f[1][0], f[1][1]}}};
  M2 fp = mul(mul(h, fm), inv(h));
  const double a = fp[0][0].real(), b = fp[0][1].real(), c = fp[1][0].real();
  const double a2 = a * a + b * c;
  ArchCoords out;
  out.split = a2 > 0;
  out.alpha = out.split ? C(std::sqrt(a2), 0) : C(0, std::sqrt(-a2));
  out.disc = 1 / (4 * std::norm(out.alpha));
  out.b_entry = std::fabs(b);
  M2 g{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) g[i][j] = gamma(i, j).get_d();
  const int places = out.split ? 2 : 1;
  M2 m[2];
  for (int k = 0; k < places; ++k) {
    C al = k == 0 ? out.alpha : -out.alpha;
    M2 ci{{{b, b}, {al - a, -al - a}}};
    M2 cw = mul(inv(ci), h);
    m[k] = mul(mul(cw, g), inv(cw));
    out.b1[k] = m[k][0][0];
    out.b2[k] = m[k][0][1];
  }
  const double dt = qdet(gamma).get_d();
  double err = 0;
  if (out.split) {
    err = std::max({std::abs(m[0][1][0] - out.b2[1]), std::abs(m[0][1][1] - out.b1[1]),
                    std::abs(m[1][1][0] - out.b2[0]), std::abs(m[1][1][1] - out.b1[0])});
    out.psi = (out.b2[0] * out.b2[1]).real() / dt;
  } else {
    err = std::max(std::abs(m[0][1][0] - std::conj(out.b2[0])),
                   std::abs(m[0][1][1] - std::conj(out.b1[0])));
    out.psi = std::norm(out.b2[0]) / dt;
  }
  out.reconstruction_error = err;
  return out;
}

bool in_gl2_zp(const QMat& g, const Z& p) {
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (!pint(g(i, j), p)) return false;
  Q d = qdet(g);
  return d != 0 && vp(d, p) == 0;
}

IntegralityReport integrality_checks(const TorusData& T, const QuadOrder& O, const QMat& gamma,
                                     const Z& p) {
  IntegralityReport r;
  LocalCoords b = local_coords(T, gamma);
  const QFElem alpha = O.alpha(), delta = O.different();
  r.b_in_inverse_different = in_order(delta * b.b1, alpha, p) && in_order(delta * b.b2, alpha, p);
  r.difference_integral = in_order(b.b1 - b.b2, alpha, p);
  r.traces_integral = pint(b.b1.trace(), p) && pint(b.b2.trace(), p);
  Q n = b.b1.norm() - b.b2.norm();
  r.det_unit = n != 0 && vp(n, p) == 0;
  r.gamma_integral = in_gl2_zp(gamma, p);
  return r;
}

PsiBound psi_local_bound(const TorusData& T, const LocalQuadExt& E, const QMat& k,
                         const Q& alpha_abs, long tau) {
  Q psi = psi_invariant(T, k);
  auto absp = [&](const Q& x) { return x == 0 ? Q(0) : qpow(Q(E.p), -vp(x, E.p)); };
  PsiBound out;
  out.abs_psi = absp(psi);
  out.abs_one_plus_psi = absp(psi + 1);
  out.bound = Q(E.disc_local) * qpow(alpha_abs, -2 * tau);
  return out;
}

long orbital_measure_split(const Q& psi, const Z& p) {
  if (psi == 0 || psi == -1) throw InputError("psi in {0, -1}: normalizer case");
  long v1 = vp(psi, p), v2 = vp(Q(psi + 1), p);
  return std::max(0L, v1 + 1) * std::max(0L, v2 + 1);
}

int orbital_measure_field(const LocalQuadExt& E, const QFElem& b, const QFElem& c) {
  return in_order(E.delta * b * c.conj(), E.alpha, E.p) ? 1 : 0;
}

double orbital_measure_arch(double psi, double r, double disc, bool complex_place) {
  if (psi == 0 || psi == -1) throw InputError("psi in {0, -1}: normalizer case");
  const double logR2 = 2 * std::log(r) + std::log(disc);
  const double f = complex_place ? 2 * std::numbers::pi : 2.0;
  double l1 = std::max(0.0, -std::log(std::fabs(psi)) + logR2);
  double l2 = std::max(0.0, -std::log(std::fabs(1 + psi)) + logR2);
  return f * l1 * f * l2;
}

int norm_index(const QuadOrder& O, const Z& p) {
  const QFElem a = O.alpha();
  if (p != 2) return vp(O.disc(), p) == 0 ? 1 : 2;
  // units of Z_2 modulo squares are seen modulo 8
  const Z t = Z(a.trace()), n = Z(a.norm());
  std::set<long> image;
  for (long x = 0; x < 8; ++x)
    for (long y = 0; y < 8; ++y) {
      Z v = x * x + t * x * y + n * y * y;
      Z r = ((v % 8) + 8) % 8;
      if (r % 2 == 1) image.insert(r.get_si());
    }
  return 4 / static_cast<int>(image.size());
}

bool p_integral(const QuadField& F, const QFElem& x, const Z& p) {
  auto [u, v] = F.omega_coords(x);
  return pint(u, p) && pint(v, p);
}

QMat embed_gl2_over_f(const QuadField& F, const std::vector<QFElem>& e) {
  if (e.size() != 4) throw InputError("need four entries");
  const QFElem w = F.omega();
  QMat m = qmat(4, 4);
  for (int bi = 0; bi < 2; ++bi)
    for (int bj = 0; bj < 2; ++bj) {
      const QFElem& x = e[bi * 2 + bj];
      // rows: coordinates of 1 * x and omega * x in (1, omega)
      auto r0 = F.omega_coords(x), r1 = F.omega_coords(w * x);
      m(2 * bi, 2 * bj) = r0.first;
      m(2 * bi, 2 * bj + 1) = r0.second;
      m(2 * bi + 1, 2 * bj) = r1.first;
      m(2 * bi + 1, 2 * bj + 1) = r1.second;
    }
  return m;
}

BlockCoords block_coordinates_gl4(const QMat& gamma, const QuadField& F, const Z& p) {
  if (gamma.rows() != 4 || gamma.cols() != 4) throw InputError("need a 4x4 matrix");
  if (qdet(gamma) == 0) throw InputError("gamma must be invertible");
  const QFElem alpha = F.omega(), z = F.zero(), one = F.one();
  KMat ci(2, 2, z);
  ci(0, 0) = ci(0, 1) = one;
  ci(1, 0) = alpha;
  ci(1, 1) = alpha.conj();
  KMat c = kinv(F, ci);
  KMat dc(4, 4, z);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) dc(i, j) = dc(i + 2, j + 2) = c(i, j);
  KMat P(4, 4, z);
  const int perm[4] = {0, 2, 1, 3};
  for (int i = 0; i < 4; ++i) P(i, perm[i]) = one;
  BlockCoords out;
  out.c1 = P * dc;
  KMat m = out.c1 * lift(F, gamma) * kinv(F, out.c1);
  out.A1 = KMat(2, 2, z);
  out.A2 = KMat(2, 2, z);
  out.pattern_ok = true;
  const QFElem delta = alpha - alpha.conj();
  out.delta_integral = out.difference_integral = true;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      out.A1(i, j) = m(i, j);
      out.A2(i, j) = m(i, j + 2);
      if (m(i + 2, j) != m(i, j + 2).conj() || m(i + 2, j + 2) != m(i, j).conj())
        out.pattern_ok = false;
      out.delta_integral = out.delta_integral && p_integral(F, delta * out.A1(i, j), p) &&
                           p_integral(F, delta * out.A2(i, j), p);
      out.difference_integral =
          out.difference_integral && p_integral(F, out.A1(i, j) - out.A2(i, j), p);
    }
  return out;
}

}  // namespace alk
