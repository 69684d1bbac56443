#include "alk/toralsets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "alk/error.hpp"
#include "alk/localgeom.hpp"

namespace alk {

namespace {

Z zmod(const Z& a, const Z& p) {
  Z r = a % p;
  if (r < 0) r += p;
  return r;
}

Z inv_mod(const Z& a, const Z& p) {
  Z r;
  mpz_invert(r.get_mpz_t(), Z(zmod(a, p)).get_mpz_t(), p.get_mpz_t());
  return r;
}

// Basis of the kernel of an integer matrix reduced mod p.
std::vector<std::vector<Z>> kernel_mod_p(std::vector<std::vector<Z>> m, const Z& p) {
  std::size_t n = m.size(), cols = m.at(0).size();
  for (auto& row : m)
    for (auto& x : row) x = zmod(x, p);
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < n; ++c) {
    std::size_t piv = r;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) continue;
    std::swap(m[piv], m[r]);
    Z inv = inv_mod(m[r][c], p);
    for (auto& x : m[r]) x = zmod(x * inv, p);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Z f = m[i][c];
      for (std::size_t j = 0; j < cols; ++j) m[i][j] = zmod(m[i][j] - f * m[r][j], p);
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  std::vector<std::vector<Z>> ker;
  std::set<int> pivots(pivot_col.begin(), pivot_col.end());
  for (std::size_t fc = 0; fc < cols; ++fc) {
    if (pivots.count(static_cast<int>(fc))) continue;
    std::vector<Z> v(cols, 0);
    v[fc] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = zmod(-m[i][fc], p);
    ker.push_back(v);
  }
  return ker;
}

RelElem scale_sum(const RelQuadExt& K, const std::vector<RelElem>& b, const std::vector<Z>& c,
                  const Z& p) {
  RelElem y{K.F.zero(), K.F.zero()};
  for (std::size_t i = 0; i < b.size(); ++i) {
    QFElem ci = K.F.elem(Q(c[i], p));
    y.A = y.A + b[i].A * ci;
    y.B = y.B + b[i].B * ci;
  }
  return y;
}

std::vector<std::vector<Z>> trace_gram(const RelQuadExt& K, const std::vector<RelElem>& b) {
  std::vector<std::vector<Z>> g(b.size(), std::vector<Z>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      Q t = K.trace(K.mul(b[i], b[j]));
      if (t.get_den() != 1) throw std::logic_error("trace of an integral element is not integral");
      g[i][j] = t.get_num();
    }
  return g;
}

}  // namespace

RelQuadExt RelQuadExt::make(const QuadField& F, const QFElem& delta) {
  if (delta.d() != F.d()) throw InputError("delta does not lie in F");
  if (delta.is_zero()) throw InputError("delta must be nonzero");
  if (sqrt_in(F, delta)) throw InputError("delta is a square in F: " + delta.str());
  return RelQuadExt{F, delta};
}

QFElem RelQuadExt::delta_normalized() const {
  Z L;
  mpz_lcm(L.get_mpz_t(), delta.a().get_den_mpz_t(), delta.b().get_den_mpz_t());
  Q a = delta.a() * L * L, b = delta.b() * L * L;
  Z g;
  mpz_gcd(g.get_mpz_t(), a.get_num_mpz_t(), b.get_num_mpz_t());
  Z sq = 1;
  for (const auto& [p, e] : factor(g)) sq *= ipow(p, e / 2);
  Q s(sq * sq);
  return F.elem(a / s, b / s);
}

RelElem RelQuadExt::mul(const RelElem& x, const RelElem& y) const {
  return {x.A * y.A + x.B * y.B * delta, x.A * y.B + x.B * y.A};
}

Q RelQuadExt::trace(const RelElem& x) const { return Q(2 * x.A.trace()); }

bool RelQuadExt::is_integral(const RelElem& x) const {
  QFElem two = F.elem(2);
  return F.is_integral(two * x.A) && F.is_integral(x.A * x.A - x.B * x.B * delta);
}

std::string RelQuadExt::str() const {
  std::string base = F.is_rational() ? "Q" : "Q(sqrt(" + std::to_string(F.d()) + "))";
  return base + "(sqrt(" + delta.str() + "))";
}

Q trace_form_disc(const RelQuadExt& K, const std::vector<RelElem>& basis) {
  std::size_t n = basis.size();
  QMat g = qmat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = K.trace(K.mul(basis[i], basis[j]));
  Q d = qdet(g);
  if (d == 0) throw InputError("trace form is degenerate: not a basis");
  return d;
}

MaximalOrder maximal_order(const RelQuadExt& K0) {
  // work with the normalized radicand; the field is the same
  RelQuadExt K{K0.F, K0.delta_normalized()};
  MaximalOrder out;
  for (const QFElem& w : K.F.integral_basis()) out.basis.push_back({w, K.F.zero()});
  for (const QFElem& w : K.F.integral_basis()) out.basis.push_back({K.F.zero(), w});
  Q d0 = trace_form_disc(K, out.basis);
  out.start_disc = d0.get_num();
  out.disc = out.start_disc;
  for (const auto& [p, e] : factor(out.start_disc)) {
    if (e < 2) continue;
    int steps = 0;
    for (;;) {
      auto ker = kernel_mod_p(trace_gram(K, out.basis), p);
      bool grew = false;
      std::size_t k = ker.size();
      // projective points of the kernel: leading coefficient 1 at position lead
      for (std::size_t lead = 0; lead < k && !grew; ++lead) {
        std::size_t free = k - 1 - lead;
        Z count = ipow(p, free);
        for (Z idx = 0; idx < count && !grew; ++idx) {
          std::vector<Z> coef(k, 0);
          coef[lead] = 1;
          Z t = idx;
          for (std::size_t j = lead + 1; j < k; ++j) {
            coef[j] = t % p;
            t /= p;
          }
          std::vector<Z> c(out.basis.size(), 0);
          for (std::size_t j = 0; j < k; ++j)
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = zmod(c[i] + coef[j] * ker[j][i], p);
          RelElem y = scale_sum(K, out.basis, c, p);
          if (!K.is_integral(y)) continue;
          std::size_t pos = 0;
          while (c[pos] == 0) ++pos;
          Z inv = inv_mod(c[pos], p);
          for (auto& x : c) x = zmod(x * inv, p);
          out.basis[pos] = scale_sum(K, out.basis, c, p);
          grew = true;
        }
      }
      if (!grew) break;
      ++steps;
    }
    if (steps) out.index.push_back({p, steps});
  }
  out.disc = trace_form_disc(K, out.basis).get_num();
  // report the basis for the caller's delta: sqrt(delta_n) = s sqrt(delta)
  Q s = K.delta.a() == 0 ? K.delta.b() / K0.delta.b() : K.delta.a() / K0.delta.a();
  Q root = Q(isqrt(s.get_num()), isqrt(s.get_den()));
  for (auto& b : out.basis) b.B = b.B * K0.F.elem(root);
  return out;
}

int relative_disc_valuation(const RelQuadExt& K0, const Place& u) {
  if (!u.finite) throw InputError("relative discriminant at an infinite place");
  QFElem delta = K0.delta_normalized();
  int v = valuation(delta, u);
  if (u.p != 2) return v % 2;
  int e = u.type == PrimeType::Ramified ? 2 : 1;
  if (v % 2) return 2 * e + 1;
  const QuadField& F = K0.F;
  if (v > 0) {
    QFElem pi;
    bool found = false;
    for (int a = -4; a <= 4 && !found; ++a)
      for (int b = F.is_rational() ? 0 : -4; b <= (F.is_rational() ? 0 : 4) && !found; ++b) {
        QFElem x = F.from_omega_coords(a, b);
        if (!x.is_zero() && valuation(x, u) == 1) {
          pi = x;
          found = true;
        }
      }
    if (!found) throw std::logic_error("no small uniformizer found");
    QFElem pv = F.one();
    for (int i = 0; i < v; ++i) pv = pv * pi;
    delta = delta / pv;
  }
  int best = 0;
  int hi = F.is_rational() ? 0 : 3;
  for (int k = e; k >= 1 && best == 0; --k)
    for (int a = 0; a <= 3 && best == 0; ++a)
      for (int b = 0; b <= hi && best == 0; ++b) {
        QFElem x = F.from_omega_coords(a, b);
        QFElem r = delta - x * x;
        if (r.is_zero() || valuation(r, u) >= 2 * k) best = k;
      }
  return 2 * (e - best);
}

bool ToralSetDescriptor::maximal_type() const {
  for (const auto& [p, f] : conductors)
    for (const Place& u : places_above(K.F, p))
      if (valuation(f, u) != 0) return false;
  return true;
}

DiscReport nonarch_and_global_disc(const ToralSetDescriptor& desc) {
  const RelQuadExt& K = desc.K;
  QFElem dn = K.delta_normalized();
  std::set<Z> primes{2};
  Z N = abs(dn.norm().get_num());
  for (const auto& [p, e] : factor(N)) primes.insert(p);
  for (const auto& [p, f] : desc.conductors) {
    if (f.is_zero() || !K.F.is_integral(f)) throw InputError("conductor must be a nonzero integer of F");
    if (!is_prime(p)) throw InputError("conductor key " + p.get_str() + " is not prime");
    primes.insert(p);
  }
  DiscReport out;
  out.disc_fin = 1;
  for (const Z& p : primes) {
    for (const Place& u : places_above(K.F, p)) {
      LocalDiscRow row;
      row.place = u;
      row.rel_disc_val = relative_disc_valuation(K, u);
      auto it = desc.conductors.find(p);
      if (it != desc.conductors.end()) row.conductor_val = valuation(it->second, u);
      row.disc_u = ipow(u.q(), row.rel_disc_val + 2 * row.conductor_val);
      if (row.conductor_val) out.maximal_type = false;
      out.disc_fin *= row.disc_u;
      out.finite.push_back(row);
    }
  }
  out.disc = out.disc_fin.get_d();
  auto inf = infinite_places(K.F);
  if (!desc.arch_generators.empty()) {
    if (desc.arch_generators.size() != 1 && desc.arch_generators.size() != inf.size())
      throw InputError("need one Archimedean generator, or one per infinite place");
    for (std::size_t i = 0; i < inf.size(); ++i) {
      double a = arch_disc(desc.arch_generators[desc.arch_generators.size() == 1 ? 0 : i]);
      out.arch.push_back(a);
      out.disc *= a;
    }
  }
  return out;
}

std::complex<double> cdet(CMat m) {
  std::size_t n = m.rows();
  std::complex<double> d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m(i, c)) > std::abs(m(piv, c))) piv = i;
    if (m(piv, c) == 0.0) return 0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      auto f = m(i, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(i, j) -= f * m(c, j);
    }
  }
  return d;
}

double arch_disc_basis(const std::vector<CMat>& basis) {
  std::size_t n = basis.size();
  if (n == 0) throw InputError("empty basis");
  CMat H(n, n, 0.0), T(n, n, 0.0);
  double scale = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const CMat& a = basis[i];
    double nn = 0;
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < a.cols(); ++c) nn += std::norm(a(r, c));
    scale *= nn;
    for (std::size_t j = 0; j < n; ++j) {
      const CMat& b = basis[j];
      std::complex<double> h = 0;
      for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) h += a(r, c) * std::conj(b(r, c));
      H(i, j) = h;
      CMat ab = a * b;
      std::complex<double> t = 0;
      for (std::size_t r = 0; r < ab.rows(); ++r) t += ab(r, r);
      T(i, j) = t;
    }
  }
  double h = cdet(H).real();
  double t = std::abs(cdet(T));
  if (h <= 1e-12 * scale) throw InputError("basis elements are linearly dependent");
  if (t <= 1e-12 * scale) throw InputError("trace Gram matrix is singular");
  return h / t;
}

std::vector<CMat> power_basis(const CMat& k) {
  std::size_t n = k.rows();
  if (n == 0 || k.cols() != n) throw InputError("generator must be square");
  std::vector<CMat> out{identity<std::complex<double>>(n, 0.0, 1.0)};
  for (std::size_t i = 1; i < n; ++i) out.push_back(out.back() * k);
  return out;
}

double arch_disc(const CMat& k) {
  bool nonzero = false;
  for (std::size_t r = 0; r < k.rows(); ++r)
    for (std::size_t c = 0; c < k.cols(); ++c) nonzero |= k(r, c) != 0.0;
  if (!nonzero) throw InputError("Archimedean generator is zero");
  return arch_disc_basis(power_basis(k));
}

bool quartic_irreducible(const std::vector<Q>& coeffs) {
  if (coeffs.size() != 5 || coeffs[4] != 1) throw InputError("expected a monic quartic");
  Z D = 1;
  for (const Q& c : coeffs) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Z> g(5);
  for (int i = 0; i < 5; ++i) g[i] = Q(coeffs[i] * Q(ipow(D, 4 - i))).get_num();
  const Z &a = g[3], &b = g[2], &c = g[1], &d = g[0];
  if (d == 0) return false;
  std::vector<Z> divs;
  for (const Z& q : divisors(d)) {
    divs.push_back(q);
    divs.push_back(-q);
  }
  for (const Z& r : divs)
    if (r * r * r * r + a * r * r * r + b * r * r + c * r + d == 0) return false;
  for (const Z& q : divs) {
    Z s = d / q;
    if (q != s) {
      Z num = c - q * a, den = s - q;
      if (num % den != 0) continue;
      Z p = num / den, r = a - p;
      if (q + s + p * r == b) return false;
    } else {
      if (c != q * a) continue;
      Z disc = a * a - 4 * (b - 2 * q);
      if (disc >= 0 && is_square(disc) && (a + isqrt(disc)) % 2 == 0) return false;
    }
  }
  return true;
}

QuarticClassification classify_quartic(const std::vector<Q>& coeffs) {
  if (!quartic_irreducible(coeffs)) throw InputError("quartic is reducible");
  Z D = 1;
  for (const Q& c : coeffs) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Z> g(5);
  for (int i = 0; i < 5; ++i) g[i] = Q(coeffs[i] * Q(ipow(D, 4 - i))).get_num();
  const Z &a = g[3], &b = g[2], &c = g[1], &d = g[0];
  // resolvent x^3 + e x^2 + f x + h
  Z e = -b, f = a * c - 4 * d, h = -(a * a * d - 4 * b * d + c * c);
  Z disc = e * e * f * f - 4 * f * f * f - 4 * e * e * e * h - 27 * h * h + 18 * e * f * h;
  auto R = [&](const Z& x) -> Z { return x * x * x + e * x * x + f * x + h; };
  std::vector<Z> roots;
  if (h == 0) {
    roots.push_back(0);
    Z qd = e * e - 4 * f;  // x^2 + e x + f
    if (qd >= 0 && is_square(qd)) {
      Z s = isqrt(qd);
      for (const Z& num : {Z(-e + s), Z(-e - s)})
        if (num % 2 == 0 && num != 0) roots.push_back(num / 2);
    }
  } else {
    for (const Z& q : divisors(h))
      for (const Z& r : {q, Z(-q)})
        if (R(r) == 0) roots.push_back(r);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
  QuarticClassification out;
  out.resolvent_rational_roots = static_cast<int>(roots.size());
  out.disc_square = disc > 0 && is_square(disc);
  if (roots.size() == 3) {
    out.group = "V4";
    out.type = GaloisType::Biquadratic;
  } else if (roots.empty()) {
    out.group = out.disc_square ? "A4" : "S4";
  } else {
    const Z& r = roots[0];
    auto splits = [&](const Z& beta, const Z& gamma) {
      Z dq = beta * beta - 4 * gamma;
      return dq == 0 || (dq > 0 && is_square(dq)) || (dq * disc > 0 && is_square(Z(dq * disc)));
    };
    bool c4 = splits(-r, d) && splits(a, b - r);
    out.group = c4 ? "C4" : "D4";
    out.type = c4 ? GaloisType::Cyclic : GaloisType::Dihedral;
  }
  return out;
}

TowerClassification classify_galois_type(const QuarticTower& T) {
  TowerClassification out;
  out.by_norm = T.type();
  out.quadratic_subfields = 1;
  // sqrt(delta) is not primitive for rational delta; rescale by a square
  QuarticTower prim = T;
  if (T.delta.is_rational()) {
    QFElem s = T.F.elem(1, 1);
    prim.delta = T.delta * s * s;
  }
  out.resolvent = classify_quartic(prim.min_poly());
  Q n = T.delta.norm();
  if (is_square(n)) {
    Q root(isqrt(n.get_num()), isqrt(n.get_den()));
    for (const Q& s : {root, Q(-root)}) {
      QFElem m = T.F.elem(T.delta.trace() + 2 * s);
      if (m.is_zero()) continue;
      if (sqrt_in(T.F, T.delta * m)) {
        out.witness = m;
        out.quadratic_subfields = 3;
        break;
      }
    }
  }
  bool biq = out.quadratic_subfields == 3;
  out.consistent = out.resolvent.type && *out.resolvent.type == out.by_norm &&
                   biq == (out.by_norm == GaloisType::Biquadratic);
  return out;
}

CyclicDiscCheck cyclic_disc_check(const QuarticTower& T) {
  auto cls = classify_galois_type(T);
  if (!cls.consistent || cls.type() != GaloisType::Cyclic)
    throw InputError("cyclic_disc_check: " + T.str() + " is not cyclic");
  CyclicDiscCheck out;
  MaximalOrder O = maximal_order(RelQuadExt::from_tower(T));
  out.D_K = abs(O.disc);
  out.D_F = abs(T.F.disc());
  out.D_rel = Q(out.D_K, out.D_F * out.D_F);
  out.D_rel.canonicalize();
  out.pass = out.D_rel >= Q(out.D_F, 4);
  out.d = T.F.d_one_mod_4() ? out.D_F : Z(out.D_F / 4);
  Z d3 = out.d * out.d * out.d;
  if (out.D_K % d3 == 0 && is_square(Z(out.D_K / d3))) {
    out.W = isqrt(Z(out.D_K / d3));
    Q w2d(out.W * out.W * out.d), w2d16(out.W * out.W * out.d, 16);
    w2d16.canonicalize();
    out.shape_ok = out.D_rel == (T.F.d_one_mod_4() ? w2d : w2d16);
  }
  return out;
}

LinnikRhs linnik_rhs(double log_disc, double log_vol, double tau, double h, double eps,
                     double log_c, double log_DF, double log_DK) {
  if (h < 0 || eps < 0 || tau < 0) throw InputError("linnik_rhs: tau, h and eps must be >= 0");
  auto lse = [](double x, double y) {
    double m = std::max(x, y);
    return m + std::log(std::exp(x - m) + std::exp(y - m));
  };
  LinnikRhs out;
  double decay = -2 * tau * h;
  out.log_value = lse(-log_vol, (1 + eps) * log_disc - 2 * log_vol + decay);
  out.value = std::exp(out.log_value);
  out.tau_max = h > 0 ? (log_disc - log_c - log_DF) / (2 * h)
                      : std::numeric_limits<double>::infinity();
  out.in_hypothesis = tau > 0 && tau <= out.tau_max;
  out.proxy = std::exp(lse(-0.5 * log_disc, eps * log_disc + decay));
  out.special = log_DK >= 0
                    ? std::exp(lse((-0.5 + eps) * log_DK, -2 * log_DF + eps * log_DK + decay))
                    : std::numeric_limits<double>::quiet_NaN();
  return out;
}

LinnikShape linnik_special_shape(double eps) {
  // disc^a vol^b with disc = D_K D_F^-2, vol = D_K^(1/2)
  auto sub = [](double a, double b, double decay) {
    return LinnikMonomial{a + 0.5 * b, -2 * a, decay};
  };
  LinnikShape s;
  s.substituted = {sub(0, -1, 0), sub(1 + eps, -2, -2)};
  s.stated = {LinnikMonomial{-0.5 + eps, 0, 0}, LinnikMonomial{eps, -2, -2}};
  s.dominated = true;
  for (int i = 0; i < 2; ++i)
    s.dominated &= s.substituted[i].dk <= s.stated[i].dk + 1e-12 &&
                   s.substituted[i].df <= s.stated[i].df + 1e-12 &&
                   s.substituted[i].decay == s.stated[i].decay;
  return s;
}

DivisorBound divisor_bound_check(const ToralSetDescriptor& desc) {
  DiscReport r = nonarch_and_global_disc(desc);
  DivisorBound out;
  out.tau_ideal = 1;
  for (const auto& row : r.finite) {
    if (row.place.p != 2 && row.disc_u > 1) ++out.b;
    out.tau_ideal *= row.rel_disc_val + 2 * row.conductor_val + 1;
  }
  out.two_b = ipow(2, out.b);
  out.tau_disc = divisor_count(r.disc_fin);
  out.pass = out.two_b <= out.tau_disc;
  out.pass_ideal = out.two_b <= out.tau_ideal;
  return out;
}

}  // namespace alk
