#include "alk/numfield.hpp"

#include <cmath>
#include <sstream>

#include "alk/error.hpp"
#include "alk/matrix.hpp"

namespace alk {

namespace {

long mod(long a, long m) { return ((a % m) + m) % m; }

}  // namespace

QFElem::QFElem(long d, Q a, Q b) : d_(d), a_(std::move(a)), b_(std::move(b)) {
  a_.canonicalize();
  b_.canonicalize();
  if (d_ == 1 && b_ != 0) throw InputError("rational field element with sqrt part");
}

void QFElem::check(const QFElem& o) const {
  if (d_ != o.d_) throw InputError("mixing elements of different quadratic fields");
}

QFElem QFElem::operator+(const QFElem& o) const {
  check(o);
  return QFElem(d_, a_ + o.a_, b_ + o.b_);
}

QFElem QFElem::operator-(const QFElem& o) const {
  check(o);
  return QFElem(d_, a_ - o.a_, b_ - o.b_);
}

QFElem QFElem::operator*(const QFElem& o) const {
  check(o);
  return QFElem(d_, a_ * o.a_ + Q(d_) * b_ * o.b_, a_ * o.b_ + b_ * o.a_);
}

QFElem QFElem::operator/(const QFElem& o) const {
  check(o);
  Q n = o.norm();
  if (n == 0) throw InputError("division by zero in quadratic field");
  QFElem c = *this * o.conj();
  return QFElem(d_, c.a_ / n, c.b_ / n);
}

std::complex<double> QFElem::embed(int idx) const {
  double a = a_.get_d(), b = b_.get_d();
  if (d_ == 1) return {a, 0.0};
  double s = std::sqrt(std::fabs(static_cast<double>(d_)));
  if (idx == 1) b = -b;
  if (d_ < 0) return {a, b * s};
  // a + b*s loses digits when the two terms nearly cancel; go through the
  // conjugate then.
  double direct = a + b * s;
  if ((a >= 0) == (b >= 0) || b == 0.0 || a == 0.0) return {direct, 0.0};
  double other = a - b * s;
  return {norm().get_d() / other, 0.0};
}

std::string QFElem::str() const {
  std::ostringstream os;
  os << a_.get_str();
  if (d_ != 1) os << (b_ < 0 ? "-" : "+") << Q(abs(b_)).get_str() << "*sqrt(" << d_ << ")";
  return os.str();
}

QuadField::QuadField(long d) : d_(d) {
  if (d == 0 || d == 1) throw InputError("quadratic field needs d not in {0, 1}");
  if (!is_squarefree(Z(d))) throw InputError("d = " + std::to_string(d) + " is not squarefree");
  disc_ = mod(d, 4) == 1 ? Z(std::labs(d)) : Z(4 * std::labs(d));
}

QuadField QuadField::rationals() { return QuadField(); }

bool QuadField::d_one_mod_4() const { return d_ != 1 && mod(d_, 4) == 1; }

QFElem QuadField::omega() const {
  if (d_ == 1) return one();
  if (d_one_mod_4()) return elem(Q(1, 2), Q(1, 2));
  return elem(0, 1);
}

std::vector<QFElem> QuadField::integral_basis() const {
  if (d_ == 1) return {one()};
  return {one(), omega()};
}

std::pair<Q, Q> QuadField::omega_coords(const QFElem& z) const {
  if (d_ == 1) return {z.a(), Q(0)};
  if (d_one_mod_4()) return {z.a() - z.b(), Q(2 * z.b())};
  return {z.a(), z.b()};
}

bool QuadField::is_integral(const QFElem& z) const {
  auto [x, y] = omega_coords(z);
  return x.get_den() == 1 && y.get_den() == 1;
}

const char* to_string(PrimeType t) {
  switch (t) {
    case PrimeType::Rational: return "rational";
    case PrimeType::Split1: return "split1";
    case PrimeType::Split2: return "split2";
    case PrimeType::Inert: return "inert";
    case PrimeType::Ramified: return "ramified";
  }
  return "?";
}

Z Place::q() const {
  if (!finite) return 0;
  return type == PrimeType::Inert ? Z(p * p) : p;
}

int Place::local_degree() const {
  if (!finite) return complex ? 2 : 1;
  return (type == PrimeType::Inert || type == PrimeType::Ramified) ? 2 : 1;
}

std::string Place::label() const {
  if (!finite) return "inf" + std::to_string(embedding);
  return p.get_str() + ":" + to_string(type);
}

PrimeType splitting_type(const QuadField& F, const Z& p) {
  if (F.is_rational()) return PrimeType::Rational;
  long d = F.d();
  if (p == 2) {
    long r8 = mod(d, 8);
    if (r8 == 1) return PrimeType::Split1;
    if (r8 == 5) return PrimeType::Inert;
    return PrimeType::Ramified;
  }
  int l = legendre(Z(d), p);
  if (l == 0) return PrimeType::Ramified;
  return l == 1 ? PrimeType::Split1 : PrimeType::Inert;
}

std::vector<Place> places_above(const QuadField& F, const Z& p, int M) {
  if (!is_prime(p)) throw InputError(p.get_str() + " is not prime");
  Place base;
  base.finite = true;
  base.p = p;
  base.type = splitting_type(F, p);
  Z inv2 = p == 2 ? Z(0) : Z((p + 1) / 2);
  switch (base.type) {
    case PrimeType::Rational:
      base.omega_residue = 1;
      return {base};
    case PrimeType::Inert:
      return {base};
    case PrimeType::Ramified: {
      if (!F.d_one_mod_4())
        base.omega_residue = (p == 2 && mod(F.d(), 4) == 3) ? 1 : 0;
      else
        base.omega_residue = inv2;
      return {base};
    }
    default: break;
  }
  Z d(F.d());
  Z r;
  Z mod_pm = ipow(p, M);
  if (p == 2) {
    r = hensel_sqrt(d, p, M);
  } else {
    Z s = sqrt_mod_prime(d, p);
    Z r0 = s < p - s ? s : Z(p - s);
    r = hensel_sqrt(d, p, M);
    if (Z(r % p) != r0) r = mod_pm - r;
  }
  std::vector<Place> out;
  for (int k = 0; k < 2; ++k) {
    Place v = base;
    v.type = k == 0 ? PrimeType::Split1 : PrimeType::Split2;
    v.root = k == 0 ? r : Z((mod_pm - r) % mod_pm);
    v.precision = M;
    if (F.d_one_mod_4()) {
      if (p == 2)
        v.omega_residue = Z(((1 + v.root) / 2) % 2);
      else
        v.omega_residue = Z((1 + v.root) * inv2 % p);
    } else {
      v.omega_residue = Z(v.root % p);
    }
    out.push_back(v);
  }
  return out;
}

std::vector<Place> infinite_places(const QuadField& F) {
  std::vector<Place> out;
  Place v;
  v.finite = false;
  if (F.is_rational()) {
    out.push_back(v);
  } else if (F.is_real()) {
    out.push_back(v);
    v.embedding = 1;
    out.push_back(v);
  } else {
    v.complex = true;
    out.push_back(v);
  }
  return out;
}

int valuation(const QFElem& x, const Place& v) {
  if (!v.finite) throw InputError("valuation at an infinite place");
  if (x.is_zero()) return kInfValuation;
  switch (v.type) {
    case PrimeType::Rational: return vp(x.a(), v.p);
    case PrimeType::Inert: return vp(x.norm(), v.p) / 2;
    case PrimeType::Ramified: return vp(x.norm(), v.p);
    default: break;
  }
  if (x.b() == 0) return vp(x.a(), v.p);
  Z L;
  mpz_lcm(L.get_mpz_t(), x.a().get_den_mpz_t(), x.b().get_den_mpz_t());
  Z A = x.a().get_num() * (L / x.a().get_den());
  Z B = x.b().get_num() * (L / x.b().get_den());
  int eff = v.precision - (v.p == 2 ? 1 : 0);
  Z m = ipow(v.p, eff);
  Z t = (A + B * v.root) % m;
  if (t == 0)
    throw PrecisionError("valuation at " + v.label() + " exceeds Hensel precision " +
                         std::to_string(eff));
  return vp(t, v.p) - vp(L, v.p);
}

PlaceValue place_data(const QuadField& F, const QFElem& x, const Place& v) {
  PlaceValue out;
  if (v.finite) {
    if (x.is_zero()) throw InputError("place_data: zero element");
    out.valuation = valuation(x, v);
    out.abs_exact = qpow(Q(v.q()), -out.valuation);
    out.abs = out.abs_exact.get_d();
    return out;
  }
  if (v.complex) {
    out.abs_exact = x.norm();
    out.abs = out.abs_exact.get_d();
  } else {
    out.abs = std::abs(x.embed(F.is_rational() ? 0 : v.embedding));
  }
  return out;
}

namespace {

// |sigma(x)| at a real embedding with GMP floats of the given precision.
mpf_class real_abs_mpf(const QFElem& x, int emb, int bits) {
  mpf_class a(x.a(), bits), b(x.b(), bits);
  if (x.d() == 1) return abs(a);
  mpf_class s(0, bits);
  mpf_class dd(x.d(), bits);
  mpf_sqrt(s.get_mpf_t(), dd.get_mpf_t());
  if (emb == 1) b = -b;
  mpf_class r(a + b * s, bits);
  return abs(r);
}

}  // namespace

Content content(const QuadField& F, const QFElem& x, int bits) {
  if (x.is_zero()) throw InputError("content of zero");
  Content c;
  c.finite = 1;
  Q n = x.norm();
  std::vector<Z> primes;
  for (const auto& [p, e] : factor(Z(n.get_num()))) primes.push_back(p);
  for (const auto& [p, e] : factor(Z(n.get_den()))) primes.push_back(p);
  for (const auto& p : primes) {
    for (const auto& v : places_above(F, p)) {
      PlaceValue pv = place_data(F, x, v);
      if (pv.valuation != 0) c.support.push_back(v);
      c.finite *= pv.abs_exact;
    }
  }
  if (bits <= 53) {
    c.infinite = 1;
    for (const auto& v : infinite_places(F)) c.infinite *= place_data(F, x, v).abs;
    c.value = c.finite.get_d() * c.infinite;
  } else {
    mpf_class inf(1, bits);
    for (const auto& v : infinite_places(F)) {
      if (v.complex)
        inf *= mpf_class(x.norm(), bits);
      else
        inf *= real_abs_mpf(x, v.embedding, bits);
    }
    c.infinite = inf.get_d();
    mpf_class total(inf * mpf_class(c.finite, bits), bits);
    c.value = total.get_d();
  }
  return c;
}

std::optional<QFElem> sqrt_in(const QuadField& F, const QFElem& x) {
  if (x.is_zero()) return F.zero();
  auto qsqrt = [](const Q& q) -> std::optional<Q> {
    if (q < 0 || !is_square(q)) return std::nullopt;
    return Q(isqrt(q.get_num()), isqrt(q.get_den()));
  };
  if (F.is_rational()) {
    if (auto s = qsqrt(x.a())) return F.elem(*s);
    return std::nullopt;
  }
  if (x.b() == 0) {
    if (auto s = qsqrt(x.a())) return F.elem(*s);
    if (auto s = qsqrt(x.a() / Q(F.d()))) return F.elem(0, *s);
    return std::nullopt;
  }
  auto w = qsqrt(x.norm());
  if (!w) return std::nullopt;
  for (const Q& s : {Q((x.a() + *w) / 2), Q((x.a() - *w) / 2)}) {
    auto X = qsqrt(s);
    if (!X || *X == 0) continue;
    QFElem cand = F.elem(*X, x.b() / (2 * *X));
    if (cand * cand == x) return cand;
  }
  return std::nullopt;
}

Q trace_form_disc(const std::vector<QFElem>& basis) {
  const std::size_t n = basis.size();
  if (n == 0) throw InputError("empty basis");
  Matrix<Q> g(n, n, Q(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = (basis[i] * basis[j]).trace();
  Q dt = det(g, Q(0), Q(1));
  if (dt == 0) throw InputError("trace Gram is singular: not a basis");
  return dt;
}

}  // namespace alk
