#include "alk/arakelov.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "alk/error.hpp"

namespace alk {

namespace {

Z lcm_den(const std::vector<Q>& v) {
  Z L = 1;
  for (const auto& q : v) mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), q.get_den_mpz_t());
  return L;
}

Z gcd_all(const std::vector<Z>& v) {
  Z g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

Z floor_mod(const Z& a, const Z& m) {
  Z r = a % m;
  if (r < 0) r += m;
  return r;
}

// sign of u + v sqrt(d), d > 0 squarefree
int sign_surd(const Q& u, const Q& v, long d) {
  int su = sgn(u), sv = sgn(v);
  if (sv == 0) return su;
  if (su == 0 || su == sv) return sv;
  Q diff = u * u - Q(d) * v * v;
  return sgn(diff) * su;
}

}  // namespace

FracIdeal FracIdeal::unit(const QuadField& F) { return FracIdeal(F); }

FracIdeal FracIdeal::principal(const QuadField& F, const QFElem& x) {
  if (x.is_zero()) throw InputError("principal ideal of zero");
  return generated(F, {x});
}

FracIdeal FracIdeal::generated(const QuadField& F, const std::vector<QFElem>& gens) {
  std::vector<std::pair<Q, Q>> vs;
  for (const auto& g : gens) {
    if (g.d() != F.d()) throw InputError("generator from another field");
    vs.push_back(F.omega_coords(g));
    if (!F.is_rational()) vs.push_back(F.omega_coords(g * F.omega()));
  }
  std::vector<Q> all;
  for (const auto& [x, y] : vs) {
    all.push_back(x);
    all.push_back(y);
  }
  const Z D = lcm_den(all);
  FracIdeal I(F);
  if (F.is_rational()) {
    std::vector<Z> xs;
    for (const auto& [x, y] : vs) xs.push_back(Z(x * D));
    Z g = gcd_all(xs);
    if (g == 0) throw InputError("ideal generators are all zero");
    I.n1_ = Q(g, D);
    I.n1_.canonicalize();
    return I;
  }
  // Integer Hermite form of the span, column omega first.
  bool have_v = false;
  Z vx = 0, vy = 0;
  std::vector<Z> xs;
  for (const auto& [qx, qy] : vs) {
    Z wx = Z(qx * D), wy = Z(qy * D);
    if (wy == 0) {
      xs.push_back(wx);
      continue;
    }
    if (!have_v) {
      vx = wx;
      vy = wy;
      have_v = true;
      continue;
    }
    Z g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), vy.get_mpz_t(), wy.get_mpz_t());
    xs.push_back(Z((wy / g) * vx - (vy / g) * wx));
    Z nx = s * vx + t * wx, ny = s * vy + t * wy;
    vx = nx;
    vy = ny;
  }
  Z n1 = gcd_all(xs);
  if (!have_v || n1 == 0) throw InputError("generators do not span a rank 2 module");
  if (vy < 0) {
    vx = -vx;
    vy = -vy;
  }
  I.n1_ = Q(n1, D);
  I.m_ = Q(floor_mod(vx, n1), D);
  I.n2_ = Q(vy, D);
  I.n1_.canonicalize();
  I.m_.canonicalize();
  I.n2_.canonicalize();
  return I;
}

FracIdeal FracIdeal::prime(const QuadField& F, const Place& v) {
  if (!v.finite) throw InputError("prime ideal of an infinite place");
  switch (v.type) {
    case PrimeType::Rational:
    case PrimeType::Inert: return generated(F, {F.elem(Q(v.p))});
    default: return generated(F, {F.elem(Q(v.p)), F.omega() - F.elem(Q(v.omega_residue))});
  }
}

FracIdeal FracIdeal::inverse_different(const QuadField& F) {
  if (F.is_rational()) return unit(F);
  Q s = F.d_one_mod_4() ? Q(1) : Q(2);
  // 1 / (s sqrt d) = sqrt d / (s d)
  return principal(F, F.elem(0, Q(1) / (s * Q(F.d()))));
}

std::vector<QFElem> FracIdeal::basis() const {
  if (F_.is_rational()) return {F_.elem(n1_)};
  return {F_.elem(n1_), F_.from_omega_coords(m_, n2_)};
}

bool FracIdeal::contains(const QFElem& x) const {
  if (F_.is_rational()) {
    Q k = x.a() / n1_;
    return k.get_den() == 1;
  }
  auto [a, b] = F_.omega_coords(x);
  Q k = b / n2_;
  if (k.get_den() != 1) return false;
  Q r = (a - k * m_) / n1_;
  return r.get_den() == 1;
}

int FracIdeal::valuation(const Place& v) const {
  int best = kInfValuation;
  for (const auto& b : basis()) best = std::min(best, alk::valuation(b, v));
  return best;
}

FracIdeal FracIdeal::operator*(const FracIdeal& o) const {
  if (!(F_ == o.F_)) throw InputError("ideals over different fields");
  std::vector<QFElem> g;
  for (const auto& a : basis())
    for (const auto& b : o.basis()) g.push_back(a * b);
  return generated(F_, g);
}

FracIdeal FracIdeal::inverse() const {
  if (F_.is_rational()) {
    FracIdeal I(F_);
    I.n1_ = Q(1) / abs(n1_);
    return I;
  }
  // I * conj(I) = N(I) O_F
  std::vector<QFElem> g;
  for (const auto& b : basis()) g.push_back(b.conj() * F_.elem(Q(1) / norm()));
  return generated(F_, g);
}

FracIdeal FracIdeal::pow(long k) const {
  FracIdeal base = k < 0 ? inverse() : *this;
  FracIdeal r = unit(F_);
  for (long i = 0; i < std::labs(k); ++i) r = r * base;
  return r;
}

bool FracIdeal::operator==(const FracIdeal& o) const {
  return F_ == o.F_ && n1_ == o.n1_ && m_ == o.m_ && n2_ == o.n2_;
}

std::string FracIdeal::str() const {
  std::ostringstream os;
  if (F_.is_rational()) {
    os << n1_.get_str() << "Z";
  } else {
    os << "<" << n1_.get_str() << ", " << m_.get_str() << "+" << n2_.get_str() << "*w>";
  }
  return os.str();
}

double embedding_abs(const QFElem& x, int k) {
  if (x.d() == 1) return std::fabs(x.a().get_d());
  if (x.d() < 0) return std::abs(x.embed(0));
  return std::abs(x.embed(k));
}

HermitianLineBundle HermitianLineBundle::trivial(const QuadField& F) {
  return {FracIdeal::unit(F), std::vector<Q>(F.degree(), Q(1))};
}

void HermitianLineBundle::validate() const {
  const QuadField& F = field();
  if (radius_sq.size() != static_cast<std::size_t>(F.degree()))
    throw InputError("need one radius per embedding");
  for (const auto& r : radius_sq)
    if (r <= 0) throw InputError("radii must be positive");
  if (F.degree() == 2 && !F.is_real() && radius_sq[0] != radius_sq[1])
    throw InputError("radii at conjugate embeddings differ");
}

double HermitianLineBundle::adeg() const {
  double s = -log_abs(ideal.norm());
  for (const auto& r : radius_sq) s += 0.5 * log_abs(r);
  return s;
}

double HermitianLineBundle::norm2_at(const QFElem& s, int sigma) const {
  double a = embedding_abs(s, sigma);
  return a * a / radius_sq[sigma].get_d();
}

double HermitianLineBundle::adeg_via_section(const QFElem& s) const {
  if (s.is_zero()) throw InputError("adeg needs a nonzero section");
  const QuadField& F = field();
  std::map<Z, int> primes;
  for (const Q& q : {s.norm(), ideal.norm()}) {
    for (const auto& [p, e] : factor(Z(q.get_num()))) primes[p] = 1;
    if (q.get_den() != 1)
      for (const auto& [p, e] : factor(Z(q.get_den()))) primes[p] = 1;
  }
  double fin = 0;
  for (const auto& [p, one] : primes) {
    for (const auto& v : places_above(F, p)) {
      int k = valuation(s, v) - ideal.valuation(v);
      if (k != 0) fin += k * log_abs(Q(v.q()));
    }
  }
  double arch = 0;
  for (int k = 0; k < F.degree(); ++k)
    arch += std::log(embedding_abs(s, k)) - 0.5 * log_abs(radius_sq[k]);
  return fin - arch;
}

HermitianLineBundle HermitianLineBundle::dual() const {
  HermitianLineBundle D{ideal.inverse(), radius_sq};
  for (auto& r : D.radius_sq) r = Q(1) / r;
  return D;
}

HermitianLineBundle HermitianLineBundle::tensor(const HermitianLineBundle& o) const {
  HermitianLineBundle T{ideal * o.ideal, radius_sq};
  for (std::size_t i = 0; i < T.radius_sq.size(); ++i) T.radius_sq[i] *= o.radius_sq[i];
  return T;
}

HermitianLineBundle HermitianLineBundle::canonical(const QuadField& F) {
  return {FracIdeal::inverse_different(F), std::vector<Q>(F.degree(), Q(1))};
}

EuclideanLattice direct_image(const HermitianLineBundle& L) {
  L.validate();
  const QuadField& F = L.field();
  auto B = L.ideal.basis();
  const std::size_t n = B.size();
  const auto& r = L.radius_sq;
  bool exact = F.is_rational() || !F.is_real() || r[0] == r[1];
  if (exact) {
    Matrix<Q> g(n, n, Q(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        QFElem y = F.is_real() || F.is_rational() ? B[i] * B[j] : B[i] * B[j].conj();
        g(i, j) = y.trace() / r[0];
      }
    return EuclideanLattice::from_rational(g);
  }
  std::vector<double> g(n * n);
  const double sd = std::sqrt(static_cast<double>(F.d()));
  const Q sum = Q(1) / r[0] + Q(1) / r[1], dif = Q(1) / r[0] - Q(1) / r[1];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // y = a + b sqrt d: a (1/r0 + 1/r1) + b sqrt d (1/r0 - 1/r1)
      QFElem y = B[i] * B[j];
      g[i * n + j] = Q(y.a() * sum).get_d() + Q(y.b() * dif).get_d() * sd;
    }
  return EuclideanLattice::from_double(g, static_cast<int>(n));
}

namespace {

// ||s||_sigma <= 1 at every embedding, decided exactly.
bool in_unit_box_exact(const HermitianLineBundle& L, const QFElem& s) {
  const QuadField& F = L.field();
  const auto& r = L.radius_sq;
  if (F.is_rational()) return s.a() * s.a() <= r[0];
  if (!F.is_real()) return s.norm() <= r[0];
  for (int k = 0; k < 2; ++k) {
    const Q& a = s.a();
    Q b = k == 0 ? s.b() : Q(-s.b());
    // (a + b sqrt d)^2 - r = (a^2 + d b^2 - r) + 2ab sqrt d <= 0
    Q u = a * a + Q(F.d()) * b * b - r[k];
    Q v = 2 * a * b;
    if (sign_surd(u, v, F.d()) > 0) return false;
  }
  return true;
}

struct BoxTest {
  const HermitianLineBundle& L;
  std::vector<QFElem> B;
  std::vector<double> inv_r;

  explicit BoxTest(const HermitianLineBundle& b) : L(b), B(b.ideal.basis()) {
    for (const auto& r : b.radius_sq) inv_r.push_back(1 / r.get_d());
  }

  bool operator()(const long* x) const {
    QFElem s = L.field().zero();
    for (std::size_t i = 0; i < B.size(); ++i) s = s + B[i] * L.field().elem(Q(x[i]));
    bool near = false;
    for (std::size_t k = 0; k < inv_r.size(); ++k) {
      double e = embedding_abs(s, static_cast<int>(k));
      double v = e * e * inv_r[k];
      if (v > 1 + 1e-9) return false;
      if (v > 1 - 1e-9) near = true;
    }
    return near ? in_unit_box_exact(L, s) : true;
  }
};

}  // namespace

long long count_unit_sections(const HermitianLineBundle& L, long long budget, bool parallel) {
  EuclideanLattice E = direct_image(L);
  const double r2 = static_cast<double>(L.field().degree());
  BoxTest test(L);
  if (!parallel) {
    long long c = 0;
    enumeration::enumerate_serial(
        E, r2, [&](const long* x, double) { c += test(x) ? 1 : 0; }, budget);
    return c;
  }
  auto parts = enumeration::enumerate_slices<long long>(
      E, r2, [] { return 0LL; }, [&](long long& c, const long* x, double) { c += test(x) ? 1 : 0; },
      budget);
  long long c = 0;
  for (auto v : parts) c += v;
  return c;
}

BundleTheta bundle_theta_and_h0ar(const HermitianLineBundle& L, const ThetaOptions& opt) {
  BundleTheta out;
  out.report = theta_invariants(direct_image(L), opt);
  out.report.adeg = L.adeg();
  auto dualside = L.dual().tensor(HermitianLineBundle::canonical(L.field()));
  H0Result h = theta_h0(direct_image(dualside), opt);
  out.h1_duality = h.h0;
  out.report.tail_bound = std::max(out.report.tail_bound, h.tail);
  out.sections = count_unit_sections(L, opt.budget, opt.parallel);
  out.h0_ar = std::log(static_cast<double>(out.sections));
  out.pi_n = std::numbers::pi * L.field().degree();
  out.comparison_holds = out.h0_ar <= out.report.h0 + out.pi_n;
  return out;
}

double f_bound(double t) { return t >= 0 ? 1 + t : std::exp(2 * std::numbers::pi * t); }

bool ThetaBounds::all_hold() const {
  for (const auto& c : checks)
    if (c.applies && !c.holds) return false;
  return true;
}

ThetaBounds theta_bounds(double t, const HermitianLineBundle& L, const ThetaOptions& opt) {
  ThetaBounds out;
  out.f_value = f_bound(t);
  BundleTheta bt = bundle_theta_and_h0ar(L, opt);
  const double adeg = L.adeg();
  const double logD = log_abs(Q(L.field().disc()));
  const double slack = 1e-12;  // covers the certified theta tail
  auto add = [&](const char* name, bool applies, double lhs, double rhs) {
    out.checks.push_back({name, applies, lhs, rhs, !applies || lhs <= rhs + slack});
  };
  const bool small = adeg <= t, large = adeg >= logD + t;
  add("h0_small_degree", small, bt.report.h0, f_bound(t));
  add("h1_large_degree", large, bt.report.h1, f_bound(-t));
  add("h0_large_degree", large, bt.report.h0, adeg - 0.5 * logD + f_bound(-t));
  add("h0ar_large_degree", large, bt.h0_ar, adeg - 0.5 * logD + f_bound(-t) + bt.pi_n);
  return out;
}

}  // namespace alk
