#include "alk/tower.hpp"

#include <sstream>

#include "alk/error.hpp"

namespace alk {

namespace {

using Vec = std::vector<Q>;

Vec mul_rec(const TowerSpec& s, int level, const Q* x, const Q* y) {
  if (level == 0) return {x[0] * y[0]};
  const std::size_t h = std::size_t(1) << (level - 1);
  const Vec& c = s.radicand[level - 1];
  Vec a = mul_rec(s, level - 1, x, y);
  Vec t = mul_rec(s, level - 1, x + h, y + h);
  Vec tc = mul_rec(s, level - 1, t.data(), c.data());
  Vec b1 = mul_rec(s, level - 1, x, y + h);
  Vec b2 = mul_rec(s, level - 1, x + h, y);
  Vec out(2 * h);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = a[i] + tc[i];
    out[h + i] = b1[i] + b2[i];
  }
  return out;
}

Vec inv_rec(const TowerSpec& s, int level, const Q* x) {
  if (level == 0) {
    if (x[0] == 0) throw InputError("division by zero in tower");
    return {1 / x[0]};
  }
  const std::size_t h = std::size_t(1) << (level - 1);
  const Vec& c = s.radicand[level - 1];
  Vec x0sq = mul_rec(s, level - 1, x, x);
  Vec x1sq = mul_rec(s, level - 1, x + h, x + h);
  Vec cx1 = mul_rec(s, level - 1, x1sq.data(), c.data());
  Vec n(h);
  for (std::size_t i = 0; i < h; ++i) n[i] = x0sq[i] - cx1[i];
  Vec ni = inv_rec(s, level - 1, n.data());
  Vec a = mul_rec(s, level - 1, x, ni.data());
  Vec b = mul_rec(s, level - 1, x + h, ni.data());
  Vec out(2 * h);
  for (std::size_t i = 0; i < h; ++i) {
    out[i] = a[i];
    out[h + i] = -b[i];
  }
  return out;
}

}  // namespace

Tower::Tower() : spec_(std::make_shared<TowerSpec>()) {}

Tower Tower::extend(const TowerElem& c) const {
  if (!c.tower().same(*this)) throw InputError("radicand from another tower");
  if (c.is_zero()) throw InputError("zero radicand");
  auto s = std::make_shared<TowerSpec>(*spec_);
  s->radicand.push_back(c.coords());
  return Tower(s);
}

TowerElem Tower::zero() const { return TowerElem(spec_, Vec(dim())); }

TowerElem Tower::one() const { return rational(1); }

TowerElem Tower::rational(const Q& q) const {
  Vec c(dim());
  c[0] = q;
  return TowerElem(spec_, c);
}

TowerElem Tower::gen(int k) const {
  if (k < 1 || k > levels()) throw InputError("generator index out of range");
  Vec c(dim());
  c[std::size_t(1) << (k - 1)] = 1;
  return TowerElem(spec_, c);
}

TowerElem Tower::from_coords(Vec c) const {
  if (c.size() != dim()) throw InputError("coordinate vector has wrong length");
  return TowerElem(spec_, std::move(c));
}

TowerElem Tower::lift(const TowerElem& x) const {
  const auto& xs = x.tower().spec();
  if (xs.radicand.size() > spec_->radicand.size()) throw InputError("lift into a smaller tower");
  for (std::size_t k = 0; k < xs.radicand.size(); ++k)
    if (xs.radicand[k] != spec_->radicand[k]) throw InputError("lift: not a prefix tower");
  Vec c(dim());
  for (std::size_t i = 0; i < x.coords().size(); ++i) c[i] = x.coords()[i];
  return TowerElem(spec_, c);
}

bool Tower::same(const Tower& o) const {
  return spec_ == o.spec_ || spec_->radicand == o.spec_->radicand;
}

TowerElem::TowerElem(std::shared_ptr<const TowerSpec> s, Vec c) : spec_(std::move(s)), c_(std::move(c)) {
  for (auto& q : c_) q.canonicalize();
}

Tower TowerElem::tower() const { return Tower(spec_); }

void TowerElem::check(const TowerElem& o) const {
  if (spec_ != o.spec_ && spec_->radicand != o.spec_->radicand)
    throw InputError("mixing elements of different towers");
}

bool TowerElem::is_zero() const {
  for (const auto& q : c_)
    if (q != 0) return false;
  return true;
}

bool TowerElem::is_rational() const {
  for (std::size_t i = 1; i < c_.size(); ++i)
    if (c_[i] != 0) return false;
  return true;
}

Q TowerElem::rational_value() const {
  if (!is_rational()) throw InputError("tower element is not rational");
  return c_[0];
}

Q TowerElem::trace() const { return c_[0] * Q(Z(c_.size())); }

TowerElem TowerElem::operator+(const TowerElem& o) const {
  check(o);
  Vec r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = c_[i] + o.c_[i];
  return TowerElem(spec_, r);
}

TowerElem TowerElem::operator-(const TowerElem& o) const {
  check(o);
  Vec r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = c_[i] - o.c_[i];
  return TowerElem(spec_, r);
}

TowerElem TowerElem::operator-() const {
  Vec r(c_.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -c_[i];
  return TowerElem(spec_, r);
}

TowerElem TowerElem::operator*(const TowerElem& o) const {
  check(o);
  return TowerElem(spec_, mul_rec(*spec_, levels(), c_.data(), o.c_.data()));
}

TowerElem TowerElem::inverse() const { return TowerElem(spec_, inv_rec(*spec_, levels(), c_.data())); }

TowerElem TowerElem::operator/(const TowerElem& o) const { return *this * o.inverse(); }

bool TowerElem::operator==(const TowerElem& o) const {
  check(o);
  return c_ == o.c_;
}

std::string TowerElem::str() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t m = 0; m < c_.size(); ++m) {
    if (c_[m] == 0) continue;
    if (!first) os << " + ";
    first = false;
    os << c_[m].get_str();
    for (int j = 0; j < levels(); ++j)
      if (m >> j & 1) os << "*r" << j + 1;
  }
  if (first) os << "0";
  return os.str();
}

TowerAuto::TowerAuto(std::vector<TowerElem> images) : img_(std::move(images)) {
  if (img_.empty()) return;
  const std::size_t n = std::size_t(1) << img_.size();
  mono_.assign(n, img_[0].tower().one());
  for (std::size_t m = 1; m < n; ++m) {
    int j = 0;
    while (!(m >> j & 1)) ++j;
    mono_[m] = mono_[m & (m - 1)] * img_[j];
  }
}

TowerAuto TowerAuto::identity(const Tower& T) {
  std::vector<TowerElem> g;
  for (int k = 1; k <= T.levels(); ++k) g.push_back(T.gen(k));
  return TowerAuto(g);
}

TowerElem TowerAuto::apply(const TowerElem& x) const {
  if (static_cast<int>(img_.size()) != x.levels()) throw InputError("automorphism/tower mismatch");
  if (img_.empty()) return x;
  const std::size_t n = x.coords().size();
  Vec r(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Q& c = x.coords()[m];
    if (c == 0) continue;
    const Vec& v = mono_[m].coords();
    for (std::size_t i = 0; i < n; ++i)
      if (v[i] != 0) r[i] += c * v[i];
  }
  return img_[0].tower().from_coords(std::move(r));
}

TowerAuto TowerAuto::compose(const TowerAuto& inner) const {
  std::vector<TowerElem> g;
  for (const auto& e : inner.img_) g.push_back(apply(e));
  return TowerAuto(g);
}

bool TowerAuto::well_defined() const {
  if (img_.empty()) return true;
  Tower T = img_[0].tower();
  for (int k = 0; k < T.levels(); ++k) {
    // c_k lives in level k; evaluate it at the images of r_1..r_k.
    const Vec& c = T.spec().radicand[k];
    const std::size_t n = c.size();
    TowerElem val = T.zero();
    for (std::size_t m = 0; m < n; ++m) {
      if (c[m] == 0) continue;
      TowerElem term = T.rational(c[m]);
      for (int j = 0; j < k; ++j)
        if (m >> j & 1) term = term * img_[j];
      val = val + term;
    }
    if (img_[k] * img_[k] != val) return false;
  }
  return true;
}

namespace {

template <class C, class Sqrt>
std::vector<C> gen_values_impl(const Tower& T, Sqrt csqrt, C one) {
  std::vector<C> vals;
  for (int k = 0; k < T.levels(); ++k) {
    const Vec& c = T.spec().radicand[k];
    C v = one * 0.0;
    for (std::size_t m = 0; m < c.size(); ++m) {
      C term = one * c[m].get_d();
      for (int j = 0; j < k; ++j)
        if (m >> j & 1) term *= vals[j];
      v += term;
    }
    vals.push_back(csqrt(v));
  }
  return vals;
}

}  // namespace

std::vector<std::complex<double>> generator_values(const Tower& T) {
  using C = std::complex<double>;
  return gen_values_impl<C>(T, [](C z) { return std::sqrt(z); }, C(1.0, 0.0));
}

std::complex<double> evaluate(const TowerElem& x, const std::vector<std::complex<double>>& gens) {
  std::complex<double> r = 0.0;
  const auto& c = x.coords();
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (c[m] == 0) continue;
    std::complex<double> t = c[m].get_d();
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (m >> j & 1) t *= gens[j];
    r += t;
  }
  return r;
}

namespace {

HighPrecComplex hp_mul(const HighPrecComplex& a, const HighPrecComplex& b, int bits) {
  HighPrecComplex r{mpf_class(0, bits), mpf_class(0, bits)};
  r.re = a.re * b.re - a.im * b.im;
  r.im = a.re * b.im + a.im * b.re;
  return r;
}

HighPrecComplex hp_sqrt(const HighPrecComplex& z, int bits) {
  mpf_class m(0, bits), t(0, bits), re(0, bits), im(0, bits);
  mpf_class n2(z.re * z.re + z.im * z.im, bits);
  mpf_sqrt(m.get_mpf_t(), n2.get_mpf_t());
  t = (m + z.re) / 2;
  mpf_sqrt(re.get_mpf_t(), t.get_mpf_t());
  t = (m - z.re) / 2;
  if (t < 0) t = 0;
  mpf_sqrt(im.get_mpf_t(), t.get_mpf_t());
  if (z.im < 0) im = -im;
  return {re, im};
}

}  // namespace

HighPrecComplex evaluate_mpf(const TowerElem& x, const std::vector<HighPrecComplex>& gens, int bits) {
  HighPrecComplex r{mpf_class(0, bits), mpf_class(0, bits)};
  const auto& c = x.coords();
  for (std::size_t m = 0; m < c.size(); ++m) {
    if (c[m] == 0) continue;
    HighPrecComplex t{mpf_class(c[m], bits), mpf_class(0, bits)};
    for (std::size_t j = 0; j < gens.size(); ++j)
      if (m >> j & 1) t = hp_mul(t, gens[j], bits);
    r.re += t.re;
    r.im += t.im;
  }
  return r;
}

std::vector<HighPrecComplex> generator_values_mpf(const Tower& T, int bits) {
  std::vector<HighPrecComplex> vals;
  for (int k = 0; k < T.levels(); ++k) {
    // evaluate radicand k (an element of level k) using the first k values
    std::vector<HighPrecComplex> prefix(vals.begin(), vals.begin() + k);
    const Vec& c = T.spec().radicand[k];
    HighPrecComplex v{mpf_class(0, bits), mpf_class(0, bits)};
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (c[m] == 0) continue;
      HighPrecComplex t{mpf_class(c[m], bits), mpf_class(0, bits)};
      for (int j = 0; j < k; ++j)
        if (m >> j & 1) t = hp_mul(t, prefix[j], bits);
      v.re += t.re;
      v.im += t.im;
    }
    vals.push_back(hp_sqrt(v, bits));
  }
  return vals;
}

}  // namespace alk
