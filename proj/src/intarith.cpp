#include "alk/intarith.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "alk/error.hpp"

namespace alk {

int vp(const Z& n, const Z& p) {
  if (n == 0) return kInfValuation;
  Z m = abs(n);
  int v = 0;
  while (mpz_divisible_p(m.get_mpz_t(), p.get_mpz_t())) {
    m /= p;
    ++v;
  }
  return v;
}

int vp(const Q& x, const Z& p) {
  if (x == 0) return kInfValuation;
  return vp(Z(x.get_num()), p) - vp(Z(x.get_den()), p);
}

Z ipow(const Z& b, unsigned long e) {
  Z r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Q qpow(const Q& b, long e) {
  if (e >= 0) return Q(ipow(b.get_num(), e), ipow(b.get_den(), e));
  if (b == 0) throw InputError("qpow: zero to a negative power");
  Q r(ipow(b.get_den(), -e), ipow(b.get_num(), -e));
  r.canonicalize();
  return r;
}

bool is_prime(const Z& n) { return n > 1 && mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

namespace {

Z pollard_brent(const Z& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  for (unsigned long c = 1;; ++c) {
    Z y = 2, x, q = 1, g = 1, ys;
    unsigned long r = 1;
    const unsigned long m = 64;
    auto f = [&](const Z& v) { return Z((v * v + c) % n); };
    do {
      x = y;
      for (unsigned long i = 0; i < r; ++i) y = f(y);
      unsigned long k = 0;
      do {
        ys = y;
        for (unsigned long i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = (q * abs(x - y)) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += m;
      } while (k < r && g == 1);
      r *= 2;
    } while (g == 1);
    if (g == n) {
      do {
        ys = f(ys);
        Z t = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_rec(Z n, std::vector<Z>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Z d = pollard_brent(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}

}  // namespace

std::vector<std::pair<Z, int>> factor(const Z& n0) {
  if (n0 == 0) throw InputError("factor: zero");
  Z n = abs(n0);
  std::vector<Z> ps;
  for (unsigned long p = 2; p < 10000 && n > 1; p += (p == 2 ? 1 : 2)) {
    while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ps.emplace_back(p);
      n /= p;
    }
  }
  factor_rec(n, ps);
  std::sort(ps.begin(), ps.end());
  std::vector<std::pair<Z, int>> out;
  for (const auto& p : ps) {
    if (!out.empty() && out.back().first == p)
      ++out.back().second;
    else
      out.emplace_back(p, 1);
  }
  return out;
}

bool is_squarefree(const Z& n) {
  if (n == 0) return false;
  for (const auto& [p, e] : factor(n))
    if (e > 1) return false;
  return true;
}

bool is_square(const Z& n) { return n >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0; }

bool is_square(const Q& x) { return is_square(Z(x.get_num())) && is_square(Z(x.get_den())); }

Z isqrt(const Z& n) {
  Z r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

Z divisor_count(const Z& n) {
  Z c = 1;
  for (const auto& [p, e] : factor(n)) c *= e + 1;
  return c;
}

std::vector<Z> divisors(const Z& n) {
  std::vector<Z> ds{1};
  for (const auto& [p, e] : factor(n)) {
    std::size_t base = ds.size();
    Z pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) ds.push_back(ds[i] * pk);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

int legendre(const Z& a, const Z& p) { return mpz_legendre(a.get_mpz_t(), p.get_mpz_t()); }

Z sqrt_mod_prime(const Z& a0, const Z& p) {
  Z a = a0 % p;
  if (a < 0) a += p;
  if (a == 0) return 0;
  if (legendre(a, p) != 1) throw InputError("sqrt_mod_prime: not a square");
  // Tonelli-Shanks
  Z q = p - 1;
  unsigned long s = 0;
  while (mpz_even_p(q.get_mpz_t())) {
    q /= 2;
    ++s;
  }
  Z z = 2;
  while (legendre(z, p) != -1) ++z;
  Z m = s, c, t, r, e;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  e = (q + 1) / 2;
  mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
  while (t != 1) {
    unsigned long i = 0;
    Z tt = t;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    Z b = c;
    for (unsigned long j = 0; j + 1 < m.get_ui() - i; ++j) b = b * b % p;
    m = i;
    c = b * b % p;
    t = t * c % p;
    r = r * b % p;
  }
  return r;
}

Z hensel_sqrt(const Z& d, const Z& p, int M) {
  if (M < 1) throw InputError("hensel_sqrt: precision must be positive");
  if (p == 2) {
    Z dm = d % 8;
    if (dm < 0) dm += 8;
    if (dm != 1) throw InputError("hensel_sqrt: d not 1 mod 8");
    Z mod = ipow(2, M);
    Z r = 1;
    for (int k = 3; k < M; ++k) {
      Z m1 = ipow(2, k + 1);
      Z diff = (r * r - d) % m1;
      if (diff != 0) r += ipow(2, k - 1);
    }
    r %= mod;
    return r;
  }
  Z r = sqrt_mod_prime(d, p);
  if (r == 0) throw InputError("hensel_sqrt: d divisible by p");
  Z pk = p;
  int k = 1;
  while (k < M) {
    k = std::min(2 * k, M);
    pk = ipow(p, k);
    // Newton step r <- r - (r^2 - d) / (2r) mod p^k
    Z num = (r * r - d) % pk;
    Z den = (2 * r) % pk;
    Z inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pk.get_mpz_t());
    r = (r - num * inv) % pk;
    if (r < 0) r += pk;
  }
  return r;
}

Z unit_part_mod(const Q& x, const Z& p, int k) {
  if (x == 0) throw InputError("unit_part_mod: zero");
  int v = vp(x, p);
  Z num = x.get_num(), den = x.get_den();
  if (v > 0)
    num /= ipow(p, v);
  else if (v < 0)
    den /= ipow(p, -v);
  Z mod = ipow(p, k), inv;
  Z dm = den % mod;
  if (dm < 0) dm += mod;
  mpz_invert(inv.get_mpz_t(), dm.get_mpz_t(), mod.get_mpz_t());
  Z r = num * inv % mod;
  if (r < 0) r += mod;
  return r;
}

std::vector<Z> primes_up_to(long n) {
  std::vector<char> sieve(n + 1, 1);
  std::vector<Z> out;
  for (long i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.emplace_back(i);
    for (long j = i * i; j <= n; j += i) sieve[j] = 0;
  }
  return out;
}

}  // namespace alk

namespace alk {

double log_abs(const Z& n) {
  if (n == 0) throw InputError("log of zero");
  long e = 0;
  double m = mpz_get_d_2exp(&e, n.get_mpz_t());
  return std::log(std::fabs(m)) + static_cast<double>(e) * std::log(2.0);
}

double log_abs(const Q& x) { return log_abs(Z(x.get_num())) - log_abs(Z(x.get_den())); }

}  // namespace alk
