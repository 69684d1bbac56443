#pragma once

#include <gmpxx.h>

#include <utility>
#include <vector>

namespace alk {

using Z = mpz_class;
using Q = mpq_class;

constexpr int kInfValuation = 1 << 30;

int vp(const Z& n, const Z& p);  // kInfValuation for n == 0
int vp(const Q& x, const Z& p);

Z ipow(const Z& b, unsigned long e);
Q qpow(const Q& b, long e);

// Prime factorization of |n| (n != 0), primes ascending.
std::vector<std::pair<Z, int>> factor(const Z& n);
bool is_prime(const Z& n);
bool is_squarefree(const Z& n);
bool is_square(const Z& n);
bool is_square(const Q& x);
Z isqrt(const Z& n);
Z divisor_count(const Z& n);
std::vector<Z> divisors(const Z& n);  // positive divisors of |n|

int legendre(const Z& a, const Z& p);  // p odd prime
Z sqrt_mod_prime(const Z& a, const Z& p);  // a a nonzero square mod odd p

// Root r of x^2 = d in Z_p known mod p^M: r^2 = d mod p^M. Requires d a
// nonzero square unit at p (p odd), or d = 1 mod 8 (p = 2). For p = 2 the
// root is only determined mod 2^(M-1).
Z hensel_sqrt(const Z& d, const Z& p, int M);

// p-adic unit part of a rational modulo p^k.
Z unit_part_mod(const Q& x, const Z& p, int k);

std::vector<Z> primes_up_to(long n);

// log|x| without overflowing doubles on big numerators or denominators.
double log_abs(const Z& n);
double log_abs(const Q& x);

}  // namespace alk
