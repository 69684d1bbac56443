#pragma once

#include <complex>
#include <vector>

#include "alk/matrix.hpp"
#include "alk/numfield.hpp"

namespace alk {

using QMat = Matrix<Q>;
using KMat = Matrix<QFElem>;

QMat qmat(std::size_t r, std::size_t c);
QMat qmat(const std::vector<std::vector<Q>>& rows);
Q qdet(const QMat& m);

// The order O = Z[f omega] of K = Q(sqrt D); at every p it is Z_p[alpha]
// with alpha = f omega.
struct QuadOrder {
  QuadField K = QuadField::rationals();
  Z f = 1;
  QFElem alpha() const { return K.omega() * K.elem(Q(f)); }
  QFElem different() const { return alpha() - alpha().conj(); }  // generates the different
  Q disc() const { return different().norm(); }                   // f^2 disc(O_K), signed
};

// Local data of O at p: splitting of p in K, different generator and
// disc_u = |Nr Delta|_p^-1.
struct LocalQuadExt {
  QuadOrder order;
  Z p;
  PrimeType type = PrimeType::Inert;
  QFElem alpha, delta;
  Z disc_local;
  bool split() const { return type == PrimeType::Split1 || type == PrimeType::Split2; }
};
LocalQuadExt different_and_orders(const QuadField& K, const Z& p, const Z& f);

// A non-split torus of GL2 over Q, the centralizer of X. The conjugator c
// satisfies c X c^-1 = diag(alpha, sigma alpha) and sigma(c) = w c.
struct TorusData {
  QuadField K;
  QMat X;
  QFElem alpha;
  KMat c, cinv;

  // X = multiplication by alpha = f omega in the basis (1, alpha)
  static TorusData from_order(const QuadOrder& O);
  // any X in M2(Q) with irreducible characteristic polynomial
  static TorusData from_generator(const QMat& X);

  QMat element(const Q& x, const Q& y) const;  // x + y X
  QMat normalizer_rep() const;                 // c^-1 w c, coordinates (0, 1)
};

struct LocalCoords {
  QFElem b1, b2;
};
// c gamma c^-1 = [[b1, b2], [sigma b2, sigma b1]]; throws if the pattern fails.
LocalCoords local_coords(const TorusData& T, const QMat& gamma);
QMat reconstruct(const TorusData& T, const LocalCoords& b);
Q psi_invariant(const TorusData& T, const QMat& gamma);

// Archimedean coordinates with floats, following the normalized traceless
// generator and a unipotent pre-conjugation so that |b| >= 1/2.
struct ArchCoords {
  bool split = false;              // K_u = R x R
  std::complex<double> alpha;      // eigenvalue of the normalized generator
  std::complex<double> b1[2], b2[2];  // per place w above u (one used when not split)
  double disc = 0;                 // 1 / (4 |alpha|^2)
  double psi = 0;
  double reconstruction_error = 0;
  double b_entry = 0;              // |b| after pre-conjugation
};
ArchCoords arch_coords(const TorusData& T, const QMat& gamma);

struct IntegralityReport {
  bool b_in_inverse_different = false;
  bool difference_integral = false;
  bool traces_integral = false;
  bool det_unit = false;
  bool gamma_integral = false;  // gamma in GL2(Z_p), checked directly
  bool all() const {
    return b_in_inverse_different && difference_integral && traces_integral && det_unit;
  }
};
// T must come from an order (from_order) for the integrality statements.
IntegralityReport integrality_checks(const TorusData& T, const QuadOrder& O, const QMat& gamma,
                                     const Z& p);
bool in_gl2_zp(const QMat& g, const Z& p);

// p-adic and Archimedean absolute values of psi against the bounds
// |psi|_p <= disc_u and |psi|_p <= disc_u |alpha(a)|_p^(-2 tau).
struct PsiBound {
  Q abs_psi, abs_one_plus_psi, bound;
};
PsiBound psi_local_bound(const TorusData& T, const LocalQuadExt& E, const QMat& k,
                         const Q& alpha_abs, long tau);

// Split non-Archimedean orbital measure bound
// (v(psi) + 1)(v(1 + psi) + 1), zero when a range is empty.
long orbital_measure_split(const Q& psi, const Z& p);
// Field case: 1 if b sigma(c) lies in the inverse different, else 0.
int orbital_measure_field(const LocalQuadExt& E, const QFElem& b, const QFElem& c);
// Archimedean split formula with R = r disc^(1/2) (implied constant 1).
double orbital_measure_arch(double psi, double r, double disc, bool complex_place);

// Index of N(O_u^x) in Z_p^x.
int norm_index(const QuadOrder& O, const Z& p);

// x in F is p-integral (omega coordinates without p in the denominators).
bool p_integral(const QuadField& F, const QFElem& x, const Z& p);

struct BlockCoords {
  KMat c1;
  KMat A1, A2;
  bool pattern_ok = false;     // lower blocks are sigma(A2), sigma(A1)
  bool delta_integral = false;  // Delta A1, Delta A2 integral at p
  bool difference_integral = false;  // A1 - A2 integral at p
};
// gamma in GL4(Q) written in the basis (l, l alpha, l beta, l beta alpha);
// F = Q(sqrt d) with alpha = omega_F.
BlockCoords block_coordinates_gl4(const QMat& gamma, const QuadField& F, const Z& p);
// The image of GL2(F) in GL4(Q) for that basis.
QMat embed_gl2_over_f(const QuadField& F, const std::vector<QFElem>& entries);

}  // namespace alk
