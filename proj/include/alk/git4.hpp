#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "alk/localgeom.hpp"
#include "alk/matrix.hpp"
#include "alk/quartic.hpp"
#include "alk/tower.hpp"

namespace alk {

// Permutation of {0,1,2,3}: p[i] is the image of i. Printed 1-based in
// cycle notation.
using Perm = std::array<int, 4>;
Perm perm_identity();
Perm perm_from_cycles(const std::string& s);  // "(1324)", "(12)(34)", "id"
std::string perm_cycles(const Perm& p);
Perm perm_compose(const Perm& a, const Perm& b);  // a o b
Perm perm_inverse(const Perm& p);
int perm_sign(const Perm& p);
const std::vector<Perm>& all_perms();  // 24, lexicographic

using LMat = Matrix<TowerElem>;

// g = (sigma_j(x_i)) over the Galois closure L, exact. The basis of K is
// (1, sqrt d, sqrt delta, sqrt d sqrt delta) and K acts on Q^4 by the
// regular representation in that basis (row i = coordinates of x_i x).
struct EmbeddingMatrix {
  QuarticTower K;
  Tower Kt, L;
  // images of (sqrt d, sqrt delta) under sigma_1..sigma_4, after `order`
  std::array<std::pair<TowerElem, TowerElem>, 4> sigma;
  std::array<int, 4> order{0, 1, 2, 3};
  LMat g, ginv;
  std::vector<TowerAuto> galois;  // Gal(L/Q)
  std::vector<Perm> galois_perm;  // tau -> (j -> k with sigma_k = tau o sigma_j)

  TowerElem embed(int j, const TowerElem& x) const;  // sigma_j(x), x in Kt
  bool compatible_with_f() const;
};

QMat regular_rep(const QuarticTower& K, const TowerElem& x);
// `order` permutes the standard embeddings; anything but the identity is a
// deliberately corrupted ordering for negative controls.
EmbeddingMatrix regular_embedding(const QuarticTower& K, std::array<int, 4> order = {0, 1, 2, 3});
LMat conjugate(const EmbeddingMatrix& E, const QMat& gamma);  // g^-1 gamma g

struct InvariantProfile {
  GaloisType type;
  LMat gprime;
  std::vector<TowerElem> exact;               // indexed like all_perms()
  std::vector<std::complex<double>> value;    // fixed complex embedding of L
  std::vector<std::optional<Q>> rational;     // set when the value lies in Q
  const TowerElem& operator[](const Perm& s) const;
};
// Psi_sigma(gamma) = sign(sigma) prod_i g'_{i sigma(i)} / det gamma.
InvariantProfile psi_invariants(const QMat& gamma, const EmbeddingMatrix& E);

struct GaloisStructure {
  std::vector<Perm> image;
  std::vector<Perm> gal_k_f;  // abelian types only
  std::vector<Perm> s_sp;
  std::array<std::array<int, 4>, 4> pattern;  // labels 1..4 of the entry classes
};
GaloisStructure galois_structures(GaloisType t);
// Orbits of the positions (i, j) under a permutation group, labelled in
// order of first appearance.
std::array<std::array<int, 4>, 4> position_orbits(const std::vector<Perm>& group);
bool centralized_by(const Perm& s, const std::vector<Perm>& group);

struct RelationReport {
  bool compatible_with_f = false;
  bool image_matches = false;    // computed image equals the type's group
  bool entry_relation = false;   // tau(g'_ij) = g'_{tau i, tau j}
  bool pattern_matches = false;  // orbit classes equal the displayed pattern
  bool profile_relation = false; // tau.Psi_sigma = Psi_{tau sigma tau^-1}
  double numeric_error = 0;      // same relations through complex values
  bool pass() const {
    return compatible_with_f && image_matches && entry_relation && pattern_matches &&
           profile_relation;
  }
};
RelationReport pattern_and_relation_check(const QMat& gamma, const EmbeddingMatrix& E);

struct BlockMembership {
  bool in_R_invariants = false;  // Psi_sigma = 0 on S_sp
  bool in_R_commutes = false;    // gamma commutes with sqrt d, exact over Q
  std::vector<TowerElem> psi_sp;
  bool agree() const { return in_R_invariants == in_R_commutes; }
};
BlockMembership block_membership_test(const QMat& gamma, const EmbeddingMatrix& E);

// Root sums of a = diag(t_1..t_4) at a place. At a finite place the log
// absolute values are integers times log p, so all sums are formed on the
// integer coefficients and scaled last; the invariances are then exact.
struct EntropyData {
  std::array<double, 4> coeff;  // log|t_i|_u / scale
  double scale = 1;             // log p, or 1 at infinity
  std::vector<std::pair<Perm, double>> eta_sp;
  double eta = 0, h_haar = 0, h_int = 0;
  bool in_a_prime = false;      // h_int < h_haar / 3
  bool eta_criterion = false;   // eta > 2 h_int
};
double eta_sigma(const std::array<double, 4>& coeff, const Perm& s);  // in coefficient units
EntropyData entropy_quantities(const std::array<double, 4>& coeff, double scale, GaloisType t);
// a given by rational diagonal entries; p = 0 means the real place.
EntropyData entropy_from_diagonal(const std::array<Q, 4>& t, const Z& p, GaloisType type);

struct TauWindowInput {
  double eta = 0, h_int = 0;
  Z D_K, D_F;
  double c = 1, kappa = 0;
  enum class Mode { Main, Refined, Dominant } mode = Mode::Main;
  double beta = 0;  // refined
  double eps = 0;   // dominant
};
struct TauWindow {
  double lo = 0;  // open
  double hi = 0;  // closed
  bool hi_infinite = false;
  bool empty = false;
};
TauWindow tau_window(const TauWindowInput& in);
TauWindowInput::Mode tau_mode_from_string(const std::string& s);

struct ContentVanishing {
  std::vector<std::pair<Perm, double>> log_bound;  // abelian: per sigma; dihedral: one product bound
  bool forced_zero = false;
  bool psi_sp_vanish = false;
  bool consistent() const { return !forced_zero || psi_sp_vanish; }
};
// bound C exp(-2 tau eta_sigma) disc, or the squared product form for dihedral K.
ContentVanishing content_vanishing_detector(const InvariantProfile& profile, double log_disc,
                                            double tau, const EntropyData& entropy,
                                            double C = 1);

// Bowen balls for B = GL_n(Z_p) and diagonal a, as a loop over |t| <= tau
// and through the valuation inequalities.
bool bowen_member_loop(const QMat& x, const std::vector<Q>& a, const Z& p, long tau);
bool bowen_member_closed(const QMat& x, const std::vector<Q>& a, const Z& p, long tau);
// At infinity with B = {x : max |x_ij - delta_ij| <= r}.
bool bowen_member_loop_arch(const std::vector<double>& x, const std::vector<double>& a, double r,
                            long tau);
bool bowen_member_closed_arch(const std::vector<double>& x, const std::vector<double>& a,
                              double r, long tau);

}  // namespace alk
