#include "alk/git4.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "alk/error.hpp"

namespace alk {

Perm perm_identity() { return {0, 1, 2, 3}; }

Perm perm_from_cycles(const std::string& s) {
  Perm p = perm_identity();
  if (s == "id" || s == "()" || s.empty()) return p;
  std::vector<int> cyc;
  auto close = [&] {
    for (std::size_t k = 0; k < cyc.size(); ++k) p[cyc[k]] = cyc[(k + 1) % cyc.size()];
    cyc.clear();
  };
  bool open = false;
  for (char ch : s) {
    if (ch == '(') {
      if (open) throw InputError("nested cycle in '" + s + "'");
      open = true;
    } else if (ch == ')') {
      if (!open) throw InputError("unbalanced cycle in '" + s + "'");
      close();
      open = false;
    } else if (ch >= '1' && ch <= '4' && open) {
      cyc.push_back(ch - '1');
    } else if (ch != ' ' && ch != ',') {
      throw InputError("bad permutation '" + s + "'");
    }
  }
  if (open) throw InputError("unbalanced cycle in '" + s + "'");
  Perm seen{};
  for (int i : p) ++seen[i];
  for (int c : seen)
    if (c != 1) throw InputError("cycles of '" + s + "' overlap");
  return p;
}

std::string perm_cycles(const Perm& p) {
  std::string out;
  std::array<bool, 4> done{};
  for (int i = 0; i < 4; ++i) {
    if (done[i] || p[i] == i) continue;
    out += '(';
    for (int j = i; !done[j]; j = p[j]) {
      done[j] = true;
      out += static_cast<char>('1' + j);
    }
    out += ')';
  }
  return out.empty() ? "id" : out;
}

Perm perm_compose(const Perm& a, const Perm& b) {
  Perm r;
  for (int i = 0; i < 4; ++i) r[i] = a[b[i]];
  return r;
}

Perm perm_inverse(const Perm& p) {
  Perm r;
  for (int i = 0; i < 4; ++i) r[p[i]] = i;
  return r;
}

int perm_sign(const Perm& p) {
  int inv = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 ? -1 : 1;
}

const std::vector<Perm>& all_perms() {
  static const std::vector<Perm> v = [] {
    std::vector<Perm> out;
    Perm p = perm_identity();
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
  }();
  return v;
}

namespace {

std::size_t perm_index(const Perm& p) {
  const auto& v = all_perms();
  return static_cast<std::size_t>(std::find(v.begin(), v.end(), p) - v.begin());
}

TowerElem eval_at(const TowerElem& x, const TowerElem& s1, const TowerElem& s2) {
  const auto& c = x.coords();
  Tower L = s1.tower();
  return L.rational(c[0]) + L.rational(c[1]) * s1 + L.rational(c[2]) * s2 +
         L.rational(c[3]) * s1 * s2;
}

}  // namespace

TowerElem EmbeddingMatrix::embed(int j, const TowerElem& x) const {
  if (!x.tower().same(Kt)) throw InputError("element is not in K");
  return eval_at(x, sigma[j].first, sigma[j].second);
}

bool EmbeddingMatrix::compatible_with_f() const {
  return sigma[0].first == sigma[1].first && sigma[2].first == sigma[3].first;
}

QMat regular_rep(const QuarticTower& K, const TowerElem& x) {
  Tower T = K.tower();
  if (!x.tower().same(T)) throw InputError("element is not in K");
  QMat m = qmat(4, 4);
  for (int i = 0; i < 4; ++i) {
    std::vector<Q> e(4, Q(0));
    e[i] = 1;
    TowerElem y = T.from_coords(e) * x;
    for (int j = 0; j < 4; ++j) m(i, j) = y.coords()[j];
  }
  return m;
}

EmbeddingMatrix regular_embedding(const QuarticTower& K, std::array<int, 4> order) {
  EmbeddingMatrix E{K, K.tower(), K.tower(), {}, order, {}, {}, {}, {}};
  {
    std::array<int, 4> s = order;
    std::sort(s.begin(), s.end());
    if (s != std::array<int, 4>{0, 1, 2, 3}) throw InputError("embedding order is not a permutation");
  }
  const GaloisType type = K.type();
  const Q n = K.delta.norm();
  TowerElem r1, r2, rho;
  if (type == GaloisType::Dihedral) {
    Tower F1 = Tower().extend(Tower().rational(K.F.d()));
    TowerElem dconj = E.Kt.lift(F1.from_coords({K.delta.a(), -K.delta.b()}));
    E.L = E.Kt.extend(dconj);
    r1 = E.L.gen(1);
    r2 = E.L.gen(2);
    rho = E.L.gen(3);
  } else {
    r1 = E.L.gen(1);
    r2 = E.L.gen(2);
    if (type == GaloisType::Biquadratic) {
      Q w(isqrt(n.get_num()), isqrt(n.get_den()));
      rho = E.L.rational(w) / r2;
    } else {
      Q m = n / K.F.d();
      Q w(isqrt(m.get_num()), isqrt(m.get_den()));
      rho = E.L.rational(w) * r1 / r2;
    }
  }
  TowerElem dprime = E.L.lift(Tower().extend(Tower().rational(K.F.d())).from_coords(
      {K.delta.a(), -K.delta.b()}));
  if (rho * rho != dprime) throw std::logic_error("conjugate square root is wrong");
  const std::array<std::pair<TowerElem, TowerElem>, 4> std_sigma{
      {{r1, r2}, {r1, -r2}, {-r1, rho}, {-r1, -rho}}};
  for (int j = 0; j < 4; ++j) E.sigma[j] = std_sigma[order[j]];

  E.g = LMat(4, 4, E.L.zero());
  for (int i = 0; i < 4; ++i) {
    std::vector<Q> e(4, Q(0));
    e[i] = 1;
    TowerElem x = E.Kt.from_coords(e);
    for (int j = 0; j < 4; ++j) E.g(i, j) = E.embed(j, x);
  }
  E.ginv = inverse(E.g, E.L.zero(), E.L.one());

  // Gal(L/Q): generator images among +- the conjugate roots
  std::vector<TowerElem> c1{r1, -r1};
  std::vector<TowerElem> c2{r2, -r2};
  if (rho != r2 && rho != -r2) {  // rho = +-r2 when delta is rational
    c2.push_back(rho);
    c2.push_back(-rho);
  }
  std::vector<std::vector<TowerElem>> cands;
  for (const auto& a : c1)
    for (const auto& b : c2) {
      if (E.L.levels() == 2) {
        cands.push_back({a, b});
      } else {
        for (const auto& c : c2) {
          // sqrt delta and sqrt delta' must go to different roots
          bool b_is_r2 = b == r2 || b == -r2, c_is_r2 = c == r2 || c == -r2;
          if (b_is_r2 != c_is_r2) cands.push_back({a, b, c});
        }
      }
    }
  for (auto& imgs : cands) {
    TowerAuto tau(imgs);
    if (!tau.well_defined()) continue;
    Perm p;
    for (int j = 0; j < 4; ++j) {
      TowerElem a = tau.apply(E.sigma[j].first), b = tau.apply(E.sigma[j].second);
      int k = 0;
      while (k < 4 && !(E.sigma[k].first == a && E.sigma[k].second == b)) ++k;
      if (k == 4) throw std::logic_error("Galois image of an embedding not found");
      p[j] = k;
    }
    E.galois.push_back(tau);
    E.galois_perm.push_back(p);
  }
  const std::size_t expect = type == GaloisType::Dihedral ? 8 : 4;
  if (E.galois.size() != expect) throw std::logic_error("wrong number of automorphisms of L");
  return E;
}

LMat conjugate(const EmbeddingMatrix& E, const QMat& gamma) {
  if (gamma.rows() != 4 || gamma.cols() != 4) throw InputError("need a 4x4 matrix");
  LMat m(4, 4, E.L.zero());
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = E.L.rational(gamma(i, j));
  return E.ginv * m * E.g;
}

const TowerElem& InvariantProfile::operator[](const Perm& s) const { return exact.at(perm_index(s)); }

InvariantProfile psi_invariants(const QMat& gamma, const EmbeddingMatrix& E) {
  const Q dt = qdet(gamma);
  if (dt == 0) throw InputError("gamma must be invertible");
  InvariantProfile P{E.K.type(), conjugate(E, gamma), {}, {}, {}};
  const auto gens = generator_values(E.L);
  const TowerElem inv_det = E.L.rational(1 / dt);
  for (const Perm& s : all_perms()) {
    TowerElem v = E.L.rational(perm_sign(s)) * inv_det;
    for (int i = 0; i < 4; ++i) v = v * P.gprime(i, s[i]);
    P.value.push_back(evaluate(v, gens));
    P.rational.push_back(v.is_rational() ? std::optional<Q>(v.rational_value()) : std::nullopt);
    P.exact.push_back(std::move(v));
  }
  return P;
}

GaloisStructure galois_structures(GaloisType t) {
  auto P = [](const char* s) { return perm_from_cycles(s); };
  GaloisStructure g;
  switch (t) {
    case GaloisType::Biquadratic:
      g.image = {P("id"), P("(12)(34)"), P("(13)(24)"), P("(14)(23)")};
      g.gal_k_f = {P("id"), P("(12)(34)")};
      g.s_sp = {P("(14)(23)"), P("(13)(24)")};
      g.pattern = {{{1, 2, 3, 4}, {2, 1, 4, 3}, {3, 4, 1, 2}, {4, 3, 2, 1}}};
      break;
    case GaloisType::Cyclic:
      g.image = {P("id"), P("(1324)"), P("(12)(34)"), P("(1423)")};
      g.gal_k_f = {P("id"), P("(12)(34)")};
      g.s_sp = {P("(1324)"), P("(1423)")};
      g.pattern = {{{1, 2, 3, 4}, {2, 1, 4, 3}, {4, 3, 1, 2}, {3, 4, 2, 1}}};
      break;
    case GaloisType::Dihedral: {
      // generated by (1324) and (34)
      std::set<Perm> grp{P("id")};
      const Perm gens[2] = {P("(1324)"), P("(34)")};
      for (bool grew = true; grew;) {
        grew = false;
        for (Perm x : std::vector<Perm>(grp.begin(), grp.end()))
          for (const Perm& y : gens) grew |= grp.insert(perm_compose(x, y)).second;
      }
      g.image.assign(grp.begin(), grp.end());
      g.s_sp = {P("(1324)"), P("(1423)")};
      g.pattern = {{{1, 2, 3, 3}, {2, 1, 3, 3}, {3, 3, 1, 2}, {3, 3, 2, 1}}};
      break;
    }
  }
  return g;
}

std::array<std::array<int, 4>, 4> position_orbits(const std::vector<Perm>& group) {
  std::array<std::array<int, 4>, 4> lab{};
  int next = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      if (lab[i][j]) continue;
      ++next;
      for (const Perm& p : group) lab[p[i]][p[j]] = next;
    }
  return lab;
}

bool centralized_by(const Perm& s, const std::vector<Perm>& group) {
  for (const Perm& p : group)
    if (perm_compose(p, s) != perm_compose(s, p)) return false;
  return true;
}

RelationReport pattern_and_relation_check(const QMat& gamma, const EmbeddingMatrix& E) {
  RelationReport r;
  const GaloisStructure gs = galois_structures(E.K.type());
  r.compatible_with_f = E.compatible_with_f();
  std::set<Perm> img(E.galois_perm.begin(), E.galois_perm.end());
  r.image_matches = img == std::set<Perm>(gs.image.begin(), gs.image.end());
  r.pattern_matches = position_orbits(E.galois_perm) == gs.pattern;

  const InvariantProfile P = psi_invariants(gamma, E);
  const auto gens = generator_values(E.L);
  r.entry_relation = r.profile_relation = true;
  for (std::size_t t = 0; t < E.galois.size(); ++t) {
    const TowerAuto& tau = E.galois[t];
    const Perm& pi = E.galois_perm[t];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        TowerElem lhs = tau.apply(P.gprime(i, j));
        const TowerElem& rhs = P.gprime(pi[i], pi[j]);
        if (lhs != rhs) r.entry_relation = false;
        r.numeric_error =
            std::max(r.numeric_error, std::abs(evaluate(lhs, gens) - evaluate(rhs, gens)));
      }
    for (const Perm& s : all_perms()) {
      const Perm conj = perm_compose(perm_compose(pi, s), perm_inverse(pi));
      TowerElem lhs = tau.apply(P[s]);
      if (lhs != P[conj]) r.profile_relation = false;
      r.numeric_error = std::max(r.numeric_error, std::abs(evaluate(lhs, gens) -
                                                           P.value[perm_index(conj)]));
    }
  }
  return r;
}

BlockMembership block_membership_test(const QMat& gamma, const EmbeddingMatrix& E) {
  BlockMembership b;
  const InvariantProfile P = psi_invariants(gamma, E);
  b.in_R_invariants = true;
  for (const Perm& s : galois_structures(E.K.type()).s_sp) {
    b.psi_sp.push_back(P[s]);
    if (!P[s].is_zero()) b.in_R_invariants = false;
  }
  const QMat sd = regular_rep(E.K, E.Kt.gen(1));
  b.in_R_commutes = gamma * sd == sd * gamma;
  return b;
}

double eta_sigma(const std::array<double, 4>& c, const Perm& s) {
  double e = 0;
  for (int i = 0; i < 4; ++i)
    if (s[i] != i) e += std::fabs(c[s[i]] - c[i]);
  return e;
}

EntropyData entropy_quantities(const std::array<double, 4>& coeff, double scale, GaloisType t) {
  EntropyData d;
  d.coeff = coeff;
  d.scale = scale;
  double eta = INFINITY, haar = 0;
  for (const Perm& s : galois_structures(t).s_sp) {
    double e = eta_sigma(coeff, s);
    d.eta_sp.push_back({s, e * scale});
    eta = std::min(eta, e);
  }
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) haar += std::fabs(coeff[i] - coeff[j]);
  const double hint = std::fabs(coeff[0] - coeff[1]) + std::fabs(coeff[2] - coeff[3]);
  d.in_a_prime = 3 * hint < haar;
  d.eta_criterion = eta > 2 * hint;
  d.eta = eta * scale;
  d.h_haar = haar * scale;
  d.h_int = hint * scale;
  return d;
}

EntropyData entropy_from_diagonal(const std::array<Q, 4>& t, const Z& p, GaloisType type) {
  std::array<double, 4> c;
  for (int i = 0; i < 4; ++i) {
    if (t[i] == 0) throw InputError("diagonal entries must be nonzero");
    c[i] = p == 0 ? log_abs(t[i]) : -static_cast<double>(vp(t[i], p));
  }
  return entropy_quantities(c, p == 0 ? 1.0 : std::log(p.get_d()), type);
}

TauWindowInput::Mode tau_mode_from_string(const std::string& s) {
  if (s == "main") return TauWindowInput::Mode::Main;
  if (s == "refined") return TauWindowInput::Mode::Refined;
  if (s == "dominant") return TauWindowInput::Mode::Dominant;
  throw InputError("unknown tau-window mode '" + s + "'");
}

TauWindow tau_window(const TauWindowInput& in) {
  if (in.D_K <= 0 || in.D_F <= 0) throw InputError("discriminants must be positive");
  if (in.c <= 0) throw InputError("c must be positive");
  const double lk = log_abs(in.D_K), lf = log_abs(in.D_F);
  TauWindow w;
  if (!(in.eta > 0)) {
    w.empty = true;
    w.lo = INFINITY;
    return w;
  }
  w.lo = std::max(0.0, (0.5 * lk + in.kappa) / in.eta);
  std::vector<double> rhs{lk - 3 * lf - std::log(in.c)};
  if (in.mode == TauWindowInput::Mode::Refined) rhs.push_back(0.5 * lk - in.beta * lf);
  if (in.mode == TauWindowInput::Mode::Dominant) rhs.push_back((0.5 - 2 * in.eps) * lk);
  const double r = *std::min_element(rhs.begin(), rhs.end());
  if (in.h_int == 0) {
    w.hi_infinite = r >= 0;
    w.hi = w.hi_infinite ? INFINITY : -INFINITY;
  } else {
    w.hi = r / (2 * in.h_int);
  }
  w.empty = !(w.hi > w.lo);
  return w;
}

ContentVanishing content_vanishing_detector(const InvariantProfile& profile, double log_disc,
                                            double tau, const EntropyData& entropy, double C) {
  ContentVanishing cv;
  const GaloisStructure gs = galois_structures(profile.type);
  cv.psi_sp_vanish = true;
  for (const Perm& s : gs.s_sp)
    if (!profile[s].is_zero()) cv.psi_sp_vanish = false;
  if (profile.type == GaloisType::Dihedral) {
    double sum = 0;
    for (const auto& [s, e] : entropy.eta_sp) sum += e;
    double lb = 2 * std::log(C) - 2 * tau * sum + 2 * log_disc;
    cv.log_bound.push_back({gs.s_sp.front(), lb});
    cv.forced_zero = lb < 0;
  } else {
    cv.forced_zero = true;
    for (const auto& [s, e] : entropy.eta_sp) {
      double lb = std::log(C) - 2 * tau * e + log_disc;
      cv.log_bound.push_back({s, lb});
      if (!(lb < 0)) cv.forced_zero = false;
    }
  }
  return cv;
}

namespace {

void check_diag(std::size_t n, std::size_t m) {
  if (n == 0 || m != n) throw InputError("diagonal element and matrix sizes differ");
}

}  // namespace

bool bowen_member_loop(const QMat& x, const std::vector<Q>& a, const Z& p, long tau) {
  const std::size_t n = x.rows();
  check_diag(n, a.size());
  if (tau < 0) throw InputError("tau must be nonnegative");
  for (long t = -tau; t <= tau; ++t) {
    QMat y = x;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y(i, j) = qpow(a[i], t) * x(i, j) * qpow(a[j], -t);
    if (!in_gl2_zp(y, p)) return false;
  }
  return true;
}

bool bowen_member_closed(const QMat& x, const std::vector<Q>& a, const Z& p, long tau) {
  const std::size_t n = x.rows();
  check_diag(n, a.size());
  if (tau < 0) throw InputError("tau must be nonnegative");
  const Q d = qdet(x);
  if (d == 0 || vp(d, p) != 0) return false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (x(i, j) == 0) continue;
      long gap = std::labs(static_cast<long>(vp(a[i], p)) - vp(a[j], p));
      if (vp(x(i, j), p) < tau * gap) return false;
    }
  return true;
}

bool bowen_member_loop_arch(const std::vector<double>& x, const std::vector<double>& a, double r,
                            long tau) {
  const std::size_t n = a.size();
  check_diag(n * n, x.size());
  for (long t = -tau; t <= tau; ++t)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double y = std::pow(a[i] / a[j], static_cast<double>(t)) * x[i * n + j];
        if (std::fabs(y - (i == j ? 1.0 : 0.0)) > r) return false;
      }
  return true;
}

bool bowen_member_closed_arch(const std::vector<double>& x, const std::vector<double>& a,
                              double r, long tau) {
  const std::size_t n = a.size();
  check_diag(n * n, x.size());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double q = std::fabs(a[i] / a[j]);
      double stretch = std::pow(std::max(q, 1 / q), static_cast<double>(tau));
      double dev = i == j ? std::fabs(x[i * n + j] - 1) : std::fabs(x[i * n + j]) * stretch;
      if (dev > r) return false;
    }
  return true;
}

}  // namespace alk
