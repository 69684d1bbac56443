#include "alk/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "alk/git4.hpp"
#include "alk/oracles.hpp"
#include "alk/toralsets.hpp"

namespace alk {

namespace {

struct Tally {
  CriterionResult& r;
  void check(bool ok, const std::string& what) {
    ++r.checks;
    if (ok) return;
    if (r.failures == 0) r.detail = what;
    ++r.failures;
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

const long kQuadFields[] = {-1, 2, 5, -3};

void prr(Tally& t, const AcceptanceOptions& opt, std::mt19937_64& rng) {
  auto start = std::chrono::steady_clock::now();
  ThetaOptions to;
  to.tail_target = opt.tail_target;
  to.budget = opt.budget;
  double worst = 0;
  for (int it = 0; it < 20; ++it) {
    auto L = EuclideanLattice::from_rational(oracle::random_gram(1 + it % 3, rng));
    auto r = theta_invariants(L, to);
    double res = std::fabs(r.h0 - r.h1 - r.adeg);
    worst = std::max(worst, res);
    t.check(r.tail_bound < 1e-12, "tail bound " + fmt(r.tail_bound) + " on lattice " + std::to_string(it));
    t.check(res < 1e-9, "PRR residual " + fmt(res) + " on lattice " + std::to_string(it));
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.check(secs < 10, "runtime " + fmt(secs) + " s");
  if (!t.r.failures) t.r.detail = "20 lattices, max residual " + fmt(worst);
}

void canonical(Tally& t, const AcceptanceOptions& opt, std::mt19937_64& rng) {
  ThetaOptions to;
  to.tail_target = opt.tail_target;
  to.budget = opt.budget;
  for (long d : kQuadFields) {
    QuadField F(d);
    double diff = std::fabs(HermitianLineBundle::canonical(F).adeg() - std::log(F.disc().get_d()));
    t.check(diff < 1e-9, "adeg omega - log D_F = " + fmt(diff) + " for d=" + std::to_string(d));
  }
  for (int it = 0; it < 20; ++it) {
    QuadField F(kQuadFields[it % 4]);
    auto bt = bundle_theta_and_h0ar(oracle::random_bundle(F, rng), to);
    double diff = std::fabs(bt.report.h1 - bt.h1_duality);
    t.check(diff < 1e-9, "h1 routes differ by " + fmt(diff));
  }
  if (!t.r.failures) t.r.detail = "4 fields, 20 bundles";
}

void comparison(Tally& t, const AcceptanceOptions& opt, std::mt19937_64& rng) {
  ThetaOptions to;
  to.tail_target = opt.tail_target;
  to.budget = opt.budget;
  double gap = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    QuadField F(kQuadFields[it % 4]);
    auto bt = bundle_theta_and_h0ar(oracle::random_bundle(F, rng), to);
    double g = bt.report.h0 + bt.pi_n - bt.h0_ar;
    gap = std::min(gap, g);
    t.check(g > 0, "h0_Ar exceeds h0 + pi n by " + fmt(-g));
  }
  if (!t.r.failures) t.r.detail = "50 bundles, min gap " + fmt(gap);
}

void counting(Tally& t, const AcceptanceOptions& opt, std::mt19937_64& rng) {
  const long fields[] = {1, -1, 2, 5, -3};
  const double cs[] = {0.5, 1.0, 2.0};
  int accepted = 0;
  for (int attempt = 0; attempt < 50000 && accepted < 200; ++attempt) {
    QuadField F = oracle::field_of(fields[attempt % 5]);
    auto r = oracle::random_radius_family(F, rng);
    double c = cs[attempt % 3];
    auto chk = counting_bound_check(r, c, opt.budget);
    if (!chk.hypothesis) continue;
    ++accepted;
    t.check(chk.status == BoundStatus::Pass,
            "count " + std::to_string(chk.count) + " above bound " + fmt(chk.bound));
    long long naive = oracle::naive_box_count(r);
    t.check(naive == chk.count, "count " + std::to_string(chk.count) + " vs naive " + std::to_string(naive));
  }
  t.check(accepted == 200, "only " + std::to_string(accepted) + " cases satisfied the hypothesis");
  if (!t.r.failures) t.r.detail = "200 cases";
}

void product_formula(Tally& t, const AcceptanceOptions& opt, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-60, 60), den(1, 30);
  double worst = 0;
  for (long d : {1L, -1L, 2L, 5L, -3L, -7L}) {
    QuadField F = oracle::field_of(d);
    for (int it = 0; it < 100; ++it) {
      QFElem x;
      do {
        Q a(num(rng), den(rng)), b(F.is_rational() ? 0 : num(rng), den(rng));
        a.canonicalize();
        b.canonicalize();
        x = F.elem(a, b);
      } while (x.is_zero());
      auto c = content(F, x, opt.precision_bits);
      double e = std::fabs(c.value - 1);
      worst = std::max(worst, e);
      t.check(e < 1e-10, "content of " + x.str() + " is " + fmt(c.value));
    }
  }
  if (!t.r.failures) t.r.detail = "600 elements, max error " + fmt(worst);
}

void local_coords_check(Tally& t, const AcceptanceOptions&, std::mt19937_64& rng) {
  QuadField K2(2);
  auto T2 = TorusData::from_order(QuadOrder{K2, 1});
  Q ex = psi_invariant(T2, qmat({{Q(1), Q(1)}, {Q(0), Q(1)}}));
  t.check(ex == Q(-1, 2), "psi([[1,1],[0,1]]) = " + ex.get_str());
  for (long D : kQuadFields)
    for (long f : {1L, 3L}) {
      QuadOrder O{QuadField(D), f};
      auto T = TorusData::from_order(O);
      for (long p : {2L, 3L, 5L}) {
        auto E = different_and_orders(O.K, Z(p), Z(f));
        for (int it = 0; it < 100; ++it) {
          QMat k = oracle::random_glzp(rng, 2, p);
          auto b = local_coords(T, k);
          t.check(reconstruct(T, b) == k, "reconstruction failed");
          t.check(qdet(k) == b.b1.norm() - b.b2.norm(), "det != Nr b1 - Nr b2");
          auto pb = psi_local_bound(T, E, k, Q(1), 0);
          t.check(pb.abs_psi <= Q(E.disc_local),
                  "|psi|_p = " + pb.abs_psi.get_str() + " > disc_u = " + E.disc_local.get_str() +
                      " (D=" + std::to_string(D) + " f=" + std::to_string(f) + " p=" + std::to_string(p) + ")");
        }
        QMat g = oracle::random_rational(rng, 2, {1, p, p * p});
        auto b = local_coords(T, g);
        t.check(reconstruct(T, b) == g, "reconstruction failed on a rational matrix");
        t.check(qdet(g) == b.b1.norm() - b.b2.norm(), "det identity failed on a rational matrix");
      }
    }
  if (!t.r.failures) t.r.detail = "24 configurations x 100 samples";
}

void orbital(Tally& t, const AcceptanceOptions&, std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(1, 40), e(-3, 3), pick(0, 2);
  const long primes[] = {2, 3, 5};
  int n = 0;
  while (n < 100) {
    long p = primes[pick(rng)];
    auto r = [&]() -> Q { return Q(num(rng)) * qpow(Q(p), e(rng)) * (num(rng) % 2 ? 1 : -1); };
    Q x1 = r(), x2 = r(), y1 = r(), y2 = r();
    Q det = x1 * y1 - x2 * y2;
    if (det == 0) continue;
    ++n;
    Q psi = x2 * y2 / det;
    long a = orbital_measure_split(psi, Z(p)), b = oracle::split_orbital_oracle(x1, x2, y1, y2, p);
    t.check(a == b, "formula " + std::to_string(a) + " vs enumeration " + std::to_string(b) +
                        " at psi=" + psi.get_str());
  }
  for (long p : primes) {
    // |psi|_p = p^-3: x2 = p^3, y2 = 1, det = 1
    Q p3 = qpow(Q(p), 3);
    long m = orbital_measure_split(p3, Z(p));
    long o = oracle::split_orbital_oracle(1, p3, p3 + 1, 1, p);
    t.check(m == 4 && o == 4, "|psi| = p^-3 gives " + std::to_string(m) + ", enumeration " + std::to_string(o));
  }
  if (!t.r.failures) t.r.detail = "100 split inputs";
}

QuarticTower tower(long d, long a, long b) {
  QuadField F(d);
  return QuarticTower::make(F, F.elem(a, b));
}

void git(Tally& t, const AcceptanceOptions&, std::mt19937_64& rng) {
  QMat I = qmat(4, 4);
  for (int i = 0; i < 4; ++i) I(i, i) = 1;
  QMat swap = qmat(4, 4);
  swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
  QMat conj = I;
  conj(2, 2) = conj(3, 3) = -1;
  std::uniform_int_distribution<int> u(-4, 4);
  double worst = 0;
  for (const auto& T : {tower(2, 3, 0), tower(2, 2, 1), tower(2, 1, 1)}) {
    auto E = regular_embedding(T);
    std::string name = to_string(T.type());
    auto P = psi_invariants(I, E);
    for (const Perm& s : all_perms())
      t.check(P[s] == (s == perm_identity() ? E.L.one() : E.L.zero()),
              "Psi(I) wrong at " + perm_cycles(s) + " for " + name);
    for (int it = 0; it < 100; ++it) {
      QMat g = oracle::random_int(rng);
      auto r = pattern_and_relation_check(g, E);
      worst = std::max(worst, r.numeric_error);
      t.check(r.pass(), "relation check failed (" + name + ")");
      t.check(r.numeric_error < 1e-9, "numeric error " + fmt(r.numeric_error) + " (" + name + ")");
      t.check(block_membership_test(g, E).agree(), "membership routes disagree (" + name + ")");
      if (it % 4 == 0) {
        auto rk = [&] {
          for (;;) {
            TowerElem x = E.Kt.from_coords({Q(u(rng)), Q(u(rng)), Q(u(rng)), Q(u(rng))});
            if (!x.is_zero()) return x;
          }
        };
        QMat R = regular_rep(T, rk()) + regular_rep(T, rk()) * conj;
        if (qdet(R) != 0) {
          auto b = block_membership_test(R, E);
          t.check(b.in_R_commutes && b.in_R_invariants, "element of R not detected (" + name + ")");
        }
      }
    }
    auto bs = block_membership_test(swap, E);
    t.check(bs.agree() && !bs.in_R_commutes, "swap matrix misclassified (" + name + ")");
  }
  if (!t.r.failures) t.r.detail = "3 types x 100 matrices, max numeric error " + fmt(worst);
}

void entropy(Tally& t, const AcceptanceOptions&, std::mt19937_64& rng) {
  const double l2 = std::log(2.0);
  auto near = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); };
  for (GaloisType ty : {GaloisType::Biquadratic, GaloisType::Cyclic, GaloisType::Dihedral}) {
    auto e = entropy_from_diagonal({Q(4), Q(2), Q(1, 2), Q(1, 4)}, Z(2), ty);
    std::string n = to_string(ty);
    t.check(near(e.eta, 12 * l2), "eta = " + fmt(e.eta) + " (" + n + ")");
    t.check(near(e.h_int, 2 * l2), "h_int = " + fmt(e.h_int) + " (" + n + ")");
    t.check(near(e.h_haar, 14 * l2), "h_haar = " + fmt(e.h_haar) + " (" + n + ")");
    t.check(e.in_a_prime, "not in A' (" + n + ")");
    TauWindowInput in;
    in.eta = e.eta;
    in.h_int = e.h_int;
    in.D_K = Z(1) << 60;
    in.D_F = 16;
    auto w = tau_window(in);
    t.check(!w.empty && near(w.lo, 2.5) && near(w.hi, 12.0) && !w.hi_infinite,
            "tau window (" + fmt(w.lo) + ", " + fmt(w.hi) + "]");
  }
  std::uniform_int_distribution<int> e(-3, 3), num(-6, 6), n(2, 4), tt(0, 4), pick(0, 2);
  const long primes[3] = {2, 3, 5};
  for (int it = 0; it < 200; ++it) {
    const long p = primes[pick(rng)];
    const std::size_t dim = n(rng);
    std::vector<Q> ad(dim);
    for (auto& v : ad) v = qpow(Q(p), e(rng)) * (num(rng) % 2 ? 1 : 7);
    QMat m = qmat(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = qpow(Q(p), e(rng) + 2) * num(rng);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = m(i, i) + 1;
    const long tau = tt(rng);
    t.check(bowen_member_loop(m, ad, Z(p), tau) == bowen_member_closed(m, ad, Z(p), tau),
            "Bowen closed form differs from the loop");
  }
  if (!t.r.failures) t.r.detail = "eta = 12 log 2, window (2.5, 12], 200 Bowen triples";
}

void cyclic(Tally& t, const AcceptanceOptions&, std::mt19937_64&) {
  QuadField F5(5), F2(2);
  auto z5 = cyclic_disc_check(QuarticTower::make(F5, F5.elem(Q(-5, 2), Q(-1, 2))));
  t.check(z5.D_K == 125 && z5.D_F == 5 && z5.D_rel == 5 && z5.pass, "Q(zeta_5): D_K = " + z5.D_K.get_str());
  auto s = cyclic_disc_check(QuarticTower::make(F2, F2.elem(2, 1)));
  t.check(s.D_K == 2048 && s.D_F == 8 && s.D_rel == 32 && s.pass, "Q(sqrt(2+sqrt2)): D_K = " + s.D_K.get_str());
  int n = 0;
  for (long d : {2L, 5L, 13L, 17L, 29L, 37L, 41L})
    for (long B = 1; B * B < d; ++B) {
      if (!is_square(Z(d - B * B))) continue;
      for (long m : {1L, -1L, 2L, 3L}) {
        QuadField F(d);
        auto T = QuarticTower::make(F, F.elem(m * d, m * B));
        auto r = cyclic_disc_check(T);
        ++n;
        t.check(r.pass, T.str() + ": D_rel = " + r.D_rel.get_str() + " < D_F/4");
        t.check(r.shape_ok, T.str() + ": D_K = " + r.D_K.get_str() + " lacks the W^2 d^3 shape");
      }
    }
  t.check(n >= 10, "only " + std::to_string(n) + " generated cyclic quartics");
  if (!t.r.failures) t.r.detail = "2 named fields + " + std::to_string(n) + " generated";
}

void linnik(Tally& t, const AcceptanceOptions&, std::mt19937_64&) {
  for (double eps : {0.0, 0.05, 0.25}) {
    auto sh = linnik_special_shape(eps);
    t.check(sh.dominated, "substituted shape not dominated at eps " + fmt(eps));
  }
  struct Set {
    double DK, DF, tau, h, eps;
  };
  for (const Set& s : {Set{125, 5, 1.0, 0.5, 0.0}, Set{2048, 8, 2.0, 0.3, 0.1},
                       Set{1e12, 13, 5.0, 1.2, 0.05}}) {
    double lK = std::log(s.DK), lF = std::log(s.DF);
    auto r = linnik_rhs(lK - 2 * lF, 0.5 * lK, s.tau, s.h, s.eps, 0, lF, lK);
    auto sh = linnik_special_shape(s.eps);
    double mono = std::exp(sh.substituted[0].log_eval(lK, lF, s.tau * s.h)) +
                  std::exp(sh.substituted[1].log_eval(lK, lF, s.tau * s.h));
    double stated = std::exp(sh.stated[0].log_eval(lK, lF, s.tau * s.h)) +
                    std::exp(sh.stated[1].log_eval(lK, lF, s.tau * s.h));
    t.check(std::fabs(r.value - mono) <= 1e-12 * mono, "numeric value differs from the monomials");
    t.check(std::fabs(r.special - stated) <= 1e-12 * stated, "special form differs from the monomials");
    t.check(r.value <= r.special * (1 + 1e-12), "value exceeds the special form");
  }
  // range flagging at the boundary
  double ld = std::log(1e6), lv = std::log(1e3), lc = std::log(0.5), lF = std::log(8.0);
  auto base = linnik_rhs(ld, lv, 1, 1, 0, lc, lF);
  double tm = base.tau_max;
  t.check(std::fabs(tm - (ld - lc - lF) / 2) < 1e-12, "tau_max formula");
  t.check(linnik_rhs(ld, lv, tm, 1, 0, lc, lF).in_hypothesis, "tau = tau_max flagged out of range");
  t.check(!linnik_rhs(ld, lv, std::nextafter(tm, 1e300), 1, 0, lc, lF).in_hypothesis,
          "tau just above tau_max accepted");
  t.check(!linnik_rhs(ld, lv, 0, 1, 0, lc, lF).in_hypothesis, "tau = 0 accepted");
  t.check(linnik_rhs(ld, lv, 1e-9, 1, 0, lc, lF).in_hypothesis, "small positive tau rejected");
  auto ex = linnik_rhs(ld, lv, std::log(10.0), 1, 0);
  t.check(std::fabs(ex.value - 0.011) < 1e-15, "1e-3 + 1e-2 example gives " + fmt(ex.value));
  if (!t.r.failures) t.r.detail = "shape dominated, 3 parameter sets, boundary flags";
}

using Runner = void (*)(Tally&, const AcceptanceOptions&, std::mt19937_64&);
struct Entry {
  const char* name;
  Runner run;
};
const Entry kEntries[kCriteria] = {
    {"Poisson-Riemann-Roch", prr},
    {"canonical degree and duality", canonical},
    {"h0_Ar comparison", comparison},
    {"counting lemma", counting},
    {"product formula", product_formula},
    {"psi and local coordinates", local_coords_check},
    {"split orbital measure", orbital},
    {"GIT invariants", git},
    {"entropy and tau window", entropy},
    {"cyclic quartic inequality", cyclic},
    {"Linnik right-hand side", linnik},
};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  if (id < 1 || id > kCriteria) throw std::out_of_range("criterion id " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.name = kEntries[id - 1].name;
  std::mt19937_64 rng(opt.seed * 1000 + static_cast<std::uint64_t>(id));
  Tally t{r};
  auto start = std::chrono::steady_clock::now();
  try {
    kEntries[id - 1].run(t, opt, rng);
  } catch (const std::exception& e) {
    t.check(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.pass = r.failures == 0 && r.checks > 0;
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriteria; ++id) out.push_back(run_criterion(id, opt));
  return out;
}

}  // namespace alk
