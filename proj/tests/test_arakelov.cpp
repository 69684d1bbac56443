#include <cmath>
#include <numbers>
#include <random>

#include "alk/arakelov.hpp"
#include "alk/error.hpp"
#include "doctest.h"
#include "random_bundles.hpp"

using namespace alk;
using alk::testing::field_of;
using alk::testing::random_bundle;

namespace {

// [O_F : I] for an integral ideal by counting residues x + y w with
// 0 <= x, y < N(I) that land in I.
Z index_oracle(const QuadField& F, const FracIdeal& I) {
  long N = I.norm().get_num().get_si();
  long hits = 0;
  for (long x = 0; x < N; ++x)
    for (long y = 0; y < N; ++y)
      if (I.contains(F.from_omega_coords(x, y))) ++hits;
  return Z(N * N / hits);
}

const long kFields[] = {-1, 2, 5, -3, -7, 3, 1};

}  // namespace

TEST_CASE("ideal arithmetic") {
  for (long d : {-1, 2, 5, -3, -7, 3, -5, 10}) {
    QuadField F(d);
    for (long p : {2, 3, 5, 7, 11}) {
      auto pl = places_above(F, Z(p));
      FracIdeal prod = FracIdeal::unit(F);
      for (const auto& v : pl) {
        FracIdeal P = FracIdeal::prime(F, v);
        CHECK(P.norm() == v.q());
        CHECK(index_oracle(F, P) == v.q());
        CHECK(P.valuation(v) == 1);
        for (const auto& w : pl)
          if (!(w == v)) CHECK(P.valuation(w) == 0);
        CHECK(P * P.inverse() == FracIdeal::unit(F));
        prod = prod * P.pow(v.type == PrimeType::Ramified ? 2 : 1);
      }
      CHECK(prod == FracIdeal::principal(F, F.elem(p)));
    }
    FracIdeal A = FracIdeal::principal(F, F.elem(4, 1));
    CHECK(A.norm() == abs(F.elem(4, 1).norm()));
    CHECK(index_oracle(F, A) == A.norm().get_num());
    CHECK(A.contains(F.elem(4, 1)));
    CHECK_FALSE(A.contains(F.one()));
  }
  QuadField Q0 = QuadField::rationals();
  CHECK(FracIdeal::principal(Q0, Q0.elem(Q(-6, 4))).norm() == Q(3, 2));
}

TEST_CASE("inverse different") {
  for (long d : {-1, 2, 5, -3, 3, -7}) {
    QuadField F(d);
    FracIdeal I = FracIdeal::inverse_different(F);
    CHECK(I.norm() == Q(1) / Q(F.disc()));
    // the trace dual of O_F: every x with Tr(x O_F) in Z, tested on a grid
    for (long a = -8; a <= 8; ++a)
      for (long b = -8; b <= 8; ++b) {
        QFElem x = F.elem(Q(a, 2 * std::labs(d)), Q(b, 2 * std::labs(d)));
        bool dual = true;
        for (const auto& w : F.integral_basis()) dual = dual && (x * w).trace().get_den() == 1;
        CHECK(I.contains(x) == dual);
      }
  }
}

TEST_CASE("canonical degree") {
  CHECK(HermitianLineBundle::canonical(QuadField(-1)).adeg() == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  for (long d : {-1, 2, 5, -3, 13, -15}) {
    QuadField F(d);
    auto w = HermitianLineBundle::canonical(F);
    CHECK(std::fabs(w.adeg() - std::log(F.disc().get_d())) < 1e-12);
    CHECK(std::fabs(w.adeg_via_section(w.ideal.basis()[1]) - std::log(F.disc().get_d())) < 1e-9);
  }
  CHECK(HermitianLineBundle::trivial(QuadField(7)).adeg() == 0);
}

TEST_CASE("direct image examples") {
  QuadField F(2);
  auto E = direct_image(HermitianLineBundle::trivial(F));
  REQUIRE(E.exact_gram());
  const auto& g = *E.exact_gram();
  CHECK(g(0, 0) == 2);
  CHECK(g(0, 1) == 0);
  CHECK(g(1, 1) == 4);
  CHECK(E.adeg() == doctest::Approx(-0.5 * std::log(8.0)));
  QuadField Q0 = QuadField::rationals();
  HermitianLineBundle L{FracIdeal::principal(Q0, Q0.elem(3)), {Q(4)}};
  CHECK((*direct_image(L).exact_gram())(0, 0) == Q(9, 4));
}

TEST_CASE("degree of direct image and radius scaling") {
  std::mt19937_64 rng(4);
  for (long d : kFields) {
    QuadField F = field_of(d);
    for (int it = 0; it < 10; ++it) {
      auto L = random_bundle(F, rng);
      double logD = std::log(F.disc().get_d());
      CHECK(std::fabs(direct_image(L).adeg() - (L.adeg() - 0.5 * logD)) < 1e-9);
      // ball radii multiplied by t: adeg moves by +log t per embedding
      auto S = L;
      for (auto& r : S.radius_sq) r *= 9;
      CHECK(std::fabs(S.adeg() - L.adeg() - F.degree() * std::log(3.0)) < 1e-12);
      if (F.degree() == 2) {
        // the metric itself multiplied by t = 3 at both embeddings
        CHECK(std::fabs(L.adeg() - S.adeg() + 2 * std::log(3.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("adeg does not depend on the section") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> c(-4, 4);
  for (long d : kFields) {
    QuadField F = field_of(d);
    for (int it = 0; it < 10; ++it) {
      auto L = random_bundle(F, rng);
      auto B = L.ideal.basis();
      for (int k = 0; k < 3; ++k) {
        QFElem s = F.zero();
        while (s.is_zero()) {
          s = B[0] * F.elem(c(rng));
          if (B.size() > 1) s = s + B[1] * F.elem(c(rng));
        }
        // sections outside L work too: they are rational sections
        if (k == 2) s = s * F.elem(Q(1, 3));
        CHECK(std::fabs(L.adeg_via_section(s) - L.adeg()) < 1e-9);
      }
    }
  }
  CHECK_THROWS_AS(HermitianLineBundle::trivial(QuadField(2)).adeg_via_section(QuadField(2).zero()),
                  InputError);
}

TEST_CASE("dual, tensor, involution") {
  std::mt19937_64 rng(6);
  for (long d : kFields) {
    QuadField F = field_of(d);
    for (int it = 0; it < 5; ++it) {
      auto L = random_bundle(F, rng), M = random_bundle(F, rng);
      CHECK(std::fabs(L.tensor(L.dual()).adeg()) < 1e-12);
      CHECK(std::fabs(L.tensor(M).adeg() - L.adeg() - M.adeg()) < 1e-12);
      auto DD = L.dual().dual();
      CHECK(DD.ideal == L.ideal);
      CHECK(DD.radius_sq == L.radius_sq);
      CHECK(std::fabs(theta_h0(direct_image(DD)).h0 - theta_h0(direct_image(L)).h0) < 1e-12);
    }
  }
}

TEST_CASE("Gaussian integers of modulus at most one") {
  auto L = HermitianLineBundle::trivial(QuadField(-1));
  CHECK(count_unit_sections(L) == 5);
  auto bt = bundle_theta_and_h0ar(L);
  CHECK(bt.h0_ar == doctest::Approx(std::log(5.0)));
  CHECK(bt.comparison_holds);
}

TEST_CASE("duality routes, PRR and the comparison inequality") {
  std::mt19937_64 rng(7);
  for (long d : kFields) {
    QuadField F = field_of(d);
    double logD = std::log(F.disc().get_d());
    for (int it = 0; it < 6; ++it) {
      auto L = random_bundle(F, rng);
      auto bt = bundle_theta_and_h0ar(L);
      CHECK(bt.report.tail_bound < 1e-12);
      CHECK(std::fabs(bt.report.h1 - bt.h1_duality) < 1e-9);
      CHECK(std::fabs(bt.report.h0 - bt.report.h1 - (L.adeg() - 0.5 * logD)) < 1e-9);
      CHECK(bt.h0_ar < bt.report.h0 + bt.pi_n);
      CHECK(bt.report.h0 >= 0);
      CHECK(count_unit_sections(L, kDefaultBudget, false) == bt.sections);
    }
  }
}

TEST_CASE("theta grows with the radii") {
  std::mt19937_64 rng(8);
  for (long d : {2, -1, 5}) {
    QuadField F(d);
    auto L = random_bundle(F, rng);
    double prev = theta_h0(direct_image(L)).h0;
    for (int step = 0; step < 4; ++step) {
      L.radius_sq[0] *= Q(3, 2);
      if (!F.is_real()) L.radius_sq[1] = L.radius_sq[0];
      double h = theta_h0(direct_image(L)).h0;
      CHECK(h > prev);
      prev = h;
    }
  }
}

TEST_CASE("f and the theta bounds") {
  CHECK(f_bound(0) == 1);
  CHECK(f_bound(-1) == doctest::Approx(0.00186744).epsilon(1e-5));
  CHECK(f_bound(2.5) == 3.5);
  QuadField Q0 = QuadField::rationals();
  auto tb = theta_bounds(0, HermitianLineBundle::trivial(Q0));
  CHECK(tb.checks[0].applies);
  CHECK(tb.checks[0].lhs == doctest::Approx(0.08290).epsilon(1e-4));
  CHECK(tb.all_hold());
  // adeg = log D_F + 5 over Q(i): h1 <= exp(-10 pi)
  QuadField Fi(-1);
  // ideal (1/13), radius_sq 4: adeg = log 169 + log 4 > log 4 + 5
  HermitianLineBundle big{FracIdeal::principal(Fi, Fi.elem(Q(1, 13))), {Q(4), Q(4)}};
  auto tb2 = theta_bounds(5, big);
  CHECK(big.adeg() >= std::log(4.0) + 5);
  CHECK(tb2.checks[1].applies);
  CHECK(tb2.checks[1].lhs <= std::exp(-10 * std::numbers::pi));
  CHECK(tb2.all_hold());
  std::mt19937_64 rng(9);
  for (long d : kFields) {
    QuadField F = field_of(d);
    for (int it = 0; it < 5; ++it) {
      auto L = random_bundle(F, rng);
      for (double t : {-2.0, -0.5, 0.0, 0.5, 2.0}) CHECK(theta_bounds(t, L).all_hold());
    }
  }
}
