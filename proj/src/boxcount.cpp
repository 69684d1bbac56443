#include "alk/boxcount.hpp"

#include <cmath>
#include <numbers>

#include "alk/error.hpp"

namespace alk {

RadiusFamily RadiusFamily::unit(const QuadField& F) {
  RadiusFamily r;
  r.field = F;
  r.infinite.assign(infinite_places(F).size(), Q(1));
  return r;
}

void RadiusFamily::set_finite(const Place& v, const Q& r) {
  if (r <= 0) throw InputError("radius at " + v.label() + " must be positive");
  const Z q = v.q();
  long k = 0;
  Q x = r;
  while (x.get_num() % q == 0 && x.get_den() == 1 && x != 1) {
    x /= q;
    ++k;
  }
  while (x.get_den() % q == 0 && x.get_num() == 1 && x != 1) {
    x *= q;
    --k;
  }
  if (x != 1)
    throw InputError("radius " + r.get_str() + " at " + v.label() + " is not a power of " +
                     q.get_str());
  for (auto& f : finite)
    if (f.place == v) {
      f.k = k;
      return;
    }
  finite.push_back({v, k});
}

void RadiusFamily::validate() const {
  if (infinite.size() != infinite_places(field).size())
    throw InputError("need one radius per infinite place");
  for (const auto& r : infinite)
    if (r <= 0) throw InputError("infinite radii must be positive");
  for (std::size_t i = 0; i < finite.size(); ++i) {
    if (!finite[i].place.finite) throw InputError("finite radius at an infinite place");
    for (std::size_t j = 0; j < i; ++j)
      if (finite[i].place == finite[j].place) throw InputError("place listed twice");
  }
}

Q RadiusFamily::norm() const {
  Q n = 1;
  for (const auto& f : finite) n *= qpow(Q(f.place.q()), f.k);
  for (const auto& r : infinite) n *= r;
  return n;
}

HermitianLineBundle line_bundle_from_radii(const RadiusFamily& r) {
  r.validate();
  const QuadField& F = r.field;
  // |x|_u <= q^k  <=>  v_u(x) >= -k
  FracIdeal I = FracIdeal::unit(F);
  for (const auto& f : r.finite) I = I * FracIdeal::prime(F, f.place).pow(-f.k);
  std::vector<Q> rs;
  if (F.is_rational()) {
    rs = {r.infinite[0] * r.infinite[0]};
  } else if (F.is_real()) {
    rs = {r.infinite[0] * r.infinite[0], r.infinite[1] * r.infinite[1]};
  } else {
    rs = {r.infinite[0], r.infinite[0]};
  }
  return {I, rs};
}

long long count_box(const RadiusFamily& r, long long budget, bool parallel) {
  HermitianLineBundle L = line_bundle_from_radii(r);
  try {
    return count_unit_sections(L, budget, parallel);
  } catch (const BudgetExceeded& e) {
    std::string box;
    for (const auto& q : L.radius_sq) box += (box.empty() ? "" : ", ") + q.get_str();
    throw BudgetExceeded(std::string(e.what()) + "; box radius_sq [" + box + "] over ideal " +
                         L.ideal.str());
  }
}

double counting_constant(int n, double c) {
  return std::exp(f_bound(-std::log(c)) + std::numbers::pi * n);
}

const char* to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::Pass: return "pass";
    case BoundStatus::Fail: return "fail";
    case BoundStatus::HypothesisViolated: return "hypothesis_violated";
  }
  return "?";
}

CountingCheck counting_bound_check(const RadiusFamily& r, double c, long long budget) {
  if (!(c > 0)) throw InputError("c must be positive");
  CountingCheck out;
  const QuadField& F = r.field;
  const double nr = r.norm().get_d();
  const double D = F.disc().get_d();
  out.hypothesis = r.norm() >= Q(c) * Q(F.disc());
  out.count = count_box(r, budget);
  out.C = counting_constant(F.degree(), c);
  out.bound = out.C * nr / std::sqrt(D);
  if (!out.hypothesis)
    out.status = BoundStatus::HypothesisViolated;
  else
    out.status = out.count <= out.bound ? BoundStatus::Pass : BoundStatus::Fail;
  return out;
}

}  // namespace alk
