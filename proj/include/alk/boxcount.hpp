#pragma once

#include <vector>

#include "alk/arakelov.hpp"

namespace alk {

// r_u = q_u^k at a finite place.
struct FiniteRadius {
  Place place;
  long k = 0;
};

// Radii at all places: finitely many finite ones (the rest are 1) and one
// per infinite place. A complex radius is in the normalized absolute value
// |z|^2; a real one in |z|.
struct RadiusFamily {
  QuadField field = QuadField::rationals();
  std::vector<FiniteRadius> finite;
  std::vector<Q> infinite;

  static RadiusFamily unit(const QuadField& F);
  // Radius r at a finite place must be a power of q_v.
  void set_finite(const Place& v, const Q& r);
  void validate() const;
  Q norm() const;  // ||r|| = product of all r_u
};

HermitianLineBundle line_bundle_from_radii(const RadiusFamily& r);

// #{x in F : |x|_u <= r_u for all u}
long long count_box(const RadiusFamily& r, long long budget = kDefaultBudget,
                    bool parallel = true);

// exp(f(-log c) + pi n)
double counting_constant(int n, double c);

enum class BoundStatus { Pass, Fail, HypothesisViolated };
const char* to_string(BoundStatus s);

struct CountingCheck {
  long long count = 0;
  double C = 0, bound = 0;
  bool hypothesis = false;  // ||r|| >= c D_F
  BoundStatus status = BoundStatus::Pass;
};
CountingCheck counting_bound_check(const RadiusFamily& r, double c,
                                   long long budget = kDefaultBudget);

}  // namespace alk
