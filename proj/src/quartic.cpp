#include "alk/quartic.hpp"

#include "alk/error.hpp"

namespace alk {

const char* to_string(GaloisType t) {
  switch (t) {
    case GaloisType::Biquadratic: return "biquadratic";
    case GaloisType::Cyclic: return "cyclic";
    case GaloisType::Dihedral: return "dihedral";
  }
  return "?";
}

GaloisType galois_type_from_string(const std::string& s) {
  if (s == "biquadratic") return GaloisType::Biquadratic;
  if (s == "cyclic") return GaloisType::Cyclic;
  if (s == "dihedral") return GaloisType::Dihedral;
  throw InputError("unknown Galois type '" + s + "' (two-transitive types are not supported)");
}

QuarticTower QuarticTower::make(const QuadField& F, const QFElem& delta) {
  if (F.is_rational()) throw InputError("base field of a quartic tower must be quadratic");
  if (delta.d() != F.d()) throw InputError("delta does not lie in F");
  if (delta.is_zero()) throw InputError("delta must be nonzero");
  if (sqrt_in(F, delta)) throw InputError("delta is a square in F: " + delta.str());
  return QuarticTower{F, delta};
}

GaloisType QuarticTower::type() const {
  Q n = delta.norm();
  if (is_square(n)) return GaloisType::Biquadratic;
  if (is_square(Q(n / F.d()))) return GaloisType::Cyclic;
  return GaloisType::Dihedral;
}

Tower QuarticTower::tower() const {
  Tower q;
  Tower t1 = q.extend(q.rational(F.d()));
  return t1.extend(t1.from_coords({delta.a(), delta.b()}));
}

std::vector<Q> QuarticTower::min_poly() const {
  // (x^2 - a)^2 = d b^2
  const Q& a = delta.a();
  const Q& b = delta.b();
  return {a * a - Q(F.d()) * b * b, Q(0), -2 * a, Q(0), Q(1)};
}

std::string QuarticTower::str() const {
  return "Q(sqrt " + std::to_string(F.d()) + ")(sqrt(" + delta.str() + "))";
}

}  // namespace alk
