#pragma once

#include <vector>

#include "alk/numfield.hpp"
#include "alk/tower.hpp"

namespace alk {

enum class GaloisType { Biquadratic, Cyclic, Dihedral };
const char* to_string(GaloisType t);
GaloisType galois_type_from_string(const std::string& s);

// K = F(sqrt delta) with F = Q(sqrt d) quadratic and delta not a square in F.
struct QuarticTower {
  QuadField F;
  QFElem delta;

  static QuarticTower make(const QuadField& F, const QFElem& delta);

  // From Nr(delta): a square gives biquadratic, d times a square cyclic.
  GaloisType type() const;
  Tower tower() const;  // levels sqrt d, sqrt delta
  // minimal polynomial of sqrt delta, coefficients c0..c4 (monic)
  std::vector<Q> min_poly() const;
  std::string str() const;
};

}  // namespace alk
