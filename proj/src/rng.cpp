#include "graspkit/rng.hpp"

#include <cmath>

namespace graspkit {

double Rng::normal() {
  // Box-Muller on hand-rolled uniforms; std::normal_distribution is not
  // bit-portable across standard libraries.
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log() finite
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace graspkit
