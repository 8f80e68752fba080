#include "qss/phase.hpp"

#include <cmath>
#include <stdexcept>

namespace qss {

Phase::Phase(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("phase must be finite");
  }
  double r = std::fmod(radians, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (kTwoPi - r <= kPhaseTolerance || r >= kTwoPi) r = 0.0;
  radians_ = r;
}

Phase Phase::quarter_turns(int n) {
  int q = n % 4;
  if (q < 0) q += 4;
  switch (q) {
    case 0: return Phase(0.0);
    case 1: return Phase(kPi / 2.0);
    case 2: return Phase(kPi);
    default: return Phase(1.5 * kPi);
  }
}

double Phase::cos() const { return std::cos(radians_); }

double Phase::distance(Phase other) const {
  double d = std::fabs(radians_ - other.radians_);
  return d > kPi ? kTwoPi - d : d;
}

Sign Sign::from_int(int v) {
  if (v != 1 && v != -1) {
    throw std::invalid_argument("sign must be +1 or -1, got " + std::to_string(v));
  }
  return Sign(v);
}

}  // namespace qss
