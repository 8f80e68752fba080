#pragma once

#include <cstdint>
#include <numbers>
#include <string>

namespace qss {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance for phase equality after canonicalization.
inline constexpr double kPhaseTolerance = 1e-9;

/// Interferometer phase in radians, stored canonically in [0, 2pi).
///
/// Values within kPhaseTolerance below 2pi are folded onto 0, so sums of
/// quarter-period settings compare equal to their exact targets.
class Phase {
 public:
  constexpr Phase() = default;
  explicit Phase(double radians);

  static Phase quarter_turns(int n);

  double radians() const { return radians_; }
  double cos() const;

  /// Shortest angular distance to `other`, in [0, pi].
  double distance(Phase other) const;
  bool approx_equal(Phase other, double tol = kPhaseTolerance) const {
    return distance(other) <= tol;
  }

  friend Phase operator+(Phase a, Phase b) { return Phase(a.radians_ + b.radians_); }
  friend Phase operator-(Phase a, Phase b) { return Phase(a.radians_ - b.radians_); }
  Phase operator-() const { return Phase(-radians_); }

  friend bool operator==(Phase a, Phase b) { return a.approx_equal(b); }

 private:
  double radians_ = 0.0;
};

/// A +1/-1 label: detector port or encoded key parameter.
class Sign {
 public:
  constexpr Sign() = default;

  static constexpr Sign plus() { return Sign(1); }
  static constexpr Sign minus() { return Sign(-1); }
  /// Throws std::invalid_argument unless v is +1 or -1.
  static Sign from_int(int v);
  /// Bit convention: -1 maps to 0, +1 maps to 1.
  static constexpr Sign from_bit(int bit) { return bit ? plus() : minus(); }

  constexpr int value() const { return value_; }
  constexpr int bit() const { return value_ > 0 ? 1 : 0; }
  constexpr bool is_plus() const { return value_ > 0; }

  constexpr Sign operator*(Sign o) const { return Sign(value_ * o.value_); }
  constexpr Sign operator-() const { return Sign(-value_); }
  constexpr bool operator==(const Sign&) const = default;

  char symbol() const { return value_ > 0 ? '+' : '-'; }

 private:
  constexpr explicit Sign(int v) : value_(v) {}
  std::int8_t value_ = 1;
};

}  // namespace qss
