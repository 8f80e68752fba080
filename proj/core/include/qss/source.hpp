#pragma once

// Event-level model of the pulsed energy-time source.
//
// A pump pulse passes Alice's unbalanced interferometer, so a photon pair is
// created either early (pump took the short arm) or late (long arm). Bob's
// and Charly's photons each pass an interferometer with the same delay.
// Arrival times relative to the pump emission come in bins of the delay;
// only the central bins, reached by (l,s,s) and (s,l,l), are kept.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qss/correlations.hpp"
#include "qss/random.hpp"

namespace qss::source {

enum class PathChoice : std::uint8_t { short_arm = 0, long_arm = 1 };

constexpr int delta(PathChoice p) { return p == PathChoice::long_arm ? 1 : 0; }
char path_symbol(PathChoice p);

struct PathTriple {
  PathChoice alice;  // pump
  PathChoice bob;
  PathChoice charly;

  bool operator==(const PathTriple&) const = default;
  std::string to_string() const;
};

/// All eight path triples, pump path most significant, short before long.
std::array<PathTriple, 8> all_path_triples();

/// Arrival-time differences in units of the interferometer delay.
struct TimeBins {
  int ab = 0;  // t_B - t_0
  int ac = 0;  // t_C - t_0
  int bc = 0;  // t_C - t_B

  bool operator==(const TimeBins&) const = default;
};

inline constexpr TimeBins kCentralBins{1, 1, 0};

struct SourceParams {
  double pulse_rate = 8.0e7;          // Hz
  double pair_prob_per_slot = 6.4e-4; // pair creation probability per pump slot
  double delay = 1.2e-9;              // s, interferometer travel-time difference
  double pulse_width = 6.0e-10;       // s, FWHM

  double slot_period() const { return 1.0 / pulse_rate; }
  /// Field-level problems; empty when the parameters are usable.
  std::vector<std::string> validate() const;
  /// Throws std::invalid_argument listing every problem.
  void check() const;
};

/// Probability amplitude of a path history. Alice's phase shifter sits in
/// her short arm and Bob's/Charly's in their long arms, so the two central
/// terms differ by exactly exp(i(alpha'+beta+gamma)).
std::complex<double> amplitude(PathTriple paths, const PhaseSettings& settings);

TimeBins time_bins(PathTriple paths);

bool is_central(TimeBins bins);

/// One pair-creation event as it leaves the interferometers.
struct TripleEvent {
  /// Definite path history; empty for the coherent central superposition.
  std::optional<PathTriple> paths;
  TimeBins bins;
  Sign j;  // Bob's output port
  Sign k;  // Charly's output port
  PhaseSettings settings;
  bool eve_touched = false;

  bool coherent() const { return !paths.has_value(); }
};

/// Draws the path sector and ports of a pair that was created: the coherent
/// central sector with probability 1/4 (ports from outcome_distribution),
/// otherwise one of the six side-peak triples with probability 1/8 each
/// (uniform ports).
TripleEvent draw_pair(const PhaseSettings& settings, Visibility v, Rng& rng);

/// One pump slot: a pair with probability pair_prob_per_slot, else nothing.
std::optional<TripleEvent> sample_pair_event(const PhaseSettings& settings, Visibility v,
                                             const SourceParams& params, Rng& rng);

/// Draws (j,k) from a 4-entry table; entries with zero weight are never drawn.
int sample_combination(const std::array<double, 4>& p, Rng& rng);

}  // namespace qss::source
