#pragma once

// Slot-level simulation of source + detectors + AND-gate.
//
// Two routes produce the same statistics. simulate_slot() walks one pump
// slot literally. CoincidenceSampler skips straight to the slots in which
// both Bob and Charly can click, which is the only place a triple
// coincidence can occur; at default rates that is roughly one slot in 6e5.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "qss/correlations.hpp"
#include "qss/devices.hpp"
#include "qss/random.hpp"
#include "qss/source.hpp"

namespace qss::devices {

/// Optional rewrite of a pair event before it reaches the detectors
/// (used for the eavesdropper).
using EventTransform = std::function<source::TripleEvent(source::TripleEvent, Rng&)>;

struct SlotOutcome {
  std::uint64_t slot = 0;
  std::optional<source::TripleEvent> event;
  std::optional<ClickRecord> bob;
  std::optional<ClickRecord> charly;
  bool accepted = false;
  CoincidenceOrigin origin = CoincidenceOrigin::signal;  // meaningful when accepted
};

/// Classifies an accepted coincidence.
CoincidenceOrigin classify(const std::optional<source::TripleEvent>& event,
                           const ClickRecord& bob, const ClickRecord& charly);

/// Reference route: one pump slot, pair creation through gating.
SlotOutcome simulate_slot(std::uint64_t slot, const PhaseSettings& settings, Visibility v,
                          const source::SourceParams& source, const DetectorParams& detectors,
                          const CoincidenceGate& gate, const EventTransform& transform,
                          Rng& rng);

class CoincidenceSampler {
 public:
  CoincidenceSampler(const source::SourceParams& source, const DetectorParams& detectors);

  /// Per-slot probability that both parties may click.
  double candidate_probability() const { return candidate_prob_; }

  /// Number of non-candidate slots before the next candidate (geometric);
  /// UINT64_MAX if no slot can ever be a candidate.
  std::uint64_t skip(Rng& rng) const;

  /// Samples a slot conditioned on being a candidate.
  SlotOutcome sample_candidate(std::uint64_t slot, const PhaseSettings& settings,
                               Visibility v, const EventTransform& transform,
                               Rng& rng) const;

 private:
  std::optional<ClickRecord> party_click(Party party, std::uint64_t slot,
                                         const std::optional<Photon>& photon,
                                         Rng& rng) const;

  source::SourceParams source_;
  DetectorParams detectors_;
  CoincidenceGate gate_;
  double dark_ = 0.0;
  double eta_max_ = 0.0;
  double party_candidate_ = 0.0;  // per party, given a pair
  double candidate_prob_ = 0.0;
  double pair_given_candidate_ = 0.0;
};

/// Accepted coincidence counts for fixed settings.
struct CoincidenceCounts {
  std::array<std::uint64_t, 4> by_combination{};  // ++, +-, -+, --
  std::uint64_t signal = 0;
  std::uint64_t leakage = 0;
  std::uint64_t accidental = 0;
  std::uint64_t candidates = 0;

  std::uint64_t accepted() const { return signal + leakage + accidental; }
  CoincidenceCounts& operator+=(const CoincidenceCounts& o);
  bool operator==(const CoincidenceCounts&) const = default;
};

struct RunOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t shard_slots = std::uint64_t{1} << 32;
};

/// Runs n_pulses slots at fixed settings with the compressed sampler.
CoincidenceCounts run_fixed_settings(std::uint64_t n_pulses, const PhaseSettings& settings,
                                     Visibility v, const source::SourceParams& source,
                                     const DetectorParams& detectors, const RunOptions& options);

}  // namespace qss::devices
