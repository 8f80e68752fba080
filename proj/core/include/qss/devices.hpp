#pragma once

// Detector and coincidence-electronics model.
//
// Each of Bob and Charly owns two detectors (ports + and -). Per pump slot a
// party registers at most one click: a photon click wins over a dark click.
// Every click carries a time bin relative to the pump emission so the
// AND-gate can keep only the central peak.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qss/phase.hpp"
#include "qss/random.hpp"
#include "qss/source.hpp"

namespace qss::devices {

enum class Party : std::uint8_t { bob, charly };
enum class ClickCause : std::uint8_t { photon, dark };

const char* party_name(Party p);

struct DetectorParams {
  double efficiency = 0.05;
  double dark_rate = 3.0e4;      // Hz
  double gate_window = 1.25e-8;  // s, one pump period
  /// Width of one arrival-time bin. A dark click falls into the central bin
  /// with probability bin_width / gate_window.
  double bin_width = 1.2e-9;
  /// Probability that a photon click is assigned to a wrong time bin.
  double misclassification_prob = 0.0;
  /// Relative efficiency of the + and - detector of each party.
  std::array<double, 2> port_efficiency_scale{1.0, 1.0};

  double dark_prob_per_gate() const { return dark_rate * gate_window; }
  double central_fraction() const { return bin_width / gate_window; }
  double port_efficiency(Sign port) const;
  double max_port_efficiency() const;
  double mean_port_efficiency() const;

  std::vector<std::string> validate() const;
  void check() const;
};

struct ClickRecord {
  Party party = Party::bob;
  Sign port;
  std::uint64_t slot = 0;
  ClickCause cause = ClickCause::photon;
  int bin = 0;  // arrival bin relative to the pump emission, in {0, 1, 2}
};

/// The photon reaching one party's detectors.
struct Photon {
  Sign port;
  int bin = 0;
};

inline constexpr int kCentralBin = 1;

struct CoincidenceGate {
  bool require_pump_sync = true;
  bool central_bin_filter = true;

  bool accepts(bool pump_marker, const std::optional<ClickRecord>& bob,
               const std::optional<ClickRecord>& charly) const;
};

/// One party's detectors in one gated slot.
std::optional<ClickRecord> detect(Party party, std::uint64_t slot,
                                  const std::optional<Photon>& photon,
                                  const DetectorParams& params, Rng& rng);

/// Pump marker AND a Bob click AND a Charly click in the same slot.
bool triple_coincidence(bool pump_marker, const std::optional<ClickRecord>& bob,
                        const std::optional<ClickRecord>& charly);

/// Uncorrelated coincidence rate pulse_rate * (s_B / pulse_rate) * (s_C / pulse_rate).
double expected_accidentals(const DetectorParams& params, double singles_rate_bob,
                            double singles_rate_charly, double pulse_rate);

/// Bin reported for a photon click: the true bin, or with probability
/// misclassification_prob one of the two other bins.
int observed_bin(int true_bin, const DetectorParams& params, Rng& rng);
/// Bin of a dark click: central with probability central_fraction().
int dark_bin(const DetectorParams& params, Rng& rng);

/// Origin of an accepted triple coincidence.
enum class CoincidenceOrigin : std::uint8_t {
  signal,      // both photons from the coherent central sector, bins correct
  leakage,     // both photons, but a side-peak history misread as central
  accidental,  // at least one dark click
};

const char* origin_name(CoincidenceOrigin o);

/// Analytic per-slot probabilities of accepted central coincidences by
/// origin, for equal port efficiencies (unequal ones use their mean).
struct CoincidenceBudget {
  double signal = 0.0;
  double leakage = 0.0;
  double accidental = 0.0;

  double total() const { return signal + leakage + accidental; }
  double signal_fraction() const;
  double accidental_fraction() const;
};

CoincidenceBudget coincidence_budget(const source::SourceParams& source,
                                     const DetectorParams& detectors);

/// Interference visibility that yields `net` fringe visibility once the
/// leakage and accidental coincidences (which carry no fringe) are mixed in.
/// Throws std::invalid_argument if the noise floor makes `net` unreachable.
double calibrate_interference_visibility(double net, const CoincidenceBudget& budget);

/// Per-party singles rate in Hz: pulse_rate (p eta + (1 - p eta) d).
double singles_rate(const source::SourceParams& source, const DetectorParams& detectors);

}  // namespace qss::devices
