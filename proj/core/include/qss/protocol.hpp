#pragma once

// Three-party secret sharing over pseudo-GHZ coincidences.
//
// Alice picks one of four pump phases alpha'. Publicly she only ever names
// the basis alpha; the key parameter i stays private (alpha' = alpha +
// pi (1 - i) / 2). Bob picks beta from {-pi/2, 0}, Charly gamma from
// {pi/2, 3pi/2}. Rounds whose announced alpha + beta + gamma is 0 or pi are
// kept, with l = cos of that sum, and i j k l = 1 holds on noise-free rounds.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qss/analysis.hpp"
#include "qss/coincidence.hpp"
#include "qss/correlations.hpp"
#include "qss/devices.hpp"
#include "qss/random.hpp"
#include "qss/source.hpp"

namespace qss::protocol {

struct AliceChoice {
  Phase alpha_prime;
  Phase basis;
  Sign bit;

  /// Table mapping 0 -> (0,+1), pi/2 -> (pi/2,+1), pi -> (0,-1),
  /// 3pi/2 -> (pi/2,-1). Throws for any other phase.
  static AliceChoice from_alpha_prime(Phase alpha_prime);
  /// Inverse mapping; basis must be 0 or pi/2.
  static AliceChoice from_basis(Phase basis, Sign bit);
};

const std::array<Phase, 4>& alice_phases();
const std::array<Phase, 2>& alice_bases();
const std::array<Phase, 2>& bob_phases();
const std::array<Phase, 2>& charly_phases();

struct PartyChoice {
  Phase phase;
  std::optional<Sign> outcome;  // j for Bob, k for Charly; set on detection
};
using BobChoice = PartyChoice;
using CharlyChoice = PartyChoice;

struct RoundChoices {
  AliceChoice alice;
  BobChoice bob;
  CharlyChoice charly;

  PhaseSettings physical() const { return {alice.alpha_prime, bob.phase, charly.phase}; }
};

RoundChoices choose_round_settings(Rng& rng);

struct RoundRecord {
  std::uint64_t slot = 0;
  AliceChoice alice;
  BobChoice bob;
  CharlyChoice charly;
  bool detected = false;
  bool eve_touched = false;
  devices::CoincidenceOrigin origin = devices::CoincidenceOrigin::signal;

  bool operator==(const RoundRecord& o) const;
};

struct SiftedBit {
  std::uint64_t slot = 0;
  Sign l;
  Sign alice_bit;
  Sign bob_bit;
  Sign charly_bit;
  bool eve_touched = false;
  devices::CoincidenceOrigin origin = devices::CoincidenceOrigin::signal;
};

/// l for the announced phases when their sum is 0 (l = +1) or pi (l = -1).
std::optional<Sign> sift_sign(Phase basis, Phase beta, Phase gamma);

/// Empty for undetected rounds and for rounds whose basis sum fails the sift.
std::optional<SiftedBit> sift(const RoundRecord& record);

/// j k l; equals Alice's i on error-free rounds.
Sign reconstruct_alice_bit(const SiftedBit& bit);

enum class EveStrategy : std::uint8_t { none, time_basis_intercept };
enum class EveTarget : std::uint8_t { bob_channel, charly_channel };

struct EveConfig {
  EveStrategy strategy = EveStrategy::none;
  double interception_prob = 0.0;
  EveTarget target = EveTarget::bob_channel;

  std::vector<std::string> validate() const;
};

/// Measure-and-resend in the time basis. An intercepted photon's emission
/// time is measured, which collapses the pump path; the resent photon takes
/// a fresh random path through the receiver's interferometer. Intercepted
/// events therefore have definite paths, land in the central bins with
/// probability 1/2 and carry phase-independent uniform ports.
source::TripleEvent apply_eve(source::TripleEvent event, const EveConfig& eve, Rng& rng);

struct Keys {
  std::vector<Sign> alice;   // i
  std::vector<Sign> bob;     // j
  std::vector<Sign> charly;  // k
  std::vector<Sign> joint;   // j k l, reconstructed by Bob and Charly together

  /// -1 -> '0', +1 -> '1'.
  static std::string bits(const std::vector<Sign>& key);
};

struct SessionOptions {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::uint64_t shard_slots = std::uint64_t{1} << 32;
  std::uint64_t min_sifted_bits = 1;
  bool keep_transcript = true;
};

/// Aggregate counts of a session; identical for any thread count.
struct SessionCounts {
  std::uint64_t candidates = 0;
  std::uint64_t detected = 0;
  std::uint64_t sifted = 0;
  std::uint64_t errors = 0;
  std::uint64_t accidental_errors = 0;
  std::uint64_t eve_touched = 0;
  std::uint64_t bob_alice_agree = 0;
  std::uint64_t charly_alice_agree = 0;
  std::array<std::array<std::uint64_t, 2>, 4> sifted_by_combination{};

  SessionCounts& operator+=(const SessionCounts& o);
  bool operator==(const SessionCounts&) const = default;
};

struct SessionResult {
  std::vector<RoundRecord> transcript;  // every slot in which both Bob and Charly clicked
  Keys keys;
  SessionCounts counts;
  analysis::RunReport report;
};

/// Simulates n_pulses pump slots. `v` is the interference visibility of the
/// coherent central sector.
SessionResult run_session(std::uint64_t n_pulses, const source::SourceParams& source,
                          const devices::DetectorParams& detectors, Visibility v,
                          const EveConfig& eve, const SessionOptions& options);

analysis::RunReport make_report(const SessionCounts& counts, std::uint64_t n_pulses,
                                double pulse_rate, std::uint64_t min_sifted_bits);

/// slot,alpha_basis,beta,gamma,detected,sifted,l,j,k. The public variant
/// leaves j and k empty.
void write_transcript_csv(std::ostream& out, const std::vector<RoundRecord>& transcript,
                          bool public_variant);

/// Parses the private variant back. Alice's bit is not in the transcript, so
/// the returned records carry bit = +1 and alpha_prime = basis.
std::vector<RoundRecord> read_transcript_csv(std::istream& in);

void write_keys_csv(std::ostream& out, const Keys& keys);
Keys read_keys_csv(std::istream& in);

}  // namespace qss::protocol
