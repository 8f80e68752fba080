#include "qss/protocol.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include "qss/csv.hpp"
#include "qss/sharding.hpp"

namespace qss::protocol {

namespace {

constexpr const char* kTranscriptHeader = "slot,alpha_basis,beta,gamma,detected,sifted,l,j,k";
constexpr const char* kKeysHeader = "index,alice,bob,charly,joint";

const char* sign_field(Sign s) { return s.is_plus() ? "1" : "-1"; }

Sign parse_sign(std::string_view s) { return Sign::from_int(static_cast<int>(csv::parse_int(s))); }

bool parse_flag(std::string_view s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::invalid_argument("flag must be 0 or 1, got '" + std::string(s) + "'");
}

struct ShardResult {
  std::vector<RoundRecord> records;
  Keys keys;
  SessionCounts counts;
};

}  // namespace

AliceChoice AliceChoice::from_alpha_prime(Phase alpha_prime) {
  const auto& phases = alice_phases();
  for (int n = 0; n < 4; ++n) {
    if (alpha_prime == phases[n]) {
      return {phases[n], alice_bases()[n % 2], n < 2 ? Sign::plus() : Sign::minus()};
    }
  }
  throw std::invalid_argument("alpha' must be one of 0, pi/2, pi, 3pi/2");
}

AliceChoice AliceChoice::from_basis(Phase basis, Sign bit) {
  if (!(basis == alice_bases()[0] || basis == alice_bases()[1])) {
    throw std::invalid_argument("Alice's basis must be 0 or pi/2");
  }
  const Phase shift = bit.is_plus() ? Phase(0.0) : Phase(kPi);
  return from_alpha_prime(basis + shift);
}

const std::array<Phase, 4>& alice_phases() {
  static const std::array<Phase, 4> p{Phase::quarter_turns(0), Phase::quarter_turns(1),
                                      Phase::quarter_turns(2), Phase::quarter_turns(3)};
  return p;
}

const std::array<Phase, 2>& alice_bases() {
  static const std::array<Phase, 2> p{Phase::quarter_turns(0), Phase::quarter_turns(1)};
  return p;
}

const std::array<Phase, 2>& bob_phases() {
  static const std::array<Phase, 2> p{Phase::quarter_turns(-1), Phase::quarter_turns(0)};
  return p;
}

const std::array<Phase, 2>& charly_phases() {
  static const std::array<Phase, 2> p{Phase::quarter_turns(1), Phase::quarter_turns(3)};
  return p;
}

RoundChoices choose_round_settings(Rng& rng) {
  const auto bits = rng();
  RoundChoices c;
  c.alice = AliceChoice::from_alpha_prime(alice_phases()[bits & 3]);
  c.bob.phase = bob_phases()[(bits >> 2) & 1];
  c.charly.phase = charly_phases()[(bits >> 3) & 1];
  return c;
}

bool RoundRecord::operator==(const RoundRecord& o) const {
  return slot == o.slot && alice.alpha_prime == o.alice.alpha_prime &&
         alice.basis == o.alice.basis && alice.bit == o.alice.bit &&
         bob.phase == o.bob.phase && bob.outcome == o.bob.outcome &&
         charly.phase == o.charly.phase && charly.outcome == o.charly.outcome &&
         detected == o.detected && eve_touched == o.eve_touched && origin == o.origin;
}

std::optional<Sign> sift_sign(Phase basis, Phase beta, Phase gamma) {
  const Phase sum = basis + beta + gamma;
  if (sum.approx_equal(Phase(0.0))) return Sign::plus();
  if (sum.approx_equal(Phase(kPi))) return Sign::minus();
  return std::nullopt;
}

std::optional<SiftedBit> sift(const RoundRecord& record) {
  if (!record.detected || !record.bob.outcome || !record.charly.outcome) return std::nullopt;
  const auto l = sift_sign(record.alice.basis, record.bob.phase, record.charly.phase);
  if (!l) return std::nullopt;
  return SiftedBit{record.slot,       *l,         record.alice.bit, *record.bob.outcome,
                   *record.charly.outcome, record.eve_touched, record.origin};
}

Sign reconstruct_alice_bit(const SiftedBit& bit) { return bit.bob_bit * bit.charly_bit * bit.l; }

std::vector<std::string> EveConfig::validate() const {
  std::vector<std::string> errors;
  if (!(interception_prob >= 0.0 && interception_prob <= 1.0)) {
    errors.emplace_back("protocol.interception_prob: must lie in [0, 1]");
  }
  return errors;
}

source::TripleEvent apply_eve(source::TripleEvent event, const EveConfig& eve, Rng& rng) {
  using source::PathChoice;
  if (eve.strategy != EveStrategy::time_basis_intercept) return event;
  if (!bernoulli(rng, eve.interception_prob)) return event;

  const auto bits = rng();
  PathChoice pump;
  PathChoice partner;  // path of the photon Eve does not touch
  if (event.coherent()) {
    // Central histories are (l,s,s) and (s,l,l): the pump path fixes the partner's.
    pump = (bits & 1) ? PathChoice::long_arm : PathChoice::short_arm;
    partner = pump == PathChoice::long_arm ? PathChoice::short_arm : PathChoice::long_arm;
  } else {
    pump = event.paths->alice;
    partner = eve.target == EveTarget::bob_channel ? event.paths->charly : event.paths->bob;
  }
  const PathChoice resent = ((bits >> 1) & 1) ? PathChoice::long_arm : PathChoice::short_arm;
  const source::PathTriple paths = eve.target == EveTarget::bob_channel
                                       ? source::PathTriple{pump, resent, partner}
                                       : source::PathTriple{pump, partner, resent};
  event.paths = paths;
  event.bins = source::time_bins(paths);
  event.j = Sign::from_bit(static_cast<int>((bits >> 2) & 1));
  event.k = Sign::from_bit(static_cast<int>((bits >> 3) & 1));
  event.eve_touched = true;
  return event;
}

std::string Keys::bits(const std::vector<Sign>& key) {
  std::string s;
  s.reserve(key.size());
  for (Sign b : key) s.push_back(b.is_plus() ? '1' : '0');
  return s;
}

SessionCounts& SessionCounts::operator+=(const SessionCounts& o) {
  candidates += o.candidates;
  detected += o.detected;
  sifted += o.sifted;
  errors += o.errors;
  accidental_errors += o.accidental_errors;
  eve_touched += o.eve_touched;
  bob_alice_agree += o.bob_alice_agree;
  charly_alice_agree += o.charly_alice_agree;
  for (int c = 0; c < 4; ++c) {
    sifted_by_combination[c][0] += o.sifted_by_combination[c][0];
    sifted_by_combination[c][1] += o.sifted_by_combination[c][1];
  }
  return *this;
}

analysis::RunReport make_report(const SessionCounts& counts, std::uint64_t n_pulses,
                                double pulse_rate, std::uint64_t min_sifted_bits) {
  analysis::RunReport r;
  r.n_pulses = n_pulses;
  r.duration_s = static_cast<double>(n_pulses) / pulse_rate;
  r.detected = counts.detected;
  r.sifted_bits = counts.sifted;
  r.errors = counts.errors;
  r.accidental_errors = counts.accidental_errors;
  r.eve_touched = counts.eve_touched;
  r.bit_rate = analysis::bit_rate(counts.sifted, r.duration_s);
  r.insufficient_statistics = counts.sifted == 0 || counts.sifted < min_sifted_bits;
  if (counts.sifted > 0) {
    const auto q = analysis::estimate_qber(counts.errors, counts.sifted);
    r.qber = q.value;
    r.qber_std = q.std_error;
    r.visibility = analysis::visibility_from_sifted(counts.sifted_by_combination);
    r.s_exp = analysis::s_from_visibility(Visibility(r.visibility.value));
  }
  r.accidental_error_fraction =
      counts.errors > 0 ? static_cast<double>(counts.accidental_errors) / counts.errors : 0.0;
  return r;
}

SessionResult run_session(std::uint64_t n_pulses, const source::SourceParams& source,
                          const devices::DetectorParams& detectors, Visibility v,
                          const EveConfig& eve, const SessionOptions& options) {
  if (n_pulses < 1) throw std::invalid_argument("n_pulses must be at least 1");
  if (const auto errors = eve.validate(); !errors.empty()) {
    throw std::invalid_argument(errors.front());
  }
  const devices::CoincidenceSampler sampler(source, detectors);
  devices::EventTransform transform;
  if (eve.strategy != EveStrategy::none && eve.interception_prob > 0.0) {
    transform = [&eve](source::TripleEvent ev, Rng& rng) {
      return apply_eve(std::move(ev), eve, rng);
    };
  }

  const ShardPlan plan{n_pulses, options.shard_slots};
  auto shards = run_sharded(plan, options.threads,
                            [&](std::uint64_t shard, std::uint64_t begin, std::uint64_t end) {
    ShardResult out;
    Rng rng(derive_seed(options.seed, shard));
    std::uint64_t slot = begin;
    for (;;) {
      const std::uint64_t gap = sampler.skip(rng);
      if (gap >= end - slot) break;
      slot += gap;
      const RoundChoices choices = choose_round_settings(rng);
      const auto outcome = sampler.sample_candidate(slot, choices.physical(), v, transform, rng);
      ++out.counts.candidates;

      RoundRecord record{slot, choices.alice, choices.bob, choices.charly,
                         outcome.accepted, outcome.event && outcome.event->eve_touched,
                         outcome.origin};
      if (outcome.accepted) {
        record.bob.outcome = outcome.bob->port;
        record.charly.outcome = outcome.charly->port;
        ++out.counts.detected;
        if (const auto bit = sift(record)) {
          const Sign joint = reconstruct_alice_bit(*bit);
          const bool error = joint != bit->alice_bit;
          auto& c = out.counts;
          ++c.sifted;
          c.errors += error;
          c.accidental_errors += error && bit->origin == devices::CoincidenceOrigin::accidental;
          c.eve_touched += bit->eve_touched;
          c.bob_alice_agree += bit->bob_bit == bit->alice_bit;
          c.charly_alice_agree += bit->charly_bit == bit->alice_bit;
          const Sign expected = bit->alice_bit * bit->l;
          ++c.sifted_by_combination[correlations::combination_index(bit->bob_bit, bit->charly_bit)]
                                   [expected.is_plus() ? 0 : 1];
          out.keys.alice.push_back(bit->alice_bit);
          out.keys.bob.push_back(bit->bob_bit);
          out.keys.charly.push_back(bit->charly_bit);
          out.keys.joint.push_back(joint);
        }
      }
      if (options.keep_transcript) out.records.push_back(record);
      ++slot;
    }
    return out;
  });

  SessionResult result;
  for (auto& s : shards) {
    result.counts += s.counts;
    result.transcript.insert(result.transcript.end(), s.records.begin(), s.records.end());
    auto append = [](std::vector<Sign>& to, const std::vector<Sign>& from) {
      to.insert(to.end(), from.begin(), from.end());
    };
    append(result.keys.alice, s.keys.alice);
    append(result.keys.bob, s.keys.bob);
    append(result.keys.charly, s.keys.charly);
    append(result.keys.joint, s.keys.joint);
  }
  result.report =
      make_report(result.counts, n_pulses, source.pulse_rate, options.min_sifted_bits);
  return result;
}

void write_transcript_csv(std::ostream& out, const std::vector<RoundRecord>& transcript,
                          bool public_variant) {
  out << kTranscriptHeader << '\n';
  for (const auto& r : transcript) {
    const auto l = r.detected ? sift_sign(r.alice.basis, r.bob.phase, r.charly.phase)
                              : std::nullopt;
    out << r.slot << ',' << csv::format_double(r.alice.basis.radians()) << ','
        << csv::format_double(r.bob.phase.radians()) << ','
        << csv::format_double(r.charly.phase.radians()) << ',' << (r.detected ? 1 : 0) << ','
        << (l ? 1 : 0) << ',';
    if (l) out << sign_field(*l);
    out << ',';
    if (!public_variant && r.bob.outcome) out << sign_field(*r.bob.outcome);
    out << ',';
    if (!public_variant && r.charly.outcome) out << sign_field(*r.charly.outcome);
    out << '\n';
  }
}

std::vector<RoundRecord> read_transcript_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty transcript CSV");
  csv::expect_header(line, kTranscriptHeader);
  std::vector<RoundRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 9) throw std::invalid_argument("transcript row needs 9 fields: " + line);
    RoundRecord r;
    r.slot = csv::parse_uint(f[0]);
    r.alice = AliceChoice::from_basis(Phase(csv::parse_double(f[1])), Sign::plus());
    r.bob.phase = Phase(csv::parse_double(f[2]));
    r.charly.phase = Phase(csv::parse_double(f[3]));
    r.detected = parse_flag(f[4]);
    if (!f[7].empty()) r.bob.outcome = parse_sign(f[7]);
    if (!f[8].empty()) r.charly.outcome = parse_sign(f[8]);
    const bool sifted = parse_flag(f[5]);
    const auto l = sift_sign(r.alice.basis, r.bob.phase, r.charly.phase);
    if (sifted != (r.detected && l.has_value()) || (sifted && f[6] != sign_field(*l))) {
      throw std::invalid_argument("transcript row has inconsistent sift columns: " + line);
    }
    out.push_back(r);
  }
  return out;
}

void write_keys_csv(std::ostream& out, const Keys& keys) {
  out << kKeysHeader << '\n';
  for (std::size_t n = 0; n < keys.alice.size(); ++n) {
    out << n << ',' << keys.alice[n].bit() << ',' << keys.bob[n].bit() << ','
        << keys.charly[n].bit() << ',' << keys.joint[n].bit() << '\n';
  }
}

Keys read_keys_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty keys CSV");
  csv::expect_header(line, kKeysHeader);
  Keys keys;
  auto bit = [](const std::string& f) {
    const auto v = csv::parse_uint(f);
    if (v > 1) throw std::invalid_argument("key bit must be 0 or 1, got " + f);
    return Sign::from_bit(v == 1);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 5) throw std::invalid_argument("keys CSV row needs 5 fields: " + line);
    if (csv::parse_uint(f[0]) != keys.alice.size()) {
      throw std::invalid_argument("keys CSV index out of sequence: " + line);
    }
    keys.alice.push_back(bit(f[1]));
    keys.bob.push_back(bit(f[2]));
    keys.charly.push_back(bit(f[3]));
    keys.joint.push_back(bit(f[4]));
  }
  return keys;
}

}  // namespace qss::protocol
