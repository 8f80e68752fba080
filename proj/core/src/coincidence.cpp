#include "qss/coincidence.hpp"

#include <limits>

#include "qss/sharding.hpp"

namespace qss::devices {

namespace {

constexpr auto kNever = std::numeric_limits<std::uint64_t>::max();

ClickRecord dark_click(Party party, std::uint64_t slot, const DetectorParams& det, Rng& rng) {
  const Sign port = Sign::from_bit(static_cast<int>(rng() & 1));
  return {party, port, slot, ClickCause::dark, dark_bin(det, rng)};
}

}  // namespace

CoincidenceOrigin classify(const std::optional<source::TripleEvent>& event,
                           const ClickRecord& bob, const ClickRecord& charly) {
  if (bob.cause == ClickCause::dark || charly.cause == ClickCause::dark || !event) {
    return CoincidenceOrigin::accidental;
  }
  if (bob.bin == event->bins.ab && charly.bin == event->bins.ac) {
    return CoincidenceOrigin::signal;
  }
  return CoincidenceOrigin::leakage;
}

SlotOutcome simulate_slot(std::uint64_t slot, const PhaseSettings& settings, Visibility v,
                          const source::SourceParams& source, const DetectorParams& detectors,
                          const CoincidenceGate& gate, const EventTransform& transform,
                          Rng& rng) {
  SlotOutcome out;
  out.slot = slot;
  out.event = source::sample_pair_event(settings, v, source, rng);
  if (out.event && transform) out.event = transform(std::move(*out.event), rng);

  std::optional<Photon> to_bob;
  std::optional<Photon> to_charly;
  if (out.event) {
    to_bob = Photon{out.event->j, out.event->bins.ab};
    to_charly = Photon{out.event->k, out.event->bins.ac};
  }
  out.bob = detect(Party::bob, slot, to_bob, detectors, rng);
  out.charly = detect(Party::charly, slot, to_charly, detectors, rng);
  out.accepted = gate.accepts(true, out.bob, out.charly);
  if (out.accepted) out.origin = classify(out.event, *out.bob, *out.charly);
  return out;
}

CoincidenceSampler::CoincidenceSampler(const source::SourceParams& source,
                                       const DetectorParams& detectors)
    : source_(source), detectors_(detectors) {
  source_.check();
  detectors_.check();
  const double p = source_.pair_prob_per_slot;
  dark_ = detectors_.dark_prob_per_gate();
  eta_max_ = detectors_.max_port_efficiency();
  party_candidate_ = eta_max_ + (1.0 - eta_max_) * dark_;
  const double with_pair = p * party_candidate_ * party_candidate_;
  const double without_pair = (1.0 - p) * dark_ * dark_;
  candidate_prob_ = with_pair + without_pair;
  pair_given_candidate_ = candidate_prob_ > 0.0 ? with_pair / candidate_prob_ : 0.0;
}

std::uint64_t CoincidenceSampler::skip(Rng& rng) const {
  if (!(candidate_prob_ > 0.0)) return kNever;
  if (candidate_prob_ >= 1.0) return 0;
  std::geometric_distribution<std::uint64_t> gap(candidate_prob_);
  return gap(rng);
}

std::optional<ClickRecord> CoincidenceSampler::party_click(Party party, std::uint64_t slot,
                                                           const std::optional<Photon>& photon,
                                                           Rng& rng) const {
  if (!photon) return dark_click(party, slot, detectors_, rng);
  if (bernoulli(rng, eta_max_ / party_candidate_)) {
    // Photon candidate under the dominating efficiency; thin to the port's own.
    if (bernoulli(rng, detectors_.port_efficiency(photon->port) / eta_max_)) {
      return ClickRecord{party, photon->port, slot, ClickCause::photon,
                         observed_bin(photon->bin, detectors_, rng)};
    }
    if (bernoulli(rng, dark_)) return dark_click(party, slot, detectors_, rng);
    return std::nullopt;
  }
  return dark_click(party, slot, detectors_, rng);
}

SlotOutcome CoincidenceSampler::sample_candidate(std::uint64_t slot,
                                                 const PhaseSettings& settings, Visibility v,
                                                 const EventTransform& transform,
                                                 Rng& rng) const {
  SlotOutcome out;
  out.slot = slot;
  if (bernoulli(rng, pair_given_candidate_)) {
    auto ev = source::draw_pair(settings, v, rng);
    if (transform) ev = transform(std::move(ev), rng);
    out.bob = party_click(Party::bob, slot, Photon{ev.j, ev.bins.ab}, rng);
    out.charly = party_click(Party::charly, slot, Photon{ev.k, ev.bins.ac}, rng);
    out.event = std::move(ev);
  } else {
    out.bob = dark_click(Party::bob, slot, detectors_, rng);
    out.charly = dark_click(Party::charly, slot, detectors_, rng);
  }
  out.accepted = gate_.accepts(true, out.bob, out.charly);
  if (out.accepted) out.origin = classify(out.event, *out.bob, *out.charly);
  return out;
}

CoincidenceCounts& CoincidenceCounts::operator+=(const CoincidenceCounts& o) {
  for (int n = 0; n < 4; ++n) by_combination[n] += o.by_combination[n];
  signal += o.signal;
  leakage += o.leakage;
  accidental += o.accidental;
  candidates += o.candidates;
  return *this;
}

CoincidenceCounts run_fixed_settings(std::uint64_t n_pulses, const PhaseSettings& settings,
                                     Visibility v, const source::SourceParams& source,
                                     const DetectorParams& detectors, const RunOptions& options) {
  const CoincidenceSampler sampler(source, detectors);
  const ShardPlan plan{n_pulses, options.shard_slots};
  auto parts = run_sharded(plan, options.threads,
                           [&](std::uint64_t shard, std::uint64_t begin, std::uint64_t end) {
    Rng rng(derive_seed(options.seed, shard));
    CoincidenceCounts c;
    std::uint64_t slot = begin;
    for (;;) {
      const std::uint64_t gap = sampler.skip(rng);
      if (gap >= end - slot) break;
      slot += gap;
      const auto out = sampler.sample_candidate(slot, settings, v, {}, rng);
      ++c.candidates;
      if (out.accepted) {
        ++c.by_combination[correlations::combination_index(out.bob->port, out.charly->port)];
        switch (out.origin) {
          case CoincidenceOrigin::signal: ++c.signal; break;
          case CoincidenceOrigin::leakage: ++c.leakage; break;
          case CoincidenceOrigin::accidental: ++c.accidental; break;
        }
      }
      ++slot;
    }
    return c;
  });
  CoincidenceCounts total;
  for (const auto& c : parts) total += c;
  return total;
}

}  // namespace qss::devices
