#include "qss/source.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qss::source {

namespace {

constexpr double kMaxPairProb = 0.01;

// Side-peak triples in all_path_triples() order, i.e. all but (s,l,l) and (l,s,s).
constexpr std::array<PathTriple, 6> kSideTriples{{
    {PathChoice::short_arm, PathChoice::short_arm, PathChoice::short_arm},
    {PathChoice::short_arm, PathChoice::short_arm, PathChoice::long_arm},
    {PathChoice::short_arm, PathChoice::long_arm, PathChoice::short_arm},
    {PathChoice::long_arm, PathChoice::short_arm, PathChoice::long_arm},
    {PathChoice::long_arm, PathChoice::long_arm, PathChoice::short_arm},
    {PathChoice::long_arm, PathChoice::long_arm, PathChoice::long_arm},
}};

}  // namespace

char path_symbol(PathChoice p) { return p == PathChoice::long_arm ? 'l' : 's'; }

std::string PathTriple::to_string() const {
  return {path_symbol(alice), path_symbol(bob), path_symbol(charly)};
}

std::array<PathTriple, 8> all_path_triples() {
  std::array<PathTriple, 8> out{};
  for (int n = 0; n < 8; ++n) {
    out[n] = {static_cast<PathChoice>((n >> 2) & 1), static_cast<PathChoice>((n >> 1) & 1),
              static_cast<PathChoice>(n & 1)};
  }
  return out;
}

std::vector<std::string> SourceParams::validate() const {
  std::vector<std::string> errors;
  if (!(pulse_rate > 0.0)) errors.emplace_back("source.pulse_rate: must be positive");
  if (!(pair_prob_per_slot >= 0.0)) {
    errors.emplace_back("source.pair_prob_per_slot: must be non-negative");
  } else if (!(pair_prob_per_slot < kMaxPairProb)) {
    errors.emplace_back("source.pair_prob_per_slot: multi-pair regime (must be < 0.01)");
  }
  if (!(delay > 0.0)) errors.emplace_back("source.delay: must be positive");
  if (!(pulse_width > 0.0)) errors.emplace_back("source.pulse_width: must be positive");
  if (delay > 0.0 && pulse_width > 0.0 && !(pulse_width < delay)) {
    errors.emplace_back("source.pulse_width: pulses not separable (pulse_width must be < delay)");
  }
  if (pulse_rate > 0.0 && delay > 0.0 && !(2.0 * delay < 1.0 / pulse_rate)) {
    errors.emplace_back("source.delay: time bins overlap the next pump slot");
  }
  return errors;
}

void SourceParams::check() const {
  const auto errors = validate();
  if (errors.empty()) return;
  std::ostringstream msg;
  for (std::size_t n = 0; n < errors.size(); ++n) msg << (n ? "; " : "") << errors[n];
  throw std::invalid_argument(msg.str());
}

std::complex<double> amplitude(PathTriple paths, const PhaseSettings& settings) {
  const double phase = (1 - delta(paths.alice)) * settings.alice.radians() +
                       delta(paths.bob) * settings.bob.radians() +
                       delta(paths.charly) * settings.charly.radians();
  return std::polar(1.0 / std::sqrt(8.0), phase);
}

TimeBins time_bins(PathTriple paths) {
  const int a = delta(paths.alice);
  const int b = delta(paths.bob);
  const int c = delta(paths.charly);
  return {a + b, a + c, c - b};
}

bool is_central(TimeBins bins) { return bins.ab == 1 && bins.ac == 1; }

int sample_combination(const std::array<double, 4>& p, Rng& rng) {
  const double u = uniform01(rng) * (p[0] + p[1] + p[2] + p[3]);
  double cum = 0.0;
  int last = 0;
  for (int n = 0; n < 4; ++n) {
    if (p[n] <= 0.0) continue;
    cum += p[n];
    last = n;
    if (u < cum) return n;
  }
  return last;
}

TripleEvent draw_pair(const PhaseSettings& settings, Visibility v, Rng& rng) {
  TripleEvent ev;
  ev.settings = settings;
  // Sector: 2 of 8 equally weighted path triples form the central sector.
  const auto slot = static_cast<int>(rng() % 8);
  if (slot < 2) {
    ev.bins = kCentralBins;
    const int n = sample_combination(correlations::outcome_distribution(settings, v).p, rng);
    ev.j = correlations::combination_j(n);
    ev.k = correlations::combination_k(n);
  } else {
    const PathTriple paths = kSideTriples[slot - 2];
    ev.paths = paths;
    ev.bins = time_bins(paths);
    const auto bits = rng();
    ev.j = Sign::from_bit(bits & 1);
    ev.k = Sign::from_bit((bits >> 1) & 1);
  }
  return ev;
}

std::optional<TripleEvent> sample_pair_event(const PhaseSettings& settings, Visibility v,
                                             const SourceParams& params, Rng& rng) {
  if (!bernoulli(rng, params.pair_prob_per_slot)) return std::nullopt;
  return draw_pair(settings, v, rng);
}

}  // namespace qss::source
