#include "qss/devices.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qss::devices {

const char* party_name(Party p) { return p == Party::bob ? "bob" : "charly"; }

const char* origin_name(CoincidenceOrigin o) {
  switch (o) {
    case CoincidenceOrigin::signal: return "signal";
    case CoincidenceOrigin::leakage: return "leakage";
    case CoincidenceOrigin::accidental: return "accidental";
  }
  return "?";
}

double DetectorParams::port_efficiency(Sign port) const {
  return efficiency * port_efficiency_scale[port.is_plus() ? 0 : 1];
}

double DetectorParams::max_port_efficiency() const {
  return efficiency * std::max(port_efficiency_scale[0], port_efficiency_scale[1]);
}

double DetectorParams::mean_port_efficiency() const {
  return efficiency * 0.5 * (port_efficiency_scale[0] + port_efficiency_scale[1]);
}

std::vector<std::string> DetectorParams::validate() const {
  std::vector<std::string> errors;
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    errors.emplace_back("devices.efficiency: must lie in [0, 1]");
  }
  if (!(dark_rate >= 0.0)) errors.emplace_back("devices.dark_rate: must be non-negative");
  if (!(gate_window > 0.0)) {
    errors.emplace_back("devices.gate_window: must be positive");
  } else if (dark_rate >= 0.0 && !(dark_prob_per_gate() < 1.0)) {
    errors.emplace_back("devices.dark_rate: dark_rate * gate_window must be < 1");
  }
  if (!(bin_width > 0.0)) {
    errors.emplace_back("devices.bin_width: must be positive");
  } else if (gate_window > 0.0 && !(bin_width <= gate_window)) {
    errors.emplace_back("devices.bin_width: must not exceed gate_window");
  }
  if (!(misclassification_prob >= 0.0 && misclassification_prob <= 1.0)) {
    errors.emplace_back("devices.misclassification_prob: must lie in [0, 1]");
  }
  for (double s : port_efficiency_scale) {
    if (!(s >= 0.0)) {
      errors.emplace_back("devices.port_efficiency_scale: must be non-negative");
      break;
    }
  }
  if (efficiency >= 0.0 && !(max_port_efficiency() <= 1.0)) {
    errors.emplace_back("devices.port_efficiency_scale: efficiency * scale exceeds 1");
  }
  return errors;
}

void DetectorParams::check() const {
  const auto errors = validate();
  if (errors.empty()) return;
  std::ostringstream msg;
  for (std::size_t n = 0; n < errors.size(); ++n) msg << (n ? "; " : "") << errors[n];
  throw std::invalid_argument(msg.str());
}

bool CoincidenceGate::accepts(bool pump_marker, const std::optional<ClickRecord>& bob,
                              const std::optional<ClickRecord>& charly) const {
  if (require_pump_sync && !pump_marker) return false;
  if (!bob || !charly) return false;
  if (central_bin_filter) return bob->bin == kCentralBin && charly->bin == kCentralBin;
  return true;
}

int observed_bin(int true_bin, const DetectorParams& params, Rng& rng) {
  if (params.misclassification_prob <= 0.0 || !bernoulli(rng, params.misclassification_prob)) {
    return true_bin;
  }
  const int shift = 1 + static_cast<int>(rng() & 1);
  return (true_bin + shift) % 3;
}

int dark_bin(const DetectorParams& params, Rng& rng) {
  if (bernoulli(rng, params.central_fraction())) return kCentralBin;
  return (rng() & 1) ? 2 : 0;
}

std::optional<ClickRecord> detect(Party party, std::uint64_t slot,
                                  const std::optional<Photon>& photon,
                                  const DetectorParams& params, Rng& rng) {
  std::optional<ClickRecord> click;
  if (photon && bernoulli(rng, params.port_efficiency(photon->port))) {
    click = ClickRecord{party, photon->port, slot, ClickCause::photon,
                        observed_bin(photon->bin, params, rng)};
  }
  // The dark process runs regardless; a photon click keeps the slot.
  if (bernoulli(rng, params.dark_prob_per_gate())) {
    const Sign port = Sign::from_bit(static_cast<int>(rng() & 1));
    const int bin = dark_bin(params, rng);
    if (!click) click = ClickRecord{party, port, slot, ClickCause::dark, bin};
  }
  return click;
}

bool triple_coincidence(bool pump_marker, const std::optional<ClickRecord>& bob,
                        const std::optional<ClickRecord>& charly) {
  return pump_marker && bob.has_value() && charly.has_value();
}

double expected_accidentals(const DetectorParams& params, double singles_rate_bob,
                            double singles_rate_charly, double pulse_rate) {
  params.check();
  if (singles_rate_bob < 0.0 || singles_rate_charly < 0.0 || pulse_rate < 0.0) {
    throw std::invalid_argument("rates must be non-negative");
  }
  if (pulse_rate == 0.0) return 0.0;
  const double pb = singles_rate_bob / pulse_rate;
  const double pc = singles_rate_charly / pulse_rate;
  return pulse_rate * pb * pc;
}

double CoincidenceBudget::signal_fraction() const {
  const double t = total();
  return t > 0.0 ? signal / t : 0.0;
}

double CoincidenceBudget::accidental_fraction() const {
  const double t = total();
  return t > 0.0 ? accidental / t : 0.0;
}

CoincidenceBudget coincidence_budget(const source::SourceParams& source,
                                     const DetectorParams& detectors) {
  source.check();
  detectors.check();
  const double p = source.pair_prob_per_slot;
  const double eta = detectors.mean_port_efficiency();
  const double m = detectors.misclassification_prob;
  const double dark_central = detectors.dark_prob_per_gate() * detectors.central_fraction();

  CoincidenceBudget b;
  for (const auto& paths : source::all_path_triples()) {
    const auto bins = source::time_bins(paths);
    const double read_b = bins.ab == kCentralBin ? 1.0 - m : 0.5 * m;
    const double read_c = bins.ac == kCentralBin ? 1.0 - m : 0.5 * m;
    const double photons = eta * eta * read_b * read_c;
    const double any = (eta * read_b + (1.0 - eta) * dark_central) *
                       (eta * read_c + (1.0 - eta) * dark_central);
    const double w = p / 8.0;
    if (source::is_central(bins)) {
      b.signal += w * photons;
    } else {
      b.leakage += w * photons;
    }
    b.accidental += w * (any - photons);
  }
  b.accidental += (1.0 - p) * dark_central * dark_central;
  return b;
}

double calibrate_interference_visibility(double net, const CoincidenceBudget& budget) {
  if (!(net >= 0.0 && net <= 1.0)) {
    throw std::invalid_argument("target visibility must lie in [0, 1]");
  }
  if (net == 0.0) return 0.0;
  const double f = budget.signal_fraction();
  if (!(f > 0.0) || net > f * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "net visibility " << net << " unreachable: noise limits it to " << f;
    throw std::invalid_argument(msg.str());
  }
  return std::min(1.0, net / f);
}

double singles_rate(const source::SourceParams& source, const DetectorParams& detectors) {
  const double photon = source.pair_prob_per_slot * detectors.mean_port_efficiency();
  return source.pulse_rate * (photon + (1.0 - photon) * detectors.dark_prob_per_gate());
}

}  // namespace qss::devices
