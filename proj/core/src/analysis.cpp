#include "qss/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qss/csv.hpp"

namespace qss::analysis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kReweightPasses = 6;
constexpr const char* kFringeHeader = "phase_rad,combo,counts,duration_s";
constexpr const char* kFitHeader =
    "combo,offset_hz,offset_std_hz,amplitude_hz,phase0_rad,phase0_std_rad,visibility,"
    "visibility_std,phase0_reliable";
constexpr const char* kBellHeader = "term,alpha_rad,beta_rad,gamma_rad,n_pp,n_pm,n_mp,n_mm,e,e_std";
constexpr std::array<const char*, 4> kComboKeys{"pp", "pm", "mp", "mm"};
constexpr std::array<const char*, 4> kBellLabels{"a'bc", "ab'c", "abc'", "a'b'c'"};

int combo_from_label(std::string_view label) {
  for (int n = 0; n < 4; ++n) {
    if (label == correlations::kCombinationLabels[n]) return n;
  }
  throw std::invalid_argument("unknown detector combination '" + std::string(label) + "'");
}

}  // namespace

std::vector<std::string> FringeScan::validate() const {
  std::vector<std::string> errors;
  if (points.size() < 8) {
    errors.emplace_back("fringe scan needs at least 8 points, got " +
                        std::to_string(points.size()));
    return errors;
  }
  double lo = points.front().phase;
  double hi = lo;
  for (const auto& p : points) {
    if (!std::isfinite(p.phase)) errors.emplace_back("fringe scan phase must be finite");
    if (!(p.duration > 0.0)) errors.emplace_back("fringe scan durations must be positive");
    lo = std::min(lo, p.phase);
    hi = std::max(hi, p.phase);
  }
  const double spacing = (hi - lo) / static_cast<double>(points.size() - 1);
  if (hi - lo + spacing < kTwoPi - 1e-9) {
    errors.emplace_back("fringe scan must span one full period");
  }
  return errors;
}

VisibilityEstimate combine_visibilities(const std::array<CombinationVisibility, 4>& parts) {
  VisibilityEstimate out;
  out.per_combination = parts;
  int exact = 0;
  double exact_sum = 0.0;
  double weight_sum = 0.0;
  double weighted = 0.0;
  for (const auto& p : parts) {
    if (!std::isfinite(p.std_error)) continue;
    if (p.std_error == 0.0) {
      ++exact;
      exact_sum += p.value;
      continue;
    }
    const double w = 1.0 / (p.std_error * p.std_error);
    weight_sum += w;
    weighted += w * p.value;
  }
  if (exact > 0) {
    out.value = exact_sum / exact;
    out.std_error = 0.0;
  } else if (weight_sum > 0.0) {
    out.value = weighted / weight_sum;
    out.std_error = 1.0 / std::sqrt(weight_sum);
  } else {
    out.value = 0.0;
    out.std_error = kInf;
  }
  return out;
}

CombinationFit fit_sinusoid(std::span<const double> phases, std::span<const double> counts,
                            std::span<const double> durations) {
  const auto n = static_cast<Eigen::Index>(phases.size());
  if (counts.size() != phases.size() || durations.size() != phases.size()) {
    throw std::invalid_argument("fit_sinusoid: inputs must have equal length");
  }
  if (n < 3) throw std::invalid_argument("fit_sinusoid: need at least 3 points");

  Eigen::MatrixX3d x(n, 3);
  Eigen::VectorXd y(n);
  Eigen::VectorXd var(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = durations[i];
    x(i, 0) = t;
    x(i, 1) = t * std::cos(phases[i]);
    x(i, 2) = t * std::sin(phases[i]);
    y(i) = counts[i];
    var(i) = std::max(counts[i], 1.0);
  }

  Eigen::Matrix3d normal;
  Eigen::Vector3d beta = Eigen::Vector3d::Zero();
  for (int pass = 0; pass < kReweightPasses; ++pass) {
    const Eigen::VectorXd w = var.cwiseInverse();
    normal = x.transpose() * w.asDiagonal() * x;
    beta = normal.ldlt().solve(x.transpose() * w.asDiagonal() * y);
    const Eigen::VectorXd model = x * beta;
    for (Eigen::Index i = 0; i < n; ++i) var(i) = std::max(model(i), 1.0);
  }
  normal = x.transpose() * var.cwiseInverse().asDiagonal() * x;
  const Eigen::Matrix3d cov = normal.inverse();

  CombinationFit fit;
  const double a = beta(0);
  double b = beta(1);
  double c = beta(2);
  fit.offset = a;
  fit.offset_std = std::sqrt(std::max(cov(0, 0), 0.0));
  if (!(a > 0.0)) {
    fit.visibility_std = kInf;
    fit.phase0_std = kInf;
    return fit;
  }
  double r = std::hypot(b, c);
  if (r <= 1e-12 * a) {
    b = c = r = 0.0;
  }
  fit.amplitude = r;
  fit.visibility = std::clamp(r / a, 0.0, 1.0);
  fit.phase0 = r > 0.0 ? std::atan2(-c, b) : 0.0;

  if (r > 0.0) {
    const Eigen::Vector3d gv(-r / (a * a), b / (a * r), c / (a * r));
    fit.visibility_std = std::sqrt(std::max(gv.dot(cov * gv), 0.0));
    const Eigen::Vector3d gp(0.0, c / (r * r), -b / (r * r));
    fit.phase0_std = std::sqrt(std::max(gp.dot(cov * gp), 0.0));
  } else {
    fit.visibility_std = std::sqrt(std::max(0.5 * (cov(1, 1) + cov(2, 2)), 0.0)) / a;
    fit.phase0_std = kInf;
  }
  fit.phase0_reliable = r > 0.0 && fit.visibility > 3.0 * fit.visibility_std;
  return fit;
}

FringeFit fit_fringe(const FringeScan& scan) {
  const auto problems = scan.validate();
  if (!problems.empty()) throw std::invalid_argument(problems.front());
  std::vector<double> phases;
  std::vector<double> durations;
  for (const auto& p : scan.points) {
    phases.push_back(p.phase);
    durations.push_back(p.duration);
  }
  FringeFit out;
  std::array<CombinationVisibility, 4> parts{};
  for (int c = 0; c < 4; ++c) {
    std::vector<double> counts;
    counts.reserve(scan.points.size());
    for (const auto& p : scan.points) counts.push_back(static_cast<double>(p.counts[c]));
    out.combinations[c] = fit_sinusoid(phases, counts, durations);
    parts[c] = {out.combinations[c].visibility, out.combinations[c].visibility_std};
  }
  out.visibility = combine_visibilities(parts);
  return out;
}

void write_fringe_csv(std::ostream& out, const FringeScan& scan) {
  out << kFringeHeader << '\n';
  for (const auto& p : scan.points) {
    for (int c = 0; c < 4; ++c) {
      out << csv::format_double(p.phase) << ',' << correlations::kCombinationLabels[c] << ','
          << p.counts[c] << ',' << csv::format_double(p.duration) << '\n';
    }
  }
}

FringeScan read_fringe_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty fringe CSV");
  csv::expect_header(line, kFringeHeader);
  FringeScan scan;
  std::array<bool, 4> filled{};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) throw std::invalid_argument("fringe CSV row needs 4 fields: " + line);
    const double phase = csv::parse_double(f[0]);
    const int combo = combo_from_label(f[1]);
    const auto count = csv::parse_uint(f[2]);
    const double duration = csv::parse_double(f[3]);
    const bool same_point = !scan.points.empty() && scan.points.back().phase == phase &&
                            scan.points.back().duration == duration && !filled[combo];
    if (!same_point) {
      scan.points.push_back(FringePoint{phase, {}, duration});
      filled = {};
    }
    scan.points.back().counts[combo] = count;
    filled[combo] = true;
  }
  return scan;
}

void write_fit_csv(std::ostream& out, const FringeFit& fit) {
  out << kFitHeader << '\n';
  for (int c = 0; c < 4; ++c) {
    const auto& f = fit.combinations[c];
    out << correlations::kCombinationLabels[c] << ',' << csv::format_double(f.offset) << ','
        << csv::format_double(f.offset_std) << ',' << csv::format_double(f.amplitude) << ','
        << csv::format_double(f.phase0) << ',' << csv::format_double(f.phase0_std) << ','
        << csv::format_double(f.visibility) << ',' << csv::format_double(f.visibility_std)
        << ',' << (f.phase0_reliable ? 1 : 0) << '\n';
  }
  out << "mean,,,,,," << csv::format_double(fit.visibility.value) << ','
      << csv::format_double(fit.visibility.std_error) << ",\n";
}

FringeFit read_fit_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty fit CSV");
  csv::expect_header(line, kFitHeader);
  FringeFit fit;
  std::array<bool, 4> seen{};
  bool mean = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 9) throw std::invalid_argument("fit CSV row needs 9 fields: " + line);
    if (f[0] == "mean") {
      fit.visibility.value = csv::parse_double(f[6]);
      fit.visibility.std_error = csv::parse_double(f[7]);
      mean = true;
      continue;
    }
    const int c = combo_from_label(f[0]);
    auto& x = fit.combinations[c];
    x.offset = csv::parse_double(f[1]);
    x.offset_std = csv::parse_double(f[2]);
    x.amplitude = csv::parse_double(f[3]);
    x.phase0 = csv::parse_double(f[4]);
    x.phase0_std = csv::parse_double(f[5]);
    x.visibility = csv::parse_double(f[6]);
    x.visibility_std = csv::parse_double(f[7]);
    x.phase0_reliable = csv::parse_uint(f[8]) != 0;
    fit.visibility.per_combination[c] = {x.visibility, x.visibility_std};
    seen[c] = true;
  }
  if (!mean || !(seen[0] && seen[1] && seen[2] && seen[3])) {
    throw std::invalid_argument("fit CSV needs four combination rows and a mean row");
  }
  return fit;
}

double qber_from_visibility(Visibility v) { return 0.5 * (1.0 - v.value()); }

double s_from_visibility(Visibility v) { return 4.0 * v.value(); }

double correlation_from_counts(const std::array<std::uint64_t, 4>& counts) {
  const double total = static_cast<double>(counts[0] + counts[1] + counts[2] + counts[3]);
  if (total <= 0.0) throw std::invalid_argument("correlation needs at least one coincidence");
  const double same = static_cast<double>(counts[0] + counts[3]);
  const double diff = static_cast<double>(counts[1] + counts[2]);
  return (same - diff) / total;
}

S3Estimate s3_from_counts(const std::array<std::array<std::uint64_t, 4>, 4>& counts) {
  S3Estimate out;
  double var = 0.0;
  for (int t = 0; t < 4; ++t) {
    const auto& c = counts[t];
    out.samples[t] = c[0] + c[1] + c[2] + c[3];
    out.e[t] = correlation_from_counts(c);
    out.e_std[t] = std::sqrt(std::max(1.0 - out.e[t] * out.e[t], 0.0) /
                             static_cast<double>(out.samples[t]));
    var += out.e_std[t] * out.e_std[t];
  }
  out.value = correlations::s3(out.e[0], out.e[1], out.e[2], out.e[3]);
  out.std_error = std::sqrt(var);
  return out;
}

S3Estimate estimate_s3(std::span<const CorrelationSample> samples,
                       const correlations::BellSettings& settings) {
  const auto terms = settings.terms();
  std::array<std::array<std::uint64_t, 4>, 4> counts{};
  for (const auto& s : samples) {
    for (int t = 0; t < 4; ++t) {
      if (s.settings.alice == terms[t].alice && s.settings.bob == terms[t].bob &&
          s.settings.charly == terms[t].charly) {
        ++counts[t][correlations::combination_index(s.j, s.k)];
      }
    }
  }
  for (int t = 0; t < 4; ++t) {
    const auto& c = counts[t];
    if (c[0] + c[1] + c[2] + c[3] == 0) {
      throw std::invalid_argument("transcript lacks samples for Bell term " + std::to_string(t));
    }
  }
  return s3_from_counts(counts);
}

S3Estimate estimate_s3(const BellTable& table) {
  std::array<std::array<std::uint64_t, 4>, 4> counts{};
  for (int t = 0; t < 4; ++t) counts[t] = table[t].counts;
  return s3_from_counts(counts);
}

void write_bell_csv(std::ostream& out, const BellTable& table) {
  const auto s = estimate_s3(table);
  out << kBellHeader << '\n';
  for (int t = 0; t < 4; ++t) {
    const auto& term = table[t];
    out << kBellLabels[t] << ',' << csv::format_double(term.settings.alice.radians()) << ','
        << csv::format_double(term.settings.bob.radians()) << ','
        << csv::format_double(term.settings.charly.radians());
    for (auto n : term.counts) out << ',' << n;
    out << ',' << csv::format_double(s.e[t]) << ',' << csv::format_double(s.e_std[t]) << '\n';
  }
}

BellTable read_bell_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty Bell CSV");
  csv::expect_header(line, kBellHeader);
  BellTable table;
  std::array<bool, 4> seen{};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 10) throw std::invalid_argument("Bell CSV row needs 10 fields: " + line);
    const auto it = std::find(kBellLabels.begin(), kBellLabels.end(), f[0]);
    if (it == kBellLabels.end()) throw std::invalid_argument("unknown Bell term '" + f[0] + "'");
    const auto t = static_cast<std::size_t>(it - kBellLabels.begin());
    table[t].settings = {Phase(csv::parse_double(f[1])), Phase(csv::parse_double(f[2])),
                         Phase(csv::parse_double(f[3]))};
    for (int n = 0; n < 4; ++n) table[t].counts[n] = csv::parse_uint(f[4 + n]);
    seen[t] = true;
  }
  if (!(seen[0] && seen[1] && seen[2] && seen[3])) {
    throw std::invalid_argument("Bell CSV needs all four terms");
  }
  return table;
}

double sigma_distance(double value, double reference, double std_error) {
  if (!(std_error > 0.0)) throw std::invalid_argument("std_error must be positive");
  return (value - reference) / std_error;
}

double bit_rate(std::uint64_t sifted_bits, double wall_time) {
  if (!(wall_time > 0.0)) throw std::invalid_argument("wall_time must be positive");
  return static_cast<double>(sifted_bits) / wall_time;
}

QberEstimate estimate_qber(std::uint64_t errors, std::uint64_t total) {
  if (errors > total) throw std::invalid_argument("errors exceed total");
  QberEstimate q;
  q.errors = errors;
  q.total = total;
  if (total == 0) {
    q.std_error = kInf;
    return q;
  }
  const double n = static_cast<double>(total);
  q.value = static_cast<double>(errors) / n;
  q.std_error = std::sqrt(q.value * (1.0 - q.value) / n);
  return q;
}

VisibilityEstimate visibility_from_sifted(
    const std::array<std::array<std::uint64_t, 2>, 4>& counts) {
  std::array<double, 2> rounds{};
  for (const auto& c : counts) {
    rounds[0] += static_cast<double>(c[0]);
    rounds[1] += static_cast<double>(c[1]);
  }
  std::array<CombinationVisibility, 4> parts{};
  for (int c = 0; c < 4; ++c) {
    const int jk = (correlations::combination_j(c) * correlations::combination_k(c)).value();
    const int hi = jk > 0 ? 0 : 1;
    const int lo = 1 - hi;
    if (rounds[hi] <= 0.0 || rounds[lo] <= 0.0) {
      parts[c] = {0.0, kInf};
      continue;
    }
    const double n_hi = static_cast<double>(counts[c][hi]);
    const double n_lo = static_cast<double>(counts[c][lo]);
    const double a = n_hi / rounds[hi];
    const double b = n_lo / rounds[lo];
    if (a + b <= 0.0) {
      parts[c] = {0.0, kInf};
      continue;
    }
    const double var_a = n_hi / (rounds[hi] * rounds[hi]);
    const double var_b = n_lo / (rounds[lo] * rounds[lo]);
    const double s = (a + b) * (a + b);
    parts[c].value = std::clamp((a - b) / (a + b), 0.0, 1.0);
    parts[c].std_error = 2.0 / s * std::sqrt(b * b * var_a + a * a * var_b);
  }
  return combine_visibilities(parts);
}

std::string RunReport::to_text() const {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  out << "pulses simulated        " << n_pulses << '\n'
      << "equivalent duration [s] " << duration_s << '\n'
      << "triple coincidences     " << detected << '\n'
      << "sifted bits             " << sifted_bits << '\n'
      << "bit errors              " << errors << '\n'
      << "QBER                    " << qber << " +/- " << qber_std << '\n'
      << "visibility              " << visibility.value << " +/- " << visibility.std_error
      << '\n';
  for (int c = 0; c < 4; ++c) {
    out << "  visibility " << correlations::kCombinationLabels[c] << "         "
        << visibility.per_combination[c].value << " +/- "
        << visibility.per_combination[c].std_error << '\n';
  }
  out << "S_exp                   " << s_exp << '\n'
      << "bit rate [Hz]           " << bit_rate << '\n'
      << "accidental error share  " << accidental_error_fraction << '\n'
      << "eavesdropper-touched    " << eve_touched << '\n';
  if (visibility.std_error > 0.0 && std::isfinite(visibility.std_error)) {
    out << "sigma above V=0.5       "
        << sigma_distance(visibility.value, correlations::threshold_visibility(3),
                          visibility.std_error)
        << '\n'
        << "sigma above V=0.7071    "
        << sigma_distance(visibility.value, correlations::threshold_visibility(2),
                          visibility.std_error)
        << '\n';
  }
  if (insufficient_statistics) out << "WARNING: insufficient statistics\n";
  return out.str();
}

void RunReport::write_csv(std::ostream& out) const {
  out << "key,value\n"
      << "n_pulses," << n_pulses << '\n'
      << "duration_s," << csv::format_double(duration_s) << '\n'
      << "detected," << detected << '\n'
      << "sifted_bits," << sifted_bits << '\n'
      << "errors," << errors << '\n'
      << "qber," << csv::format_double(qber) << '\n'
      << "qber_std," << csv::format_double(qber_std) << '\n'
      << "visibility," << csv::format_double(visibility.value) << '\n'
      << "visibility_std," << csv::format_double(visibility.std_error) << '\n';
  for (int c = 0; c < 4; ++c) {
    const std::string label = kComboKeys[c];
    out << "visibility_" << label << ',' << csv::format_double(visibility.per_combination[c].value)
        << '\n'
        << "visibility_" << label << "_std,"
        << csv::format_double(visibility.per_combination[c].std_error) << '\n';
  }
  out << "s_exp," << csv::format_double(s_exp) << '\n'
      << "bit_rate_hz," << csv::format_double(bit_rate) << '\n'
      << "accidental_errors," << accidental_errors << '\n'
      << "accidental_error_fraction," << csv::format_double(accidental_error_fraction) << '\n'
      << "eve_touched," << eve_touched << '\n'
      << "insufficient_statistics," << (insufficient_statistics ? 1 : 0) << '\n';
}

RunReport RunReport::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty report CSV");
  csv::expect_header(line, "key,value");
  std::map<std::string, std::string> kv;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 2) throw std::invalid_argument("report CSV row needs 2 fields: " + line);
    kv[f[0]] = f[1];
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("report CSV lacks '" + key + "'");
    return it->second;
  };
  auto num = [&](const std::string& key) { return csv::parse_double(get(key)); };
  auto count = [&](const std::string& key) { return csv::parse_uint(get(key)); };
  RunReport r;
  r.n_pulses = count("n_pulses");
  r.duration_s = num("duration_s");
  r.detected = count("detected");
  r.sifted_bits = count("sifted_bits");
  r.errors = count("errors");
  r.qber = num("qber");
  r.qber_std = num("qber_std");
  r.visibility.value = num("visibility");
  r.visibility.std_error = num("visibility_std");
  for (int c = 0; c < 4; ++c) {
    const std::string key = std::string("visibility_") + kComboKeys[c];
    r.visibility.per_combination[c] = {num(key), num(key + "_std")};
  }
  r.s_exp = num("s_exp");
  r.bit_rate = num("bit_rate_hz");
  r.accidental_errors = count("accidental_errors");
  r.accidental_error_fraction = num("accidental_error_fraction");
  r.eve_touched = count("eve_touched");
  r.insufficient_statistics = count("insufficient_statistics") != 0;
  return r;
}

}  // namespace qss::analysis
