#pragma once

// Statistics over simulated runs: fringe fits, visibility, QBER, the
// three-party Bell parameter, significance and bit rate.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qss/correlations.hpp"

namespace qss::analysis {

struct FringePoint {
  double phase = 0.0;                      // swept phase, radians
  std::array<std::uint64_t, 4> counts{};   // ++, +-, -+, --
  double duration = 0.0;                   // s
};

struct FringeScan {
  std::vector<FringePoint> points;

  /// Empty when the scan can be fitted: at least 8 points with positive
  /// durations covering one full period.
  std::vector<std::string> validate() const;
};

/// counts(phi) = duration * offset * (1 + V cos(phi + phase0)), rates in Hz.
struct CombinationFit {
  double offset = 0.0;
  double offset_std = 0.0;
  double amplitude = 0.0;  // offset * V before clipping
  double phase0 = 0.0;
  double phase0_std = 0.0;
  double visibility = 0.0;
  double visibility_std = 0.0;
  bool phase0_reliable = false;
};

struct CombinationVisibility {
  double value = 0.0;
  double std_error = 0.0;
};

struct VisibilityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::array<CombinationVisibility, 4> per_combination{};
};

/// Inverse-variance weighted mean. Entries with infinite error are ignored;
/// if any entry has zero error the exact entries are averaged instead.
VisibilityEstimate combine_visibilities(const std::array<CombinationVisibility, 4>& parts);

struct FringeFit {
  std::array<CombinationFit, 4> combinations{};
  VisibilityEstimate visibility;
};

/// Poisson-weighted least squares with the fringe period fixed to 2 pi.
CombinationFit fit_sinusoid(std::span<const double> phases, std::span<const double> counts,
                            std::span<const double> durations);

/// Throws std::invalid_argument if scan.validate() reports problems.
FringeFit fit_fringe(const FringeScan& scan);

void write_fringe_csv(std::ostream& out, const FringeScan& scan);
FringeScan read_fringe_csv(std::istream& in);
void write_fit_csv(std::ostream& out, const FringeFit& fit);
FringeFit read_fit_csv(std::istream& in);

/// (1 - V) / 2.
double qber_from_visibility(Visibility v);
/// 4 V.
double s_from_visibility(Visibility v);

struct CorrelationSample {
  PhaseSettings settings;
  Sign j;
  Sign k;
};

struct S3Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::array<double, 4> e{};
  std::array<double, 4> e_std{};
  std::array<std::uint64_t, 4> samples{};
};

/// <jk> from counts indexed ++, +-, -+, --.
double correlation_from_counts(const std::array<std::uint64_t, 4>& counts);

/// S3 from per-term combination counts, terms ordered as BellSettings::terms().
S3Estimate s3_from_counts(const std::array<std::array<std::uint64_t, 4>, 4>& counts);

/// Empirical E for each Bell term from matching samples, then s3. Throws if
/// a term has no samples.
S3Estimate estimate_s3(std::span<const CorrelationSample> samples,
                       const correlations::BellSettings& settings);

struct BellTerm {
  PhaseSettings settings;
  std::array<std::uint64_t, 4> counts{};  // ++, +-, -+, --
};
using BellTable = std::array<BellTerm, 4>;  // ordered as BellSettings::terms()

S3Estimate estimate_s3(const BellTable& table);

/// The e and e_std columns are derived from the counts and ignored on read.
void write_bell_csv(std::ostream& out, const BellTable& table);
BellTable read_bell_csv(std::istream& in);

/// (value - reference) / std_error; std_error must be positive.
double sigma_distance(double value, double reference, double std_error);

/// sifted_bits / wall_time; wall_time must be positive.
double bit_rate(std::uint64_t sifted_bits, double wall_time);

struct QberEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t errors = 0;
  std::uint64_t total = 0;
};

/// Binomial estimate; total == 0 gives value 0 with infinite error.
QberEstimate estimate_qber(std::uint64_t errors, std::uint64_t total);

/// Visibility per detector combination from sifted rounds: counts[c][0] is
/// the number of rounds landing on combination c when the expected jk is +1,
/// counts[c][1] when it is -1.
VisibilityEstimate visibility_from_sifted(
    const std::array<std::array<std::uint64_t, 2>, 4>& counts);

struct RunReport {
  std::uint64_t n_pulses = 0;
  double duration_s = 0.0;
  std::uint64_t detected = 0;
  std::uint64_t sifted_bits = 0;
  std::uint64_t errors = 0;
  double qber = 0.0;
  double qber_std = 0.0;
  VisibilityEstimate visibility;
  double s_exp = 0.0;
  double bit_rate = 0.0;
  std::uint64_t accidental_errors = 0;
  double accidental_error_fraction = 0.0;
  std::uint64_t eve_touched = 0;
  bool insufficient_statistics = true;

  std::string to_text() const;
  void write_csv(std::ostream& out) const;
  static RunReport read_csv(std::istream& in);
};

}  // namespace qss::analysis
