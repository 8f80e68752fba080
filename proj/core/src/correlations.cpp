#include "qss/correlations.hpp"

#include <cmath>
#include <stdexcept>

namespace qss {

Visibility::Visibility(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(value));
  }
}

GhzStateLabels::GhzStateLabels(std::string basis0, std::string basis1)
    : basis0_(std::move(basis0)), basis1_(std::move(basis1)) {
  if (basis0_ == basis1_) {
    throw std::invalid_argument("GHZ mode labels must be distinct");
  }
}

std::string GhzStateLabels::ket(int mode) const {
  return "|" + (mode == 0 ? basis0_ : basis1_) + ">";
}

namespace correlations {

int combination_index(Sign j, Sign k) { return (j.is_plus() ? 0 : 2) + (k.is_plus() ? 0 : 1); }
Sign combination_j(int index) { return index < 2 ? Sign::plus() : Sign::minus(); }
Sign combination_k(int index) { return index % 2 == 0 ? Sign::plus() : Sign::minus(); }

int JointDistribution::index(Sign i, Sign j, Sign k) {
  return (i.is_plus() ? 0 : 4) + (j.is_plus() ? 0 : 2) + (k.is_plus() ? 0 : 1);
}

double JointDistribution::total() const {
  double s = 0.0;
  for (double x : p) s += x;
  return s;
}

double JointDistribution::marginal_plus(int party) const {
  if (party < 0 || party > 2) throw std::invalid_argument("party index must be 0, 1 or 2");
  const int bit = 4 >> party;
  double s = 0.0;
  for (int n = 0; n < 8; ++n) {
    if ((n & bit) == 0) s += p[n];
  }
  return s;
}

double correlation(const PhaseSettings& settings, Visibility v) {
  return v.value() * settings.phase_sum().cos();
}

PortDistribution outcome_distribution(const PhaseSettings& settings, Visibility v) {
  const double e = correlation(settings, v);
  PortDistribution d;
  for (int n = 0; n < 4; ++n) {
    const int jk = (combination_j(n) * combination_k(n)).value();
    d.p[n] = 0.25 * (1.0 + jk * e);
  }
  return d;
}

JointDistribution ghz_joint_distribution(const PhaseSettings& settings, Visibility v) {
  const double e = correlation(settings, v);
  JointDistribution d;
  for (int n = 0; n < 8; ++n) {
    const int parity = ((n >> 2) ^ (n >> 1) ^ n) & 1;
    d.p[n] = 0.125 * (1.0 + (parity ? -e : e));
  }
  return d;
}

double s3(double e1, double e2, double e3, double e4) {
  constexpr double slack = 1e-12;
  for (double e : {e1, e2, e3, e4}) {
    if (!(e >= -1.0 - slack && e <= 1.0 + slack)) {
      throw std::invalid_argument("correlation values must lie in [-1, 1]");
    }
  }
  return std::fabs(e1 + e2 + e3 - e4);
}

double threshold_visibility(int parties) {
  switch (parties) {
    case 2: return 1.0 / std::sqrt(2.0);
    case 3: return 0.5;
    default:
      throw std::invalid_argument("threshold visibility defined for 2 or 3 parties, got " +
                                  std::to_string(parties));
  }
}

std::array<PhaseSettings, 4> BellSettings::terms() const {
  return {PhaseSettings{alice_prime, bob, charly}, PhaseSettings{alice, bob_prime, charly},
          PhaseSettings{alice, bob, charly_prime},
          PhaseSettings{alice_prime, bob_prime, charly_prime}};
}

BellSettings optimal_bell_settings() {
  const Phase unprimed(-kPi / 6.0);
  const Phase primed(kPi / 3.0);
  return {unprimed, primed, unprimed, primed, unprimed, primed};
}

double s3_predicted(const BellSettings& settings, Visibility v) {
  const auto t = settings.terms();
  return s3(correlation(t[0], v), correlation(t[1], v), correlation(t[2], v),
            correlation(t[3], v));
}

}  // namespace correlations
}  // namespace qss
