#pragma once

// Exact predictions for pseudo-GHZ triple coincidences.
//
// Imperfect visibility V is a convex mixture: a fraction V of events follow
// the ideal interference pattern and 1 - V are uniformly distributed over
// detector outcomes.

#include <array>
#include <string>

#include "qss/phase.hpp"

namespace qss {

class Visibility {
 public:
  constexpr Visibility() = default;
  /// Throws std::invalid_argument outside [0, 1].
  explicit Visibility(double value);
  constexpr double value() const { return value_; }

 private:
  double value_ = 1.0;
};

struct PhaseSettings {
  Phase alice;   // effective pump phase (alpha')
  Phase bob;     // beta
  Phase charly;  // gamma

  Phase phase_sum() const { return alice + bob + charly; }
};

struct Outcome {
  Sign i;
  Sign j;
  Sign k;
};

/// Labels of the two orthogonal modes of each qubit (|0>,|1> or |s>,|l>).
class GhzStateLabels {
 public:
  GhzStateLabels() = default;
  GhzStateLabels(std::string basis0, std::string basis1);

  const std::string& basis0() const { return basis0_; }
  const std::string& basis1() const { return basis1_; }
  std::string ket(int mode) const;

 private:
  std::string basis0_ = "s";
  std::string basis1_ = "l";
};

namespace correlations {

/// Ordering of (j, k) detector combinations used by every 4-entry table:
/// ++, +-, -+, --.
inline constexpr std::array<const char*, 4> kCombinationLabels{"++", "+-", "-+", "--"};
int combination_index(Sign j, Sign k);
Sign combination_j(int index);
Sign combination_k(int index);

/// Conditional distribution over Bob's and Charly's ports given the pump phase.
struct PortDistribution {
  std::array<double, 4> p{};
  double operator()(Sign j, Sign k) const { return p[combination_index(j, k)]; }
  double total() const { return p[0] + p[1] + p[2] + p[3]; }
};

/// Three-party distribution over (i, j, k); index = 4*[i<0] + 2*[j<0] + [k<0].
struct JointDistribution {
  std::array<double, 8> p{};
  static int index(Sign i, Sign j, Sign k);
  double operator()(Sign i, Sign j, Sign k) const { return p[index(i, j, k)]; }
  double total() const;
  /// Probability that party (0 = i, 1 = j, 2 = k) reads +1.
  double marginal_plus(int party) const;
};

/// E = V cos(alpha + beta + gamma).
double correlation(const PhaseSettings& settings, Visibility v);

/// P(j,k) = (1 + jk V cos(alpha' + beta + gamma)) / 4.
PortDistribution outcome_distribution(const PhaseSettings& settings, Visibility v);

/// P(i,j,k) = (1 + ijk V cos(alpha + beta + gamma)) / 8.
JointDistribution ghz_joint_distribution(const PhaseSettings& settings, Visibility v);

/// |e1 + e2 + e3 - e4|; each input must lie in [-1, 1].
double s3(double e1, double e2, double e3, double e4);

constexpr double local_bound() { return 2.0; }
constexpr double quantum_bound() { return 4.0; }
/// 0.5 for three parties, 1/sqrt(2) for two; throws for anything else.
double threshold_visibility(int parties);

/// Two settings per party for the three-party Bell combination.
struct BellSettings {
  Phase alice;
  Phase alice_prime;
  Phase bob;
  Phase bob_prime;
  Phase charly;
  Phase charly_prime;

  /// Settings of the four correlation terms, in the order they enter s3:
  /// (a',b,c), (a,b',c), (a,b,c'), (a',b',c').
  std::array<PhaseSettings, 4> terms() const;
};

/// alpha = beta = gamma = -pi/6 and alpha' = beta' = gamma' = pi/3; every
/// term's phase sum is a multiple of pi, so s3 reaches 4V.
BellSettings optimal_bell_settings();

double s3_predicted(const BellSettings& settings, Visibility v);

}  // namespace correlations
}  // namespace qss
