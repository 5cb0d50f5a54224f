#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "taxruin/engine.hpp"
#include "taxruin/numerics.hpp"

namespace taxruin {

enum class EstimatorKind { Crude, Tilted };

std::string_view to_string(EstimatorKind kind);
inline EstimatorKind estimator_for(Measure m) {
  return m == Measure::P ? EstimatorKind::Crude : EstimatorKind::Tilted;
}

/// Monte Carlo estimate; ci95 = mean -/+ 1.96 std_error.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t ruins = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  EstimatorKind kind = EstimatorKind::Crude;
  /// No ruined paths: the estimate is a placeholder (mean 0, std_error 0).
  bool degenerate = false;
  // Ratio estimators keep their weighted sums.
  std::optional<double> numerator;
  std::optional<double> denominator;

  bool overlaps(const Estimate& other) const { return ci_low <= other.ci_high && other.ci_low <= ci_high; }
  bool operator==(const Estimate&) const = default;
};

/// Sums behind ruin_prob: weighted ruin indicator and its square.
class RuinAccumulator {
 public:
  explicit RuinAccumulator(Measure measure) : measure_(measure) {}

  void add(const RuinRecord& record);
  void add(std::span<const RuinRecord> records);
  void merge(const RuinAccumulator& other);
  Estimate estimate() const;

 private:
  Measure measure_;
  numerics::ExactSum weight_;
  numerics::ExactSum weight_sq_;
  std::size_t n_ = 0;
  std::size_t ruins_ = 0;
};

/// Sums behind the self-normalised ratio E[W G; ruin] / E[W; ruin].
class RatioAccumulator {
 public:
  explicit RatioAccumulator(Measure measure) : measure_(measure) {}

  void add(const RuinRecord& record, double functional_value);
  void merge(const RatioAccumulator& other);
  /// Delta-method standard error.
  Estimate estimate() const;

 private:
  Measure measure_;
  numerics::ExactSum w_, wg_, w2_, w2g_, w2g2_;
  std::size_t n_ = 0;
  std::size_t ruins_ = 0;
};

using RecordFunctional = std::function<double(const RuinRecord&)>;

/// P(tau^Gamma_u < inf): ruin frequency (crude) or mean of exp(-alpha X_tau)
/// over Q paths (tilted). Throws MixedBatch if records disagree on measure
/// or level, and Error on truncated Q paths.
Estimate ruin_prob(std::span<const RuinRecord> records, Measure mode);

/// E[G | ruin] (crude) or E_Q[W G] / E_Q[W] (tilted).
Estimate conditional_mean(std::span<const RuinRecord> records, const RecordFunctional& functional);

/// exp(-penalty_lambda * depth + eta * overshoot - penalty_delta * duration).
double edpf_functional(const RuinRecord& r, double penalty_lambda, double eta, double penalty_delta);

/// Conditional mean of the EDPF functional. Requires eta <= alpha and
/// eta + penalty_lambda - alpha != 0 (ParameterError otherwise).
Estimate edpf(std::span<const RuinRecord> records, double penalty_lambda, double eta,
              double penalty_delta, double alpha);

/// Weighted fraction of ruined paths whose ruin happened after the first
/// excursion above u.
Estimate first_excursion_ratio(std::span<const RuinRecord> records);

enum class JointVariable { Depth, Overshoot, Undershoot, Duration };
constexpr std::array<JointVariable, 4> kJointVariables{JointVariable::Depth, JointVariable::Overshoot,
                                                       JointVariable::Undershoot, JointVariable::Duration};
std::string_view to_string(JointVariable v);
double joint_value(const RuinRecord& r, JointVariable v);

struct Histogram {
  double lower = 0.0;
  double upper = 0.0;
  /// Weighted density per bin (integrates to the in-range mass).
  std::vector<double> density;
  double bin_width() const { return (upper - lower) / static_cast<double>(density.size()); }
};

using Cdf = std::function<double(double)>;

struct JointLawOptions {
  std::size_t bins = 64;
  /// Per-variable scale; the histogram covers [0, 8 * scale]. Unset scales use
  /// the weighted sample mean.
  std::array<std::optional<double>, 4> scale{};
  /// Reference CDFs for the KS distances (by JointVariable order).
  std::array<Cdf, 4> reference{};
};

struct JointLaw {
  std::array<Histogram, 4> histogram;
  std::array<std::optional<double>, 4> ks_distance;
  /// Weighted mass of {undershoot < depth}.
  double mass_undershoot_below_depth = 0.0;
  std::size_t ruins = 0;
  /// Kish effective sample size of the weights.
  double effective_size = 0.0;
  bool degenerate = false;
};

JointLaw joint_law(std::span<const RuinRecord> records, const JointLawOptions& options = {});

/// sup |F_weighted(x) - F_ref(x)| over the sample.
double weighted_ks_distance(std::span<const double> values, std::span<const double> weights, const Cdf& reference);

}  // namespace taxruin
