#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace taxruin {

/// Supported claims-surplus models X (ruin when the taxed version of X exceeds u).
///
///  - CL: compound Poisson claims of rate lambda with Exp(mu) sizes, minus premium c*t.
///  - TwoSided: CL plus downward Exp(mu_down) jumps at rate lambda_down.
///  - BMDrift: sigma * B_t - p * t.
enum class ModelKind { CL, TwoSided, BMDrift };

std::string_view to_string(ModelKind kind);

/// Immutable parameter set for one model. Construct through the factories,
/// which validate rates. Net profit (E[X_1] < 0) is not required here; the
/// operations that need it check it.
struct ModelSpec {
  ModelKind kind = ModelKind::CL;
  double premium = 0.0;      // c, also the downward drift of CL/TwoSided
  double claim_rate = 0.0;   // lambda
  double claim_mean_inv = 1.0;  // mu
  double down_rate = 0.0;    // lambda_down
  double down_mean_inv = 1.0;   // mu_down
  double drift = 0.0;        // p (BMDrift); X has mean -p per unit time
  double volatility = 0.0;   // sigma

  static ModelSpec cl(double c, double lambda, double mu);
  /// lambda_down == 0 yields a CL model.
  static ModelSpec two_sided(double c, double lambda, double mu, double lambda_down,
                             double mu_down);
  static ModelSpec bm_drift(double p, double sigma);

  bool has_jumps() const { return kind != ModelKind::BMDrift; }
  bool spectrally_positive() const { return kind != ModelKind::TwoSided; }
  /// Total jump intensity.
  double jump_rate() const { return claim_rate + down_rate; }

  bool operator==(const ModelSpec&) const = default;
};

/// Open interval on which psi is finite.
struct ExponentDomain {
  double lower;
  double upper;
  bool contains(double theta) const { return theta > lower && theta < upper; }
};

ExponentDomain exponent_domain(const ModelSpec& model);

/// psi(theta) = log E exp(theta * X_1). Throws DomainError outside the domain.
double laplace_exponent(const ModelSpec& model, double theta);
double laplace_exponent_derivative(const ModelSpec& model, double theta);

/// E[X_1].
double mean_drift(const ModelSpec& model);
inline bool has_net_profit(const ModelSpec& model) { return mean_drift(model) < 0.0; }

/// The positive root alpha of psi. Throws NoPositiveRoot when E[X_1] >= 0.
double lundberg_root(const ModelSpec& model);

/// Dynamics of X under dQ = exp(alpha X_t) dP, as a model of the same kind.
ModelSpec esscher_tilt(const ModelSpec& model, double alpha);

/// Largest theta >= 0 with psi(-theta) = a (CL and BMDrift only).
double phi_hat(const ModelSpec& model, double a);

/// Real roots of a - psi(-theta) for a fixed a. `ascending_root` is the one
/// carried by kappa, `phi_hat` the nonnegative root carried by kappa_hat, and
/// `far_root` (TwoSided only) the root beyond the pole mu_down.
struct CharacteristicRoots {
  double ascending_root = 0.0;
  double phi_hat = 0.0;
  std::optional<double> far_root;
};

/// Bivariate ascending (kappa) and descending (kappa_hat) ladder exponents.
///
/// For spectrally positive models the descending local time is |inf X|, so
/// kappa_hat(a, b) = phi_hat(a) + b. For TwoSided,
/// kappa_hat(a, b) = (phi_hat(a) + b)(r3 + b) / (mu_down + b), which collapses
/// to the spectrally positive form as lambda_down -> 0. In every case
/// kappa(a, theta) * kappa_hat(a, -theta) = a - psi(-theta).
class LadderExponents {
 public:
  explicit LadderExponents(const ModelSpec& model);

  CharacteristicRoots roots(double a) const;

  /// Ascending exponent; analytic for theta > -mu (all theta for BMDrift).
  double kappa(double a, double theta) const;
  /// Descending exponent; analytic for b > -mu_down (all b otherwise).
  double kappa_hat(double a, double b) const;

  /// Killing rate kappa(0, 0).
  double killing_rate() const { return killing_rate_; }
  /// Drift of the ascending ladder height (creeping coefficient).
  double ascending_drift() const { return ascending_drift_; }
  std::string_view normalization() const;

  const ModelSpec& model() const { return model_; }

 private:
  ModelSpec model_;
  double killing_rate_ = 0.0;
  double ascending_drift_ = 0.0;
};

/// Throws FactorizationError when the real roots cannot be isolated.
LadderExponents ladder_exponents(const ModelSpec& model);

/// Cramer constant lim exp(alpha u) P(tau_u < inf) when it has a closed form;
/// std::nullopt means it must be calibrated empirically (TwoSided).
std::optional<double> cramer_upsilon(const ModelSpec& model);

}  // namespace taxruin
