#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "taxruin/model.hpp"
#include "taxruin/rng.hpp"
#include "taxruin/tax.hpp"

namespace taxruin {

/// Measure a path is simulated under: the original P, or the Esscher tilt Q
/// (dQ = exp(alpha X_t) dP) under which ruin is certain.
enum class Measure { P, Q };

std::string_view to_string(Measure m);

struct RunOptions {
  Measure measure = Measure::P;
  /// Discount rate for the discounted tax integral.
  double discount = 0.0;
  /// P mode stops a path once R^Gamma < -truncation_margin. NaN selects the
  /// default, sized so the neglected ruin probability is below 1e-3 of the
  /// Cramer-scale target.
  double truncation_margin = std::numeric_limits<double>::quiet_NaN();
  /// Safety valve on the number of events (jumps or grid steps) per path.
  std::uint64_t max_events = 20'000'000;
  /// Grid step for the Euler scheme used by BMDrift.
  double bm_step = 1e-3;
};

/// Outcome of one path. On paths without ruin only the truncation metadata
/// (truncated, step_limit, residual_bound, events) is meaningful.
struct RuinRecord {
  bool ruined = false;
  double tau = 0.0;            // first time R^Gamma > u
  double g = 0.0;              // last time R^Gamma sat at its running maximum before tau
  double undershoot = 0.0;     // u - R^Gamma(tau-)
  double overshoot = 0.0;      // R^Gamma(tau) - u
  double depth = 0.0;          // u - max R^Gamma before the final excursion
  double duration = 0.0;       // tau - g
  double tax = 0.0;            // total tax paid up to tau
  double disc_tax = 0.0;       // discounted tax paid up to tau
  double x_at_ruin = 0.0;      // X(tau)
  double weight = 1.0;         // likelihood ratio dP/dQ on F_tau (1 under P)
  bool first_excursion = false;  // ruin on the first excursion of X - inf X above u
  bool truncated = false;
  bool step_limit = false;
  bool failed = false;         // an exception was raised while simulating
  bool approximate = false;    // produced by the Euler grid (BMDrift)
  double residual_bound = 0.0; // bound on the ruin probability lost to truncation
  std::uint64_t events = 0;
  Measure measure = Measure::P;
  double level = 0.0;

  bool operator==(const RuinRecord&) const = default;
};

enum class EventKind { Start, ReachMin, PreJump, UpJump, DownJump, Step, Ruin, Truncate, StepLimit };

std::string_view to_string(EventKind kind);

/// Snapshot of the path state after an event.
struct PathEvent {
  double time;
  EventKind kind;
  double x;
  double x_min;
  double r_gamma;
  double tax;
};

using EventLog = std::vector<PathEvent>;

/// A jump after waiting `wait` time units. Positive sizes are claims (X up).
struct Jump {
  double wait;
  double size;
};

/// Supplies the jump sequence of a finite-activity path.
class JumpSource {
 public:
  virtual ~JumpSource() = default;
  /// Returns false once no further jumps will occur.
  virtual bool next(Jump& jump) = 0;
};

/// Jumps of a CL/TwoSided model drawn from a stream. Each jump consumes, in
/// order: the inter-arrival time, the Exp(1) mark, then (TwoSided only) the
/// uniform deciding the sign.
class ModelJumpSource final : public JumpSource {
 public:
  ModelJumpSource(const ModelSpec& model, RandomStream& stream) : model_(model), stream_(stream) {}
  bool next(Jump& jump) override;

 private:
  const ModelSpec& model_;
  RandomStream& stream_;
};

/// Fixed jumps at absolute times (ascending).
class ScriptedJumpSource final : public JumpSource {
 public:
  explicit ScriptedJumpSource(std::vector<std::pair<double, double>> time_and_size)
      : jumps_(std::move(time_and_size)) {}
  bool next(Jump& jump) override;

 private:
  std::vector<std::pair<double, double>> jumps_;
  std::size_t index_ = 0;
  double last_time_ = 0.0;
};

/// Simulates the taxed process R^Gamma = X + int Gamma d|inf X| for one
/// (model, policy, level, options) combination. Immutable; share freely.
///
/// CL/TwoSided paths are exact and event driven: each inter-jump drift is
/// split at the instant X returns to its running minimum, tax accrues only on
/// the minimum-descending part, and ruin (R^Gamma > u, strict) can only occur
/// at upward jumps. BMDrift uses an Euler grid; its records are flagged
/// approximate and first touch of u counts as passage.
class PathSimulator {
 public:
  PathSimulator(const ModelSpec& model, const TaxPolicy& policy, double level, RunOptions options = {});

  RuinRecord run(RandomStream& stream, EventLog* log = nullptr) const;
  /// Event-driven run with an explicit jump sequence (CL/TwoSided dynamics).
  RuinRecord run(JumpSource& jumps, EventLog* log = nullptr) const;

  const ModelSpec& model() const { return model_; }
  /// Dynamics actually simulated (the tilted model in Q mode).
  const ModelSpec& simulated_model() const { return simulated_; }
  const TaxPolicy& policy() const { return policy_; }
  double level() const { return level_; }
  const RunOptions& options() const { return options_; }
  /// Lundberg root, when it exists.
  std::optional<double> alpha() const { return alpha_; }
  double truncation_margin() const { return margin_; }

 private:
  RuinRecord run_euler(RandomStream& stream, EventLog* log) const;

  ModelSpec model_;
  ModelSpec simulated_;
  TaxPolicy policy_;
  double level_;
  RunOptions options_;
  std::optional<double> alpha_;
  double margin_;
  double residual_bound_;
};

RuinRecord run_path(const ModelSpec& model, const TaxPolicy& policy, double level,
                    const RunOptions& options, RandomStream& stream, EventLog* log = nullptr);

/// Euler-grid path for BMDrift with grid step dt.
RuinRecord bm_step_path(const ModelSpec& model, const TaxPolicy& policy, double level, double dt,
                        const RunOptions& options, RandomStream& stream, EventLog* log = nullptr);

/// Worker count from TAXRUIN_WORKERS, else the hardware concurrency.
unsigned default_workers();

/// Replica i runs on RandomStream(seed, i). The result is identical for any
/// worker count. Per-path exceptions become records with `failed` set.
std::vector<RuinRecord> run_batch(const PathSimulator& simulator, std::size_t n, std::uint64_t seed,
                                  unsigned workers = 0);

std::vector<RuinRecord> run_batch(const ModelSpec& model, const TaxPolicy& policy, double level,
                                  const RunOptions& options, std::size_t n, std::uint64_t seed,
                                  unsigned workers = 0);

}  // namespace taxruin
