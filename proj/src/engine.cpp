#include "taxruin/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "taxruin/errors.hpp"

namespace taxruin {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Default truncation margin and the matching residual bound. Above
// -margin, ruin from a fresh minimum is bounded by the constant-rate taxed
// process with the policy's supremum rate (capped at 0.99).
struct Truncation {
  double margin;
  double residual_bound;
};

Truncation default_truncation(const ModelSpec& model, const TaxPolicy& policy, double level,
                              std::optional<double> alpha, double requested) {
  if (!alpha) return {std::isnan(requested) ? 100.0 : requested, kInf};
  const double cap = std::min(policy.sup_rate(), 0.99);
  const double margin = std::isnan(requested) ? (std::log(1e3) - std::log1p(-cap)) / *alpha : requested;
  const double upsilon = cramer_upsilon(model).value_or(1.0);
  return {margin, upsilon / (1.0 - cap) * std::exp(-*alpha * (level + margin))};
}

class Recorder {
 public:
  explicit Recorder(EventLog* log) : log_(log) {}
  void operator()(double t, EventKind kind, double x, double x_min, double r, double tax) const {
    if (log_) log_->push_back({t, kind, x, x_min, r, tax});
  }

 private:
  EventLog* log_;
};

}  // namespace

std::string_view to_string(Measure m) { return m == Measure::P ? "P" : "Q"; }

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Start:
      return "start";
    case EventKind::ReachMin:
      return "reach_min";
    case EventKind::PreJump:
      return "pre_jump";
    case EventKind::UpJump:
      return "up_jump";
    case EventKind::DownJump:
      return "down_jump";
    case EventKind::Step:
      return "step";
    case EventKind::Ruin:
      return "ruin";
    case EventKind::Truncate:
      return "truncate";
    case EventKind::StepLimit:
      return "step_limit";
  }
  return "?";
}

bool ModelJumpSource::next(Jump& jump) {
  const double total = model_.jump_rate();
  if (total <= 0.0) return false;
  jump.wait = stream_.exponential() / total;
  const double mark = stream_.exponential();
  bool up = true;
  if (model_.kind == ModelKind::TwoSided) up = stream_.uniform() * total <= model_.claim_rate;
  jump.size = up ? mark / model_.claim_mean_inv : -mark / model_.down_mean_inv;
  return true;
}

bool ScriptedJumpSource::next(Jump& jump) {
  if (index_ >= jumps_.size()) return false;
  const auto [time, size] = jumps_[index_++];
  if (time < last_time_) throw ParameterError("scripted jumps must be in time order");
  jump.wait = time - last_time_;
  jump.size = size;
  last_time_ = time;
  return true;
}

PathSimulator::PathSimulator(const ModelSpec& model, const TaxPolicy& policy, double level,
                             RunOptions options)
    : model_(model), simulated_(model), policy_(policy), level_(level), options_(options) {
  if (!(level > 0.0) || !std::isfinite(level)) throw ParameterError("ruin level u must be positive");
  if (!(options_.discount >= 0.0)) throw ParameterError("discount rate must be nonnegative");
  if (model_.kind == ModelKind::BMDrift && !(options_.bm_step > 0.0)) {
    throw ParameterError("BMDrift grid step must be positive");
  }
  if (has_net_profit(model_)) {
    try {
      alpha_ = lundberg_root(model_);
    } catch (const NoPositiveRoot&) {
      alpha_.reset();
    }
  }
  if (options_.measure == Measure::Q) {
    if (!alpha_) throw NoPositiveRoot("Q-tilted simulation needs a Lundberg root");
    simulated_ = esscher_tilt(model_, *alpha_);
  }
  const Truncation trunc = default_truncation(model_, policy_, level_, alpha_, options_.truncation_margin);
  margin_ = trunc.margin;
  residual_bound_ = trunc.residual_bound;
}

RuinRecord PathSimulator::run(RandomStream& stream, EventLog* log) const {
  if (simulated_.kind == ModelKind::BMDrift) return run_euler(stream, log);
  ModelJumpSource source(simulated_, stream);
  return run(source, log);
}

RuinRecord PathSimulator::run(JumpSource& jumps, EventLog* log) const {
  if (simulated_.kind == ModelKind::BMDrift) throw UnsupportedModel("event-driven run needs a jump model");
  const Recorder record(log);
  const double c = simulated_.premium;
  const double u = level_;
  const bool p_mode = options_.measure == Measure::P;

  double t = 0.0, x = 0.0, x_min = 0.0, tax = 0.0, disc = 0.0, r = 0.0;
  double r_max = 0.0, g = 0.0;
  bool excursion_open = false;
  double excursion_height = 0.0;
  bool exceeded_before = false;

  RuinRecord out;
  out.measure = options_.measure;
  out.level = u;
  auto close_excursion = [&] {
    if (excursion_open && excursion_height > u) exceeded_before = true;
    excursion_open = false;
    excursion_height = 0.0;
  };
  auto finish_without_ruin = [&](EventKind kind) {
    out.truncated = kind == EventKind::Truncate;
    out.step_limit = kind == EventKind::StepLimit;
    out.residual_bound = out.truncated ? residual_bound_ : 0.0;
    out.tau = t;
    out.tax = tax;
    out.disc_tax = disc;
    record(t, kind, x, x_min, r, tax);
    return out;
  };

  record(t, EventKind::Start, x, x_min, r, tax);
  for (;;) {
    if (++out.events > options_.max_events) return finish_without_ruin(EventKind::StepLimit);
    Jump jump{kInf, 0.0};
    const bool have_jump = jumps.next(jump);
    if (!have_jump) jump.wait = kInf;
    double remaining = jump.wait;

    // Drift above the minimum; a jump landing exactly on the return time is
    // applied after the return.
    const double gap = x - x_min;
    if (gap > 0.0) {
      const double hit = gap / c;
      if (remaining < hit) {
        x -= c * remaining;
        r -= c * remaining;
        t += remaining;
        remaining = 0.0;
      } else {
        t += hit;
        x = x_min;
        r = x + tax;
        remaining -= hit;
        close_excursion();
        record(t, EventKind::ReachMin, x, x_min, r, tax);
      }
    }
    // Descent along the running minimum.
    if (remaining > 0.0) {
      if (std::isinf(remaining)) {
        // No more jumps: R^Gamma is nonincreasing from here, ruin is impossible.
        return finish_without_ruin(EventKind::Truncate);
      }
      const SegmentTax seg = segment_tax(policy_, options_.discount, t, -x_min, c, remaining);
      tax += seg.tax_paid;
      disc += seg.discounted_tax;
      x_min -= c * remaining;
      x = x_min;
      t += remaining;
      r = x + tax;
    }
    if (r >= r_max) {
      r_max = r;
      g = t;
    }
    record(t, EventKind::PreJump, x, x_min, r, tax);
    if (p_mode && r < -margin_) return finish_without_ruin(EventKind::Truncate);

    const double r_before = r;
    if (jump.size > 0.0) {
      if (!excursion_open) {
        excursion_open = true;
        excursion_height = 0.0;
      }
      x += jump.size;
      r += jump.size;
      excursion_height = std::max(excursion_height, x - x_min);
      record(t, EventKind::UpJump, x, x_min, r, tax);
      if (r > u) {
        out.ruined = true;
        out.tau = t;
        out.g = g;
        out.undershoot = u - r_before;
        out.overshoot = r - u;
        out.depth = u - r_max;
        out.duration = t - g;
        out.tax = tax;
        out.disc_tax = disc;
        out.x_at_ruin = x;
        out.weight = p_mode ? 1.0 : std::exp(-*alpha_ * x);
        out.first_excursion = !exceeded_before;
        record(t, EventKind::Ruin, x, x_min, r, tax);
        return out;
      }
    } else if (jump.size < 0.0) {
      x += jump.size;
      if (x < x_min) {
        const double paid = depth_tax(policy_, -x_min, -x);
        tax += paid;
        disc += std::exp(-options_.discount * t) * paid;
        close_excursion();
        x_min = x;
      }
      r = x + tax;
      record(t, EventKind::DownJump, x, x_min, r, tax);
    }
    if (r >= r_max) {
      r_max = r;
      g = t;
    }
  }
}

RuinRecord PathSimulator::run_euler(RandomStream& stream, EventLog* log) const {
  const Recorder record(log);
  const double dt = options_.bm_step;
  const double sd = simulated_.volatility * std::sqrt(dt);
  const double mean_step = -simulated_.drift * dt;
  const double u = level_;
  const bool p_mode = options_.measure == Measure::P;

  double t = 0.0, x = 0.0, x_min = 0.0, tax = 0.0, disc = 0.0, r = 0.0;
  double r_max = 0.0, g = 0.0;
  bool excursion_open = false;
  double excursion_height = 0.0;
  bool exceeded_before = false;

  RuinRecord out;
  out.measure = options_.measure;
  out.level = u;
  out.approximate = true;
  record(t, EventKind::Start, x, x_min, r, tax);
  for (;;) {
    if (++out.events > options_.max_events) {
      out.step_limit = true;
      out.tau = t;
      record(t, EventKind::StepLimit, x, x_min, r, tax);
      return out;
    }
    const double r_before = r;
    x += mean_step + (sd > 0.0 ? sd * stream.normal() : 0.0);
    t += dt;
    if (x < x_min) {
      const double paid = depth_tax(policy_, -x_min, -x);
      tax += paid;
      disc += std::exp(-options_.discount * t) * paid;
      if (excursion_open && excursion_height > u) exceeded_before = true;
      excursion_open = false;
      excursion_height = 0.0;
      x_min = x;
    } else {
      excursion_open = true;
      excursion_height = std::max(excursion_height, x - x_min);
    }
    r = x + tax;
    record(t, EventKind::Step, x, x_min, r, tax);
    if (r >= u) {
      out.ruined = true;
      out.tau = t;
      out.g = g;
      out.undershoot = u - r_before;
      out.overshoot = r - u;
      out.depth = u - r_max;
      out.duration = t - g;
      out.tax = tax;
      out.disc_tax = disc;
      out.x_at_ruin = x;
      out.weight = p_mode ? 1.0 : std::exp(-*alpha_ * x);
      out.first_excursion = !exceeded_before;
      record(t, EventKind::Ruin, x, x_min, r, tax);
      return out;
    }
    if (r >= r_max) {
      r_max = r;
      g = t;
    }
    if (p_mode && r < -margin_) {
      out.truncated = true;
      out.residual_bound = residual_bound_;
      out.tau = t;
      out.tax = tax;
      out.disc_tax = disc;
      record(t, EventKind::Truncate, x, x_min, r, tax);
      return out;
    }
  }
}

RuinRecord run_path(const ModelSpec& model, const TaxPolicy& policy, double level,
                    const RunOptions& options, RandomStream& stream, EventLog* log) {
  return PathSimulator(model, policy, level, options).run(stream, log);
}

RuinRecord bm_step_path(const ModelSpec& model, const TaxPolicy& policy, double level, double dt,
                        const RunOptions& options, RandomStream& stream, EventLog* log) {
  if (model.kind != ModelKind::BMDrift) throw UnsupportedModel("bm_step_path needs a BMDrift model");
  RunOptions opts = options;
  opts.bm_step = dt;
  return PathSimulator(model, policy, level, opts).run(stream, log);
}

unsigned default_workers() {
  if (const char* env = std::getenv("TAXRUIN_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RuinRecord> run_batch(const PathSimulator& simulator, std::size_t n, std::uint64_t seed,
                                  unsigned workers) {
  if (n == 0) throw ParameterError("run_batch: n must be at least 1");
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::vector<RuinRecord> records(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      RandomStream stream(seed, i);
      try {
        records[i] = simulator.run(stream);
      } catch (const std::exception&) {
        RuinRecord failed;
        failed.failed = true;
        failed.measure = simulator.options().measure;
        failed.level = simulator.level();
        records[i] = failed;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return records;
}

std::vector<RuinRecord> run_batch(const ModelSpec& model, const TaxPolicy& policy, double level,
                                  const RunOptions& options, std::size_t n, std::uint64_t seed,
                                  unsigned workers) {
  return run_batch(PathSimulator(model, policy, level, options), n, seed, workers);
}

}  // namespace taxruin
