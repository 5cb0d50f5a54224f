#include "taxruin/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "taxruin/errors.hpp"

namespace taxruin {
namespace {

constexpr double kZ95 = 1.96;

void set_interval(Estimate& e) {
  e.ci_low = e.mean - kZ95 * e.std_error;
  e.ci_high = e.mean + kZ95 * e.std_error;
}

void check_homogeneous(std::span<const RuinRecord> records) {
  if (records.empty()) return;
  const RuinRecord& first = records.front();
  for (const RuinRecord& r : records) {
    if (r.measure != first.measure || r.level != first.level || r.approximate != first.approximate) {
      throw MixedBatch("records mix measures, levels or exact/approximate paths");
    }
  }
}

double ruin_weight(const RuinRecord& r) { return r.ruined ? r.weight : 0.0; }

}  // namespace

std::string_view to_string(EstimatorKind kind) { return kind == EstimatorKind::Crude ? "crude" : "tilted"; }

void RuinAccumulator::add(const RuinRecord& record) {
  if (record.failed) return;
  if (record.measure != measure_) throw MixedBatch("record measure differs from the estimator mode");
  if (measure_ == Measure::Q && record.truncated) {
    throw Error("tilted ruin estimate requires untruncated paths");
  }
  const double w = ruin_weight(record);
  weight_.add(w);
  weight_sq_.add(w * w);
  ++n_;
  if (record.ruined) ++ruins_;
}

void RuinAccumulator::add(std::span<const RuinRecord> records) {
  for (const RuinRecord& r : records) add(r);
}

void RuinAccumulator::merge(const RuinAccumulator& other) {
  if (other.measure_ != measure_) throw MixedBatch("cannot merge crude and tilted sums");
  weight_.merge(other.weight_);
  weight_sq_.merge(other.weight_sq_);
  n_ += other.n_;
  ruins_ += other.ruins_;
}

Estimate RuinAccumulator::estimate() const {
  Estimate e;
  e.kind = estimator_for(measure_);
  e.n = n_;
  e.ruins = ruins_;
  if (n_ == 0 || ruins_ == 0) {
    e.degenerate = true;
    set_interval(e);
    return e;
  }
  const double n = static_cast<double>(n_);
  e.mean = weight_.value() / n;
  if (n_ > 1) {
    const double var = std::max(0.0, (weight_sq_.value() / n - e.mean * e.mean) * n / (n - 1.0));
    e.std_error = std::sqrt(var / n);
  }
  set_interval(e);
  return e;
}

void RatioAccumulator::add(const RuinRecord& record, double g) {
  if (record.failed) return;
  if (record.measure != measure_) throw MixedBatch("record measure differs from the estimator mode");
  ++n_;
  if (!record.ruined) return;
  ++ruins_;
  const double w = record.weight;
  w_.add(w);
  wg_.add(w * g);
  w2_.add(w * w);
  w2g_.add(w * w * g);
  w2g2_.add(w * w * g * g);
}

void RatioAccumulator::merge(const RatioAccumulator& other) {
  if (other.measure_ != measure_) throw MixedBatch("cannot merge crude and tilted sums");
  w_.merge(other.w_);
  wg_.merge(other.wg_);
  w2_.merge(other.w2_);
  w2g_.merge(other.w2g_);
  w2g2_.merge(other.w2g2_);
  n_ += other.n_;
  ruins_ += other.ruins_;
}

Estimate RatioAccumulator::estimate() const {
  Estimate e;
  e.kind = estimator_for(measure_);
  e.n = n_;
  e.ruins = ruins_;
  const double den = w_.value();
  const double num = wg_.value();
  e.numerator = num;
  e.denominator = den;
  if (ruins_ == 0 || !(den > 0.0)) {
    e.degenerate = true;
    set_interval(e);
    return e;
  }
  e.mean = num / den;
  // sum w^2 (g - R)^2 / (sum w)^2, expanded in the tracked sums.
  const double R = e.mean;
  const double spread = w2g2_.value() - 2.0 * R * w2g_.value() + R * R * w2_.value();
  e.std_error = std::sqrt(std::max(0.0, spread)) / den;
  set_interval(e);
  return e;
}

Estimate ruin_prob(std::span<const RuinRecord> records, Measure mode) {
  check_homogeneous(records);
  RuinAccumulator acc(mode);
  acc.add(records);
  return acc.estimate();
}

Estimate conditional_mean(std::span<const RuinRecord> records, const RecordFunctional& functional) {
  check_homogeneous(records);
  const Measure m = records.empty() ? Measure::P : records.front().measure;
  RatioAccumulator acc(m);
  for (const RuinRecord& r : records) acc.add(r, r.ruined ? functional(r) : 0.0);
  return acc.estimate();
}

double edpf_functional(const RuinRecord& r, double penalty_lambda, double eta, double penalty_delta) {
  return std::exp(-penalty_lambda * r.depth + eta * r.overshoot - penalty_delta * r.duration);
}

Estimate edpf(std::span<const RuinRecord> records, double penalty_lambda, double eta,
              double penalty_delta, double alpha) {
  if (!(penalty_lambda >= 0.0) || !(penalty_delta >= 0.0)) {
    throw ParameterError("edpf: penalty lambda and delta must be nonnegative");
  }
  if (!(eta <= alpha)) throw ParameterError("edpf: eta must not exceed alpha");
  if (eta + penalty_lambda - alpha == 0.0) throw ParameterError("edpf: eta + lambda - alpha must be nonzero");
  return conditional_mean(records, [&](const RuinRecord& r) {
    return edpf_functional(r, penalty_lambda, eta, penalty_delta);
  });
}

Estimate first_excursion_ratio(std::span<const RuinRecord> records) {
  return conditional_mean(records, [](const RuinRecord& r) { return r.first_excursion ? 0.0 : 1.0; });
}

std::string_view to_string(JointVariable v) {
  switch (v) {
    case JointVariable::Depth:
      return "depth";
    case JointVariable::Overshoot:
      return "overshoot";
    case JointVariable::Undershoot:
      return "undershoot";
    case JointVariable::Duration:
      return "duration";
  }
  return "?";
}

double joint_value(const RuinRecord& r, JointVariable v) {
  switch (v) {
    case JointVariable::Depth:
      return r.depth;
    case JointVariable::Overshoot:
      return r.overshoot;
    case JointVariable::Undershoot:
      return r.undershoot;
    case JointVariable::Duration:
      return r.duration;
  }
  return 0.0;
}

double weighted_ks_distance(std::span<const double> values, std::span<const double> weights, const Cdf& reference) {
  if (values.size() != weights.size()) throw ParameterError("weighted_ks_distance: size mismatch");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  numerics::ExactSum total;
  for (double w : weights) total.add(w);
  const double sum = total.value();
  if (!(sum > 0.0)) return 0.0;

  double dist = 0.0;
  double cum = 0.0;
  for (std::size_t k = 0; k < order.size();) {
    // Ties share one step of the empirical CDF.
    const double v = values[order[k]];
    const double before = cum / sum;
    while (k < order.size() && values[order[k]] == v) cum += weights[order[k++]];
    const double after = cum / sum;
    const double ref = reference(v);
    dist = std::max({dist, std::abs(after - ref), std::abs(before - ref)});
  }
  return dist;
}

JointLaw joint_law(std::span<const RuinRecord> records, const JointLawOptions& options) {
  check_homogeneous(records);
  JointLaw law;
  if (options.bins == 0) throw ParameterError("joint_law: need at least one bin");
  std::vector<const RuinRecord*> ruined;
  for (const RuinRecord& r : records) {
    if (r.ruined && !r.failed) ruined.push_back(&r);
  }
  law.ruins = ruined.size();
  if (ruined.empty()) {
    law.degenerate = true;
    return law;
  }

  std::vector<double> weights;
  weights.reserve(ruined.size());
  numerics::ExactSum total, total_sq, below;
  for (const RuinRecord* r : ruined) {
    weights.push_back(r->weight);
    total.add(r->weight);
    total_sq.add(r->weight * r->weight);
    if (r->undershoot < r->depth) below.add(r->weight);
  }
  const double sum = total.value();
  law.effective_size = sum * sum / total_sq.value();
  law.mass_undershoot_below_depth = below.value() / sum;

  for (std::size_t k = 0; k < kJointVariables.size(); ++k) {
    const JointVariable var = kJointVariables[k];
    std::vector<double> values;
    values.reserve(ruined.size());
    numerics::ExactSum weighted;
    for (const RuinRecord* r : ruined) {
      values.push_back(joint_value(*r, var));
      weighted.add(r->weight * values.back());
    }
    double scale = options.scale[k].value_or(weighted.value() / sum);
    if (!(scale > 0.0)) scale = 1.0;

    Histogram& h = law.histogram[k];
    h.lower = 0.0;
    h.upper = 8.0 * scale;
    h.density.assign(options.bins, 0.0);
    std::vector<numerics::ExactSum> mass(options.bins);
    const double width = h.bin_width();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      if (v < h.lower || v >= h.upper) continue;
      const auto bin = std::min(options.bins - 1, static_cast<std::size_t>((v - h.lower) / width));
      mass[bin].add(weights[i]);
    }
    for (std::size_t b = 0; b < options.bins; ++b) h.density[b] = mass[b].value() / (sum * width);

    if (options.reference[k]) law.ks_distance[k] = weighted_ks_distance(values, weights, options.reference[k]);
  }
  return law;
}

}  // namespace taxruin
