#include <doctest.h>

#include <cmath>

#include "taxruin/errors.hpp"
#include "taxruin/estimators.hpp"

using namespace taxruin;

namespace {

const ModelSpec kBase = ModelSpec::cl(1.5, 1.0, 1.0);

std::vector<RuinRecord> batch(const TaxPolicy& p, double u, Measure m, std::size_t n, std::uint64_t seed) {
  RunOptions o;
  o.measure = m;
  return run_batch(kBase, p, u, o, n, seed);
}

}  // namespace

TEST_CASE("tilted no-tax estimate is exact in expectation") {
  const auto recs = batch(TaxPolicy::constant(0.0), 5.0, Measure::Q, 100000, 1);
  const Estimate e = ruin_prob(recs, Measure::Q);
  CHECK(std::abs(e.mean - 0.12593) <= 3.0 * e.std_error + 1e-5);
}

TEST_CASE("crude and tilted agree") {
  const Estimate crude = ruin_prob(batch(TaxPolicy::constant(0.0), 2.0, Measure::P, 20000, 2), Measure::P);
  const Estimate tilted = ruin_prob(batch(TaxPolicy::constant(0.0), 2.0, Measure::Q, 5000, 3), Measure::Q);
  CHECK(crude.overlaps(tilted));
}

TEST_CASE("full tax is ruined almost surely") {
  const auto recs = batch(TaxPolicy::constant(1.0), 3.0, Measure::Q, 20000, 4);
  const Estimate e = ruin_prob(recs, Measure::Q);
  CHECK(std::abs(e.mean - 1.0) <= 3.0 * e.std_error);
}

TEST_CASE("accumulators merge exactly") {
  const auto recs = batch(TaxPolicy::constant(0.5), 4.0, Measure::Q, 3000, 5);
  RuinAccumulator whole(Measure::Q), a(Measure::Q), b(Measure::Q);
  RatioAccumulator rw(Measure::Q), ra(Measure::Q), rb(Measure::Q);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    whole.add(recs[i]);
    rw.add(recs[i], recs[i].overshoot);
    (i % 2 ? a : b).add(recs[i]);
    (i % 2 ? ra : rb).add(recs[i], recs[i].overshoot);
  }
  b.merge(a);
  ra.merge(rb);
  CHECK(whole.estimate() == b.estimate());
  CHECK(rw.estimate() == ra.estimate());
  CHECK(ruin_prob(recs, Measure::Q) == whole.estimate());
}

TEST_CASE("constant functional gives one") {
  const auto recs = batch(TaxPolicy::constant(0.5), 4.0, Measure::Q, 2000, 6);
  CHECK(conditional_mean(recs, [](const RuinRecord&) { return 1.0; }).mean == 1.0);
  CHECK(edpf(recs, 0.0, 0.0, 0.0, 1.0 / 3.0).mean == 1.0);
  CHECK_THROWS_AS(edpf(recs, 0.0, 1.0 / 3.0, 0.0, 1.0 / 3.0), ParameterError);
  CHECK_THROWS_AS(edpf(recs, 0.0, 0.5, 0.0, 1.0 / 3.0), ParameterError);
}

TEST_CASE("overshoot moment recovers the Cramer constant") {
  const double alpha = 1.0 / 3.0;
  const auto recs = batch(TaxPolicy::constant(0.0), 10.0, Measure::Q, 40000, 7);
  const Estimate e = conditional_mean(recs, [&](const RuinRecord& r) { return std::exp(alpha * r.overshoot); });
  CHECK(std::abs(e.mean - 1.5) <= 3.0 * e.std_error);
}

TEST_CASE("first-excursion ratio decreases with u") {
  double prev = 1.0;
  for (double u : {2.0, 6.0, 12.0}) {
    const Estimate e = first_excursion_ratio(batch(TaxPolicy::constant(0.0), u, Measure::Q, 20000, 8));
    CHECK(e.mean < prev);
    prev = e.mean;
  }
}

TEST_CASE("degenerate and mixed batches") {
  std::vector<RuinRecord> none(10);
  for (auto& r : none) r.level = 1.0;
  const Estimate e = conditional_mean(none, [](const RuinRecord&) { return 1.0; });
  CHECK(e.degenerate);
  CHECK(ruin_prob(none, Measure::P).mean == 0.0);
  std::vector<RuinRecord> mixed(2);
  mixed[1].measure = Measure::Q;
  CHECK_THROWS_AS(ruin_prob(mixed, Measure::P), MixedBatch);
  std::vector<RuinRecord> levels(2);
  levels[1].level = 2.0;
  CHECK_THROWS_AS(ruin_prob(levels, Measure::P), MixedBatch);
}

TEST_CASE("weighted KS distance") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const std::vector<double> one{0.5}, w1{1.0};
  CHECK(weighted_ks_distance(one, w1, uniform) == doctest::Approx(0.5));
  const std::vector<double> two{0.2, 0.8}, w2{1.0, 1.0};
  CHECK(weighted_ks_distance(two, w2, uniform) == doctest::Approx(0.3));
  const std::vector<double> w3{3.0, 1.0};
  CHECK(weighted_ks_distance(two, w3, uniform) == doctest::Approx(0.55));
  const std::vector<double> ties{0.5, 0.5}, w4{1.0, 1.0};
  CHECK(weighted_ks_distance(ties, w4, uniform) == doctest::Approx(0.5));
}

TEST_CASE("joint law histograms integrate to the in-range mass") {
  const auto recs = batch(TaxPolicy::constant(0.5), 8.0, Measure::Q, 5000, 9);
  const JointLaw law = joint_law(recs);
  CHECK_FALSE(law.degenerate);
  CHECK(law.ruins == 5000);
  for (const Histogram& h : law.histogram) {
    double mass = 0.0;
    for (double d : h.density) mass += d * h.bin_width();
    CHECK(mass <= 1.0 + 1e-12);
    CHECK(mass > 0.9);
  }
  CHECK(law.effective_size > 100.0);
  CHECK(law.effective_size <= 5000.0 + 1e-9);
}
