#include "taxruin/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "taxruin/errors.hpp"

namespace taxruin {
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  throw ConfigError("config field '" + field + "': " + message);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) config_error(path + key, "missing");
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) config_error(path + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& path) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return number(obj, key, path);
}

std::uint64_t parse_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    const auto s = v.get<std::int64_t>();
    if (s < 0) config_error("seed", "must be nonnegative");
    return static_cast<std::uint64_t>(s);
  }
  if (v.is_string()) {
    std::string text = v.get<std::string>();
    int base = 10;
    if (text.rfind("0x", 0) == 0 || text.rfind("0X", 0) == 0) {
      text = text.substr(2);
      base = 16;
    }
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out, base);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
      config_error("seed", "not a decimal or hex 64-bit integer");
    }
    return out;
  }
  config_error("seed", "expected an integer or a decimal/hex string");
}

ModelSpec parse_model(const json& m) {
  const std::string p = "model.";
  if (!m.is_object()) config_error("model", "expected an object");
  const json& type_field = require(m, "type", p);
  if (!type_field.is_string()) config_error("model.type", "expected a string");
  const std::string type = type_field.get<std::string>();
  try {
    if (type == "CL" || type == "cl") {
      return ModelSpec::cl(number(m, "c", p), number(m, "lambda", p), number(m, "mu", p));
    }
    if (type == "TwoSided" || type == "two_sided") {
      return ModelSpec::two_sided(number(m, "c", p), number(m, "lambda", p), number(m, "mu", p),
                                  number(m, "lambda_down", p), number(m, "mu_down", p));
    }
    if (type == "BMDrift" || type == "bm_drift") {
      return ModelSpec::bm_drift(number(m, "p", p), number(m, "sigma", p));
    }
  } catch (const ParameterError& e) {
    config_error("model", e.what());
  }
  config_error("model.type", "unknown model '" + type + "' (CL, TwoSided, BMDrift)");
}

TaxPolicy parse_policy(const json& pol) {
  const std::string p = "policy.";
  if (!pol.is_object()) config_error("policy", "expected an object");
  const json& type_field = require(pol, "type", p);
  if (!type_field.is_string()) config_error("policy.type", "expected a string");
  const std::string type = type_field.get<std::string>();
  try {
    if (type == "constant") return TaxPolicy::constant(number(pol, "gamma", p));
    if (type == "example41") return TaxPolicy::example41(number(pol, "beta", p));
    if (type == "table") {
      const json& bp = require(pol, "breakpoints", p);
      const json& rates = require(pol, "rates", p);
      if (!bp.is_array() || !rates.is_array()) config_error("policy", "breakpoints and rates must be arrays");
      return TaxPolicy::table(bp.get<std::vector<double>>(), rates.get<std::vector<double>>());
    }
  } catch (const ParameterError& e) {
    config_error("policy", e.what());
  } catch (const json::exception& e) {
    config_error("policy", e.what());
  }
  config_error("policy.type", "unknown policy '" + type + "' (constant, example41, table)");
}

bool is_reflected(const TaxPolicy& policy) {
  return policy.kind() == PolicyKind::Constant && policy.gamma() == 1.0;
}

Tolerance tolerance_for(const ExperimentConfig& config, const std::string& quantity, Tolerance fallback = {}) {
  const auto it = config.tolerances.find(quantity);
  return it == config.tolerances.end() ? fallback : it->second;
}

Estimate scalar_estimate(double value, std::size_t n, EstimatorKind kind) {
  Estimate e;
  e.mean = value;
  e.n = n;
  e.ruins = n;
  e.kind = kind;
  e.ci_low = e.ci_high = value;
  return e;
}

// Rows for one level from its records; `baseline` holds the no-tax batch for the ratio.
void evaluate_level(ValidationReport& report, const ExperimentConfig& config, double u,
                    const std::vector<RuinRecord>& records, const std::vector<RuinRecord>* baseline) {
  const Measure mode = config.estimator;
  const EstimatorKind kind = estimator_for(mode);
  std::optional<double> alpha;
  try {
    alpha = lundberg_root(config.model);
  } catch (const NoPositiveRoot&) {
  }

  const Estimate ruin = ruin_prob(records, mode);
  if (config.outputs.ruin) {
    if (is_reflected(config.policy)) {
      ReportRow row;
      row.level = u;
      row.quantity = "ruin";
      row.predicted = 1.0;
      row.estimate = ruin;
      row.status = "reflected";
      row.note = "reflected case: P(ruin)=1, no Cramer comparison";
      report.rows.push_back(row);
    } else if (alpha) {
      std::optional<Prediction> limit;
      std::string note;
      try {
        limit = predict_ruin_constant(config.model, config.policy, config.upsilon);
      } catch (const Error& e) {
        note = e.what();
      }
      const double predicted = limit ? limit->value * std::exp(-*alpha * u) : kNaN;
      if (limit && !limit->finite) note = "limit infinite: " + limit->condition + " fails";
      add_row(report, u, "ruin", predicted, ruin, tolerance_for(config, "ruin"), config.k, note);

      Estimate scaled = ruin;
      const double factor = std::exp(*alpha * u);
      scaled.mean *= factor;
      scaled.std_error *= factor;
      scaled.ci_low *= factor;
      scaled.ci_high *= factor;
      add_row(report, u, "ruin_scaled", limit ? limit->value : kNaN, scaled, tolerance_for(config, "ruin_scaled"),
              config.k, note);
    } else {
      add_row(report, u, "ruin", kNaN, ruin, {}, config.k, "no Lundberg root: no Cramer comparison");
    }
  }

  if (config.outputs.ratio && baseline && config.policy.kind() == PolicyKind::Constant &&
      config.policy.gamma() < 1.0) {
    const Estimate base = ruin_prob(*baseline, mode);
    Estimate ratio;
    ratio.kind = kind;
    ratio.n = ruin.n;
    ratio.ruins = ruin.ruins;
    ratio.numerator = ruin.mean;
    ratio.denominator = base.mean;
    if (ruin.degenerate || base.degenerate || !(base.mean > 0.0)) {
      ratio.degenerate = true;
    } else {
      ratio.mean = ruin.mean / base.mean;
      const double a = ruin.std_error / ruin.mean;
      const double b = base.std_error / base.mean;
      ratio.std_error = ratio.mean * std::sqrt(a * a + b * b);
    }
    ratio.ci_low = ratio.mean - 1.96 * ratio.std_error;
    ratio.ci_high = ratio.mean + 1.96 * ratio.std_error;
    double predicted = kNaN;
    std::string note;
    try {
      predicted = predict_ruin_ratio(config.model, config.policy.gamma()).value;
    } catch (const Error& e) {
      note = e.what();
    }
    add_row(report, u, "ratio", predicted, ratio, tolerance_for(config, "ratio"), config.k, note);
  }

  if (config.outputs.edpf && alpha) {
    const PenaltyParams& pen = config.penalty;
    try {
      const Prediction pred = predict_edpf(config.model, pen.lambda, pen.eta, pen.delta);
      const Estimate est = edpf(records, pen.lambda, pen.eta, pen.delta, *alpha);
      add_row(report, u, "edpf", pred.value, est, tolerance_for(config, "edpf"), config.k);
    } catch (const ParameterError& e) {
      add_row(report, u, "edpf", kNaN, Estimate{}, {}, config.k, e.what());
    }
  }

  if (config.outputs.tax) {
    const Estimate est = conditional_mean(records, [](const RuinRecord& r) { return r.disc_tax; });
    double predicted = kNaN;
    std::string note;
    try {
      const Prediction pred = predict_tax_value(config.model, config.policy, config.discount);
      predicted = pred.value;
      if (!pred.finite) note = "limit infinite: " + pred.condition + " fails";
    } catch (const Error& e) {
      note = e.what();
    }
    add_row(report, u, "tax", predicted, est, tolerance_for(config, "tax"), config.k, note);
  }

  if (config.outputs.joint && config.model.kind == ModelKind::CL && alpha) {
    const JointLimitMarginals limit = joint_limit_marginals(config.model);
    JointLawOptions opts;
    opts.scale = {1.0 / (limit.mu - limit.alpha), 1.0 / limit.mu, 2.0 / (limit.mu - limit.alpha), std::nullopt};
    opts.reference = {[limit](double y) { return limit.depth_cdf(y); },
                      [limit](double x) { return limit.overshoot_cdf(x); },
                      [limit](double v) { return limit.undershoot_cdf(v); }, Cdf{}};
    const JointLaw law = joint_law(records, opts);
    if (!law.degenerate) {
      // Pre-registered 95% KS critical value at the Kish effective sample size.
      const Tolerance ks_default{1.36 / std::sqrt(std::max(1.0, law.effective_size)), 0.0};
      for (std::size_t k = 0; k < 3; ++k) {
        const std::string name = std::string("ks_") + std::string(to_string(kJointVariables[k]));
        add_row(report, u, name, 0.0, scalar_estimate(*law.ks_distance[k], law.ruins, kind),
                tolerance_for(config, name, ks_default), config.k);
      }
      add_row(report, u, "mass_undershoot_below_depth", 0.0,
              scalar_estimate(law.mass_undershoot_below_depth, law.ruins, kind),
              tolerance_for(config, "mass_undershoot_below_depth", {0.005, 0.0}), config.k);
      for (std::size_t k = 0; k < kJointVariables.size(); ++k) {
        report.histograms.push_back({u, kJointVariables[k], law.histogram[k]});
      }
    }
  }

  if (config.outputs.diagnostic) {
    const Estimate est = first_excursion_ratio(records);
    ReportRow row;
    row.level = u;
    row.quantity = "first_excursion_ratio";
    row.predicted = 0.0;
    row.estimate = est;
    row.status = "info";
    row.note = "limit 0 as u grows; no finite-u target";
    report.rows.push_back(row);
  }
}

void echo_into(ValidationReport& report, const ExperimentConfig& config) {
  report.seed = config.seed;
  report.config_echo = config.echo;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig cfg;
  cfg.model = parse_model(require(doc, "model", ""));
  cfg.policy = doc.contains("policy") ? parse_policy(doc.at("policy")) : TaxPolicy::constant(0.0);

  const json& levels = require(doc, "u", "");
  if (levels.is_number()) {
    cfg.levels = {levels.get<double>()};
  } else if (levels.is_array()) {
    for (const json& v : levels) {
      if (!v.is_number()) config_error("u", "expected numbers");
      cfg.levels.push_back(v.get<double>());
    }
  } else {
    config_error("u", "expected a number or an array of numbers");
  }
  if (cfg.levels.empty()) config_error("u", "grid is empty");
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    if (!(cfg.levels[i] > 0.0) || !std::isfinite(cfg.levels[i])) config_error("u", "levels must be positive");
    if (i > 0 && !(cfg.levels[i] > cfg.levels[i - 1])) config_error("u", "grid must be strictly ascending");
  }

  if (doc.contains("estimator")) {
    const json& e = doc.at("estimator");
    if (e == "crude") {
      cfg.estimator = Measure::P;
    } else if (e == "tilted") {
      cfg.estimator = Measure::Q;
    } else {
      config_error("estimator", "expected \"crude\" or \"tilted\"");
    }
  }
  if (doc.contains("n")) {
    const json& n = doc.at("n");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 100) config_error("n", "expected an integer >= 100");
    cfg.n = n.get<std::size_t>();
  }
  if (doc.contains("seed")) cfg.seed = parse_seed(doc.at("seed"));

  if (doc.contains("penalty")) {
    const json& pen = doc.at("penalty");
    if (!pen.is_object()) config_error("penalty", "expected an object");
    cfg.penalty.lambda = number_or(pen, "lambda", 0.0, "penalty.");
    cfg.penalty.eta = number_or(pen, "eta", 0.0, "penalty.");
    cfg.penalty.delta = number_or(pen, "delta", 0.0, "penalty.");
    if (cfg.penalty.lambda < 0.0) config_error("penalty.lambda", "must be nonnegative");
    if (cfg.penalty.delta < 0.0) config_error("penalty.delta", "must be nonnegative");
  }
  cfg.discount = number_or(doc, "discount", 0.0, "");
  if (!(cfg.discount >= 0.0)) config_error("discount", "must be nonnegative");
  cfg.truncation_margin = number_or(doc, "truncation", kNaN, "");
  if (!std::isnan(cfg.truncation_margin) && !(cfg.truncation_margin > 0.0)) {
    config_error("truncation", "must be positive");
  }
  cfg.bm_step = number_or(doc, "bm_step", cfg.bm_step, "");
  if (!(cfg.bm_step > 0.0)) config_error("bm_step", "must be positive");
  if (doc.contains("max_events")) {
    const json& v = doc.at("max_events");
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) config_error("max_events", "expected a positive integer");
    cfg.max_events = v.get<std::uint64_t>();
  }
  cfg.k = number_or(doc, "k", 3.0, "");
  if (!(cfg.k > 0.0)) config_error("k", "must be positive");

  if (doc.contains("outputs")) {
    const json& outs = doc.at("outputs");
    if (!outs.is_array()) config_error("outputs", "expected an array of names");
    cfg.outputs = OutputSelection{false, false, false, false, false, false};
    for (const json& o : outs) {
      const std::string name = o.is_string() ? o.get<std::string>() : "";
      if (name == "ruin") {
        cfg.outputs.ruin = true;
      } else if (name == "ratio") {
        cfg.outputs.ratio = true;
      } else if (name == "edpf") {
        cfg.outputs.edpf = true;
      } else if (name == "tax") {
        cfg.outputs.tax = true;
      } else if (name == "joint") {
        cfg.outputs.joint = true;
      } else if (name == "diagnostic") {
        cfg.outputs.diagnostic = true;
      } else {
        config_error("outputs", "unknown output '" + name + "' (ruin, ratio, edpf, tax, joint, diagnostic)");
      }
    }
  }
  if (doc.contains("tolerance")) {
    const json& tol = doc.at("tolerance");
    if (!tol.is_object()) config_error("tolerance", "expected an object keyed by quantity");
    for (const auto& [key, value] : tol.items()) {
      const std::string p = "tolerance." + key + ".";
      if (!value.is_object()) config_error("tolerance." + key, "expected {\"abs\": .., \"rel\": ..}");
      Tolerance t{number_or(value, "abs", 0.0, p), number_or(value, "rel", 0.0, p)};
      if (t.abs < 0.0 || t.rel < 0.0) config_error("tolerance." + key, "must be nonnegative");
      cfg.tolerances[key] = t;
    }
  }
  if (doc.contains("upsilon") && !doc.at("upsilon").is_null()) {
    cfg.upsilon = number(doc, "upsilon", "");
    if (!(*cfg.upsilon > 0.0)) config_error("upsilon", "must be positive");
  }
  if (doc.contains("trace")) {
    const json& tr = doc.at("trace");
    if (tr.contains("jumps")) {
      for (const json& j : tr.at("jumps")) {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
          config_error("trace.jumps", "expected [time, size] pairs");
        }
        cfg.trace_jumps.emplace_back(j[0].get<double>(), j[1].get<double>());
      }
    }
  }
  if (cfg.estimator == Measure::Q && !has_net_profit(cfg.model)) {
    config_error("estimator", "tilted estimation needs a model with E[X_1] < 0");
  }
  cfg.echo = doc.dump();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

bool ValidationReport::all_passed() const {
  for (const ReportRow& r : rows) {
    if (r.status == "fail") return false;
  }
  return true;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t level_index, std::uint64_t role) {
  // splitmix64 finaliser over a mixed key.
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (level_index + 1)) ^ (0xD1B54A32D192ED03ull * (role + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

RunOptions run_options(const ExperimentConfig& config) {
  RunOptions opts;
  opts.measure = config.estimator;
  opts.discount = config.discount;
  opts.truncation_margin = config.truncation_margin;
  opts.bm_step = config.bm_step;
  opts.max_events = config.max_events;
  return opts;
}

void add_row(ValidationReport& report, double level, const std::string& quantity, double predicted,
             const Estimate& estimate, const Tolerance& tolerance, double k, std::string note) {
  ReportRow row;
  row.level = level;
  row.quantity = quantity;
  row.predicted = predicted;
  row.estimate = estimate;
  row.note = std::move(note);
  if (std::isnan(predicted)) {
    row.status = "info";
  } else if (std::isinf(predicted)) {
    row.status = "divergent";
  } else if (estimate.degenerate) {
    row.status = "fail";
    if (row.note.empty()) row.note = "no ruined paths";
  } else {
    const double diff = estimate.mean - predicted;
    row.slack = std::max(tolerance.abs, tolerance.rel * std::abs(predicted));
    row.z = estimate.std_error > 0.0 ? diff / estimate.std_error : 0.0;
    row.status = std::abs(diff) <= std::max(row.slack, k * estimate.std_error) ? "pass" : "fail";
  }
  report.rows.push_back(std::move(row));
}

ValidationReport run_experiment(const ExperimentConfig& config, unsigned workers) {
  ValidationReport report;
  echo_into(report, config);
  const RunOptions opts = run_options(config);
  const bool want_ratio = config.outputs.ratio && config.policy.kind() == PolicyKind::Constant &&
                          config.policy.gamma() > 0.0 && config.policy.gamma() < 1.0;
  for (std::size_t i = 0; i < config.levels.size(); ++i) {
    const double u = config.levels[i];
    try {
      const PathSimulator sim(config.model, config.policy, u, opts);
      const auto records = run_batch(sim, config.n, derive_seed(config.seed, i, 0), workers);
      std::vector<RuinRecord> baseline;
      if (want_ratio) {
        const PathSimulator base(config.model, TaxPolicy::constant(0.0), u, opts);
        baseline = run_batch(base, config.n, derive_seed(config.seed, i, 1), workers);
      } else if (config.outputs.ratio && config.policy.kind() == PolicyKind::Constant &&
                 config.policy.gamma() == 0.0) {
        baseline = records;
      }
      evaluate_level(report, config, u, records, baseline.empty() ? nullptr : &baseline);
    } catch (const Error& e) {
      ReportRow row;
      row.level = u;
      row.quantity = "error";
      row.predicted = kNaN;
      row.status = "fail";
      row.note = e.what();
      report.rows.push_back(row);
    }
  }
  return report;
}

ValidationReport estimate_records(const ExperimentConfig& config, const std::vector<RuinRecord>& records) {
  ValidationReport report;
  echo_into(report, config);
  std::map<double, std::vector<RuinRecord>> by_level;
  for (const RuinRecord& r : records) by_level[r.level].push_back(r);
  ExperimentConfig cfg = config;
  cfg.outputs.ratio = false;
  for (const auto& [u, recs] : by_level) {
    cfg.estimator = recs.front().measure;
    evaluate_level(report, cfg, u, recs, nullptr);
  }
  return report;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

json number_json(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

json estimate_json(const Estimate& e) {
  json j{{"mean", number_json(e.mean)},
         {"stderr", number_json(e.std_error)},
         {"n", e.n},
         {"ruins", e.ruins},
         {"ci95", {number_json(e.ci_low), number_json(e.ci_high)}},
         {"estimator", to_string(e.kind)},
         {"degenerate", e.degenerate}};
  if (e.numerator) j["numerator"] = number_json(*e.numerator);
  if (e.denominator) j["denominator"] = number_json(*e.denominator);
  return j;
}

}  // namespace

std::string report_json(const ValidationReport& report) {
  json rows = json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"u", number_json(r.level)},
                    {"quantity", r.quantity},
                    {"predicted", number_json(r.predicted)},
                    {"estimate", estimate_json(r.estimate)},
                    {"z", number_json(r.z)},
                    {"slack", number_json(r.slack)},
                    {"status", r.status},
                    {"note", r.note}});
  }
  json doc{{"metadata",
            {{"tool", "taxruin"},
             {"version", report.version},
             {"seed", report.seed},
             {"config", report.config_echo.empty() ? json(nullptr) : json::parse(report.config_echo)}}},
           {"passed", report.all_passed()},
           {"rows", rows}};
  return doc.dump(2) + "\n";
}

std::string report_csv(const ValidationReport& report) {
  std::ostringstream os;
  os << "u,quantity,predicted,estimate,stderr,n,z\n";
  for (const ReportRow& r : report.rows) {
    os << format_number(r.level) << ',' << r.quantity << ',' << format_number(r.predicted) << ','
       << format_number(r.estimate.mean) << ',' << format_number(r.estimate.std_error) << ',' << r.estimate.n
       << ',' << format_number(r.z) << '\n';
  }
  return os.str();
}

std::string histogram_csv(const HistogramTable& table) {
  std::ostringstream os;
  os << "bin_low,bin_high,density\n";
  const Histogram& h = table.histogram;
  const double w = h.bin_width();
  for (std::size_t b = 0; b < h.density.size(); ++b) {
    os << format_number(h.lower + w * static_cast<double>(b)) << ','
       << format_number(h.lower + w * static_cast<double>(b + 1)) << ',' << format_number(h.density[b]) << '\n';
  }
  return os.str();
}

void write_outputs(const ValidationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << content;
  };
  write(dir / "report.json", report_json(report));
  write(dir / "table.csv", report_csv(report));
  for (const HistogramTable& h : report.histograms) {
    write(dir / ("hist_u" + format_number(h.level) + "_" + std::string(to_string(h.variable)) + ".csv"),
          histogram_csv(h));
  }
}

namespace {

constexpr const char* kRecordHeader =
    "ruined,tau,g,undershoot,overshoot,depth,duration,tax,disc_tax,x_at_ruin,weight,first_excursion,"
    "truncated,step_limit,failed,approximate,residual_bound,events,measure,level";

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return kNaN;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad number in record file: " + s);
  return v;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<RuinRecord>& records) {
  os << kRecordHeader << '\n';
  for (const RuinRecord& r : records) {
    os << r.ruined << ',' << format_number(r.tau) << ',' << format_number(r.g) << ','
       << format_number(r.undershoot) << ',' << format_number(r.overshoot) << ',' << format_number(r.depth) << ','
       << format_number(r.duration) << ',' << format_number(r.tax) << ',' << format_number(r.disc_tax) << ','
       << format_number(r.x_at_ruin) << ',' << format_number(r.weight) << ',' << r.first_excursion << ','
       << r.truncated << ',' << r.step_limit << ',' << r.failed << ',' << r.approximate << ','
       << format_number(r.residual_bound) << ',' << r.events << ',' << to_string(r.measure) << ','
       << format_number(r.level) << '\n';
  }
}

std::vector<RuinRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kRecordHeader) throw ConfigError("record file: unexpected header");
  std::vector<RuinRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 20) throw ConfigError("record file: expected 20 columns");
    RuinRecord r;
    r.ruined = f[0] == "1";
    r.tau = parse_double(f[1]);
    r.g = parse_double(f[2]);
    r.undershoot = parse_double(f[3]);
    r.overshoot = parse_double(f[4]);
    r.depth = parse_double(f[5]);
    r.duration = parse_double(f[6]);
    r.tax = parse_double(f[7]);
    r.disc_tax = parse_double(f[8]);
    r.x_at_ruin = parse_double(f[9]);
    r.weight = parse_double(f[10]);
    r.first_excursion = f[11] == "1";
    r.truncated = f[12] == "1";
    r.step_limit = f[13] == "1";
    r.failed = f[14] == "1";
    r.approximate = f[15] == "1";
    r.residual_bound = parse_double(f[16]);
    r.events = std::stoull(f[17]);
    if (f[18] != "P" && f[18] != "Q") throw ConfigError("record file: measure must be P or Q");
    r.measure = f[18] == "P" ? Measure::P : Measure::Q;
    r.level = parse_double(f[19]);
    out.push_back(r);
  }
  return out;
}

void write_event_log(std::ostream& os, const EventLog& log) {
  os << "time,event,X,Xmin,RGamma,tax\n";
  for (const PathEvent& e : log) {
    os << format_number(e.time) << ',' << to_string(e.kind) << ',' << format_number(e.x) << ','
       << format_number(e.x_min) << ',' << format_number(e.r_gamma) << ',' << format_number(e.tax) << '\n';
  }
}

}  // namespace taxruin
