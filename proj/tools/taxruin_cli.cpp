// Command-line runner: predict, simulate, estimate, validate, trace.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "taxruin/errors.hpp"
#include "taxruin/experiment.hpp"

namespace {

using namespace taxruin;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitValidation = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string out;
  std::string format = "csv";
  std::string records;
  std::uint64_t replica = 0;
};

ExperimentConfig load(const Flags& flags) {
  ExperimentConfig cfg = load_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  return cfg;
}

// Writes to `name` under --out when given, else to stdout.
void emit(const Flags& flags, const std::string& name, const std::string& content) {
  if (flags.out.empty()) {
    std::cout << content;
    return;
  }
  std::filesystem::create_directories(flags.out);
  const auto path = std::filesystem::path(flags.out) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << content;
}

nlohmann::json prediction_json(const std::string& quantity, const Prediction& p) {
  nlohmann::json j{{"quantity", quantity},
                   {"value", p.finite ? nlohmann::json(p.value) : nlohmann::json("inf")},
                   {"finite", p.finite},
                   {"formula", p.formula},
                   {"condition", p.condition},
                   {"inputs", p.inputs}};
  return j;
}

int cmd_predict(const Flags& flags) {
  const ExperimentConfig cfg = load(flags);
  std::vector<std::pair<std::string, Prediction>> preds;
  std::vector<std::string> skipped;
  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      preds.emplace_back(name, fn());
    } catch (const Error& e) {
      skipped.push_back(name + ": " + e.what());
    }
  };
  attempt("ruin_constant", [&] { return predict_ruin_constant(cfg.model, cfg.policy, cfg.upsilon); });
  if (cfg.policy.kind() == PolicyKind::Constant) {
    attempt("ratio", [&] { return predict_ruin_ratio(cfg.model, cfg.policy.gamma()); });
  }
  if (cfg.outputs.edpf) {
    attempt("edpf", [&] { return predict_edpf(cfg.model, cfg.penalty.lambda, cfg.penalty.eta, cfg.penalty.delta); });
  }
  if (cfg.outputs.tax) {
    attempt("tax", [&] { return predict_tax_value(cfg.model, cfg.policy, cfg.discount); });
  }
  for (const std::string& s : skipped) std::cerr << "skipped " << s << '\n';

  std::ostringstream os;
  if (flags.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [name, p] : preds) arr.push_back(prediction_json(name, p));
    os << nlohmann::json{{"version", kVersion}, {"predictions", arr}}.dump(2) << '\n';
  } else {
    os << "quantity,value,finite,condition\n";
    for (const auto& [name, p] : preds) {
      os << name << ',' << format_number(p.finite ? p.value : std::numeric_limits<double>::infinity()) << ','
         << (p.finite ? "true" : "false") << ",\"" << p.condition << "\"\n";
    }
  }
  emit(flags, flags.format == "json" ? "predict.json" : "predict.csv", os.str());
  return 0;
}

int cmd_simulate(const Flags& flags) {
  const ExperimentConfig cfg = load(flags);
  const RunOptions opts = run_options(cfg);
  std::vector<RuinRecord> all;
  for (std::size_t i = 0; i < cfg.levels.size(); ++i) {
    const PathSimulator sim(cfg.model, cfg.policy, cfg.levels[i], opts);
    auto batch = run_batch(sim, cfg.n, derive_seed(cfg.seed, i, 0), flags.workers);
    all.insert(all.end(), batch.begin(), batch.end());
  }
  std::ostringstream os;
  write_records_csv(os, all);
  emit(flags, "records.csv", os.str());
  return 0;
}

void emit_report(const Flags& flags, const ValidationReport& report) {
  if (!flags.out.empty()) {
    write_outputs(report, flags.out);
    return;
  }
  std::cout << (flags.format == "json" ? report_json(report) : report_csv(report));
}

int cmd_estimate(const Flags& flags) {
  const ExperimentConfig cfg = load(flags);
  std::ifstream in(flags.records);
  if (!in) throw ConfigError("cannot read records file " + flags.records);
  const ValidationReport report = estimate_records(cfg, read_records_csv(in));
  emit_report(flags, report);
  return 0;
}

int cmd_validate(const Flags& flags) {
  const ExperimentConfig cfg = load(flags);
  const ValidationReport report = run_experiment(cfg, flags.workers);
  emit_report(flags, report);
  if (!report.all_passed()) {
    for (const ReportRow& r : report.rows) {
      if (r.status == "fail") {
        std::cerr << "FAIL u=" << format_number(r.level) << ' ' << r.quantity << " predicted "
                  << format_number(r.predicted) << " estimate " << format_number(r.estimate.mean) << " z "
                  << format_number(r.z) << (r.note.empty() ? "" : " (" + r.note + ")") << '\n';
      }
    }
    return kExitValidation;
  }
  return 0;
}

int cmd_trace(const Flags& flags) {
  const ExperimentConfig cfg = load(flags);
  const PathSimulator sim(cfg.model, cfg.policy, cfg.levels.front(), run_options(cfg));
  EventLog log;
  RuinRecord record;
  if (!cfg.trace_jumps.empty()) {
    ScriptedJumpSource jumps(cfg.trace_jumps);
    record = sim.run(jumps, &log);
  } else {
    RandomStream stream(derive_seed(cfg.seed, 0, 0), flags.replica);
    record = sim.run(stream, &log);
  }
  std::ostringstream os;
  write_event_log(os, log);
  emit(flags, "trace.csv", os.str());
  std::ostringstream summary;
  write_records_csv(summary, {record});
  if (flags.out.empty()) {
    std::cerr << summary.str();
  } else {
    emit(flags, "trace_record.csv", summary.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Loss-carried-forward tax ruin: predictions and Monte Carlo validation"};
  app.require_subcommand(1);
  Flags flags;
  flags.workers = default_workers();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON experiment configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", flags.seed, "Override the configured seed");
    sub->add_option("--workers", flags.workers, "Worker threads (default: TAXRUIN_WORKERS or hardware)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", flags.out, "Output directory (default: stdout)");
    sub->add_option("--format", flags.format, "Stdout format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* predict = app.add_subcommand("predict", "Asymptotic predictions only");
  auto* simulate = app.add_subcommand("simulate", "Dump raw ruin records");
  auto* estimate = app.add_subcommand("estimate", "Estimates from a record dump");
  auto* validate = app.add_subcommand("validate", "Simulate, estimate and compare with predictions");
  auto* trace = app.add_subcommand("trace", "Event log of a single path");
  for (auto* sub : {predict, simulate, estimate, validate, trace}) add_common(sub);
  estimate->add_option("--records", flags.records, "Record CSV from `simulate`")->required();
  trace->add_option("--replica", flags.replica, "Replica index within the first level's batch");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*predict) return cmd_predict(flags);
    if (*simulate) return cmd_simulate(flags);
    if (*estimate) return cmd_estimate(flags);
    if (*validate) return cmd_validate(flags);
    if (*trace) return cmd_trace(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
