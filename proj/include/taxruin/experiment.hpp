#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taxruin/asymptotics.hpp"
#include "taxruin/engine.hpp"
#include "taxruin/estimators.hpp"
#include "taxruin/model.hpp"
#include "taxruin/tax.hpp"

namespace taxruin {

inline constexpr const char* kVersion = "1.0.0";

struct PenaltyParams {
  double lambda = 0.0;
  double eta = 0.0;
  double delta = 0.0;
};

/// Acceptance slack for one quantity: max(abs, rel * |predicted|).
struct Tolerance {
  double abs = 0.0;
  double rel = 0.0;
};

struct OutputSelection {
  bool ruin = true;
  bool ratio = false;
  bool edpf = false;
  bool tax = false;
  bool joint = false;
  bool diagnostic = false;
};

struct ExperimentConfig {
  ModelSpec model = ModelSpec::cl(1.5, 1.0, 1.0);
  TaxPolicy policy = TaxPolicy::constant(0.0);
  std::vector<double> levels;
  Measure estimator = Measure::Q;
  std::size_t n = 10000;
  std::uint64_t seed = 1;
  PenaltyParams penalty;
  double discount = 0.0;
  double truncation_margin = std::numeric_limits<double>::quiet_NaN();
  double bm_step = 1e-3;
  std::uint64_t max_events = 20'000'000;
  OutputSelection outputs;
  /// z-score multiplier in the pass rule.
  double k = 3.0;
  std::map<std::string, Tolerance> tolerances;
  /// Cramer constant to use when the model has no closed form.
  std::optional<double> upsilon;
  /// Scripted jumps (absolute time, size) for the `trace` subcommand.
  std::vector<std::pair<double, double>> trace_jumps;
  /// Normalised JSON of the parsed configuration, echoed into reports.
  std::string echo;
};

/// Parses a JSON configuration. Throws ConfigError naming the offending field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One (u, quantity) comparison. `predicted` is NaN when no analytic target
/// exists and +infinity for divergent limits.
struct ReportRow {
  double level = 0.0;
  std::string quantity;
  double predicted = 0.0;
  Estimate estimate;
  double z = 0.0;
  double slack = 0.0;
  /// pass | fail | info | divergent | reflected
  std::string status;
  std::string note;
};

struct HistogramTable {
  double level = 0.0;
  JointVariable variable = JointVariable::Depth;
  Histogram histogram;
};

struct ValidationReport {
  std::string version = kVersion;
  std::uint64_t seed = 0;
  std::string config_echo;
  std::vector<ReportRow> rows;
  std::vector<HistogramTable> histograms;

  bool all_passed() const;
};

/// Stream seed for (u index, batch role) derived from the experiment seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t level_index, std::uint64_t role);

RunOptions run_options(const ExperimentConfig& config);

/// Full pipeline. Deterministic in (config, seed) for any worker count.
ValidationReport run_experiment(const ExperimentConfig& config, unsigned workers = 0);

/// Adds a row, applying the pass rule |estimate - predicted| <= max(slack, k * stderr).
void add_row(ValidationReport& report, double level, const std::string& quantity, double predicted,
             const Estimate& estimate, const Tolerance& tolerance, double k, std::string note = {});

std::string report_json(const ValidationReport& report);
/// Columns: u, quantity, predicted, estimate, stderr, n, z.
std::string report_csv(const ValidationReport& report);
std::string histogram_csv(const HistogramTable& table);

/// Writes report.json, table.csv and hist_*.csv into `dir`.
void write_outputs(const ValidationReport& report, const std::filesystem::path& dir);

/// Record dump, one line per path.
void write_records_csv(std::ostream& os, const std::vector<RuinRecord>& records);
std::vector<RuinRecord> read_records_csv(std::istream& is);

void write_event_log(std::ostream& os, const EventLog& log);

/// Estimates selected by the config, computed from an existing record set.
ValidationReport estimate_records(const ExperimentConfig& config, const std::vector<RuinRecord>& records);

/// Formats a double for reports: shortest round-trip form, "inf" / "nan" spelled out.
std::string format_number(double v);

}  // namespace taxruin
