#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chainhydro/mass_field.hpp"
#include "chainhydro/output.hpp"
#include "chainhydro/profiles.hpp"

namespace chainhydro {

/// Raised for malformed or semantically invalid configs (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  Conservation,
  EquilibriumExactness,
  Convergence,
  FrozenTemperature,
  Localization,
  Averaging,
  CleanChain,
};

std::string kind_name(ExperimentKind kind);
ExperimentKind kind_from_name(const std::string& name);

/// Batch experiment description. Times are macroscopic: a cell at chain size
/// N evolves to microscopic time N^a * t for each configured exponent a.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Conservation;
  std::string name = "experiment";
  std::vector<int> chain_sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<double> times{0.5};
  std::vector<double> time_scale_exponents{1.0};
  MassLaw mass_law = MassLaw::uniform(0.8, 1.2);
  MacroProfiles profiles = canonical_profiles();
  double alpha = 0.3;
  double gamma = 0.8;
  int band_count = 24;
  int euler_truncation = 512;
  int mc_samples = 10000;
  int workers = 1;
  std::string output_dir;  // empty: $CHAIN_HYDRO_OUT, then ./out
  std::map<std::string, double> tolerances;

  double tol(const std::string& key, double fallback) const;
  void validate() const;  // throws ConfigError
};

/// Parses the JSON config file (see README for the schema). Throws
/// ConfigError with a line/field diagnostic on bad input.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Canonical acceptance-grade configs, one per experiment kind. The JSON
/// files under configs/ mirror these.
ExperimentConfig canonical_config(ExperimentKind kind);

/// One acceptance predicate outcome.
struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunResult {
  std::vector<CsvRow> rows;
  std::vector<SummaryEntry> summary;
  std::vector<SlopeEntry> slopes;
  std::vector<Verdict> verdicts;

  bool all_pass() const;
};

/// Bounded worker pool over independent cells; results land in caller-owned
/// slots so aggregation order is deterministic regardless of worker count.
class WorkerPool {
 public:
  explicit WorkerPool(int workers) : workers_(workers < 1 ? 1 : workers) {}
  void run(int count, const std::function<void(int)>& job) const;
  int workers() const { return workers_; }

 private:
  int workers_;
};

/// Experiment kernels. `on_cell`, when set, receives each cell's rows in
/// deterministic order as soon as aggregation reaches it (used to flush
/// partial results).
using CellSink = std::function<void(const std::vector<CsvRow>&)>;

RunResult run_conservation(const ExperimentConfig& cfg, const CellSink& on_cell = {});
RunResult run_equilibrium(const ExperimentConfig& cfg, const CellSink& on_cell = {});
RunResult run_convergence(const ExperimentConfig& cfg, const CellSink& on_cell = {});
RunResult run_frozen(const ExperimentConfig& cfg, const CellSink& on_cell = {});
RunResult run_localization(const ExperimentConfig& cfg, const CellSink& on_cell = {});
RunResult run_averaging(const ExperimentConfig& cfg, const CellSink& on_cell = {});
RunResult run_clean_chain(const ExperimentConfig& cfg, const CellSink& on_cell = {});

/// Dispatches on cfg.kind, writes <name>.csv, summary, and one SVG per slope
/// quantity into the output directory, prints verdicts, and returns 0 (all
/// predicates pass) or 1.
int run_experiment(const ExperimentConfig& cfg);

/// Least-squares slope of log(mean |error|) vs log N. Zero-error rows are
/// excluded (counted); needs >= 3 distinct N with data after exclusion.
struct ConvergenceRow {
  int n = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
};
struct ConvergenceTable {
  std::vector<std::pair<int, double>> per_n_means;
  LinearFit fit;
  int excluded_rows = 0;
};
ConvergenceTable convergence_table(const std::vector<ConvergenceRow>& rows);

}  // namespace chainhydro
