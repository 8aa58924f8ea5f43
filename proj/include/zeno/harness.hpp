// Config-driven sweeps over (function, t, n), rate fits and flat-file output.

#pragma once

#include "zeno/engine.hpp"
#include "zeno/functions.hpp"
#include "zeno/models.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace zeno {

enum class Metric { strong, norm, time_averaged, bound, diagnostics, graf_guekos, counterexample };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);

struct FunctionEntry {
  std::string id;
  std::optional<IntervalUnion> cutoff;
};

struct ExperimentConfig {
  ModelSpec model;
  std::vector<FunctionEntry> functions;
  std::vector<double> t_grid;
  std::vector<std::uint64_t> n_list;
  double alpha = 1.0;
  std::vector<Metric> metrics;
  std::size_t quadrature_nodes = 65;
  std::uint64_t seed = 0;
  std::string output = "results";

  bool has(Metric m) const;
};

// Throws ValidationError on any schema or range violation.
ModelSpec parse_model_spec(const nlohmann::json& j);
nlohmann::json model_spec_to_json(const ModelSpec& spec);
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

// Builtin lookup, optional cutoff regularization, then grid verification.
FunctionSpec resolve_function(const FunctionEntry& entry);

struct RateFit {
  double beta = 0.0;
  double prefactor = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  bool fitted = false;
};

inline constexpr double kConvergedError = 1e-14;

// Least squares of log(error) on log(n) over points with error > 1e-14.
RateFit fit_rate(std::span<const double> n_values, std::span<const double> errors);

struct SeriesFit {
  std::string function_id;
  double t = 0.0;
  std::string metric;
  RateFit fit;
};

struct ExperimentResult {
  std::vector<ConvergenceRecord> records;  // sorted by (function_id, t, n)
  std::vector<SeriesFit> fits;
  bool guard_tripped = false;
};

// Worker cap from ZENO_LAB_THREADS, else the hardware concurrency.
unsigned default_worker_count();

// Evaluates every cell and writes <output>/records.csv, records.json and
// summary.json unless write_files is false. Validation happens before any
// file is touched.
ExperimentResult run_experiment(const ExperimentConfig& config, unsigned workers = default_worker_count(),
                                bool write_files = true);

// Edge indicator on [b − t/2, b] followed by a smooth interior bump, both
// normalized, in window coordinates.
ComplexMatrix counterexample_vectors(const ZenoModel& model, double t);

std::string records_csv(const std::vector<ConvergenceRecord>& records);
nlohmann::json record_to_json(const ConvergenceRecord& record);
ConvergenceRecord record_from_json(const nlohmann::json& j);
nlohmann::json records_to_json(const std::vector<ConvergenceRecord>& records);
std::vector<ConvergenceRecord> records_from_json(const nlohmann::json& j);
nlohmann::json summary_json(const ExperimentResult& result);

bool operator==(const ConvergenceRecord& a, const ConvergenceRecord& b);

}  // namespace zeno
