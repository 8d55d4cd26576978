#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gpcp/reml.hpp"

namespace gpcp {

/// Experiment orchestration failure (too many failed fits, bad config).
class HarnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { gaussian_reml, fcp_gp, jplus_gp, asym_jplus_gp, scp, jcp, jplus };

[[nodiscard]] std::string_view to_string(Method m);
/// Throws DomainError for unknown tags.
[[nodiscard]] Method parse_method(std::string_view tag);
[[nodiscard]] const std::vector<Method>& all_methods();

struct ExperimentConfig {
  std::string function = "goldstein_price";
  std::vector<int> p_values = {1, 5, 9};
  /// Defaults to 20 d.
  std::optional<int> n_train;
  int n_test = 1100;
  int repetitions = 40;
  double alpha = 0.9;
  double beta = 1.0;
  std::vector<Method> methods = {Method::gaussian_reml, Method::fcp_gp, Method::jplus_gp, Method::asym_jplus_gp};
  std::uint64_t base_seed = 0;
  int iae_grid_size = 99;

  int threads = 1;
  /// wall_time_s is written as 0 unless set, which keeps outputs
  /// byte-identical between runs.
  bool record_timing = false;
  SearchConfig search;

  /// Throws DomainError on invalid values.
  void validate() const;
  [[nodiscard]] int resolved_n_train() const;
};

/// Parse a JSON object whose keys mirror ExperimentConfig. Keys absent from
/// the document keep the values already in `base`.
[[nodiscard]] ExperimentConfig experiment_config_from_json(std::string_view json, ExperimentConfig base = {});

struct RunRecord {
  std::string function;
  std::string method;
  int p = 0;
  int repetition = 0;
  std::uint64_t seed = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double iae = 0.0;
  double rmse = 0.0;
  double wall_time_s = 0.0;

  /// A failed fit is written with NaN metrics.
  [[nodiscard]] bool failed() const;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct SummaryRow {
  std::string function;
  int p = 0;
  std::string method;
  double mean_width = 0.0;
  double mean_iae = 0.0;
  double mean_coverage = 0.0;
  double mean_rmse = 0.0;
  int completed = 0;
  int failed = 0;
};

struct BenchmarkResult {
  std::vector<RunRecord> records;
  std::vector<SummaryRow> summary;
};

/// Seed used for the test design of repetition seed `seed`.
[[nodiscard]] std::uint64_t test_seed(std::uint64_t seed);

/// Runs every (p, method, repetition); records are ordered by
/// (function, method, p, repetition). Throws HarnessError when more than
/// 20% of the fits fail.
[[nodiscard]] BenchmarkResult run_benchmark(const ExperimentConfig& config);

/// Fixed-width table of the summary, one row per (p, method).
[[nodiscard]] std::string format_summary(const std::vector<SummaryRow>& summary);

// --- Pareto scatter ---------------------------------------------------------

struct ParetoConfig {
  std::string function = "goldstein_price";
  int n_train = 150;
  int n_test = 1500;
  int n_samples = 200;
  int p = 2;
  std::uint64_t seed = 0;
  /// Log-uniform sampling half-widths, in decades around the REML estimate.
  double variance_decades = 2.0;
  double lengthscale_decades = 1.0;
  double beta = 1.0;
  int iae_grid_size = 99;
  SearchConfig search;

  void validate() const;
};

struct ParetoRow {
  std::string kind;  // "reml", "jplus_gp" or "sample"
  int index = 0;
  double variance = 0.0;
  Vector lengthscales;
  double rmse_loo = 0.0;
  double iae_loo = 0.0;
  double rmse_test = 0.0;
  double iae_test = 0.0;
};

struct ParetoResult {
  std::vector<ParetoRow> rows;
  int failed_samples = 0;
};

[[nodiscard]] ParetoResult run_pareto(const ParetoConfig& config);

// --- output -----------------------------------------------------------------

enum class OutputFormat { csv, json };

[[nodiscard]] OutputFormat parse_format(std::string_view tag);

/// CSV header: function,method,p,repetition,seed,coverage,mean_width,iae,rmse,wall_time_s
[[nodiscard]] std::string format_results(const std::vector<RunRecord>& records, OutputFormat format);
[[nodiscard]] std::vector<RunRecord> parse_results(std::string_view text, OutputFormat format);
/// Throws std::runtime_error when the file cannot be written.
void emit_results(const std::vector<RunRecord>& records, OutputFormat format, const std::filesystem::path& out);

[[nodiscard]] std::string format_pareto_csv(const ParetoResult& result);

/// Writes `text` to `out`, throwing std::runtime_error on failure.
void write_text_file(const std::filesystem::path& out, std::string_view text);

}  // namespace gpcp
