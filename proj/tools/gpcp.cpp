// Command-line front end: `gpcp bench` and `gpcp pareto`.
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gpcp/harness.hpp"
#include "gpcp/testbed.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_bench(const CLI::App& cmd, const std::string& config_path, const std::string& function,
              const std::vector<int>& p_values, int reps, double alpha, const std::vector<std::string>& methods,
              std::uint64_t seed, int n_train, int n_test, double beta, int threads, bool record_timing,
              const std::string& out, const std::string& format, bool summary) {
  gpcp::ExperimentConfig config;
  if (!config_path.empty()) {
    config = gpcp::experiment_config_from_json(read_file(config_path), config);
  }
  const auto given = [&](const char* name) { return cmd.count(name) > 0; };
  if (given("--function")) config.function = function;
  if (given("--p")) config.p_values = p_values;
  if (given("--reps")) config.repetitions = reps;
  if (given("--alpha")) config.alpha = alpha;
  if (given("--seed")) config.base_seed = seed;
  if (given("--n-train")) config.n_train = n_train;
  if (given("--n-test")) config.n_test = n_test;
  if (given("--beta")) config.beta = beta;
  if (given("--threads")) config.threads = threads;
  if (given("--record-timing")) config.record_timing = record_timing;
  if (given("--methods")) {
    config.methods.clear();
    for (const auto& m : methods) {
      config.methods.push_back(gpcp::parse_method(m));
    }
  }
  const gpcp::OutputFormat fmt = gpcp::parse_format(format);
  const gpcp::BenchmarkResult result = gpcp::run_benchmark(config);
  const std::string text = gpcp::format_results(result.records, fmt);
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    gpcp::write_text_file(out, text);
  }
  if (summary) {
    std::cerr << gpcp::format_summary(result.summary);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process interpolation with conformal prediction intervals"};
  app.require_subcommand(1);

  std::string config_path, function = "goldstein_price", out, format = "csv";
  std::vector<int> p_values;
  std::vector<std::string> methods;
  int reps = 40, n_train = 0, n_test = 1100, threads = 1;
  double alpha = 0.9, beta = 1.0;
  std::uint64_t seed = 0;
  bool record_timing = false, summary = false;

  CLI::App* bench = app.add_subcommand("bench", "Run the coverage/width/IAE benchmark");
  bench->add_option("--config", config_path, "JSON file with experiment settings (flags override it)")
      ->check(CLI::ExistingFile);
  bench->add_option("--function", function, "Test function")->check(CLI::IsMember(gpcp::function_names()));
  bench->add_option("--p", p_values, "Matérn regularities, comma separated")->delimiter(',');
  bench->add_option("--reps", reps, "Repetitions")->check(CLI::PositiveNumber);
  bench->add_option("--alpha", alpha, "Nominal coverage level in (0, 1)")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--methods", methods, "Methods, comma separated")->delimiter(',');
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--n-train", n_train, "Training points (default 20 d)")->check(CLI::PositiveNumber);
  bench->add_option("--n-test", n_test, "Test points")->check(CLI::PositiveNumber);
  bench->add_option("--beta", beta, "Score exponent on the posterior standard deviation");
  bench->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_flag("--record-timing", record_timing, "Record wall time (makes output non-reproducible)");
  bench->add_option("--out", out, "Output file ('-' for stdout)");
  bench->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  bench->add_flag("--summary", summary, "Print a summary table to stderr");

  gpcp::ParetoConfig pareto;
  std::string pareto_out;
  CLI::App* pareto_cmd = app.add_subcommand("pareto", "RMSE/IAE scatter around the REML estimate");
  pareto_cmd->add_option("--function", pareto.function, "Test function")
      ->check(CLI::IsMember(gpcp::function_names()));
  pareto_cmd->add_option("--n-train", pareto.n_train, "Training points")->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--n-test", pareto.n_test, "Test points")->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--n-samples", pareto.n_samples, "Random covariance parameters")
      ->check(CLI::NonNegativeNumber);
  pareto_cmd->add_option("--p", pareto.p, "Matérn regularity")->check(CLI::PositiveNumber);
  pareto_cmd->add_option("--seed", pareto.seed, "Seed");
  pareto_cmd->add_option("--out", pareto_out, "Output CSV ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*bench) {
      return run_bench(*bench, config_path, function, p_values, reps, alpha, methods, seed, n_train, n_test, beta,
                       threads, record_timing, out, format, summary);
    }
    const gpcp::ParetoResult result = gpcp::run_pareto(pareto);
    const std::string text = gpcp::format_pareto_csv(result);
    if (pareto_out.empty() || pareto_out == "-") {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      gpcp::write_text_file(pareto_out, text);
    }
    if (result.failed_samples > 0) {
      std::cerr << "gpcp: " << result.failed_samples << " sampled covariances were numerically singular\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gpcp: error: " << e.what() << '\n';
    return 1;
  }
}
