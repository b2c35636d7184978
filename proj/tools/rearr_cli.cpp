// Command line front end.  Talks to the library through the C interface
// only, so it doubles as a smoke test of that surface.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rearr.h"

namespace {

int status_to_exit(rearr_status s) {
  if (s == REARR_OK) return 0;
  if (s == REARR_ERR_GATE) return 3;
  return 2;
}

int report_failure(rearr_status s) {
  std::fprintf(stderr, "error: %s\n", rearr_last_error());
  return status_to_exit(s);
}

// The config format is flat key=value; peeking at one key here avoids
// running a whole experiment under the wrong subcommand.
std::string peek_problem(const std::string& config_path) {
  std::ifstream in(config_path);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(0, key.find_first_not_of(" \t"));
    key.erase(key.find_last_not_of(" \t") + 1);
    if (key != "problem") continue;
    std::string val = line.substr(eq + 1);
    val.erase(0, val.find_first_not_of(" \t\"'"));
    std::size_t end = val.find_last_not_of(" \t\r\"'");
    val.erase(end == std::string::npos ? 0 : end + 1);
    return val;
  }
  return "";
}

int run_rearrange(const std::string& input, const std::string& output,
                  bool density, double tail_bound,
                  const std::vector<double>& window) {
  rearr_grid* in = nullptr;
  rearr_status s = rearr_grid_read_csv(input.c_str(), &in);
  if (s != REARR_OK) return report_failure(s);
  rearr_grid* out = nullptr;
  int warn = 0;
  if (density) {
    s = rearr_rearrange_density(in, tail_bound, &out, &warn);
  } else if (!window.empty()) {
    s = rearr_rearrange_local(in, window[0], window[1], window[2], window[3],
                              window[4], &out);
  } else {
    s = rearr_rearrange(in, &out);
  }
  rearr_grid_free(in);
  if (s != REARR_OK) return report_failure(s);
  if (warn)
    std::fprintf(stderr,
                 "warning: truncation point may be too small; the last "
                 "retained cell still carries noticeable mass\n");
  s = rearr_grid_write_csv(out, output.c_str());
  rearr_grid_free(out);
  if (s != REARR_OK) return report_failure(s);
  return 0;
}

int run_simulate_limit(double A, double Delta, double c,
                       const std::string& process, double beta,
                       const std::string& kernel, double window, double step,
                       long draws, std::uint64_t seed, int threads,
                       const std::string& out_path) {
  std::vector<double> out(static_cast<std::size_t>(draws));
  size_t dropped = 0;
  rearr_status s = rearr_limit_draws(
      A, Delta, c, process.c_str(), beta, kernel.c_str(), window, step,
      out.size(), seed, threads, out.data(), &dropped);
  if (s != REARR_OK) return report_failure(s);
  std::FILE* fp = std::fopen(out_path.c_str(), "w");
  if (!fp) {
    std::fprintf(stderr, "error: cannot open %s for writing\n",
                 out_path.c_str());
    return 2;
  }
  std::fputs("draw\n", fp);
  for (double v : out)
    if (!std::isnan(v)) std::fprintf(fp, "%.17g\n", v);
  std::fclose(fp);
  std::printf("kept %zu of %ld draws (%zu dropped)\n", out.size() - dropped,
              draws, dropped);
  return 0;
}

int run_generate(const std::string& regime, long n, std::uint64_t seed,
                 double sigma, double rho, double sigma_e, double d, int r,
                 const std::string& out_path) {
  std::vector<double> x(static_cast<std::size_t>(n));
  rearr_status s = rearr_generate_series(regime.c_str(), x.size(), seed,
                                         sigma, rho, sigma_e, d, r, x.data());
  if (s != REARR_OK) return report_failure(s);
  std::FILE* fp = std::fopen(out_path.c_str(), "w");
  if (!fp) {
    std::fprintf(stderr, "error: cannot open %s for writing\n",
                 out_path.c_str());
    return 2;
  }
  std::fputs("i,value\n", fp);
  for (std::size_t i = 0; i < x.size(); ++i)
    std::fprintf(fp, "%zu,%.17g\n", i + 1, x[i]);
  std::fclose(fp);
  return 0;
}

int run_experiment(const std::string& problem, const std::string& config,
                   const std::string& out_dir) {
  const std::string declared = peek_problem(config);
  if (!declared.empty() && declared != problem) {
    std::fprintf(stderr,
                 "error: config declares problem=%s but the %s subcommand "
                 "was invoked\n",
                 declared.c_str(), problem.c_str());
    return 2;
  }
  rearr_status s = rearr_experiment_run(config.c_str(), out_dir.c_str());
  if (s != REARR_OK) return report_failure(s);
  std::printf("report written to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monotone rearrangement toolkit: rearranges grid functions, "
      "simulates the matched limit law, and runs Monte Carlo experiments"};
  app.require_subcommand(1);

  // rearrange
  std::string in_path, out_path;
  bool density = false;
  double tail_bound = 1e-6;
  std::vector<double> window;
  auto* rearrange = app.add_subcommand(
      "rearrange", "Monotonize a sampled function from CSV");
  rearrange->add_option("--input", in_path, "input CSV (t,value)")
      ->required();
  rearrange->add_option("--output", out_path, "output CSV")->required();
  auto* dens_flag = rearrange->add_flag(
      "--density", density,
      "nonnegative-mode: rearrange onto [0, length] with tail truncation");
  rearrange->add_option("--tail-bound", tail_bound,
                        "mass bound before a truncation warning is issued");
  auto* win_opt = rearrange->add_option(
      "--window", window,
      "local mode: inner_lo,inner_hi,outer_lo,outer_hi,barrier");
  win_opt->delimiter(',')->expected(5);
  win_opt->excludes(dens_flag);

  // simulate-limit
  double A = -1.0, Delta = 0.0, c = 1.0, beta = 0.75, lwindow = 8.0,
         step = 1.0 / 256.0;
  std::string process = "brownian", kernel = "epanechnikov",
              draws_path = "limit_draws.csv";
  long n_draws = 2000;
  std::uint64_t seed = 1;
  int threads = 1;
  auto* sim = app.add_subcommand(
      "simulate-limit", "Sample the rearranged drift-plus-noise limit law");
  sim->add_option("--A", A, "drift slope (< 0)");
  sim->add_option("--Delta", Delta, "deterministic offset");
  sim->add_option("--c", c, "disturbance scale (>= 0)");
  sim->add_option("--process", process, "brownian | fbm");
  sim->add_option("--beta", beta, "fbm Hurst index in (0.5, 1)");
  sim->add_option("--kernel", kernel, "smoothing kernel name");
  sim->add_option("--window", lwindow, "initial outer window width (> 2)");
  sim->add_option("--step", step, "simulation grid step in (0, 0.5]");
  sim->add_option("--draws", n_draws, "number of draws");
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--threads", threads, "worker threads");
  sim->add_option("--out", draws_path, "output CSV");

  // generate
  std::string regime = "iid", series_path = "series.csv";
  long n = 1000;
  double sigma = 1.0, rho = 0.5, sigma_e = 1.0, d = 0.2;
  int r = 1;
  std::uint64_t gseed = 1;
  auto* gen = app.add_subcommand("generate",
                                 "Sample a dependent disturbance series");
  gen->add_option("--regime", regime, "iid | ar1 | lrd");
  gen->add_option("--n", n, "series length")->required();
  gen->add_option("--seed", gseed, "RNG seed");
  gen->add_option("--sigma", sigma, "iid noise scale");
  gen->add_option("--rho", rho, "ar1 coefficient");
  gen->add_option("--sigma-e", sigma_e, "ar1 innovation scale");
  gen->add_option("--d", d, "long-memory exponent");
  gen->add_option("--r", r, "transform rank");
  gen->add_option("--out", series_path, "output CSV");

  // experiment
  std::string config, report_dir;
  auto* exp = app.add_subcommand("experiment", "Run a Monte Carlo study");
  exp->require_subcommand(1);
  auto* exp_reg = exp->add_subcommand("regression",
                                      "fixed-design kernel regression");
  auto* exp_den = exp->add_subcommand("density", "kernel density estimation");
  for (auto* sub : {exp_reg, exp_den}) {
    sub->add_option("--config", config, "flat key=value config file")
        ->required();
    sub->add_option("--out", report_dir, "report directory")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (rearrange->parsed())
    return run_rearrange(in_path, out_path, density, tail_bound, window);
  if (sim->parsed())
    return run_simulate_limit(A, Delta, c, process, beta, kernel, lwindow,
                              step, n_draws, seed, threads, draws_path);
  if (gen->parsed())
    return run_generate(regime, n, gseed, sigma, rho, sigma_e, d, r,
                        series_path);
  if (exp->parsed())
    return run_experiment(exp_reg->parsed() ? "regression" : "density",
                          config, report_dir);
  return 2;
}
