#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rearr/dependence.hpp"
#include "rearr/errors.hpp"

namespace rearr {

/// Scenario description for a Monte Carlo run.  Parsed from a flat
/// key=value file; every field has a config key of the same name.
struct ExperimentConfig {
  std::string problem;               // "regression" | "density"
  std::string truth;                 // regression: "linear"; density: "exponential"
  double t0 = std::numeric_limits<double>::quiet_NaN();
  std::string kernel = "epanechnikov";
  std::string regime = "iid";        // iid | ar1 | lrd
  double sigma = 1.0;                // iid noise scale
  double rho = 0.5;                  // ar1 coefficient
  double sigma_e = 1.0;              // ar1 innovation scale
  double d = 0.2;                    // lrd memory exponent
  int r = 1;                         // lrd transform rank
  double bandwidth_a = 1.0;
  std::vector<long> n_list;
  long reps = 200;
  std::uint64_t master_seed = 1;
  long grid_per_unit = 512;          // estimator grid resolution
  int threads = 1;
  long limit_draw_count = 2000;
  double limit_window = 8.0;
  double limit_grid_step = 1.0 / 256.0;
  double drop_tolerance = 0.01;      // max fraction of dropped work
  // optional gates; NaN means "not declared"
  double slope_min = std::numeric_limits<double>::quiet_NaN();
  double slope_max = std::numeric_limits<double>::quiet_NaN();
  double ks_max = std::numeric_limits<double>::quiet_NaN();
};

ExperimentConfig default_config(const std::string& problem);
ExperimentConfig parse_config_file(const std::string& path);
void validate_config(const ExperimentConfig& cfg);

struct ReplicationRow {
  long n = 0;
  long rep = 0;
  std::uint64_t seed = 0;
  double dn = 0.0;
  double raw_error = std::numeric_limits<double>::quiet_NaN();
  double scaled_error = std::numeric_limits<double>::quiet_NaN();
  double raw_sup = std::numeric_limits<double>::quiet_NaN();
  double rearranged_sup = std::numeric_limits<double>::quiet_NaN();
  bool never_worse_violation = false;  // any norm, see Report tolerance
  bool dropped = false;
};

struct SummaryRow {
  long n = 0;
  double rmse = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

struct Report {
  ExperimentConfig config;
  std::vector<ReplicationRow> rows;     // n_list-major, rep-minor order
  std::vector<SummaryRow> summary;      // unscaled raw errors per n
  std::vector<double> limit_draws;      // matched-limit samples
  std::size_t limit_draws_requested = 0;
  std::size_t limit_draws_dropped = 0;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double ks = std::numeric_limits<double>::quiet_NaN();
  long dropped = 0;
  long never_worse_violations = 0;
  long integral_violations = 0;         // density only
  double max_integral_deviation = 0.0;  // density only
  double elapsed_seconds = 0.0;
  bool gate_ok = true;
  std::vector<std::string> gate_failures;
};

/// Dispatch on cfg.problem.
Report run_experiment(const ExperimentConfig& cfg);
Report run_regression(const ExperimentConfig& cfg);
Report run_density(const ExperimentConfig& cfg);

/// Writes errors.csv, summary.csv, limit_draws.csv, report.txt into dir
/// (created if missing).
void write_report(const Report& report, const std::string& dir);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

/// OLS slope of log(rmse) against log(n); needs >= 3 positive points.
double rate_fit(const std::vector<std::pair<double, double>>& points);

}  // namespace rearr
