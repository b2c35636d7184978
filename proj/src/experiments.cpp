#include "rearr/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rearr/grid.hpp"
#include "rearr/kernels.hpp"
#include "rearr/limitsim.hpp"
#include "rearr/parallel.hpp"
#include "rearr/rearrange.hpp"
#include "rearr/rng.hpp"

namespace rearr {

ExperimentConfig default_config(const std::string& problem) {
  ExperimentConfig c;
  c.problem = problem;
  if (problem == "regression") {
    c.truth = "linear";
    c.t0 = 0.5;
    c.grid_per_unit = 512;
  } else if (problem == "density") {
    c.truth = "exponential";
    c.t0 = -std::log(0.6);  // 40% quantile keeps t0 interior at every n
    c.grid_per_unit = 2048;
  } else {
    throw ConfigError("problem must be 'regression' or 'density', got '" +
                      problem + "'");
  }
  c.n_list = {500, 1000, 2000, 4000, 8000, 16000};
  return c;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double parse_real(const std::string& v, const std::string& where) {
  const char* s = v.c_str();
  char* end = nullptr;
  double x = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  return x;
}

long parse_long(const std::string& v, const std::string& where) {
  const char* s = v.c_str();
  char* end = nullptr;
  long x = std::strtol(s, &end, 10);
  if (end == s || *end != '\0')
    throw ConfigError(where + ": expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
  const char* s = v.c_str();
  char* end = nullptr;
  unsigned long long x = std::strtoull(s, &end, 10);
  if (end == s || *end != '\0')
    throw ConfigError(where + ": expected an unsigned integer, got '" + v +
                      "'");
  return static_cast<std::uint64_t>(x);
}

std::vector<long> parse_n_list(std::string v, const std::string& where) {
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']')
      throw ConfigError(where + ": unterminated list '" + v + "'");
    v = v.substr(1, v.size() - 2);
  }
  std::vector<long> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    std::size_t comma = v.find(',', pos);
    std::string item =
        trim(comma == std::string::npos ? v.substr(pos)
                                        : v.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(parse_long(item, where));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError(where + ": empty sample-size list");
  return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& val, const std::string& where) {
  if (key == "problem") {
    if (val != cfg.problem)
      throw ConfigError(where + ": conflicting problem '" + val + "'");
  } else if (key == "truth") {
    cfg.truth = val;
  } else if (key == "t0") {
    cfg.t0 = parse_real(val, where);
  } else if (key == "kernel") {
    cfg.kernel = val;
  } else if (key == "regime") {
    cfg.regime = val;
  } else if (key == "sigma") {
    cfg.sigma = parse_real(val, where);
  } else if (key == "rho") {
    cfg.rho = parse_real(val, where);
  } else if (key == "sigma_e") {
    cfg.sigma_e = parse_real(val, where);
  } else if (key == "d") {
    cfg.d = parse_real(val, where);
  } else if (key == "r") {
    cfg.r = static_cast<int>(parse_long(val, where));
  } else if (key == "bandwidth_a") {
    cfg.bandwidth_a = parse_real(val, where);
  } else if (key == "n_list") {
    cfg.n_list = parse_n_list(val, where);
  } else if (key == "reps") {
    cfg.reps = parse_long(val, where);
  } else if (key == "master_seed") {
    cfg.master_seed = parse_u64(val, where);
  } else if (key == "grid_per_unit") {
    cfg.grid_per_unit = parse_long(val, where);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(parse_long(val, where));
  } else if (key == "limit_draw_count") {
    cfg.limit_draw_count = parse_long(val, where);
  } else if (key == "limit_window") {
    cfg.limit_window = parse_real(val, where);
  } else if (key == "limit_grid_step") {
    cfg.limit_grid_step = parse_real(val, where);
  } else if (key == "drop_tolerance") {
    cfg.drop_tolerance = parse_real(val, where);
  } else if (key == "slope_min") {
    cfg.slope_min = parse_real(val, where);
  } else if (key == "slope_max") {
    cfg.slope_max = parse_real(val, where);
  } else if (key == "ks_max") {
    cfg.ks_max = parse_real(val, where);
  } else {
    throw ConfigError(where + ": unknown config key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::vector<std::string> lines;
  std::string line;
  std::size_t lineno = 0;
  std::string problem;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    if (key == "problem") problem = val;
    kv.emplace_back(key, val);
    lines.push_back(path + ":" + std::to_string(lineno));
  }
  if (problem.empty())
    throw ConfigError(path + ": config must set 'problem'");
  ExperimentConfig cfg = default_config(problem);
  for (std::size_t i = 0; i < kv.size(); ++i)
    apply_key(cfg, kv[i].first, kv[i].second, lines[i]);
  validate_config(cfg);
  return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.problem != "regression" && cfg.problem != "density")
    throw ConfigError("problem must be 'regression' or 'density'");
  if (cfg.problem == "regression") {
    if (cfg.truth != "linear")
      throw ConfigError("regression truth must be 'linear' (2(1-t) on [0,1])");
    if (!(cfg.t0 > 0.0 && cfg.t0 < 1.0))
      throw ConfigError("t0 must lie strictly inside (0,1)");
  } else {
    if (cfg.truth != "exponential")
      throw ConfigError("density truth must be 'exponential' (e^{-t})");
    if (!(cfg.t0 > 0.0)) throw ConfigError("t0 must be > 0");
  }
  Kernel::parse(cfg.kernel);
  if (cfg.regime == "iid") {
    if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be > 0");
  } else if (cfg.regime == "ar1") {
    if (!(std::fabs(cfg.rho) < 1.0)) throw ConfigError("ar1 needs |rho| < 1");
    if (!(cfg.sigma_e > 0.0)) throw ConfigError("sigma_e must be > 0");
  } else if (cfg.regime == "lrd") {
    if (!(cfg.d > 0.0 && cfg.d < 1.0))
      throw ConfigError("lrd memory exponent d must be in (0,1)");
    if (cfg.r < 1 || cfg.r > 20)
      throw ConfigError("transform rank r must be in 1..20");
    if (!(static_cast<double>(cfg.r) * cfg.d < 1.0))
      throw ConfigError("lrd needs r*d < 1");
  } else {
    throw ConfigError("regime must be iid, ar1 or lrd, got '" + cfg.regime +
                      "'");
  }
  if (!(cfg.bandwidth_a > 0.0)) throw ConfigError("bandwidth_a must be > 0");
  if (cfg.n_list.empty()) throw ConfigError("n_list must be nonempty");
  for (long n : cfg.n_list)
    if (n < 2 || n > 100000000L)
      throw ConfigError("sample sizes must be in [2, 1e8]");
  if (cfg.reps < 2) throw ConfigError("reps must be >= 2");
  if (cfg.grid_per_unit < 32 || cfg.grid_per_unit > 65536)
    throw ConfigError("grid_per_unit must be in [32, 65536]");
  if (cfg.threads < 1 || cfg.threads > 256)
    throw ConfigError("threads must be in [1, 256]");
  if (cfg.limit_draw_count < 0 || cfg.limit_draw_count > 1000000L)
    throw ConfigError("limit_draw_count must be in [0, 1e6]");
  if (!(cfg.limit_window > 2.0))
    throw ConfigError("limit_window must exceed 2");
  if (!(cfg.limit_grid_step > 0.0 && cfg.limit_grid_step <= 0.5))
    throw ConfigError("limit_grid_step must be in (0, 0.5]");
  if (!(cfg.drop_tolerance >= 0.0 && cfg.drop_tolerance <= 1.0))
    throw ConfigError("drop_tolerance must be in [0,1]");
  if (!std::isnan(cfg.slope_min) && !std::isnan(cfg.slope_max) &&
      cfg.slope_min > cfg.slope_max)
    throw ConfigError("slope_min exceeds slope_max");
  if (!std::isnan(cfg.ks_max) && !(cfg.ks_max > 0.0))
    throw ConfigError("ks_max must be > 0");
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw DomainError("ks_distance needs nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

double rate_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw DomainError("rate fit needs >= 3 points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [n, rmse] : points) {
    if (!(n > 0.0) || !(rmse > 0.0))
      throw DomainError("rate fit needs positive (n, rmse) pairs");
    sx += std::log(n);
    sy += std::log(rmse);
  }
  const double mx = sx / points.size();
  const double my = sy / points.size();
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [n, rmse] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(rmse) - my);
  }
  if (!(sxx > 0.0)) throw DomainError("rate fit needs distinct sample sizes");
  return sxy / sxx;
}

namespace {

ExperimentConfig with_defaults(ExperimentConfig cfg) {
  ExperimentConfig def = default_config(cfg.problem);
  if (cfg.truth.empty()) cfg.truth = def.truth;
  if (std::isnan(cfg.t0)) cfg.t0 = def.t0;
  if (cfg.n_list.empty()) cfg.n_list = def.n_list;
  return cfg;
}

DependenceModel model_from(const ExperimentConfig& cfg) {
  if (cfg.regime == "iid") return DependenceModel::iid(cfg.sigma);
  if (cfg.regime == "ar1") return DependenceModel::ar1(cfg.rho, cfg.sigma_e);
  return DependenceModel::lrd(cfg.d, cfg.r);
}

BandwidthRule rule_from(const ExperimentConfig& cfg) {
  BandwidthRule rule;
  rule.a = cfg.bandwidth_a;
  if (cfg.regime == "iid") {
    rule.kind = BandwidthRule::Kind::iid;
  } else if (cfg.regime == "ar1") {
    rule.kind = BandwidthRule::Kind::mixing;
  } else {
    rule.kind = BandwidthRule::Kind::lrd;
    rule.d = cfg.d;
    rule.r = cfg.r;
  }
  return rule;
}

// rearranging must never lose against the preliminary estimate, in any
// norm, beyond the stated slack
bool never_worse_violated(const GridFunction& raw, const GridFunction& rea,
                          const GridFunction& truth_raw,
                          const GridFunction& truth_rea, double extra_allow) {
  for (Norm norm : {Norm::sup, Norm::l1, Norm::l2}) {
    const double er = distance(raw, truth_raw, norm);
    const double et = distance(rea, truth_rea, norm);
    if (et > er + extra_allow + 1e-10 * std::max(1.0, er)) return true;
  }
  return false;
}

void summarize(Report& rep) {
  const auto& cfg = rep.config;
  rep.summary.clear();
  rep.dropped = 0;
  rep.never_worse_violations = 0;
  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const std::size_t base = ni * static_cast<std::size_t>(cfg.reps);
    double sum = 0.0, sumsq = 0.0;
    long cnt = 0;
    for (long rj = 0; rj < cfg.reps; ++rj) {
      const ReplicationRow& row = rep.rows[base + rj];
      if (row.dropped) {
        ++rep.dropped;
        continue;
      }
      if (row.never_worse_violation) ++rep.never_worse_violations;
      sum += row.raw_error;
      sumsq += row.raw_error * row.raw_error;
      ++cnt;
    }
    SummaryRow s;
    s.n = cfg.n_list[ni];
    if (cnt > 0) {
      s.mean = sum / cnt;
      s.rmse = std::sqrt(sumsq / cnt);
      s.sd = cnt > 1
                 ? std::sqrt(std::max(0.0, (sumsq - cnt * s.mean * s.mean)) /
                             (cnt - 1))
                 : 0.0;
    } else {
      s.mean = s.rmse = s.sd = std::numeric_limits<double>::quiet_NaN();
    }
    rep.summary.push_back(s);
  }
  std::vector<std::pair<double, double>> pts;
  for (const SummaryRow& s : rep.summary)
    if (std::isfinite(s.rmse) && s.rmse > 0.0)
      pts.emplace_back(static_cast<double>(s.n), s.rmse);
  if (pts.size() >= 3) {
    try {
      rep.slope = rate_fit(pts);
    } catch (const Error&) {
      rep.slope = std::numeric_limits<double>::quiet_NaN();
    }
  }
}

void compute_ks(Report& rep) {
  if (rep.limit_draws.empty() || rep.rows.empty()) return;
  const long n_last = rep.config.n_list.back();
  std::vector<double> scaled;
  for (const ReplicationRow& row : rep.rows)
    if (!row.dropped && row.n == n_last) scaled.push_back(row.scaled_error);
  if (scaled.empty()) return;
  rep.ks = ks_distance(std::move(scaled), rep.limit_draws);
}

void finalize_gates(Report& rep,
                    std::chrono::steady_clock::time_point start) {
  const auto& cfg = rep.config;
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  rep.gate_failures.clear();
  if (!rep.rows.empty()) {
    const double frac =
        static_cast<double>(rep.dropped) / static_cast<double>(rep.rows.size());
    if (frac > cfg.drop_tolerance) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "replication drop rate %.4f exceeds tolerance %.4f", frac,
                    cfg.drop_tolerance);
      rep.gate_failures.push_back(buf);
    }
  }
  if (rep.limit_draws_requested > 0) {
    const double frac = static_cast<double>(rep.limit_draws_dropped) /
                        static_cast<double>(rep.limit_draws_requested);
    if (frac > cfg.drop_tolerance) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "limit-draw drop rate %.4f exceeds tolerance %.4f", frac,
                    cfg.drop_tolerance);
      rep.gate_failures.push_back(buf);
    }
  }
  if (!std::isnan(cfg.slope_min) &&
      !(rep.slope >= cfg.slope_min)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "rate slope %.6f below slope_min %.6f",
                  rep.slope, cfg.slope_min);
    rep.gate_failures.push_back(buf);
  }
  if (!std::isnan(cfg.slope_max) &&
      !(rep.slope <= cfg.slope_max)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "rate slope %.6f above slope_max %.6f",
                  rep.slope, cfg.slope_max);
    rep.gate_failures.push_back(buf);
  }
  if (!std::isnan(cfg.ks_max) && !(rep.ks <= cfg.ks_max)) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "KS distance %.6f above ks_max %.6f",
                  rep.ks, cfg.ks_max);
    rep.gate_failures.push_back(buf);
  }
  rep.gate_ok = rep.gate_failures.empty();
}

double exp_from_gauss(double z) {
  // exponential quantile of the Gaussian upper tail keeps the marginal
  // exactly exp(1) along the chain
  double tail = 0.5 * std::erfc(z * 0.70710678118654752440);
  if (tail < 1e-300) tail = 1e-300;
  return -std::log(tail);
}

std::vector<double> draw_density_sample(const ExperimentConfig& cfg, long n,
                                        std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> s(static_cast<std::size_t>(n));
  if (cfg.regime == "iid") {
    for (auto& v : s) v = -std::log(rng.uniform01());
    return s;
  }
  const double rho = cfg.rho;
  const double w = std::sqrt(1.0 - rho * rho);
  double z = rng.normal();
  s[0] = exp_from_gauss(z);
  for (std::size_t i = 1; i < s.size(); ++i) {
    z = rho * z + w * rng.normal();
    s[i] = exp_from_gauss(z);
  }
  return s;
}

constexpr std::uint64_t kDrawStream = 0x64726177;  // tags the draw RNG branch

}  // namespace

Report run_regression(const ExperimentConfig& cfg_in) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = with_defaults(cfg_in);
  validate_config(cfg);
  if (cfg.problem != "regression")
    throw ConfigError("run_regression needs problem=regression");
  const Kernel k = Kernel::parse(cfg.kernel);
  const auto m_fn = [](double t) { return 2.0 * (1.0 - t); };
  const double slope_t0 = -2.0;
  const double truth_t0 = m_fn(cfg.t0);
  const DependenceModel model = model_from(cfg);
  const BandwidthRule rule = rule_from(cfg);
  const std::size_t gm = static_cast<std::size_t>(cfg.grid_per_unit) + 1;
  const GridFunction truth = GridFunction::sample({0.0, 1.0}, gm, m_fn);

  Report rep;
  rep.config = cfg;
  rep.rows.resize(cfg.n_list.size() * static_cast<std::size_t>(cfg.reps));

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const long n = cfg.n_list[ni];
    const double h = bandwidth(rule, n);
    const GasserMullerPlan plan(static_cast<std::size_t>(n), k, h, {0.0, 1.0},
                                gm);
    const std::size_t base = ni * static_cast<std::size_t>(cfg.reps);
    parallel_for(cfg.reps, cfg.threads, [&](long rj) {
      ReplicationRow& row = rep.rows[base + static_cast<std::size_t>(rj)];
      row.n = n;
      row.rep = rj;
      row.dn = h;
      row.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(rj));
      try {
        std::vector<double> eps =
            generate(model, static_cast<std::size_t>(n), row.seed);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (long i = 1; i <= n; ++i)
          y[i - 1] =
              m_fn(static_cast<double>(i) / static_cast<double>(n)) +
              eps[i - 1];
        GridFunction x = plan.apply(y);
        GridFunction tx = rearrange_finite(x);
        row.raw_error = tx.evaluate(cfg.t0) - truth_t0;
        row.scaled_error = row.raw_error / h;
        row.raw_sup = distance(x, truth, Norm::sup);
        row.rearranged_sup = distance(tx, truth, Norm::sup);
        row.never_worse_violation =
            never_worse_violated(x, tx, truth, truth, 0.0);
      } catch (const Error&) {
        row.dropped = true;
      }
    });
  }
  summarize(rep);

  const bool draws_available = !(cfg.regime == "lrd" && cfg.r >= 2);
  if (cfg.limit_draw_count > 0 && draws_available) {
    LimitParams lp;
    lp.A = slope_t0;
    lp.Delta = -slope_t0 * k.moment(1);
    if (cfg.regime == "lrd") {
      const int r = cfg.r;
      const double eta_r = hermite_coeff(
          [r](double u) { return hermite_value(r, u); }, r);
      lp.c = std::fabs(eta_r) * cfg.bandwidth_a;
      lp.process = LimitParams::Process::fbm;
      lp.beta = 1.0 - static_cast<double>(cfg.r) * cfg.d / 2.0;
    } else {
      lp.c = std::sqrt(long_run_variance(model)) *
             std::pow(cfg.bandwidth_a, -1.5);
    }
    lp.window = cfg.limit_window;
    lp.grid_step = cfg.limit_grid_step;
    LimitDrawBatch batch = limit_draws(
        lp, k, static_cast<std::size_t>(cfg.limit_draw_count),
        derive_seed(cfg.master_seed, kDrawStream, 0), cfg.threads);
    rep.limit_draws = std::move(batch.draws);
    rep.limit_draws_requested = batch.requested;
    rep.limit_draws_dropped = batch.dropped;
  }
  compute_ks(rep);
  finalize_gates(rep, start);
  return rep;
}

Report run_density(const ExperimentConfig& cfg_in) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = with_defaults(cfg_in);
  validate_config(cfg);
  if (cfg.problem != "density")
    throw ConfigError("run_density needs problem=density");
  if (cfg.regime == "lrd")
    throw UnsupportedError(
        "density experiments support regimes iid and ar1 only");
  const Kernel k = Kernel::parse(cfg.kernel);
  const double t0 = cfg.t0;
  const auto f = [](double t) { return t >= 0.0 ? std::exp(-t) : 0.0; };
  const double f_t0 = std::exp(-t0);
  const double fp_t0 = -f_t0;
  const long res = cfg.grid_per_unit;
  const double step_g = 1.0 / static_cast<double>(res);

  Report rep;
  rep.config = cfg;
  rep.rows.resize(cfg.n_list.size() * static_cast<std::size_t>(cfg.reps));
  std::vector<double> integ_dev(rep.rows.size(), 0.0);

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const long n = cfg.n_list[ni];
    const double h =
        cfg.bandwidth_a * std::pow(static_cast<double>(n), -1.0 / 3.0);
    // grid anchored on multiples of the resolution so a node sits at 0
    const long klo =
        static_cast<long>(std::ceil((h + 2.0 * step_g) * res));
    const double lo = -static_cast<double>(klo) * step_g;
    const std::size_t base = ni * static_cast<std::size_t>(cfg.reps);
    parallel_for(cfg.reps, cfg.threads, [&](long rj) {
      ReplicationRow& row = rep.rows[base + static_cast<std::size_t>(rj)];
      row.n = n;
      row.rep = rj;
      row.dn = h;
      row.seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(rj));
      try {
        std::vector<double> sample = draw_density_sample(cfg, n, row.seed);
        const double mx =
            *std::max_element(sample.begin(), sample.end());
        const long khi = static_cast<long>(
            std::ceil((mx + h + 2.0 * step_g) * res));
        const double hi = static_cast<double>(khi) * step_g;
        const std::size_t m = static_cast<std::size_t>(klo + khi) + 1;
        GridFunction x = kde(sample, k, h, {lo, hi}, m);
        integ_dev[base + static_cast<std::size_t>(rj)] =
            std::fabs(integral(x) - 1.0);
        DensityRearrangement dr = rearrange_density(x, 1e-6);
        const GridFunction& fx = dr.value;
        row.raw_error = fx.evaluate(t0) - f_t0;
        row.scaled_error = std::cbrt(static_cast<double>(n)) * row.raw_error;
        GridFunction truth_in = GridFunction::sample(x.interval(), x.size(), f);
        GridFunction truth_out =
            GridFunction::sample(fx.interval(), fx.size(), f);
        row.raw_sup = distance(x, truth_in, Norm::sup);
        row.rearranged_sup = distance(fx, truth_out, Norm::sup);
        // the finite grid cannot hold the tail beyond hi; rearranged
        // truth differs from sampled truth by at most this much
        const double tail_allow =
            std::exp(-x.interval().hi) *
            std::max(1.0, x.interval().length());
        row.never_worse_violation =
            never_worse_violated(x, fx, truth_in, truth_out, tail_allow);
      } catch (const Error&) {
        row.dropped = true;
      }
    });
  }
  summarize(rep);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    if (rep.rows[i].dropped) continue;
    rep.max_integral_deviation =
        std::max(rep.max_integral_deviation, integ_dev[i]);
    if (integ_dev[i] > 1e-6) ++rep.integral_violations;
  }

  if (cfg.limit_draw_count > 0) {
    LimitParams lp;
    lp.A = fp_t0;
    lp.Delta = -fp_t0 * k.moment(1);
    lp.c = std::pow(cfg.bandwidth_a, -1.5) * std::sqrt(f_t0);
    lp.window = cfg.limit_window;
    lp.grid_step = cfg.limit_grid_step;
    LimitDrawBatch batch = limit_draws(
        lp, k, static_cast<std::size_t>(cfg.limit_draw_count),
        derive_seed(cfg.master_seed, kDrawStream, 0), cfg.threads);
    rep.limit_draws.reserve(batch.draws.size());
    // the scaled error carries one extra factor of the bandwidth constant
    for (double v : batch.draws)
      rep.limit_draws.push_back(cfg.bandwidth_a * v);
    rep.limit_draws_requested = batch.requested;
    rep.limit_draws_dropped = batch.dropped;
  }
  compute_ks(rep);
  finalize_gates(rep, start);
  return rep;
}

Report run_experiment(const ExperimentConfig& cfg) {
  if (cfg.problem == "regression") return run_regression(cfg);
  if (cfg.problem == "density") return run_density(cfg);
  throw ConfigError("problem must be 'regression' or 'density', got '" +
                    cfg.problem + "'");
}

namespace {

std::FILE* open_or_throw(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("cannot open " + path + " for writing");
  return fp;
}

void close_or_throw(std::FILE* fp, const std::string& path) {
  if (std::fclose(fp) != 0) throw IoError("write failed: " + path);
}

}  // namespace

void write_report(const Report& rep, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());

  {
    const std::string path = dir + "/errors.csv";
    std::FILE* fp = open_or_throw(path);
    std::fputs("n,rep,seed,dn,raw_error,scaled_error\n", fp);
    for (const ReplicationRow& row : rep.rows)
      std::fprintf(fp, "%ld,%ld,%llu,%.17g,%.17g,%.17g\n", row.n, row.rep,
                   static_cast<unsigned long long>(row.seed), row.dn,
                   row.raw_error, row.scaled_error);
    close_or_throw(fp, path);
  }
  {
    const std::string path = dir + "/summary.csv";
    std::FILE* fp = open_or_throw(path);
    std::fputs("n,rmse,mean,sd\n", fp);
    for (const SummaryRow& s : rep.summary)
      std::fprintf(fp, "%ld,%.17g,%.17g,%.17g\n", s.n, s.rmse, s.mean, s.sd);
    close_or_throw(fp, path);
  }
  {
    const std::string path = dir + "/limit_draws.csv";
    std::FILE* fp = open_or_throw(path);
    std::fputs("draw\n", fp);
    for (double v : rep.limit_draws) std::fprintf(fp, "%.17g\n", v);
    close_or_throw(fp, path);
  }
  {
    const std::string path = dir + "/report.txt";
    std::FILE* fp = open_or_throw(path);
    const auto& cfg = rep.config;
    std::fprintf(fp, "problem=%s\n", cfg.problem.c_str());
    std::fprintf(fp, "truth=%s\n", cfg.truth.c_str());
    std::fprintf(fp, "regime=%s\n", cfg.regime.c_str());
    std::fprintf(fp, "kernel=%s\n", cfg.kernel.c_str());
    std::fprintf(fp, "t0=%.17g\n", cfg.t0);
    std::fprintf(fp, "bandwidth_a=%.17g\n", cfg.bandwidth_a);
    std::fputs("n_list=", fp);
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
      std::fprintf(fp, "%s%ld", i ? "," : "", cfg.n_list[i]);
    std::fputs("\n", fp);
    std::fprintf(fp, "reps=%ld\n", cfg.reps);
    std::fprintf(fp, "master_seed=%llu\n",
                 static_cast<unsigned long long>(cfg.master_seed));
    std::fprintf(fp, "grid_per_unit=%ld\n", cfg.grid_per_unit);
    std::fprintf(fp, "threads=%d\n", cfg.threads);
    std::fprintf(fp, "replications=%zu\n", rep.rows.size());
    std::fprintf(fp, "dropped_replications=%ld\n", rep.dropped);
    std::fprintf(fp, "limit_draws_requested=%zu\n",
                 rep.limit_draws_requested);
    std::fprintf(fp, "limit_draws_dropped=%zu\n", rep.limit_draws_dropped);
    std::fprintf(fp, "rate_slope=%.6f  # OLS on log(rmse of unscaled errors) vs log(n)\n",
                 rep.slope);
    std::fprintf(fp, "ks_scaled_errors_vs_limit_draws=%.6f\n", rep.ks);
    std::fprintf(fp, "never_worse_violations=%ld\n",
                 rep.never_worse_violations);
    if (cfg.problem == "density") {
      std::fprintf(fp, "max_integral_deviation=%.3g\n",
                   rep.max_integral_deviation);
      std::fprintf(fp, "integral_violations=%ld\n", rep.integral_violations);
    }
    for (const SummaryRow& s : rep.summary)
      std::fprintf(fp, "n=%ld rmse=%.8g mean=%.8g sd=%.8g\n", s.n, s.rmse,
                   s.mean, s.sd);
    for (const std::string& g : rep.gate_failures)
      std::fprintf(fp, "gate_failure=%s\n", g.c_str());
    std::fprintf(fp, "gate=%s\n", rep.gate_ok ? "PASS" : "FAIL");
    std::fprintf(fp, "elapsed_seconds=%.3f\n", rep.elapsed_seconds);
    close_or_throw(fp, path);
  }
}

}  // namespace rearr
