#include "rearr.h"

#include <cmath>
#include <cstring>
#include <string>

#include "rearr/dependence.hpp"
#include "rearr/errors.hpp"
#include "rearr/experiments.hpp"
#include "rearr/grid.hpp"
#include "rearr/kernels.hpp"
#include "rearr/limitsim.hpp"
#include "rearr/rearrange.hpp"

struct rearr_grid {
  rearr::GridFunction fn;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
rearr_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return REARR_OK;
  } catch (const rearr::Error& e) {
    g_last_error = e.what();
    return static_cast<rearr_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return REARR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return REARR_ERR_INTERNAL;
  }
}

rearr_status fail(rearr_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

rearr::Norm parse_norm(const char* norm) {
  if (norm == nullptr) throw rearr::ConfigError("norm name is null");
  std::string s(norm);
  if (s == "sup") return rearr::Norm::sup;
  if (s == "l1") return rearr::Norm::l1;
  if (s == "l2") return rearr::Norm::l2;
  throw rearr::ConfigError("norm must be sup, l1 or l2, got '" + s + "'");
}

}  // namespace

extern "C" {

const char* rearr_version(void) { return "0.1.0"; }

const char* rearr_last_error(void) { return g_last_error.c_str(); }

rearr_status rearr_grid_create(double lo, double hi, const double* values,
                               size_t m, rearr_grid** out) {
  if (!values || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  *out = nullptr;
  return guarded([&] {
    std::vector<double> v(values, values + m);
    *out = new rearr_grid{rearr::GridFunction({lo, hi}, std::move(v))};
  });
}

void rearr_grid_free(rearr_grid* g) { delete g; }

size_t rearr_grid_size(const rearr_grid* g) { return g ? g->fn.size() : 0; }

double rearr_grid_lo(const rearr_grid* g) {
  return g ? g->fn.interval().lo : std::nan("");
}

double rearr_grid_hi(const rearr_grid* g) {
  return g ? g->fn.interval().hi : std::nan("");
}

rearr_status rearr_grid_copy_values(const rearr_grid* g, double* out,
                                    size_t capacity) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  if (capacity < g->fn.size())
    return fail(REARR_ERR_SHAPE, "output buffer smaller than grid");
  std::memcpy(out, g->fn.values().data(), g->fn.size() * sizeof(double));
  g_last_error.clear();
  return REARR_OK;
}

rearr_status rearr_grid_evaluate(const rearr_grid* g, double t, double* out) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] { *out = g->fn.evaluate(t); });
}

rearr_status rearr_grid_read_csv(const char* path, rearr_grid** out) {
  if (!path || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  *out = nullptr;
  return guarded([&] {
    *out = new rearr_grid{rearr::read_csv(path)};
  });
}

rearr_status rearr_grid_write_csv(const rearr_grid* g, const char* path) {
  if (!g || !path) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] { rearr::write_csv(g->fn, path); });
}

rearr_status rearr_distance(const rearr_grid* f, const rearr_grid* g,
                            const char* norm, double* out) {
  if (!f || !g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] { *out = rearr::distance(f->fn, g->fn, parse_norm(norm)); });
}

rearr_status rearr_integral(const rearr_grid* g, double* out) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] { *out = rearr::integral(g->fn); });
}

rearr_status rearr_upper_level_set(const rearr_grid* g, double u,
                                   double* out) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] { *out = rearr::upper_level_set(g->fn, u); });
}

rearr_status rearr_rearrange(const rearr_grid* g, rearr_grid** out) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  *out = nullptr;
  return guarded([&] {
    *out = new rearr_grid{rearr::rearrange_finite(g->fn)};
  });
}

rearr_status rearr_rearrange_density(const rearr_grid* g,
                                     double tail_mass_bound, rearr_grid** out,
                                     int* truncation_warning) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  *out = nullptr;
  return guarded([&] {
    rearr::DensityRearrangement dr =
        rearr::rearrange_density(g->fn, tail_mass_bound);
    if (truncation_warning)
      *truncation_warning = dr.truncation_warning ? 1 : 0;
    *out = new rearr_grid{std::move(dr.value)};
  });
}

rearr_status rearr_rearrange_local(const rearr_grid* g, double inner_lo,
                                   double inner_hi, double outer_lo,
                                   double outer_hi, double barrier,
                                   rearr_grid** out) {
  if (!g || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  *out = nullptr;
  return guarded([&] {
    rearr::TruncationWindow w;
    w.inner = {inner_lo, inner_hi};
    w.outer = {outer_lo, outer_hi};
    w.barrier = barrier;
    *out = new rearr_grid{rearr::rearrange_local(g->fn, w)};
  });
}

rearr_status rearr_generate_series(const char* regime, size_t n,
                                   uint64_t seed, double sigma, double rho,
                                   double sigma_e, double d, int r,
                                   double* out) {
  if (!regime || !out) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] {
    std::string reg(regime);
    rearr::DependenceModel model;
    if (reg == "iid") {
      model = rearr::DependenceModel::iid(sigma);
    } else if (reg == "ar1") {
      model = rearr::DependenceModel::ar1(rho, sigma_e);
    } else if (reg == "lrd") {
      model = rearr::DependenceModel::lrd(d, r);
    } else {
      throw rearr::ConfigError("regime must be iid, ar1 or lrd, got '" + reg +
                               "'");
    }
    std::vector<double> x = rearr::generate(model, n, seed);
    std::memcpy(out, x.data(), n * sizeof(double));
  });
}

rearr_status rearr_fgn(size_t n, double hurst, uint64_t seed, double* out) {
  if (!out) return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] {
    std::vector<double> x = rearr::fgn(n, hurst, seed);
    std::memcpy(out, x.data(), n * sizeof(double));
  });
}

rearr_status rearr_limit_draws(double A, double Delta, double c,
                               const char* process, double beta,
                               const char* kernel, double window,
                               double grid_step, size_t n_draws,
                               uint64_t seed, int threads, double* out,
                               size_t* dropped) {
  if (!process || !kernel || !out)
    return fail(REARR_ERR_DOMAIN, "null pointer");
  return guarded([&] {
    rearr::LimitParams lp;
    lp.A = A;
    lp.Delta = Delta;
    lp.c = c;
    std::string proc(process);
    if (proc == "brownian") {
      lp.process = rearr::LimitParams::Process::brownian;
    } else if (proc == "fbm") {
      lp.process = rearr::LimitParams::Process::fbm;
    } else {
      throw rearr::ConfigError("process must be brownian or fbm, got '" +
                               proc + "'");
    }
    lp.beta = beta;
    lp.window = window;
    lp.grid_step = grid_step;
    rearr::Kernel k = rearr::Kernel::parse(kernel);
    rearr::LimitDrawBatch batch =
        rearr::limit_draws(lp, k, n_draws, seed, threads);
    std::size_t nd = 0;
    std::size_t j = 0;
    for (const rearr::LimitDraw& dr : batch.all) {
      out[j++] = dr.dropped ? std::nan("") : dr.value;
      if (dr.dropped) ++nd;
    }
    if (dropped) *dropped = nd;
  });
}

rearr_status rearr_experiment_run(const char* config_path,
                                  const char* out_dir) {
  if (!config_path || !out_dir) return fail(REARR_ERR_DOMAIN, "null pointer");
  bool gate_ok = true;
  std::string gate_msg;
  rearr_status s = guarded([&] {
    rearr::ExperimentConfig cfg = rearr::parse_config_file(config_path);
    rearr::Report rep = rearr::run_experiment(cfg);
    rearr::write_report(rep, out_dir);
    gate_ok = rep.gate_ok;
    if (!gate_ok) {
      gate_msg = "gate failure:";
      for (const std::string& g : rep.gate_failures) gate_msg += " " + g + ";";
    }
  });
  if (s != REARR_OK) return s;
  if (!gate_ok) return fail(REARR_ERR_GATE, gate_msg.c_str());
  return REARR_OK;
}

}  // extern "C"
