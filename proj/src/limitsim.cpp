#include "rearr/limitsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rearr/dependence.hpp"
#include "rearr/parallel.hpp"
#include "rearr/rng.hpp"

namespace rearr {

GridFunction partial_sum_process(const std::vector<double>& eps,
                                 std::size_t zero_index, double n,
                                 double sigma_n) {
  if (eps.size() < 2) throw ShapeError("need at least 2 disturbances");
  if (zero_index >= eps.size())
    throw DomainError("zero_index outside the disturbance array");
  if (!(n > 0.0)) throw DomainError("n must be > 0");
  if (!(sigma_n > 0.0)) throw DomainError("sigma_n must be > 0");
  const std::size_t m = eps.size();
  const std::ptrdiff_t z = static_cast<std::ptrdiff_t>(zero_index);
  std::vector<double> vals(m);
  vals[z] = 0.5 * eps[z];
  for (std::ptrdiff_t i = z + 1; i < static_cast<std::ptrdiff_t>(m); ++i)
    vals[i] = vals[i - 1] + eps[i];
  if (z > 0) {
    vals[z - 1] = -0.5 * eps[z];
    for (std::ptrdiff_t i = z - 2; i >= 0; --i)
      vals[i] = vals[i + 1] - eps[i + 1];
  }
  for (double& v : vals) v /= sigma_n;
  const double lo = (static_cast<double>(-z) + 0.5) / n;
  const double hi =
      (static_cast<double>(static_cast<std::ptrdiff_t>(m) - 1 - z) + 0.5) / n;
  return GridFunction({lo, hi}, std::move(vals));
}

GridFunction local_empirical_process(const std::vector<double>& sample,
                                     double t0, double delta,
                                     const std::function<double(double)>& F,
                                     double span, std::size_t m) {
  if (sample.empty()) throw DomainError("empty sample");
  if (!(delta > 0.0)) throw DomainError("delta must be > 0");
  if (!(span > 0.0)) throw DomainError("span must be > 0");
  if (!F) throw DomainError("null distribution function");
  const double n = static_cast<double>(sample.size());
  const double p = F(t0 + delta) - F(t0);
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("F(t0+delta) - F(t0) must lie in (0,1), got " +
                      std::to_string(p));
  const double sigma = std::sqrt(n * p * (1.0 - p));
  std::vector<double> s(sample);
  std::sort(s.begin(), s.end());
  auto count_le = [&](double x) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) -
                               s.begin());
  };
  const double base = count_le(t0);
  GridFunction shell({-span, span}, std::vector<double>(m, 0.0));
  std::vector<double> vals(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double u = shell.node(j);
    const double x = t0 + u * delta;
    vals[j] = (count_le(x) - base - n * (F(x) - F(t0))) / sigma;
  }
  return GridFunction({-span, span}, std::move(vals));
}

GridFunction smoothed_disturbance(const GridFunction& w, const Kernel& k,
                                  double c) {
  const double st = w.step();
  if (!(st < 1.0))
    throw ShapeError("path grid step must be below the kernel radius 1");
  // stencil over cells [l*st, (l+1)*st] covering the kernel support
  const long l_lo = static_cast<long>(std::floor(-1.0 / st + 1e-9));
  const long l_hi = static_cast<long>(std::ceil(1.0 / st - 1e-9)) - 1;
  const long j_lo = l_lo;       // stencil taps j multiply w_{i-j}
  const long j_hi = l_hi + 1;
  std::vector<double> stencil(static_cast<std::size_t>(j_hi - j_lo + 1), 0.0);
  for (long l = l_lo; l <= l_hi; ++l) {
    const double a = std::max(static_cast<double>(l) * st, -1.0);
    const double b = std::min(static_cast<double>(l + 1) * st, 1.0);
    if (!(b > a)) continue;
    // integral of k' and of k'(u)*(u - l*st) over [a, b]; w(s-u) is
    // linear there, so these two numbers carry the whole segment
    const double p = k(b) - k(a);
    const double q = (b - l * st) * k(b) - (a - l * st) * k(a) -
                     (k.cdf(b) - k.cdf(a));
    stencil[static_cast<std::size_t>(l - j_lo)] += p - q / st;
    stencil[static_cast<std::size_t>(l + 1 - j_lo)] += q / st;
  }
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(w.size());
  const std::ptrdiff_t i_first = j_hi;
  const std::ptrdiff_t i_last = m - 1 + j_lo;
  if (i_last - i_first + 1 < 2)
    throw ShapeError("path interval too short for the kernel support");
  std::vector<double> vals(static_cast<std::size_t>(i_last - i_first + 1));
  const auto& pv = w.values();
  for (std::ptrdiff_t i = i_first; i <= i_last; ++i) {
    double acc = 0.0;
    for (long j = j_lo; j <= j_hi; ++j)
      acc += stencil[static_cast<std::size_t>(j - j_lo)] *
             pv[static_cast<std::size_t>(i - j)];
    vals[static_cast<std::size_t>(i - i_first)] = c * acc;
  }
  Interval iv{w.node(static_cast<std::size_t>(i_first)),
              w.node(static_cast<std::size_t>(i_last))};
  return GridFunction(iv, std::move(vals));
}

namespace {

void check_limit_params(const LimitParams& p) {
  if (!(p.A < 0.0))
    throw DomainError("drift slope A must be negative (decreasing trend)");
  if (!(p.c >= 0.0)) throw DomainError("disturbance scale c must be >= 0");
  if (!(p.window > 2.0))
    throw DomainError("window must exceed 2 so [-1,1] fits inside it");
  if (!(p.grid_step > 0.0 && p.grid_step <= 0.5))
    throw DomainError("grid_step must be in (0, 0.5]");
  if (p.process == LimitParams::Process::fbm &&
      !(p.beta > 0.5 && p.beta < 1.0))
    throw DomainError("fbm index beta must be in (0.5, 1)");
}

}  // namespace

LimitDraw limit_draw(const LimitParams& p, const Kernel& k,
                     std::uint64_t seed) {
  check_limit_params(p);
  Rng rng(seed);
  double cw = p.window;
  for (int attempt = 0; attempt <= 4; ++attempt) {
    const double st = p.grid_step;
    const long half = static_cast<long>(std::ceil((cw + 1.0) / st - 1e-9));
    const std::size_t n_inc = static_cast<std::size_t>(2 * half);
    const double hurst =
        p.process == LimitParams::Process::brownian ? 0.5 : p.beta;
    // unit-variance increments scaled to the grid step; w(0) = 0 sits at
    // the middle node
    std::vector<double> xi = fgn(n_inc, hurst, rng);
    const double scale = std::pow(st, hurst);
    std::vector<double> path(n_inc + 1);
    path[static_cast<std::size_t>(half)] = 0.0;
    for (long i = half + 1; i <= 2 * half; ++i)
      path[i] = path[i - 1] + scale * xi[static_cast<std::size_t>(i - 1)];
    for (long i = half - 1; i >= 0; --i)
      path[i] = path[i + 1] - scale * xi[static_cast<std::size_t>(i)];
    const double ext = static_cast<double>(half) * st;
    GridFunction w({-ext, ext}, std::move(path));

    GridFunction v = smoothed_disturbance(w, k, p.c);
    std::vector<double> yv(v.size());
    for (std::size_t j = 0; j < v.size(); ++j)
      yv[j] = p.A * v.node(j) + v.value(j);
    GridFunction y(v.interval(), std::move(yv));

    TruncationWindow win{{-1.0, 1.0},
                         {-cw / 2.0, cw / 2.0},
                         std::fabs(p.A) * cw / 4.0};
    try {
      GridFunction out = rearrange_local(y, win);
      return {out.evaluate(0.0) + p.Delta, attempt, cw, false};
    } catch (const PreconditionError&) {
      cw *= 2.0;  // path exits the barrier too slowly; widen and redraw
    }
  }
  LimitDraw d;
  d.value = std::numeric_limits<double>::quiet_NaN();
  d.doublings = 4;
  d.final_window = cw / 2.0;  // last window actually simulated
  d.dropped = true;
  return d;
}

LimitDrawBatch limit_draws(const LimitParams& p, const Kernel& k,
                           std::size_t n_draws, std::uint64_t seed,
                           int threads) {
  check_limit_params(p);
  std::vector<LimitDraw> slots(n_draws);
  parallel_for(static_cast<long>(n_draws), threads, [&](long j) {
    slots[static_cast<std::size_t>(j)] =
        limit_draw(p, k, derive_seed(seed, 0x4C44, static_cast<std::uint64_t>(j)));
  });
  LimitDrawBatch batch;
  batch.requested = n_draws;
  batch.draws.reserve(n_draws);
  for (const LimitDraw& d : slots) {
    batch.total_doublings += d.doublings;
    if (d.dropped)
      ++batch.dropped;
    else
      batch.draws.push_back(d.value);
  }
  batch.all = std::move(slots);
  return batch;
}

}  // namespace rearr
