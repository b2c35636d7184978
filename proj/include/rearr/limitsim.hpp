#pragma once

#include <cstdint>
#include <functional>

#include "rearr/grid.hpp"
#include "rearr/kernels.hpp"
#include "rearr/rearrange.hpp"

namespace rearr {

/// Two-sided normalized partial-sum path on the shifted grid
/// s_i = (i - zero_index + 1/2) / n:
///   value(i) = ( eps_0/2 + sum of eps over (0, i] ) / sigma_n  for i >= 0
///   value(i) = (-eps_0/2 - sum of eps over (i, 0) ) / sigma_n  for i < 0
/// where index 0 of the path sits at eps[zero_index] (that disturbance is
/// split symmetrically across the origin).
GridFunction partial_sum_process(const std::vector<double>& eps,
                                 std::size_t zero_index, double n,
                                 double sigma_n);

/// Centered, normalized local empirical process of a sample around t0:
///   w(s) = ( #{X <= t0 + s*delta} - #{X <= t0} - n*(F(t0+s*delta)-F(t0)) )
///          / sqrt(n * p * (1-p)),   p = F(t0+delta) - F(t0),
/// sampled at m nodes with s in [-span, span].
GridFunction local_empirical_process(const std::vector<double>& sample,
                                     double t0, double delta,
                                     const std::function<double(double)>& F,
                                     double span, std::size_t m);

/// Smoothed disturbance field: v(s) = c * integral k'(u) w(s-u) du, with
/// w the piecewise-linear interpolant of the given path.  Exact per-cell
/// integration collapses to a fixed stencil on the path values, so the
/// result is defined on the path's interval shrunk by 1 on both sides
/// (the kernel support radius).
GridFunction smoothed_disturbance(const GridFunction& w, const Kernel& k,
                                  double c);

struct LimitParams {
  double A = -1.0;        // drift slope, must be < 0
  double Delta = 0.0;     // deterministic offset added to every draw
  double c = 1.0;         // disturbance scale, >= 0
  enum class Process { brownian, fbm } process = Process::brownian;
  double beta = 0.75;     // fbm Hurst index, in (0.5, 1)
  double window = 8.0;    // initial full width of the outer window
  double grid_step = 1.0 / 256.0;
};

struct LimitDraw {
  double value = 0.0;
  int doublings = 0;      // window enlargements that were needed
  double final_window = 0.0;
  bool dropped = false;   // true when 4 doublings still failed
};

/// One draw from the rearranged limit law: simulate the drift-plus-
/// disturbance field y(s) = A s + v(s) on [-(window+1), window+1],
/// locally rearrange it over [-window/2, window/2] with barrier
/// |A| window/4 keeping [-1, 1], and read the value at s = 0, plus
/// Delta.  When the barrier preconditions fail the window is doubled
/// (fresh path from the continuing stream), up to 4 times.
LimitDraw limit_draw(const LimitParams& p, const Kernel& k,
                     std::uint64_t seed);

struct LimitDrawBatch {
  std::vector<double> draws;   // surviving draws only
  std::vector<LimitDraw> all;  // one slot per requested draw, in order
  std::size_t requested = 0;
  std::size_t dropped = 0;
  long total_doublings = 0;
};

/// n_draws independent draws; draw j uses a seed derived from (seed, j),
/// so the batch is reproducible and order-independent at any thread
/// count.
LimitDrawBatch limit_draws(const LimitParams& p, const Kernel& k,
                           std::size_t n_draws, std::uint64_t seed,
                           int threads = 1);

}  // namespace rearr
