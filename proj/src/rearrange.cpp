#include "rearr/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rearr {

double upper_level_set(const GridFunction& f, double u) {
  std::size_t count = 0;
  for (double v : f.values())
    if (v > u) ++count;
  return f.step() * static_cast<double>(count);
}

namespace {

// Level-set inversion.  Output slot j wants the smallest sample value u
// with measure{f > u} <= j*step, i.e. #{v > u} <= j, i.e.
// #{v <= u} >= m - j.  Scanning cumulative counts over the distinct
// ascending values does that with integer comparisons only, so ties and
// rounding cannot reorder anything.
std::vector<double> invert_level_sets(const std::vector<double>& values) {
  const std::size_t m = values.size();
  std::vector<double> asc(values);
  std::sort(asc.begin(), asc.end());
  std::vector<double> distinct;
  std::vector<std::size_t> cum;  // #{v <= distinct[k]}
  distinct.reserve(m);
  cum.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (distinct.empty() || asc[i] != distinct.back()) {
      distinct.push_back(asc[i]);
      cum.push_back(i + 1);
    } else {
      cum.back() = i + 1;
    }
  }
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t need = m - j;
    std::size_t k = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), need) - cum.begin());
    out[j] = distinct[k];
  }
  return out;
}

}  // namespace

GridFunction rearrange_finite(const GridFunction& f) {
  return GridFunction(f.interval(), invert_level_sets(f.values()));
}

GridFunction sort_oracle(const GridFunction& f) {
  std::vector<double> v(f.values());
  std::stable_sort(v.begin(), v.end(), std::greater<double>());
  return GridFunction(f.interval(), std::move(v));
}

DensityRearrangement rearrange_density(const GridFunction& f,
                                       double tail_mass_bound) {
  if (!(tail_mass_bound >= 0.0))
    throw DomainError("tail_mass_bound must be >= 0");
  const auto& v = f.values();
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] < 0.0)
      throw DomainError("density value " + std::to_string(v[j]) +
                        " at node " + std::to_string(j) + " is negative");
  }
  DensityRearrangement out{
      GridFunction({0.0, f.interval().length()}, invert_level_sets(v)),
      false};
  // mass still sitting in the final cell means the grid cut the input off
  if (v.back() * f.step() > tail_mass_bound) out.truncation_warning = true;
  return out;
}

namespace {

struct NodeRange {  // node indices [first, last], empty iff first > last
  std::ptrdiff_t first = 0;
  std::ptrdiff_t last = -1;
  bool empty() const { return first > last; }
};

// Nodes strictly between a and b.  Step-relative slack keeps window edges
// that coincide with nodes excluded.
NodeRange nodes_strictly_between(const GridFunction& f, double a, double b) {
  const double tol = 1e-9 * f.step();
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(f.size());
  std::ptrdiff_t first = 0;
  while (first < m && f.node(static_cast<std::size_t>(first)) <= a + tol)
    ++first;
  std::ptrdiff_t last = m - 1;
  while (last >= 0 && f.node(static_cast<std::size_t>(last)) >= b - tol)
    --last;
  return {first, last};
}

// Nodes with t > a, through the end of the domain.
NodeRange nodes_right_of(const GridFunction& f, double a) {
  const double tol = 1e-9 * f.step();
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(f.size());
  std::ptrdiff_t first = 0;
  while (first < m && f.node(static_cast<std::size_t>(first)) <= a + tol)
    ++first;
  return {first, m - 1};
}

// Nodes with t < b, from the start of the domain.
NodeRange nodes_left_of(const GridFunction& f, double b) {
  const double tol = 1e-9 * f.step();
  std::ptrdiff_t last = static_cast<std::ptrdiff_t>(f.size()) - 1;
  while (last >= 0 && f.node(static_cast<std::size_t>(last)) >= b - tol)
    --last;
  return {0, last};
}

// Nodes with a <= t <= b, edges included when they land on nodes.
NodeRange nodes_within(const GridFunction& f, double a, double b) {
  const double tol = 1e-9 * f.step();
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(f.size());
  std::ptrdiff_t first = 0;
  while (first < m && f.node(static_cast<std::size_t>(first)) < a - tol)
    ++first;
  std::ptrdiff_t last = m - 1;
  while (last >= 0 && f.node(static_cast<std::size_t>(last)) > b + tol)
    --last;
  return {first, last};
}

double min_on(const GridFunction& f, const NodeRange& r) {
  double m = std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t j = r.first; j <= r.last; ++j)
    m = std::min(m, f.value(static_cast<std::size_t>(j)));
  return m;
}

double max_on(const GridFunction& f, const NodeRange& r) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::ptrdiff_t j = r.first; j <= r.last; ++j)
    m = std::max(m, f.value(static_cast<std::size_t>(j)));
  return m;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

GridFunction rearrange_local(const GridFunction& f,
                             const TruncationWindow& w) {
  if (!(w.barrier > 0.0)) throw DomainError("barrier must be > 0");
  if (!(w.inner.lo < w.inner.hi) || !(w.outer.lo < w.outer.hi))
    throw ShapeError("window intervals need lo < hi");
  if (w.inner.lo < w.outer.lo || w.inner.hi > w.outer.hi)
    throw ShapeError("inner window must sit inside the outer window");
  const Interval dom = f.interval();
  const double tol = 1e-9 * f.step();
  if (w.outer.lo < dom.lo - tol || w.outer.hi > dom.hi + tol)
    throw ShapeError("outer window must sit inside the grid interval");

  // exceedance bands; empty bands are vacuously fine, and the first
  // failing one names the region and the observed extreme
  const double M = w.barrier;
  NodeRange r1 = nodes_strictly_between(f, w.outer.lo, w.inner.hi);
  if (!r1.empty()) {
    double v = min_on(f, r1);
    if (!(v >= -M))
      throw PreconditionError("inf on (outer.lo, inner.hi) is " + fmt(v) +
                              ", below the lower barrier -" + fmt(M));
  }
  NodeRange r2 = nodes_right_of(f, w.outer.hi);
  if (!r2.empty()) {
    double v = max_on(f, r2);
    if (!(v <= -M))
      throw PreconditionError("sup right of outer.hi is " + fmt(v) +
                              ", above the required ceiling -" + fmt(M));
  }
  NodeRange r3 = nodes_left_of(f, w.outer.lo);
  if (!r3.empty()) {
    double v = min_on(f, r3);
    if (!(v >= M))
      throw PreconditionError("inf left of outer.lo is " + fmt(v) +
                              ", below the required floor " + fmt(M));
  }
  NodeRange r4 = nodes_strictly_between(f, w.inner.lo, w.outer.hi);
  if (!r4.empty()) {
    double v = max_on(f, r4);
    if (!(v <= M))
      throw PreconditionError("sup on (inner.lo, outer.hi) is " + fmt(v) +
                              ", above the upper barrier " + fmt(M));
  }

  NodeRange ro = nodes_within(f, w.outer.lo, w.outer.hi);
  NodeRange ri = nodes_within(f, w.inner.lo, w.inner.hi);
  if (ro.empty() || ri.empty() || ri.first < ro.first || ri.last > ro.last)
    throw ShapeError("window does not enclose any grid nodes");
  if (ri.last - ri.first + 1 < 2)
    throw ShapeError("inner window covers fewer than 2 grid nodes");

  std::vector<double> sub(f.values().begin() + ro.first,
                          f.values().begin() + ro.last + 1);
  std::vector<double> rearranged = invert_level_sets(sub);
  std::vector<double> kept(rearranged.begin() + (ri.first - ro.first),
                           rearranged.begin() + (ri.last - ro.first) + 1);
  Interval out_iv{f.node(static_cast<std::size_t>(ri.first)),
                  f.node(static_cast<std::size_t>(ri.last))};
  return GridFunction(out_iv, std::move(kept));
}

}  // namespace rearr
