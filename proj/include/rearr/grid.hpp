#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "rearr/errors.hpp"

namespace rearr {

/// Closed bounded interval [lo, hi], lo < hi, both finite.
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
};

enum class Norm { sup, l1, l2 };

/// Function sampled on a uniform grid over an interval: m >= 2 nodes at
/// t_j = lo + (hi-lo) * j/(m-1), spacing step = (hi-lo)/(m-1).
///
/// Measure convention used by everything downstream: node j owns the cell
/// [t_j - step/2, t_j + step/2].  Every node carries weight `step` (the
/// measured domain is the interval padded by step/2 at each end, total
/// mass length+step).  Equal cell weights are what make the rearrangement
/// operator agree with a descending sort node-for-node and keep its
/// contraction and integral-preservation properties exact rather than
/// O(step)-approximate; see the distance() and integral() notes.
class GridFunction {
 public:
  GridFunction(Interval iv, std::vector<double> values);

  /// Sample f at the m grid nodes of iv.
  static GridFunction sample(Interval iv, std::size_t m,
                             const std::function<double(double)>& f);

  const Interval& interval() const { return iv_; }
  std::size_t size() const { return values_.size(); }
  double step() const { return step_; }
  double node(std::size_t j) const;
  const std::vector<double>& values() const { return values_; }
  double value(std::size_t j) const { return values_[j]; }

  /// Piecewise-linear evaluation.  Node reads at the interval ends are
  /// exact; t outside [lo, hi] (beyond a few ulp of slack) is a domain
  /// error.
  double evaluate(double t) const;

  double min_value() const;
  double max_value() const;

 private:
  Interval iv_;
  std::vector<double> values_;
  double step_;
};

/// sup / L1 / L2 distance between two functions on the same grid.
/// Node j carries weight step in the integral norms (uniform cell rule).
/// Uniform weights, not trapezoid: halving the end weights would break
/// the exact contraction property of rearrangement (rearrangement can
/// move a large end-node discrepancy to an interior node, which the
/// trapezoid rule then over-counts).
double distance(const GridFunction& f, const GridFunction& g, Norm norm);

/// Integral over the measured domain: step * sum of node values.
/// Exact for degree <= 1 polynomials and invariant under any permutation
/// of the node values, so rearrangement preserves it.
double integral(const GridFunction& f);

/// CSV I/O, header "t,value", %.17g (lossless double round-trip).
GridFunction read_csv(const std::string& path);
void write_csv(const GridFunction& f, const std::string& path);

}  // namespace rearr
