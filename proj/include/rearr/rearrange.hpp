#pragma once

#include "rearr/grid.hpp"

namespace rearr {

/// Truncation geometry for local rearrangement: inner ⊂ outer, and the
/// input must clear the barrier level ±M outside/inside the bands (see
/// rearrange_local).
struct TruncationWindow {
  Interval inner;
  Interval outer;
  double barrier = 1.0;
};

/// Lebesgue measure of the upper level set {t : f(t) > u} under the cell
/// convention: step * #{nodes with value > u}.  As a function of u it is
/// decreasing and right-continuous, with a jump of measure{f = u} at
/// every flat level.
double upper_level_set(const GridFunction& f, double u);

/// Decreasing rearrangement on f's own interval, computed by inverting
/// the level-set measure: output node j gets
///   inf{u among f's values : measure{f > u} <= j * step}.
/// Node-for-node this equals a descending sort of the values (the cell
/// convention makes prefix measures k*step match node anchors exactly).
GridFunction rearrange_finite(const GridFunction& f);

/// Independent cross-check: descending std::stable_sort of the values.
GridFunction sort_oracle(const GridFunction& f);

struct DensityRearrangement {
  GridFunction value;
  // set when the last node's cell still carries more mass than the
  // caller's declared tail bound, i.e. the grid truncated the input
  bool truncation_warning = false;
};

/// Rearrangement of a nonnegative function (density estimate) onto the
/// same-length grid anchored at 0.  Negative input values are a domain
/// error.
DensityRearrangement rearrange_density(const GridFunction& f,
                                       double tail_mass_bound);

/// Rearrange f over the outer window and keep the inner part:
/// values on w.outer's sub-grid are rearranged decreasingly and the
/// restriction to w.inner's sub-grid is returned.
///
/// Preconditions on f (checked, PreconditionError when violated) make the
/// result stable under window enlargement:
///   inf f on (outer.lo, inner.hi)  >= -barrier
///   sup f on (outer.hi, domain.hi] <= -barrier
///   inf f on [domain.lo, outer.lo) >= +barrier
///   sup f on (inner.lo, outer.hi)  <= +barrier
GridFunction rearrange_local(const GridFunction& f,
                             const TruncationWindow& w);

}  // namespace rearr
