#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rearr/grid.hpp"

namespace rearr {

enum class KernelId { epanechnikov, quartic, triweight, asymmetric_test };

/// Polynomial kernel supported on [-1, 1].  Stores the coefficients of
/// k, k', and the antiderivatives of k and of u*k(u) (both anchored so
/// they vanish at -1), which is what exact piecewise integration of the
/// smoothers needs.
class Kernel {
 public:
  static Kernel make(KernelId id);
  static Kernel parse(const std::string& name);  // ConfigError if unknown

  KernelId id() const { return id_; }
  const std::string& name() const { return name_; }

  double operator()(double u) const;  // 0 outside [-1, 1]
  double deriv(double u) const;       // 0 outside [-1, 1]

  /// cdf(u) = integral of k over [-1, u], clamped at the support edges.
  double cdf(double u) const;
  /// xcdf(u) = integral of t*k(t) over [-1, u], clamped likewise.
  double xcdf(double u) const;

  /// Cached integral of u^j k(u), j in {0, 1, 2}.
  double moment(int j) const;

 private:
  Kernel(KernelId id, std::string name, std::vector<double> coeffs);
  KernelId id_;
  std::string name_;
  std::vector<double> c_, dc_, C0_, C1_;
  double mom_[3];
};

/// Integral of u^j k(u) over [-1, 1] by composite Simpson with panel
/// doubling until two refinements agree to 1e-12 (relative).
double kernel_moment(const Kernel& k, int j);

struct BandwidthRule {
  enum class Kind { iid, mixing, lrd };
  Kind kind = Kind::iid;
  double a = 1.0;   // leading constant
  double d = 0.0;   // lrd memory exponent
  int r = 1;        // lrd transform rank
};

/// Deterministic bandwidth at sample size n.
///   iid / mixing:  a * n^(-1/3)
///   lrd        :   (sqrt(L)/a)^(2/(2+rd)) * n^(-rd/(2+rd)),
///                  L = 2 / (r! (1-rd)(2-rd)),  requires rd < 1.
double bandwidth(const BandwidthRule& rule, long n);

/// Regression smoother for data observed at i/n, i = 1..n: the kernel is
/// convolved against the piecewise-linear interpolant of the points,
/// extended flat outside [1/n, 1].  Geometry (kernel, h, output grid) is
/// precomputed into sparse per-node weights so repeated series at the
/// same n cost one sparse mat-vec each.
class GasserMullerPlan {
 public:
  GasserMullerPlan(std::size_t n, const Kernel& k, double h, Interval out,
                   std::size_t m);
  GridFunction apply(const std::vector<double>& y) const;
  std::size_t data_size() const { return n_; }

  /// Flags output nodes outside [1/n + h, 1 - h]: those lean on the flat
  /// extension of the interpolant and carry edge bias.  Informational;
  /// such nodes are computed, not rejected.
  const std::vector<std::uint8_t>& boundary_flags() const { return bflag_; }

 private:
  std::size_t n_, m_;
  Interval out_;
  std::vector<std::uint32_t> col_;
  std::vector<double> wgt_;
  std::vector<std::size_t> row_off_;
  std::vector<std::uint8_t> bflag_;
};

/// One-shot convenience wrapper over GasserMullerPlan.
GridFunction gasser_muller(const std::vector<double>& y, const Kernel& k,
                           double h, Interval out, std::size_t m);

/// Kernel density estimate of a sample on the given output grid.
GridFunction kde(const std::vector<double>& sample, const Kernel& k,
                 double h, Interval out, std::size_t m);

}  // namespace rearr
