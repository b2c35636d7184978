#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rearr/errors.hpp"
#include "rearr/rng.hpp"

namespace rearr {

/// Disturbance model for the simulated regressions.
///   iid : sigma * Z_i
///   ar1 : X_i = rho X_{i-1} + sigma_e Z_i, started stationary
///   lrd : g(xi_i) - E g(xi), xi fractional Gaussian noise with
///         Hurst index 1 - d/2; g defaults to the rank-r Hermite
///         polynomial.
struct DependenceModel {
  enum class Kind { iid, ar1, lrd };
  Kind kind = Kind::iid;
  double sigma = 1.0;
  double rho = 0.0;
  double sigma_e = 1.0;
  double d = 0.0;
  int r = 1;
  std::function<double(double)> transform;  // empty -> Hermite rank r

  static DependenceModel iid(double sigma);
  static DependenceModel ar1(double rho, double sigma_e);
  static DependenceModel lrd(double d, int r);
  static DependenceModel lrd(double d, int r,
                             std::function<double(double)> transform);
};

std::vector<double> generate(const DependenceModel& model, std::size_t n,
                             std::uint64_t seed);

/// Fractional Gaussian noise, unit variance, via circulant embedding of
/// the autocovariance (exact in distribution; the embedding for fGn has
/// nonnegative eigenvalues).  hurst = 0.5 degenerates to iid normals.
std::vector<double> fgn(std::size_t n, double hurst, std::uint64_t seed);
std::vector<double> fgn(std::size_t n, double hurst, Rng& rng);

/// Autocovariance of unit-variance fGn at lag k.
double fgn_autocov(double hurst, long k);

/// Probabilists' Hermite polynomial He_k(x).
double hermite_value(int k, double x);

/// Coefficient E[g(Z) He_k(Z)] for standard normal Z.  Gauss-Hermite
/// with node doubling; falls back to composite Gauss-Legendre against
/// the normal density on [-12, 12] (panel edge pinned at 0) when g is
/// too rough for the Hermite rule, e.g. sign-like transforms.
/// Absolute accuracy scales with the basis norm sqrt(k!): a result that
/// is negligible against sqrt(k!) is returned as converged even if its
/// own digits are noise, since He_k values (and hence round-off) grow on
/// that scale.  Orders 0..30 are supported.
double hermite_coeff(const std::function<double(double)>& g, int k);

/// Sum of the autocovariances.  Defined for iid and ar1; diverges under
/// lrd (domain error).
double long_run_variance(const DependenceModel& model);

struct SeriesStats {
  double mean = 0.0;
  double variance = 0.0;            // = acov[0]
  std::vector<double> acov;         // centered, lag 0..max_lag
};
SeriesStats series_stats(const std::vector<double>& x, int max_lag);

}  // namespace rearr
