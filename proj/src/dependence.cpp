#include "rearr/dependence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

#include "rearr/fft.hpp"

namespace rearr {

DependenceModel DependenceModel::iid(double sigma) {
  DependenceModel m;
  m.kind = Kind::iid;
  m.sigma = sigma;
  return m;
}

DependenceModel DependenceModel::ar1(double rho, double sigma_e) {
  DependenceModel m;
  m.kind = Kind::ar1;
  m.rho = rho;
  m.sigma_e = sigma_e;
  return m;
}

DependenceModel DependenceModel::lrd(double d, int r) {
  DependenceModel m;
  m.kind = Kind::lrd;
  m.d = d;
  m.r = r;
  return m;
}

DependenceModel DependenceModel::lrd(double d, int r,
                                     std::function<double(double)> transform) {
  DependenceModel m = lrd(d, r);
  m.transform = std::move(transform);
  return m;
}

namespace {

void check_model(const DependenceModel& m) {
  switch (m.kind) {
    case DependenceModel::Kind::iid:
      if (!(m.sigma > 0.0)) throw DomainError("sigma must be > 0");
      return;
    case DependenceModel::Kind::ar1:
      if (!(std::fabs(m.rho) < 1.0))
        throw DomainError("ar1 needs |rho| < 1 for stationarity");
      if (!(m.sigma_e > 0.0)) throw DomainError("sigma_e must be > 0");
      return;
    case DependenceModel::Kind::lrd:
      if (!(m.d > 0.0 && m.d < 1.0))
        throw DomainError("lrd memory exponent d must be in (0,1)");
      if (m.r < 1 || m.r > 20)
        throw DomainError("transform rank r must be in 1..20");
      if (!(static_cast<double>(m.r) * m.d < 1.0))
        throw DomainError("lrd needs r*d < 1");
      return;
  }
  throw DomainError("unknown dependence kind");
}

}  // namespace

std::vector<double> generate(const DependenceModel& model, std::size_t n,
                             std::uint64_t seed) {
  check_model(model);
  if (n == 0) throw DomainError("need n >= 1");
  Rng rng(seed);
  std::vector<double> out(n);
  switch (model.kind) {
    case DependenceModel::Kind::iid:
      for (std::size_t i = 0; i < n; ++i) out[i] = model.sigma * rng.normal();
      return out;
    case DependenceModel::Kind::ar1: {
      // stationary start: Var x = sigma_e^2 / (1 - rho^2)
      double x = rng.normal() * model.sigma_e /
                 std::sqrt(1.0 - model.rho * model.rho);
      out[0] = x;
      for (std::size_t i = 1; i < n; ++i) {
        x = model.rho * x + model.sigma_e * rng.normal();
        out[i] = x;
      }
      return out;
    }
    case DependenceModel::Kind::lrd: {
      const double hurst = 1.0 - model.d / 2.0;
      std::vector<double> xi = fgn(n, hurst, rng);
      if (model.transform) {
        const double eta0 = hermite_coeff(model.transform, 0);
        for (std::size_t i = 0; i < n; ++i)
          out[i] = model.transform(xi[i]) - eta0;
      } else {
        // rank-r Hermite polynomial is already centered for r >= 1
        for (std::size_t i = 0; i < n; ++i)
          out[i] = hermite_value(model.r, xi[i]);
      }
      return out;
    }
  }
  throw DomainError("unknown dependence kind");
}

double fgn_autocov(double hurst, long k) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw DomainError("hurst must be in (0,1)");
  k = std::labs(k);
  if (k == 0) return 1.0;
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(static_cast<double>(k + 1), h2) -
                2.0 * std::pow(static_cast<double>(k), h2) +
                std::pow(static_cast<double>(k - 1), h2));
}

std::vector<double> fgn(std::size_t n, double hurst, Rng& rng) {
  if (n == 0) throw DomainError("need n >= 1");
  if (!(hurst >= 0.5 && hurst < 1.0))
    throw DomainError("hurst must be in [0.5, 1)");
  std::vector<double> out(n);
  if (hurst == 0.5) {
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.normal();
    return out;
  }
  const std::size_t n2 = std::bit_ceil(std::max<std::size_t>(n, 2));
  const std::size_t em = 2 * n2;  // circulant order
  std::vector<std::complex<double>> c(em);
  for (std::size_t j = 0; j < em; ++j) {
    const long k = static_cast<long>(j <= n2 ? j : em - j);
    c[j] = fgn_autocov(hurst, k);
  }
  fft_inplace(c);
  std::vector<double> lambda(em);
  double lmax = 0.0;
  for (std::size_t j = 0; j < em; ++j) {
    lambda[j] = c[j].real();
    lmax = std::max(lmax, lambda[j]);
  }
  for (std::size_t j = 0; j < em; ++j) {
    if (lambda[j] < -1e-8 * lmax)
      throw NumericError("circulant embedding produced a negative "
                         "eigenvalue; autocovariance is not embeddable");
    if (lambda[j] < 0.0) lambda[j] = 0.0;
  }
  // one complex normal per frequency, scaled so Re of the transform has
  // exactly the target autocovariance
  std::vector<std::complex<double>> z(em);
  const double inv_m = 1.0 / static_cast<double>(em);
  for (std::size_t j = 0; j < em; ++j) {
    const double s = std::sqrt(lambda[j] * inv_m);
    const double a = rng.normal();
    const double b = rng.normal();
    z[j] = std::complex<double>(s * a, s * b);
  }
  fft_inplace(z);
  for (std::size_t i = 0; i < n; ++i) out[i] = z[i].real();
  return out;
}

std::vector<double> fgn(std::size_t n, double hurst, std::uint64_t seed) {
  Rng rng(seed);
  return fgn(n, hurst, rng);
}

double hermite_value(int k, double x) {
  if (k < 0) throw DomainError("hermite order must be >= 0");
  if (k == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < k; ++j) {
    double next = x * cur - static_cast<double>(j) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

// Physicists' Gauss-Hermite nodes/weights (weight e^{-x^2}), Newton
// iteration on the orthonormal recurrence.  Roots come out descending in
// the first half; weights are symmetric.
void gauss_hermite(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pim4 = 0.75112554446494248;  // pi^{-1/4}
  const int half = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < half; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) -
          1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * x[0];
    else if (i == 3)
      z = 1.91 * z - 0.91 * x[1];
    else
      z = 2.0 * z - x[i - 2];
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-14) break;
    }
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (pp * pp);
    w[n - 1 - i] = w[i];
  }
}

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double pi = 3.1415926535897932384626433832795;
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

double gh_estimate(const std::function<double(double)>& g, int k, int n) {
  std::vector<double> x, w;
  gauss_hermite(n, x, w);
  const double sqrt2 = 1.4142135623730950488;
  const double inv_sqrt_pi = 0.56418958354775628695;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = sqrt2 * x[i];
    s += w[i] * g(u) * hermite_value(k, u);
  }
  return s * inv_sqrt_pi;
}

double gl_estimate(const std::function<double(double)>& g, int k, int panels,
                   const std::vector<double>& gx,
                   const std::vector<double>& gw) {
  // symmetric panels over [-12, 12] with an edge pinned at 0, so a kink
  // or jump of g at the origin never sits inside a panel
  const double bound = 12.0;
  const double width = 2.0 * bound / panels;
  const double inv_sqrt_2pi = 0.39894228040143267794;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = -bound + p * width;
    const double mid = a + 0.5 * width;
    double acc = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      const double u = mid + 0.5 * width * gx[i];
      acc += gw[i] * g(u) * hermite_value(k, u) *
             std::exp(-0.5 * u * u);
    }
    s += acc * 0.5 * width;
  }
  return s * inv_sqrt_2pi;
}

}  // namespace

double hermite_coeff(const std::function<double(double)>& g, int k) {
  if (!g) throw DomainError("hermite_coeff: null transform");
  if (k < 0 || k > 30) throw DomainError("hermite order must be in 0..30");
  const double tol = 1e-11;
  // the basis polynomial has L2 norm sqrt(k!), so quadrature round-off at
  // high order lands on that scale; judging convergence against it keeps a
  // coefficient that is tiny relative to sqrt(k!) from spinning forever
  const double basis_norm = std::exp(0.5 * std::lgamma(k + 1.0));
  double prev = gh_estimate(g, k, 64);
  for (int n = 128; n <= 256; n *= 2) {
    double cur = gh_estimate(g, k, n);
    const double scale = std::max({1.0, std::fabs(cur), basis_norm});
    if (std::fabs(cur - prev) <= tol * scale) return cur;
    prev = cur;
  }
  // rough transform: switch to panel quadrature against the density
  std::vector<double> gx, gw;
  gauss_legendre(16, gx, gw);
  prev = gl_estimate(g, k, 64, gx, gw);
  for (int panels = 128; panels <= 2048; panels *= 2) {
    double cur = gl_estimate(g, k, panels, gx, gw);
    const double scale = std::max({1.0, std::fabs(cur), basis_norm});
    if (std::fabs(cur - prev) <= tol * scale) return cur;
    prev = cur;
  }
  throw NumericError("hermite coefficient quadrature did not settle");
}

double long_run_variance(const DependenceModel& model) {
  check_model(model);
  switch (model.kind) {
    case DependenceModel::Kind::iid:
      return model.sigma * model.sigma;
    case DependenceModel::Kind::ar1: {
      const double om = 1.0 - model.rho;
      return model.sigma_e * model.sigma_e / (om * om);
    }
    case DependenceModel::Kind::lrd:
      throw DomainError(
          "long-run variance diverges under long-range dependence");
  }
  throw DomainError("unknown dependence kind");
}

SeriesStats series_stats(const std::vector<double>& x, int max_lag) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("series_stats needs n >= 2");
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n)
    throw DomainError("max_lag must be in [0, n)");
  SeriesStats st;
  double s = 0.0;
  for (double v : x) s += v;
  st.mean = s / static_cast<double>(n);
  st.acov.resize(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i + k < n; ++i)
      acc += (x[i] - st.mean) * (x[i + k] - st.mean);
    st.acov[k] = acc / static_cast<double>(n - k);
  }
  st.variance = st.acov[0];
  return st;
}

}  // namespace rearr
