#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "rearr/kernels.hpp"

using namespace rearr;

namespace {

// reference quadrature at 10x the resolution of the library's own
// tolerance target: composite Simpson with a fixed huge panel count
double simpson_moment(const Kernel& k, int j, int panels = 1 << 17) {
  const double a = -1.0, b = 1.0;
  const double w = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double x0 = a + i * w, x2 = a + (i + 1) * w, x1 = 0.5 * (x0 + x2);
    auto f = [&](double u) { return std::pow(u, j) * k(u); };
    s += (w / 6.0) * (f(x0) + 4.0 * f(x1) + f(x2));
  }
  return s;
}

std::vector<Kernel> all_kernels() {
  return {Kernel::make(KernelId::epanechnikov),
          Kernel::make(KernelId::quartic),
          Kernel::make(KernelId::triweight),
          Kernel::make(KernelId::asymmetric_test)};
}

}  // namespace

TEST_CASE("kernels are densities with compact support") {
  for (const Kernel& k : all_kernels()) {
    CHECK(std::fabs(k.moment(0) - 1.0) < 1e-10);
    CHECK(k(-1.0001) == 0.0);
    CHECK(k(1.0001) == 0.0);
    CHECK(std::fabs(k(-1.0)) < 1e-14);
    CHECK(std::fabs(k(1.0)) < 1e-14);
    for (int i = 0; i <= 200; ++i) {
      const double u = -1.0 + 2.0 * i / 200.0;
      CHECK(k(u) >= -1e-15);
    }
  }
}

TEST_CASE("moments match the closed forms") {
  const Kernel epan = Kernel::make(KernelId::epanechnikov);
  const Kernel quart = Kernel::make(KernelId::quartic);
  const Kernel triw = Kernel::make(KernelId::triweight);
  const Kernel asym = Kernel::make(KernelId::asymmetric_test);
  CHECK(std::fabs(epan.moment(1)) < 1e-12);
  CHECK(std::fabs(quart.moment(1)) < 1e-12);
  CHECK(std::fabs(triw.moment(1)) < 1e-12);
  CHECK(epan.moment(2) == doctest::Approx(1.0 / 5.0).epsilon(1e-10));
  CHECK(quart.moment(2) == doctest::Approx(1.0 / 7.0).epsilon(1e-10));
  CHECK(triw.moment(2) == doctest::Approx(1.0 / 9.0).epsilon(1e-10));
  // (3/4)(1-u^2)(1+u) has unit mass already, mean 1/5, second moment 1/5
  CHECK(asym.moment(1) == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(asym.moment(2) == doctest::Approx(0.2).epsilon(1e-10));
}

TEST_CASE("kernel_moment agrees with a finer independent quadrature") {
  for (const Kernel& k : all_kernels())
    for (int j = 0; j <= 2; ++j)
      CHECK(kernel_moment(k, j) ==
            doctest::Approx(simpson_moment(k, j)).epsilon(1e-10));
  CHECK_THROWS_AS(Kernel::make(KernelId::epanechnikov).moment(3),
                  const DomainError&);
  CHECK_THROWS_AS(
      kernel_moment(Kernel::make(KernelId::epanechnikov), -1),
      const DomainError&);
}

TEST_CASE("derivative matches a central finite difference") {
  for (const Kernel& k : all_kernels()) {
    for (int i = 1; i < 40; ++i) {
      const double u = -1.0 + 2.0 * i / 40.0;
      const double h = 1e-6;
      const double fd = (k(u + h) - k(u - h)) / (2.0 * h);
      CHECK(k.deriv(u) == doctest::Approx(fd).epsilon(1e-6));
    }
    CHECK(k.deriv(1.5) == 0.0);
    CHECK(k.deriv(-1.5) == 0.0);
  }
}

TEST_CASE("antiderivatives anchor at the support edges") {
  for (const Kernel& k : all_kernels()) {
    CHECK(k.cdf(-1.0) == 0.0);
    CHECK(k.cdf(1.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.cdf(-2.0) == 0.0);
    CHECK(k.cdf(2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(k.xcdf(-1.0) == 0.0);
    CHECK(k.xcdf(1.0) == doctest::Approx(k.moment(1)).epsilon(1e-10));
    CHECK(k.xcdf(2.0) == doctest::Approx(k.moment(1)).epsilon(1e-10));
  }
  const Kernel epan = Kernel::make(KernelId::epanechnikov);
  CHECK(epan.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("parse is case-insensitive and lists valid names on failure") {
  CHECK(Kernel::parse("Epanechnikov").id() == KernelId::epanechnikov);
  CHECK(Kernel::parse("QUARTIC").id() == KernelId::quartic);
  CHECK(Kernel::parse("triweight").id() == KernelId::triweight);
  CHECK(Kernel::parse("asymmetric-test").id() == KernelId::asymmetric_test);
  try {
    Kernel::parse("gaussian");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("epanechnikov") != std::string::npos);
  }
}

TEST_CASE("bandwidth closed forms") {
  BandwidthRule iid;
  iid.kind = BandwidthRule::Kind::iid;
  iid.a = 1.0;
  CHECK(bandwidth(iid, 1000) == doctest::Approx(0.1).epsilon(1e-12));
  iid.a = 2.5;
  CHECK(bandwidth(iid, 1000) == doctest::Approx(0.25).epsilon(1e-12));
  BandwidthRule mix = iid;
  mix.kind = BandwidthRule::Kind::mixing;
  CHECK(bandwidth(mix, 1000) == bandwidth(iid, 1000));
  CHECK_THROWS_AS(bandwidth(iid, 1), const DomainError&);
  iid.a = -1.0;
  CHECK_THROWS_AS(bandwidth(iid, 1000), const DomainError&);
}

TEST_CASE("long-memory bandwidth decays at the declared exponent") {
  BandwidthRule lrd;
  lrd.kind = BandwidthRule::Kind::lrd;
  lrd.a = 1.0;
  lrd.d = 0.4;
  lrd.r = 1;
  // exponent -rd/(2+rd) = -1/6: a factor 2^6 in n halves the bandwidth
  const double ratio = bandwidth(lrd, 64000) / bandwidth(lrd, 1000);
  CHECK(ratio == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("long-memory bandwidth solves its defining balance equation") {
  struct Case {
    double a, d;
    int r;
  };
  for (const Case& c : {Case{1.0, 0.4, 1}, Case{3.0, 0.2, 1},
                        Case{0.7, 0.3, 2}, Case{2.0, 0.15, 4}}) {
    BandwidthRule rule;
    rule.kind = BandwidthRule::Kind::lrd;
    rule.a = c.a;
    rule.d = c.d;
    rule.r = c.r;
    const double rd = c.r * c.d;
    double rfact = 1.0;
    for (int i = 2; i <= c.r; ++i) rfact *= i;
    const double L = 2.0 / (rfact * (1.0 - rd) * (2.0 - rd));
    for (long n : {500L, 2000L, 16000L}) {
      const double dn = bandwidth(rule, n);
      const double back = std::pow(dn, -2.0) / static_cast<double>(n) *
                          std::pow(n * dn, 1.0 - rd / 2.0) * std::sqrt(L);
      CHECK(back == doctest::Approx(c.a).epsilon(1e-10));
    }
  }
}

TEST_CASE("long-memory bandwidth rejects rd >= 1") {
  BandwidthRule rule;
  rule.kind = BandwidthRule::Kind::lrd;
  rule.a = 1.0;
  rule.d = 0.5;
  rule.r = 2;
  CHECK_THROWS_AS(bandwidth(rule, 1000), const DomainError&);
}

TEST_CASE("regression smoother reproduces constants in the interior") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  const std::size_t n = 100, m = 101;
  const double h = 0.15;
  GasserMullerPlan plan(n, k, h, {0.0, 1.0}, m);
  GridFunction x = plan.apply(std::vector<double>(n, 3.25));
  const auto& flags = plan.boundary_flags();
  REQUIRE(flags.size() == m);
  std::size_t interior = 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (flags[j]) continue;
    ++interior;
    CHECK(x.value(j) == doctest::Approx(3.25).epsilon(1e-14));
  }
  CHECK(interior > 50);
}

TEST_CASE("boundary flags mark exactly the bias-affected edge nodes") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  const std::size_t n = 100, m = 101;
  const double h = 0.2;
  GasserMullerPlan plan(n, k, h, {0.0, 1.0}, m);
  const auto& flags = plan.boundary_flags();
  for (std::size_t j = 0; j < m; ++j) {
    const double t = static_cast<double>(j) / (m - 1);
    const bool expect = t < 1.0 / n + h || t > 1.0 - h;
    CHECK(static_cast<bool>(flags[j]) == expect);
  }
}

TEST_CASE("regression smoother is exact on linear data inside the window") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  const std::size_t n = 200, m = 101;
  const double h = 0.12, beta = -2.0, gamma = 2.0;
  std::vector<double> y(n);
  for (std::size_t i = 1; i <= n; ++i)
    y[i - 1] = gamma + beta * static_cast<double>(i) / n;
  GasserMullerPlan plan(n, k, h, {0.0, 1.0}, m);
  GridFunction x = plan.apply(y);
  const auto& flags = plan.boundary_flags();
  for (std::size_t j = 0; j < m; ++j) {
    if (flags[j]) continue;
    const double t = x.node(j);
    CHECK(x.value(j) == doctest::Approx(gamma + beta * t).epsilon(1e-12));
  }
}

TEST_CASE("asymmetric kernel shifts linear data by minus slope times mean") {
  const Kernel k = Kernel::make(KernelId::asymmetric_test);
  const std::size_t n = 400, m = 101;
  const double h = 0.1, beta = -2.0, gamma = 2.0;
  std::vector<double> y(n);
  for (std::size_t i = 1; i <= n; ++i)
    y[i - 1] = gamma + beta * static_cast<double>(i) / n;
  GasserMullerPlan plan(n, k, h, {0.0, 1.0}, m);
  GridFunction x = plan.apply(y);
  const auto& flags = plan.boundary_flags();
  const double mu1 = k.moment(1);
  for (std::size_t j = 0; j < m; ++j) {
    if (flags[j]) continue;
    const double t = x.node(j);
    // int k(v) (beta (t - h v) + gamma) dv = beta t + gamma - beta h mu1
    CHECK(x.value(j) - (gamma + beta * t) ==
          doctest::Approx(-beta * h * mu1).epsilon(1e-10));
  }
}

TEST_CASE("regression smoother matches a direct fine quadrature oracle") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  const std::size_t n = 50, m = 41;
  const double h = 0.18;
  std::mt19937_64 rng(123);
  std::normal_distribution<double> nd;
  std::vector<double> y(n);
  for (auto& v : y) v = nd(rng);
  // piecewise-linear interpolant through (i/n, y_i), extended flat on
  // both sides; the kernel is always evaluated at the true coordinate
  auto ybar = [&](double u) {
    const double lo = 1.0 / n;
    if (u <= lo) return y[0];
    if (u >= 1.0) return y[n - 1];
    const double pos = u * n - 1.0;
    const std::size_t i = static_cast<std::size_t>(pos);
    const double w = pos - i;
    return (1.0 - w) * y[i] + w * y[i + 1];
  };
  GridFunction x = gasser_muller(y, k, h, {0.0, 1.0}, m);
  // Simpson over [t-h, t+h] with many panels; integrand is piecewise
  // smooth so this converges well below the comparison tolerance
  for (std::size_t j = 0; j < m; ++j) {
    const double t = x.node(j);
    const int panels = 20000;
    const double a = t - h, b = t + h;
    const double w = (b - a) / panels;
    double s = 0.0;
    auto f = [&](double u) { return k((t - u) / h) * ybar(u); };
    for (int i = 0; i < panels; ++i) {
      const double x0 = a + i * w, x2 = a + (i + 1) * w;
      s += (w / 6.0) * (f(x0) + 4.0 * f(0.5 * (x0 + x2)) + f(x2));
    }
    s /= h;
    CHECK(x.value(j) == doctest::Approx(s).epsilon(1e-6));
  }
}

TEST_CASE("regression smoother is linear in the data") {
  const Kernel k = Kernel::make(KernelId::quartic);
  const std::size_t n = 80, m = 33;
  GasserMullerPlan plan(n, k, 0.15, {0.0, 1.0}, m);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::vector<double> y(n), z(n), comb(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = nd(rng);
    z[i] = nd(rng);
    comb[i] = 2.5 * y[i] - 0.75 * z[i];
  }
  GridFunction xy = plan.apply(y), xz = plan.apply(z), xc = plan.apply(comb);
  for (std::size_t j = 0; j < m; ++j)
    CHECK(xc.value(j) ==
          doctest::Approx(2.5 * xy.value(j) - 0.75 * xz.value(j))
              .epsilon(1e-12));
}

TEST_CASE("regression smoother keeps monotone data monotone inside") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  const std::size_t n = 150, m = 101;
  const double h = 0.1;
  std::vector<double> y(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    y[i - 1] = 2.0 * (1.0 - t) + 0.3 * std::cos(6.0 * t);  // decreasing sum
  }
  // make it actually non-increasing
  for (std::size_t i = 1; i < n; ++i) y[i] = std::min(y[i], y[i - 1]);
  GasserMullerPlan plan(n, k, h, {0.0, 1.0}, m);
  GridFunction x = plan.apply(y);
  const auto& flags = plan.boundary_flags();
  for (std::size_t j = 0; j + 1 < m; ++j) {
    if (flags[j] || flags[j + 1]) continue;
    CHECK(x.value(j + 1) <= x.value(j) + 1e-12);
  }
}

TEST_CASE("regression smoother validates its inputs") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  CHECK_THROWS_AS(GasserMullerPlan(10, k, 0.3, {0.0, 1.0}, 11),
                  const ConfigError&);  // nh = 3 < 4
  CHECK_THROWS_AS(GasserMullerPlan(100, k, 0.0, {0.0, 1.0}, 11),
                  const ConfigError&);
  CHECK_THROWS_AS(GasserMullerPlan(100, k, 1.0, {0.0, 1.0}, 11),
                  const ConfigError&);
  CHECK_THROWS_AS(GasserMullerPlan(1, k, 0.5, {0.0, 1.0}, 11),
                  const DomainError&);
  GasserMullerPlan plan(100, k, 0.1, {0.0, 1.0}, 11);
  CHECK_THROWS_AS(plan.apply(std::vector<double>(99, 0.0)),
                  const ShapeError&);
  std::vector<double> bad(100, 0.0);
  bad[3] = std::nan("");
  CHECK_THROWS_AS(plan.apply(bad), const DomainError&);
}

TEST_CASE("density estimate matches the definition for a single point") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  const double s = 0.37, h = 0.4;
  GridFunction x = kde({s}, k, h, {-1.0, 2.0}, 301);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = x.node(j);
    CHECK(x.value(j) == doctest::Approx(k((t - s) / h) / h).epsilon(1e-13));
  }
}

TEST_CASE("density estimate equals the naive double loop") {
  const Kernel k = Kernel::make(KernelId::quartic);
  std::mt19937_64 rng(321);
  std::uniform_real_distribution<double> ud;
  std::vector<double> sample(100);
  for (auto& v : sample) v = -std::log(ud(rng));
  const double h = 0.25;
  GridFunction x = kde(sample, k, h, {-1.0, 8.0}, 512);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double t = x.node(j);
    double s = 0.0;
    for (double xi : sample) s += k((t - xi) / h);
    s /= sample.size() * h;
    CHECK(x.value(j) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("density estimate integrates to one over its support") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ud;
  std::vector<double> sample(200);
  double mx = 0.0;
  for (auto& v : sample) {
    v = -std::log(ud(rng));
    mx = std::max(mx, v);
  }
  const double h = 0.3;
  const std::size_t m = 4096;
  GridFunction x = kde(sample, k, h, {-h, mx + h}, m);
  // trapezoid rule on the output grid
  double trap = 0.5 * (x.value(0) + x.value(m - 1));
  for (std::size_t j = 1; j + 1 < m; ++j) trap += x.value(j);
  trap *= x.step();
  CHECK(trap == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("density estimate is translation-equivariant") {
  const Kernel k = Kernel::make(KernelId::triweight);
  std::mt19937_64 rng(55);
  std::normal_distribution<double> nd;
  std::vector<double> sample(60), shifted(60);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    sample[i] = nd(rng);
    shifted[i] = sample[i] + 0.5;
  }
  const double h = 0.35;
  GridFunction a = kde(sample, k, h, {-4.0, 4.0}, 257);
  GridFunction b = kde(shifted, k, h, {-3.5, 4.5}, 257);
  for (std::size_t j = 0; j < a.size(); ++j)
    CHECK(b.value(j) == doctest::Approx(a.value(j)).epsilon(1e-10));
}

TEST_CASE("density estimate validates its inputs") {
  const Kernel k = Kernel::make(KernelId::epanechnikov);
  CHECK_THROWS_AS(kde({}, k, 0.3, {0.0, 1.0}, 11), const DomainError&);
  CHECK_THROWS_AS(kde({0.5}, k, 0.0, {0.0, 1.0}, 11), const ConfigError&);
  CHECK_THROWS_AS(kde({0.5}, k, -1.0, {0.0, 1.0}, 11), const ConfigError&);
}
