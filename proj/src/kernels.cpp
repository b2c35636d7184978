#include "rearr/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace rearr {

namespace {

double polyval(const std::vector<double>& c, double u) {
  double r = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) r = r * u + c[i];
  return r;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i)
    d[i - 1] = c[i] * static_cast<double>(i);
  return d;
}

// antiderivative anchored so it vanishes at u = -1
std::vector<double> poly_antiderivative(const std::vector<double>& c) {
  std::vector<double> C(c.size() + 1, 0.0);
  for (std::size_t i = 0; i < c.size(); ++i)
    C[i + 1] = c[i] / static_cast<double>(i + 1);
  C[0] = -polyval(C, -1.0);
  return C;
}

}  // namespace

Kernel::Kernel(KernelId id, std::string name, std::vector<double> coeffs)
    : id_(id), name_(std::move(name)), c_(std::move(coeffs)) {
  dc_ = poly_derivative(c_);
  C0_ = poly_antiderivative(c_);
  std::vector<double> uc(c_.size() + 1, 0.0);
  for (std::size_t i = 0; i < c_.size(); ++i) uc[i + 1] = c_[i];
  C1_ = poly_antiderivative(uc);
  for (int j = 0; j < 3; ++j) mom_[j] = kernel_moment(*this, j);
}

Kernel Kernel::make(KernelId id) {
  switch (id) {
    case KernelId::epanechnikov:
      return Kernel(id, "epanechnikov", {0.75, 0.0, -0.75});
    case KernelId::quartic:
      return Kernel(id, "quartic",
                    {15.0 / 16, 0.0, -15.0 / 8, 0.0, 15.0 / 16});
    case KernelId::triweight:
      return Kernel(id, "triweight", {35.0 / 32, 0.0, -105.0 / 32, 0.0,
                                      105.0 / 32, 0.0, -35.0 / 32});
    case KernelId::asymmetric_test: {
      // (1-u^2)(1+u) shape, rescaled by its own quadrature mass so the
      // zeroth moment is 1 by construction
      Kernel raw(id, "asymmetric-test", {0.75, 0.75, -0.75, -0.75});
      double z = raw.moment(0);
      std::vector<double> c = raw.c_;
      for (double& x : c) x /= z;
      return Kernel(id, "asymmetric-test", std::move(c));
    }
  }
  throw DomainError("unknown kernel id");
}

Kernel Kernel::parse(const std::string& name) {
  std::string s;
  for (char ch : name) s += static_cast<char>(std::tolower(ch));
  if (s == "epanechnikov") return make(KernelId::epanechnikov);
  if (s == "quartic") return make(KernelId::quartic);
  if (s == "triweight") return make(KernelId::triweight);
  if (s == "asymmetric-test" || s == "asymmetric_test")
    return make(KernelId::asymmetric_test);
  throw ConfigError("unknown kernel \"" + name +
                    "\" (expected epanechnikov, quartic, triweight or "
                    "asymmetric-test)");
}

double Kernel::operator()(double u) const {
  if (u < -1.0 || u > 1.0) return 0.0;
  return polyval(c_, u);
}

double Kernel::deriv(double u) const {
  if (u < -1.0 || u > 1.0) return 0.0;
  return polyval(dc_, u);
}

double Kernel::cdf(double u) const {
  if (u <= -1.0) return 0.0;
  if (u > 1.0) u = 1.0;
  return polyval(C0_, u);
}

double Kernel::xcdf(double u) const {
  if (u <= -1.0) return 0.0;
  if (u > 1.0) u = 1.0;
  return polyval(C1_, u);
}

double Kernel::moment(int j) const {
  if (j < 0 || j > 2)
    throw DomainError("cached kernel moments cover orders 0..2");
  return mom_[j];
}

double kernel_moment(const Kernel& k, int j) {
  if (j < 0) throw DomainError("moment order must be >= 0");
  auto integrand = [&](double u) {
    double p = 1.0;
    for (int i = 0; i < j; ++i) p *= u;
    return p * k(u);
  };
  auto simpson = [&](long panels) {
    double h = 2.0 / static_cast<double>(panels);
    double s = integrand(-1.0) + integrand(1.0);
    for (long i = 1; i < panels; ++i)
      s += integrand(-1.0 + h * static_cast<double>(i)) *
           ((i & 1) ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  double prev = simpson(256);
  for (long p = 512; p <= 16384; p *= 2) {
    double cur = simpson(p);
    if (std::fabs(cur - prev) <= 1e-12 * std::max(1.0, std::fabs(cur)))
      return cur;
    prev = cur;
  }
  throw NumericError("kernel moment quadrature did not settle");
}

double bandwidth(const BandwidthRule& rule, long n) {
  if (n < 2) throw DomainError("bandwidth needs n >= 2");
  if (!(rule.a > 0.0)) throw DomainError("bandwidth constant a must be > 0");
  const double dn = static_cast<double>(n);
  switch (rule.kind) {
    case BandwidthRule::Kind::iid:
    case BandwidthRule::Kind::mixing:
      return rule.a * std::pow(dn, -1.0 / 3.0);
    case BandwidthRule::Kind::lrd: {
      if (!(rule.d > 0.0))
        throw DomainError("lrd bandwidth needs memory exponent d > 0");
      if (rule.r < 1 || rule.r > 20)
        throw DomainError("transform rank r must be in 1..20");
      const double rd = static_cast<double>(rule.r) * rule.d;
      if (!(rd < 1.0))
        throw DomainError("lrd bandwidth needs r*d < 1, got r*d = " +
                          std::to_string(rd));
      double rfact = 1.0;
      for (int i = 2; i <= rule.r; ++i) rfact *= static_cast<double>(i);
      const double L = 2.0 / (rfact * (1.0 - rd) * (2.0 - rd));
      return std::pow(std::sqrt(L) / rule.a, 2.0 / (2.0 + rd)) *
             std::pow(dn, -rd / (2.0 + rd));
    }
  }
  throw DomainError("unknown bandwidth rule");
}

GasserMullerPlan::GasserMullerPlan(std::size_t n, const Kernel& k, double h,
                                   Interval out, std::size_t m)
    : n_(n), m_(m), out_(out) {
  if (n < 2) throw DomainError("need at least 2 observations");
  if (!(h > 0.0 && h < 1.0)) throw ConfigError("bandwidth must be in (0,1)");
  if (static_cast<double>(n) * h < 4.0)
    throw ConfigError("bandwidth too small: n*h = " +
                      std::to_string(static_cast<double>(n) * h) + " < 4");
  GridFunction shell(out, std::vector<double>(m, 0.0));
  row_off_.assign(m + 1, 0);
  bflag_.assign(m, 0);
  const double dn = static_cast<double>(n);
  const long nl = static_cast<long>(n);

  std::vector<double> local;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = shell.node(j);
    if (t < 1.0 / dn + h || t > 1.0 - h) bflag_[j] = 1;
    const double lo_u = t - h;
    const double hi_u = t + h;
    // data nodes strictly inside the kernel window split it into
    // segments that each live on one linear piece of the interpolant
    long i_lo = static_cast<long>(std::ceil(lo_u * dn - 1e-9));
    if (static_cast<double>(i_lo) / dn <= lo_u) ++i_lo;
    long i_hi = static_cast<long>(std::floor(hi_u * dn + 1e-9));
    if (static_cast<double>(i_hi) / dn >= hi_u) --i_hi;
    i_lo = std::max(i_lo, 1L);
    i_hi = std::min(i_hi, nl);

    long base = std::max(0L, std::min(nl - 1, i_lo - 2));
    long top = std::max(base, std::min(nl - 1, i_hi + 1));
    local.assign(static_cast<std::size_t>(top - base + 1), 0.0);

    auto add_segment = [&](double a, double b) {
      if (!(b > a)) return;
      const double wa = (t - a) / h;  // > wb since a < b
      const double wb = (t - b) / h;
      const double A0 = k.cdf(wa) - k.cdf(wb);
      const double A1 = k.xcdf(wa) - k.xcdf(wb);
      const double mid = 0.5 * (a + b);
      if (mid <= 1.0 / dn) {
        local[static_cast<std::size_t>(0 - base)] += A0;
      } else if (mid >= 1.0) {
        local[static_cast<std::size_t>((nl - 1) - base)] += A0;
      } else {
        long i = std::min(nl - 1L, std::max(1L, static_cast<long>(
                                                    std::floor(mid * dn))));
        const double ti = static_cast<double>(i) / dn;
        const double q = ((t - ti) * A0 - h * A1) * dn;
        local[static_cast<std::size_t>((i - 1) - base)] += A0 - q;
        local[static_cast<std::size_t>(i - base)] += q;
      }
    };

    double prev = lo_u;
    for (long i = i_lo; i <= i_hi; ++i) {
      const double ti = static_cast<double>(i) / dn;
      add_segment(prev, ti);
      prev = ti;
    }
    add_segment(prev, hi_u);

    for (long idx = base; idx <= top; ++idx) {
      const double w = local[static_cast<std::size_t>(idx - base)];
      if (w != 0.0) {
        col_.push_back(static_cast<std::uint32_t>(idx));
        wgt_.push_back(w);
      }
    }
    row_off_[j + 1] = col_.size();
  }
}

GridFunction GasserMullerPlan::apply(const std::vector<double>& y) const {
  if (y.size() != n_)
    throw ShapeError("expected " + std::to_string(n_) + " observations, got " +
                     std::to_string(y.size()));
  for (double v : y)
    if (!std::isfinite(v)) throw DomainError("non-finite observation");
  std::vector<double> vals(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    double s = 0.0;
    for (std::size_t p = row_off_[j]; p < row_off_[j + 1]; ++p)
      s += wgt_[p] * y[col_[p]];
    vals[j] = s;
  }
  return GridFunction(out_, std::move(vals));
}

GridFunction gasser_muller(const std::vector<double>& y, const Kernel& k,
                           double h, Interval out, std::size_t m) {
  return GasserMullerPlan(y.size(), k, h, out, m).apply(y);
}

GridFunction kde(const std::vector<double>& sample, const Kernel& k, double h,
                 Interval out, std::size_t m) {
  if (sample.empty()) throw DomainError("empty sample");
  if (!(h > 0.0)) throw ConfigError("bandwidth must be > 0");
  for (double v : sample)
    if (!std::isfinite(v)) throw DomainError("non-finite sample point");
  std::vector<double> s(sample);
  std::sort(s.begin(), s.end());
  GridFunction shell(out, std::vector<double>(m, 0.0));
  const double inv = 1.0 / (static_cast<double>(s.size()) * h);
  std::vector<double> vals(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double t = shell.node(j);
    auto first = std::lower_bound(s.begin(), s.end(), t - h);
    auto last = std::upper_bound(s.begin(), s.end(), t + h);
    double acc = 0.0;
    for (auto it = first; it != last; ++it) acc += k((t - *it) / h);
    vals[j] = acc * inv;
  }
  return GridFunction(out, std::move(vals));
}

}  // namespace rearr
