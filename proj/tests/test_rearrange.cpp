#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "rearr/rearrange.hpp"

using namespace rearr;

namespace {

GridFunction random_fn(std::mt19937_64& rng, std::size_t m,
                       Interval iv = {0.0, 1.0}, bool quantize = false) {
  std::normal_distribution<double> nd;
  std::vector<double> v(m);
  for (auto& x : v) {
    x = nd(rng);
    if (quantize) x = std::round(x * 8.0) / 8.0;  // force ties, stay dyadic
  }
  return GridFunction(iv, std::move(v));
}

bool non_increasing(const GridFunction& f) {
  for (std::size_t j = 0; j + 1 < f.size(); ++j)
    if (f.value(j) < f.value(j + 1)) return false;
  return true;
}

bool same_values(const GridFunction& a, const GridFunction& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a.value(j) != b.value(j)) return false;
  return true;
}

}  // namespace

TEST_CASE("upper level set of a constant") {
  GridFunction f({0.0, 1.0}, std::vector<double>(5, 2.0));
  const double total = 1.0 + 0.25;  // length + step under the cell rule
  CHECK(upper_level_set(f, 1.9) == total);
  CHECK(upper_level_set(f, std::nextafter(2.0, 0.0)) == total);
  CHECK(upper_level_set(f, 2.0) == 0.0);  // strict inequality, > u
  CHECK(upper_level_set(f, 3.0) == 0.0);
}

TEST_CASE("upper level set of the identity counts nodes above") {
  GridFunction f = GridFunction::sample({0.0, 1.0}, 5,
                                        [](double t) { return t; });
  CHECK(upper_level_set(f, -0.1) == 1.25);
  CHECK(upper_level_set(f, 0.49) == 0.75);
  CHECK(upper_level_set(f, 0.5) == 0.5);
  CHECK(upper_level_set(f, 0.999) == 0.25);
  CHECK(upper_level_set(f, 1.0) == 0.0);
}

TEST_CASE("flat region produces a level-set jump of its measure") {
  // 3 nodes at value 0.5 out of 9: jump of 3*step exactly
  GridFunction f({0.0, 1.0},
                 {0.0, 0.5, 0.5, 0.5, 1.0, 2.0, 0.25, -1.0, 0.75});
  const double below = upper_level_set(f, std::nextafter(0.5, 0.0));
  const double at = upper_level_set(f, 0.5);
  CHECK(below - at == 3.0 * f.step());
}

TEST_CASE("jump in a decreasing function flattens the level-set measure") {
  // values drop from 2.0 to -1.0 between nodes 2 and 3; r is constant
  // on the gap, equal to 3 cells
  GridFunction f({0.0, 1.0}, {4.0, 3.0, 2.0, -1.0, -2.0});
  for (double u : {-0.999, -0.5, 0.0, 0.7, 1.3, 1.999})
    CHECK(upper_level_set(f, u) == 3.0 * f.step());
}

TEST_CASE("level-set algebra under shift, scale, domination") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 65, {0.0, 1.0}, /*quantize=*/true);
    // dyadic constants keep the comparisons exact in binary64
    const double c = 0.5, s = 2.0;
    std::vector<double> shifted(f.size()), scaled(f.size()), upped(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) {
      shifted[j] = f.value(j) + c;
      scaled[j] = s * f.value(j);
      upped[j] = f.value(j) + 0.25 * (1 + (j % 3));
    }
    GridFunction fs({0.0, 1.0}, shifted);
    GridFunction fm({0.0, 1.0}, scaled);
    GridFunction fu({0.0, 1.0}, upped);
    for (double u : {-1.0, -0.125, 0.0, 0.375, 1.0}) {
      CHECK(upper_level_set(fs, u) == upper_level_set(f, u - c));
      CHECK(upper_level_set(fm, u) == upper_level_set(f, u / s));
      CHECK(upper_level_set(fu, u) >= upper_level_set(f, u));
    }
  }
}

TEST_CASE("rearranging a decreasing function is the identity") {
  GridFunction f({0.0, 1.0}, {5.0, 3.0, 3.0, 1.0, 0.5});
  CHECK(same_values(rearrange_finite(f), f));
}

TEST_CASE("identity map rearranges to its reflection, node-exact") {
  const std::size_t m = 257;  // power-of-two cells keep nodes dyadic
  GridFunction f = GridFunction::sample({0.0, 1.0}, m,
                                        [](double t) { return t; });
  GridFunction tf = rearrange_finite(f);
  for (std::size_t j = 0; j < m; ++j)
    CHECK(tf.value(j) == 1.0 - f.node(j));
}

TEST_CASE("hand example [1,3,2] -> [3,2,1]") {
  GridFunction f({0.0, 1.0}, {1.0, 3.0, 2.0});
  GridFunction tf = rearrange_finite(f);
  CHECK(tf.value(0) == 3.0);
  CHECK(tf.value(1) == 2.0);
  CHECK(tf.value(2) == 1.0);
  CHECK(tf.interval().lo == 0.0);
  CHECK(tf.interval().hi == 1.0);
}

TEST_CASE("sort oracle hand examples") {
  GridFunction a({0.0, 1.0}, {3.0, 2.0, 1.0});
  GridFunction b({0.0, 1.0}, {1.0, 3.0, 2.0});
  CHECK(same_values(sort_oracle(a), a));
  GridFunction tb = sort_oracle(b);
  CHECK(tb.value(0) == 3.0);
  CHECK(tb.value(1) == 2.0);
  CHECK(tb.value(2) == 1.0);
}

TEST_CASE("level-set inversion equals the sort oracle, including ties") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng() % 999);
    GridFunction f = random_fn(rng, m, {-1.0, 3.0}, trial % 2 == 0);
    GridFunction a = rearrange_finite(f);
    GridFunction b = sort_oracle(f);
    CHECK(same_values(a, b));
    CHECK(non_increasing(a));
  }
}

TEST_CASE("rearrangement is idempotent and reversal-invariant") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    GridFunction f = random_fn(rng, 101);
    GridFunction tf = rearrange_finite(f);
    CHECK(same_values(rearrange_finite(tf), tf));
    std::vector<double> rev(f.values().rbegin(), f.values().rend());
    GridFunction fr({0.0, 1.0}, rev);
    CHECK(same_values(rearrange_finite(fr), tf));
  }
}

TEST_CASE("rearrangement preserves every upper level set") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ud(-3.5, 3.5);
  for (int trial = 0; trial < 50; ++trial) {
    GridFunction f = random_fn(rng, 129, {0.0, 1.0}, trial % 2 == 0);
    GridFunction tf = rearrange_finite(f);
    for (int l = 0; l < 64; ++l) {
      const double u = ud(rng);
      CHECK(upper_level_set(f, u) == upper_level_set(tf, u));
    }
  }
}

TEST_CASE("rearrangement contracts every implemented norm") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 257);
    GridFunction g = random_fn(rng, 257);
    GridFunction tf = rearrange_finite(f);
    GridFunction tg = rearrange_finite(g);
    for (Norm n : {Norm::sup, Norm::l1, Norm::l2}) {
      const double before = distance(f, g, n);
      const double after = distance(tf, tg, n);
      CHECK(after <= before + 1e-12 * std::max(1.0, before));
    }
  }
}

TEST_CASE("algebra: additive shifts commute with rearrangement") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ud(-5.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 97);
    const double c = ud(rng);
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) v[j] = f.value(j) + c;
    GridFunction tf = rearrange_finite(f);
    GridFunction tfc = rearrange_finite(GridFunction(f.interval(), v));
    for (std::size_t j = 0; j < f.size(); ++j)
      CHECK(tfc.value(j) == tf.value(j) + c);  // same doubles, same sort
  }
}

TEST_CASE("algebra: positive scaling commutes with rearrangement") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> ud(0.1, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 97);
    const double c = ud(rng);
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) v[j] = c * f.value(j);
    GridFunction tf = rearrange_finite(f);
    GridFunction tcf = rearrange_finite(GridFunction(f.interval(), v));
    for (std::size_t j = 0; j < f.size(); ++j)
      CHECK(tcf.value(j) == c * tf.value(j));
  }
}

TEST_CASE("algebra: pointwise domination survives rearrangement") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 97);
    std::vector<double> v(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) v[j] = f.value(j) + ud(rng);
    GridFunction tf = rearrange_finite(f);
    GridFunction tg = rearrange_finite(GridFunction(f.interval(), v));
    for (std::size_t j = 0; j < f.size(); ++j)
      CHECK(tg.value(j) >= tf.value(j));
  }
}

TEST_CASE("algebra: rescaling the argument rescales the domain only") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> ud(0.1, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 65, {-1.0, 3.0});
    const double c = ud(rng);
    // g(s) = f(c s) on I/c shares f's node values
    GridFunction g({-1.0 / c, 3.0 / c}, f.values());
    GridFunction tf = rearrange_finite(f);
    GridFunction tg = rearrange_finite(g);
    CHECK(same_values(tf, tg));
    CHECK(tg.interval().lo == -1.0 / c);
    CHECK(tg.interval().hi == 3.0 / c);
    // continuous reads map through the same affine change of variable
    for (int q = 1; q < 8; ++q) {
      const double t = tg.interval().lo + q * tg.interval().length() / 8.0;
      CHECK(tg.evaluate(t) ==
            doctest::Approx(tf.evaluate(c * t))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("algebra: shifting the argument shifts the domain only") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> ud(-4.0, 4.0);
  for (int trial = 0; trial < 100; ++trial) {
    GridFunction f = random_fn(rng, 65, {-1.0, 3.0});
    const double c = ud(rng);
    GridFunction g({-1.0 - c, 3.0 - c}, f.values());
    GridFunction tf = rearrange_finite(f);
    GridFunction tg = rearrange_finite(g);
    CHECK(same_values(tf, tg));
    for (int q = 1; q < 8; ++q) {
      const double t = tg.interval().lo + q * tg.interval().length() / 8.0;
      CHECK(tg.evaluate(t) ==
            doctest::Approx(tf.evaluate(t + c)).epsilon(1e-9));
    }
  }
}

TEST_CASE("density mode: decreasing densities are fixed points") {
  GridFunction f = GridFunction::sample(
      {0.0, 20.0}, 2049, [](double t) { return std::exp(-t); });
  DensityRearrangement dr = rearrange_density(f, 1e-6);
  CHECK_FALSE(dr.truncation_warning);
  CHECK(dr.value.interval().lo == 0.0);
  CHECK(dr.value.interval().hi == 20.0);
  CHECK(same_values(dr.value, f));
}

TEST_CASE("density mode: indicator mass slides to the origin") {
  const std::size_t m = 41;  // step 0.5 over [0, 20]
  GridFunction f = GridFunction::sample({0.0, 20.0}, m, [](double t) {
    return (t >= 1.0 && t <= 2.0) ? 1.0 : 0.0;
  });
  DensityRearrangement dr = rearrange_density(f, 1e-6);
  // 3 nodes carried value 1 (t = 1, 1.5, 2); they land at j = 0, 1, 2
  for (std::size_t j = 0; j < m; ++j)
    CHECK(dr.value.value(j) == (j < 3 ? 1.0 : 0.0));
}

TEST_CASE("density mode: triangle flattens into a decreasing profile") {
  GridFunction f = GridFunction::sample({0.0, 20.0}, 2001, [](double t) {
    return t <= 2.0 ? 1.0 - std::fabs(t - 1.0) : 0.0;
  });
  DensityRearrangement dr = rearrange_density(f, 1e-6);
  CHECK(non_increasing(dr.value));
  // same level sets as the input at every probe level
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> ud(0.0, 1.1);
  for (int l = 0; l < 64; ++l) {
    const double u = ud(rng);
    CHECK(upper_level_set(dr.value, u) == upper_level_set(f, u));
  }
  // mass is preserved exactly up to summation order
  CHECK(integral(dr.value) ==
        doctest::Approx(integral(f)).epsilon(1e-12));
}

TEST_CASE("density mode rejects negative values, naming the node") {
  GridFunction f({0.0, 1.0}, {0.5, -0.25, 1.0});
  try {
    rearrange_density(f, 1e-6);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("node") != std::string::npos);
  }
}

TEST_CASE("density mode warns when the tail still carries mass") {
  GridFunction f({0.0, 10.0}, std::vector<double>(21, 1.0));
  DensityRearrangement dr = rearrange_density(f, 1e-6);
  CHECK(dr.truncation_warning);
  // a generous bound silences the warning
  DensityRearrangement ok = rearrange_density(f, 1.0);
  CHECK_FALSE(ok.truncation_warning);
}

TEST_CASE("local mode: a decreasing line passes through unchanged") {
  GridFunction f = GridFunction::sample({-5.0, 5.0}, 1001,
                                        [](double t) { return -t; });
  TruncationWindow w;
  w.inner = {-1.0, 1.0};
  w.outer = {-3.0, 3.0};
  w.barrier = 2.0;
  GridFunction out = rearrange_local(f, w);
  CHECK(out.interval().lo == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(out.interval().hi == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t j = 0; j < out.size(); ++j)
    CHECK(out.value(j) == doctest::Approx(-out.node(j)).epsilon(1e-12));
}

TEST_CASE("local mode: result does not depend on the outer window") {
  // drift -t + bounded wiggle; extra jitter only well inside, so the
  // windows [-4,4] and [-5,5] order their boundary nodes identically
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> ud(-0.1, 0.1);
  std::vector<double> jitter(1001);
  for (auto& x : jitter) x = ud(rng);
  // evaluate from the snapped node index so both grids see bitwise
  // identical values at shared coordinates
  auto phi = [&](double t) {
    const long idx = std::lround((t + 5.0) * 100.0);
    const double tq = (static_cast<double>(idx) - 500.0) / 100.0;
    double v = -tq + 0.3 * std::sin(3.0 * tq);
    if (std::fabs(tq) <= 2.5) v += jitter[static_cast<std::size_t>(idx)];
    return v;
  };
  GridFunction f5 = GridFunction::sample({-5.0, 5.0}, 1001, phi);
  GridFunction f4 = GridFunction::sample({-4.0, 4.0}, 801, phi);
  TruncationWindow w;
  w.inner = {-1.0, 1.0};
  w.outer = {-3.0, 3.0};
  w.barrier = 2.0;
  GridFunction o5 = rearrange_local(f5, w);
  GridFunction o4 = rearrange_local(f4, w);
  REQUIRE(o5.size() == o4.size());
  for (std::size_t j = 0; j < o5.size(); ++j)
    CHECK(o5.value(j) == o4.value(j));
}

TEST_CASE("local mode: flat zero input cannot clear the barrier") {
  GridFunction f({-5.0, 5.0}, std::vector<double>(101, 0.0));
  TruncationWindow w;
  w.inner = {-1.0, 1.0};
  w.outer = {-3.0, 3.0};
  w.barrier = 1.0;
  CHECK_THROWS_AS(rearrange_local(f, w), const PreconditionError&);
}

TEST_CASE("local mode: the error names the violated region") {
  GridFunction f({-5.0, 5.0}, std::vector<double>(101, 0.0));
  TruncationWindow w;
  w.inner = {-1.0, 1.0};
  w.outer = {-3.0, 3.0};
  w.barrier = 1.0;
  try {
    rearrange_local(f, w);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("sup") != std::string::npos);
  }
}

TEST_CASE("local mode validates window geometry") {
  GridFunction f = GridFunction::sample({-5.0, 5.0}, 101,
                                        [](double t) { return -t; });
  TruncationWindow w;
  w.inner = {-4.0, 4.0};
  w.outer = {-3.0, 3.0};  // inner not inside outer
  w.barrier = 2.0;
  CHECK_THROWS_AS(rearrange_local(f, w), const ShapeError&);
  w.inner = {-1.0, 1.0};
  w.outer = {-6.0, 3.0};  // outer escapes the domain
  CHECK_THROWS_AS(rearrange_local(f, w), const ShapeError&);
  w.outer = {-3.0, 3.0};
  w.inner = {0.0, 0.05};  // fewer than 2 grid nodes inside
  CHECK_THROWS_AS(rearrange_local(f, w), const ShapeError&);
}
