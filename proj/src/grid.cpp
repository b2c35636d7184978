#include "rearr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rearr {

namespace {

void check_interval(const Interval& iv) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
    throw DomainError("interval endpoints must be finite");
  if (!(iv.lo < iv.hi)) throw DomainError("interval needs lo < hi");
}

}  // namespace

GridFunction::GridFunction(Interval iv, std::vector<double> values)
    : iv_(iv), values_(std::move(values)) {
  check_interval(iv_);
  if (values_.size() < 2)
    throw ShapeError("grid needs at least 2 nodes, got " +
                     std::to_string(values_.size()));
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]))
      throw DomainError("non-finite value at node " + std::to_string(j));
  }
  step_ = iv_.length() / static_cast<double>(values_.size() - 1);
}

GridFunction GridFunction::sample(Interval iv, std::size_t m,
                                  const std::function<double(double)>& f) {
  check_interval(iv);
  if (m < 2) throw ShapeError("grid needs at least 2 nodes");
  if (!f) throw DomainError("sample: null function");
  std::vector<double> v(m);
  GridFunction shell(iv, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < m; ++j) v[j] = f(shell.node(j));
  return GridFunction(iv, std::move(v));
}

double GridFunction::node(std::size_t j) const {
  const std::size_t m = values_.size();
  if (j == 0) return iv_.lo;
  if (j == m - 1) return iv_.hi;
  return iv_.lo + iv_.length() * static_cast<double>(j) /
                      static_cast<double>(m - 1);
}

double GridFunction::evaluate(double t) const {
  // a few ulp of slack so t computed as lo + k*step never falls out
  const double slack =
      4e-15 * std::max({std::fabs(iv_.lo), std::fabs(iv_.hi), 1.0});
  if (!(t >= iv_.lo - slack && t <= iv_.hi + slack))
    throw DomainError("evaluate: t outside the grid interval");
  t = std::min(std::max(t, iv_.lo), iv_.hi);
  const std::size_t m = values_.size();
  double pos = (t - iv_.lo) / step_;
  std::size_t j = static_cast<std::size_t>(
      std::min(std::max(std::floor(pos), 0.0),
               static_cast<double>(m - 2)));
  double theta = pos - static_cast<double>(j);
  theta = std::min(std::max(theta, 0.0), 1.0);
  if (theta == 0.0) return values_[j];
  if (theta == 1.0) return values_[j + 1];
  return values_[j] + theta * (values_[j + 1] - values_[j]);
}

double GridFunction::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

namespace {

void check_same_grid(const GridFunction& f, const GridFunction& g) {
  if (f.size() != g.size())
    throw ShapeError("grids differ in node count: " +
                     std::to_string(f.size()) + " vs " +
                     std::to_string(g.size()));
  const double tol =
      1e-12 * std::max({std::fabs(f.interval().lo), std::fabs(f.interval().hi),
                        1.0});
  if (std::fabs(f.interval().lo - g.interval().lo) > tol ||
      std::fabs(f.interval().hi - g.interval().hi) > tol)
    throw ShapeError("grids live on different intervals");
}

}  // namespace

double distance(const GridFunction& f, const GridFunction& g, Norm norm) {
  check_same_grid(f, g);
  const std::size_t m = f.size();
  switch (norm) {
    case Norm::sup: {
      double d = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        d = std::max(d, std::fabs(f.value(j) - g.value(j)));
      return d;
    }
    case Norm::l1: {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        s += std::fabs(f.value(j) - g.value(j));
      return f.step() * s;
    }
    case Norm::l2: {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        double d = f.value(j) - g.value(j);
        s += d * d;
      }
      return std::sqrt(f.step() * s);
    }
  }
  throw DomainError("unknown norm");
}

double integral(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.step() * s;
}

GridFunction read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,value")
    throw IoError(path + ": expected header \"t,value\", got \"" + line +
                  "\"");
  std::vector<double> ts, vs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const char* s = line.c_str();
    char* end = nullptr;
    double t = std::strtod(s, &end);
    if (end == s || *end != ',')
      throw IoError(path + ":" + std::to_string(lineno) + ": bad row");
    const char* s2 = end + 1;
    double v = std::strtod(s2, &end);
    if (end == s2 || *end != '\0')
      throw IoError(path + ":" + std::to_string(lineno) + ": bad row");
    ts.push_back(t);
    vs.push_back(v);
  }
  if (ts.size() < 2)
    throw IoError(path + ": needs at least 2 data rows");
  Interval iv{ts.front(), ts.back()};
  check_interval(iv);
  GridFunction out(iv, std::move(vs));
  const double tol = 1e-9 * std::max(1.0, std::fabs(iv.length()));
  for (std::size_t j = 0; j < ts.size(); ++j) {
    if (std::fabs(ts[j] - out.node(j)) > tol)
      throw ShapeError(path + ": node " + std::to_string(j) +
                       " breaks uniform spacing");
  }
  return out;
}

void write_csv(const GridFunction& f, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("cannot open " + path + " for writing");
  std::fputs("t,value\n", fp);
  for (std::size_t j = 0; j < f.size(); ++j)
    std::fprintf(fp, "%.17g,%.17g\n", f.node(j), f.value(j));
  if (std::fclose(fp) != 0) throw IoError("write failed: " + path);
}

}  // namespace rearr
