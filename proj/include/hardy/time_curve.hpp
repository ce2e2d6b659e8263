#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/stencil.hpp"

namespace hardy {

namespace detail {

// Stencil plan for one operation on an (M, order) grid: per output slot the window
// start and the weights, already scaled by the step size.
struct StencilPlan {
  std::vector<std::size_t> start;
  std::vector<std::vector<double>> weights;
};

enum class PlanKind { derivative1, derivative2, derivative3, interval_integral };

inline std::shared_ptr<const StencilPlan> make_plan(PlanKind kind, std::size_t intervals, int order) {
  const std::size_t nodes = intervals + 1;
  const double h = 1.0 / static_cast<double>(intervals);
  auto plan = std::make_shared<StencilPlan>();
  if (kind == PlanKind::interval_integral) {
    const std::size_t q = static_cast<std::size_t>(order) + 2;
    plan->start.resize(intervals);
    plan->weights.resize(intervals);
    for (std::size_t i = 0; i < intervals; ++i) {
      const std::ptrdiff_t s0 = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(q / 2 - 1);
      const std::size_t s = static_cast<std::size_t>(
          std::clamp<std::ptrdiff_t>(s0, 0, static_cast<std::ptrdiff_t>(nodes - q)));
      std::vector<double> off(q);
      for (std::size_t j = 0; j < q; ++j) off[j] = static_cast<double>(s + j) - static_cast<double>(i);
      auto w = stencil::integration_weights(off, 0.0, 1.0);
      for (auto& v : w) v *= h;
      plan->start[i] = s;
      plan->weights[i] = std::move(w);
    }
    return plan;
  }
  const int m = kind == PlanKind::derivative1 ? 1 : kind == PlanKind::derivative2 ? 2 : 3;
  const std::size_t inner = ((order + m) % 2 == 1) ? order + m : order + m - 1;
  const std::size_t r = inner / 2;
  const std::size_t edge = static_cast<std::size_t>(order + m);
  plan->start.resize(nodes);
  plan->weights.resize(nodes);
  const double scale = std::pow(h, -m);
  for (std::size_t i = 0; i < nodes; ++i) {
    std::size_t s = 0;
    std::size_t q = inner;
    if (i >= r && i + r < nodes) {
      s = i - r;
    } else {
      q = edge;
      const std::ptrdiff_t s0 = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(q / 2);
      s = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(s0, 0, static_cast<std::ptrdiff_t>(nodes - q)));
    }
    std::vector<double> off(q);
    for (std::size_t j = 0; j < q; ++j) off[j] = static_cast<double>(s + j) - static_cast<double>(i);
    auto w = stencil::fd_weights(0.0, off, m);
    for (auto& v : w) v *= scale;
    plan->start[i] = s;
    plan->weights[i] = std::move(w);
  }
  return plan;
}

inline std::shared_ptr<const StencilPlan> cached_plan(PlanKind kind, std::size_t intervals, int order) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, int>, std::shared_ptr<const StencilPlan>> cache;
  const auto key = std::make_tuple(static_cast<int>(kind), intervals, order);
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto plan = make_plan(kind, intervals, order);
  cache.emplace(key, plan);
  return plan;
}

inline std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace detail

/// Real function on [0,1] sampled at M+1 equispaced nodes t_i = i/M.
///
/// Differentiation uses centered stencils of the configured accuracy order in the
/// interior and one-sided stencils of the same order near the ends. Integration
/// integrates the local interpolant of degree order+1 over each cell, so both
/// reproduce polynomials of degree <= order exactly.
class TimeCurve {
 public:
  static constexpr std::size_t min_intervals = 64;

  TimeCurve() = default;

  TimeCurve(std::vector<double> values, int order = 4) : values_(std::move(values)), order_(order) {
    detail::require(values_.size() >= min_intervals + 1, "TimeCurve: grid too coarse (M < 64)");
    detail::require(order_ >= 4 && order_ % 2 == 0 && order_ <= 8,
                    "TimeCurve: order must be even and in [4, 8]");
  }

  template <class F>
  static TimeCurve sample(std::size_t intervals, F&& f, int order = 4) {
    detail::require(intervals >= min_intervals, "TimeCurve: grid too coarse (M < 64)");
    std::vector<double> v(intervals + 1);
    for (std::size_t i = 0; i <= intervals; ++i) v[i] = f(static_cast<double>(i) / static_cast<double>(intervals));
    return TimeCurve(std::move(v), order);
  }

  static TimeCurve constant(std::size_t intervals, double c, int order = 4) {
    return sample(intervals, [c](double) { return c; }, order);
  }

  std::size_t intervals() const { return values_.size() - 1; }
  std::size_t size() const { return values_.size(); }
  int order() const { return order_; }
  double step() const { return 1.0 / static_cast<double>(intervals()); }
  double node(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(intervals()); }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  bool same_grid(const TimeCurve& o) const { return size() == o.size() && order_ == o.order_; }

  /// Local Lagrange interpolation through order+2 nodes.
  double operator()(double t) const {
    const std::size_t m = intervals();
    const std::size_t q = static_cast<std::size_t>(order_) + 2;
    const double x = std::clamp(t, 0.0, 1.0) * static_cast<double>(m);
    const std::size_t cell = std::min<std::size_t>(static_cast<std::size_t>(x), m - 1);
    const std::ptrdiff_t s0 = static_cast<std::ptrdiff_t>(cell) - static_cast<std::ptrdiff_t>(q / 2 - 1);
    const std::size_t s =
        static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(s0, 0, static_cast<std::ptrdiff_t>(m + 1 - q)));
    std::vector<double> off(q);
    for (std::size_t j = 0; j < q; ++j) off[j] = static_cast<double>(s + j);
    const auto w = stencil::lagrange_weights(x, off);
    double acc = 0.0;
    for (std::size_t j = 0; j < q; ++j) acc += w[j] * values_[s + j];
    return acc;
  }

  /// m-th derivative (m = 1, 2, 3) on the same grid.
  TimeCurve derivative(int m = 1) const {
    detail::require(m >= 1 && m <= 3, "TimeCurve::derivative: order must be 1, 2 or 3");
    const auto kind = m == 1 ? detail::PlanKind::derivative1
                    : m == 2 ? detail::PlanKind::derivative2
                             : detail::PlanKind::derivative3;
    const auto plan = detail::cached_plan(kind, intervals(), order_);
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) {
      const auto& w = plan->weights[i];
      const std::size_t s = plan->start[i];
      double acc = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * values_[s + j];
      out[i] = acc;
    }
    return TimeCurve(std::move(out), order_);
  }

  /// Running integral from 0: result(t_i) = int_0^{t_i} f.
  TimeCurve cumulative_integral() const {
    const auto plan = detail::cached_plan(detail::PlanKind::interval_integral, intervals(), order_);
    std::vector<double> out(size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < intervals(); ++i) {
      const auto& w = plan->weights[i];
      const std::size_t s = plan->start[i];
      double cell = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) cell += w[j] * values_[s + j];
      acc += cell;
      out[i + 1] = acc;
    }
    return TimeCurve(std::move(out), order_);
  }

  double integral() const { return cumulative_integral().back(); }

  double sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
  }

  /// Min over interior nodes 1..M-1.
  double interior_min() const { return *std::min_element(values_.begin() + 1, values_.end() - 1); }
  double interior_max() const { return *std::max_element(values_.begin() + 1, values_.end() - 1); }

  template <class F>
  TimeCurve map(F&& f) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = f(values_[i]);
    return TimeCurve(std::move(out), order_);
  }

  /// Pointwise f(t_i, value_i).
  template <class F>
  TimeCurve map_with_time(F&& f) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = f(node(i), values_[i]);
    return TimeCurve(std::move(out), order_);
  }

  TimeCurve& operator+=(const TimeCurve& o) { return zip_assign(o, std::plus<>{}); }
  TimeCurve& operator-=(const TimeCurve& o) { return zip_assign(o, std::minus<>{}); }
  TimeCurve& operator*=(const TimeCurve& o) { return zip_assign(o, std::multiplies<>{}); }
  TimeCurve& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }
  TimeCurve& operator+=(double s) {
    for (auto& v : values_) v += s;
    return *this;
  }

  friend TimeCurve operator+(TimeCurve a, const TimeCurve& b) { return a += b; }
  friend TimeCurve operator-(TimeCurve a, const TimeCurve& b) { return a -= b; }
  friend TimeCurve operator*(TimeCurve a, const TimeCurve& b) { return a *= b; }
  friend TimeCurve operator*(double s, TimeCurve a) { return a *= s; }
  friend TimeCurve operator*(TimeCurve a, double s) { return a *= s; }
  friend TimeCurve operator+(TimeCurve a, double s) { return a += s; }
  friend TimeCurve operator-(TimeCurve a, double s) { return a += -s; }

  /// CSV with header `t,value`, 12 significant digits, one row per node.
  void write_csv(std::ostream& os) const {
    os << "t,value\n";
    for (std::size_t i = 0; i < size(); ++i)
      os << detail::format_number(node(i)) << ',' << detail::format_number(values_[i]) << '\n';
  }

  void write_csv(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_csv(os);
  }

  static TimeCurve read_csv(std::istream& is, int order = 4) {
    std::string line;
    std::getline(is, line);
    detail::require(line.rfind("t,value", 0) == 0, "TimeCurve CSV: missing `t,value` header");
    std::vector<double> v;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      detail::require(comma != std::string::npos, "TimeCurve CSV: malformed row");
      v.push_back(std::stod(line.substr(comma + 1)));
    }
    return TimeCurve(std::move(v), order);
  }

 private:
  template <class Op>
  TimeCurve& zip_assign(const TimeCurve& o, Op op) {
    detail::require(size() == o.size(), "TimeCurve: grid mismatch");
    for (std::size_t i = 0; i < size(); ++i) values_[i] = op(values_[i], o.values_[i]);
    return *this;
  }

  std::vector<double> values_;
  int order_ = 4;
};

/// exp(s * c) pointwise.
inline TimeCurve exp_of(const TimeCurve& c, double s = 1.0) {
  return c.map([s](double v) { return std::exp(s * v); });
}

/// Solves (gamma y')' = rhs on [t_c, t_d] with y(t_c) = y(t_d) = 0 by double quadrature:
/// gamma y' = R(t) + C with R = int_c^t rhs, then y = int_c^t (R + C)/gamma and C fixed
/// by y(t_d) = 0. c and d are node indices; the result is zero outside [c, d].
inline TimeCurve solve_weighted_dirichlet(const TimeCurve& gamma, const TimeCurve& rhs, std::size_t c,
                                          std::size_t d) {
  detail::require(gamma.same_grid(rhs), "solve_weighted_dirichlet: grid mismatch");
  detail::require(c < d && d < gamma.size(), "solve_weighted_dirichlet: need c < d inside the grid");
  for (std::size_t i = 0; i < gamma.size(); ++i)
    detail::require(gamma[i] > 0.0, "solve_weighted_dirichlet: gamma must be positive");
  TimeCurve flux = rhs.cumulative_integral();
  flux += -flux[c];
  TimeCurve inv_gamma = gamma.map([](double g) { return 1.0 / g; });
  TimeCurve g_int = inv_gamma.cumulative_integral();
  g_int += -g_int[c];
  TimeCurve j_int = (flux * inv_gamma).cumulative_integral();
  j_int += -j_int[c];
  const double constant = -j_int[d] / g_int[d];
  TimeCurve y = j_int + constant * g_int;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (i <= c || i >= d) y[i] = 0.0;
  return y;
}

}  // namespace hardy
