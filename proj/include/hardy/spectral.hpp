#pragma once

// Periodic 1-D spatial grid, FFT wrapper and complex fields sampled on the grid.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/time_curve.hpp"

namespace hardy {

using cplx = std::complex<double>;

/// Nodes x_j = -L + 2Lj/N, j = 0..N-1, with x_N identified with x_0.
class SpaceGrid {
 public:
  static constexpr std::size_t min_points = 256;

  SpaceGrid(double half_width, std::size_t points) : half_width_(half_width), points_(points) {
    detail::require(half_width > 0.0, "SpaceGrid: half width must be positive");
    detail::require(points >= min_points && (points & (points - 1)) == 0,
                    "SpaceGrid: point count must be a power of two >= 256");
  }

  double half_width() const { return half_width_; }
  std::size_t size() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / static_cast<double>(points_); }
  double x(std::size_t j) const { return -half_width_ + spacing() * static_cast<double>(j); }

  /// Angular wavenumber of FFT slot j; the Nyquist slot carries -pi N / 2L.
  double wavenumber(std::size_t j) const {
    const double k0 = std::numbers::pi / half_width_;
    const auto n = static_cast<std::ptrdiff_t>(points_);
    const auto jj = static_cast<std::ptrdiff_t>(j);
    return k0 * static_cast<double>(jj < n / 2 ? jj : jj - n);
  }

  bool operator==(const SpaceGrid& o) const { return half_width_ == o.half_width_ && points_ == o.points_; }

 private:
  double half_width_;
  std::size_t points_;
};

/// Unnormalized forward / normalized backward complex DFT of a fixed length.
/// Plans are created once per length under a lock; execution is reentrant.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n), plans_(plans_for(n)) {}

  void forward(std::span<const cplx> in, std::span<cplx> out) const {
    fftw_execute_dft(plans_->forward, to_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
  }

  void backward(std::span<const cplx> in, std::span<cplx> out) const {
    fftw_execute_dft(plans_->backward, to_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& v : out) v *= s;
  }

 private:
  struct Plans {
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    ~Plans() {
      fftw_destroy_plan(forward);
      fftw_destroy_plan(backward);
    }
  };

  static fftw_complex* to_fftw(std::span<const cplx> in) {
    // FFTW's new-array execute takes a non-const input pointer but does not write to it
    // for out-of-place plans.
    return reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  }

  static std::shared_ptr<const Plans> plans_for(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const Plans>> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    auto p = std::make_shared<Plans>();
    std::vector<cplx> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const auto len = static_cast<int>(n);
    p->forward = fftw_plan_dft_1d(len, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    p->backward = fftw_plan_dft_1d(len, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
  }

  std::size_t n_;
  std::shared_ptr<const Plans> plans_;
};

/// Complex samples u(x_j) at one time.
class Field {
 public:
  Field(SpaceGrid grid, std::vector<cplx> samples, double time = 0.0)
      : grid_(grid), samples_(std::move(samples)), time_(time) {
    detail::require(samples_.size() == grid_.size(), "Field: sample count does not match grid");
  }

  explicit Field(SpaceGrid grid, double time = 0.0) : Field(grid, std::vector<cplx>(grid.size()), time) {}

  template <class F>
  static Field sample(const SpaceGrid& grid, F&& f, double time = 0.0) {
    std::vector<cplx> v(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) v[j] = f(grid.x(j));
    return Field(grid, std::move(v), time);
  }

  const SpaceGrid& grid() const { return grid_; }
  std::span<const cplx> samples() const { return samples_; }
  std::span<cplx> samples() { return samples_; }
  cplx operator[](std::size_t j) const { return samples_[j]; }
  cplx& operator[](std::size_t j) { return samples_[j]; }
  std::size_t size() const { return samples_.size(); }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& v : samples_) s += std::norm(v);
    return s * grid_.spacing();
  }
  double norm() const { return std::sqrt(norm_squared()); }

  /// Fraction of |u|^2 carried by |x| > 0.9 L.
  double tail_fraction() const {
    double tail = 0.0, total = 0.0;
    const double edge = 0.9 * grid_.half_width();
    for (std::size_t j = 0; j < size(); ++j) {
      const double m = std::norm(samples_[j]);
      total += m;
      if (std::fabs(grid_.x(j)) > edge) tail += m;
    }
    return total > 0.0 ? tail / total : 0.0;
  }

  void check_tail(double tail_tol, const std::string& where) const {
    const double f = tail_fraction();
    if (!(f <= tail_tol))
      throw tail_error(where + ": tail mass fraction " + detail::format_number(f) + " exceeds " + detail::format_number(tail_tol) +
                       " (domain too small)");
  }

  Field& operator+=(const Field& o) { return zip(o, [](cplx x, cplx y) { return x + y; }); }
  Field& operator-=(const Field& o) { return zip(o, [](cplx x, cplx y) { return x - y; }); }
  Field& operator*=(cplx s) {
    for (auto& v : samples_) v *= s;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(cplx s, Field a) { return a *= s; }

  /// CSV `x,re,im`, 12 significant digits.
  void write_csv(std::ostream& os) const {
    os << "x,re,im\n";
    for (std::size_t j = 0; j < size(); ++j)
      os << detail::format_number(grid_.x(j)) << ',' << detail::format_number(samples_[j].real()) << ','
         << detail::format_number(samples_[j].imag()) << '\n';
  }

 private:
  template <class Op>
  Field& zip(const Field& o, Op op) {
    detail::require(grid_ == o.grid_, "Field: grid mismatch");
    for (std::size_t j = 0; j < size(); ++j) samples_[j] = op(samples_[j], o.samples_[j]);
    return *this;
  }

  SpaceGrid grid_;
  std::vector<cplx> samples_;
  double time_;
};

/// (f, g) = int f conj(g) dx by the periodic trapezoidal rule.
inline cplx inner(const Field& f, const Field& g) {
  detail::require(f.grid() == g.grid(), "inner: grid mismatch");
  cplx s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) s += f[j] * std::conj(g[j]);
  return s * f.grid().spacing();
}

/// Spectral multiplier m(k) applied to f.
template <class Multiplier>
Field apply_multiplier(const Field& f, Multiplier&& m) {
  const Fft fft(f.size());
  std::vector<cplx> hat(f.size()), out(f.size());
  fft.forward(f.samples(), hat);
  for (std::size_t j = 0; j < hat.size(); ++j) hat[j] *= m(j, f.grid().wavenumber(j));
  fft.backward(hat, out);
  return Field(f.grid(), std::move(out), f.time());
}

inline Field laplacian(const Field& f) {
  return apply_multiplier(f, [](std::size_t, double k) { return cplx(-k * k, 0.0); });
}

/// Spectral d/dx; the Nyquist mode is dropped so the discrete operator is skew.
inline Field gradient(const Field& f) {
  const std::size_t nyq = f.size() / 2;
  return apply_multiplier(f, [nyq](std::size_t j, double k) { return j == nyq ? cplx(0.0) : cplx(0.0, k); });
}

/// Bounded complex potential V(x, t) with its sup-norm over the space-time box.
struct PotentialSpec {
  std::string name = "none";
  std::function<cplx(double, double)> evaluator = [](double, double) { return cplx(0.0); };
  double sup_norm = 0.0;

  cplx operator()(double x, double t) const { return evaluator(x, t); }
  bool is_zero() const { return sup_norm == 0.0; }

  static PotentialSpec none() { return {}; }

  static PotentialSpec constant(cplx c) {
    return {"constant", [c](double, double) { return c; }, std::abs(c)};
  }

  /// amplitude * e^{-x^2}
  static PotentialSpec gauss_real(double amplitude) {
    return {"gauss-real", [amplitude](double x, double) { return cplx(amplitude * std::exp(-x * x), 0.0); },
            std::fabs(amplitude)};
  }

  /// i * amplitude * e^{-x^2}
  static PotentialSpec gauss_imag(double amplitude) {
    return {"gauss-imag", [amplitude](double x, double) { return cplx(0.0, amplitude * std::exp(-x * x)); },
            std::fabs(amplitude)};
  }

  static PotentialSpec by_name(const std::string& name, double amplitude) {
    if (name == "none") return none();
    if (name == "gauss-real") return gauss_real(amplitude);
    if (name == "gauss-imag") return gauss_imag(amplitude);
    throw precondition_error("unknown potential `" + name + "` (expected none, gauss-real, gauss-imag)");
  }

  /// Largest |V| over grid nodes and the given times; must not exceed sup_norm.
  double sampled_max(const SpaceGrid& grid, std::span<const double> times) const {
    double m = 0.0;
    for (double t : times)
      for (std::size_t j = 0; j < grid.size(); ++j) m = std::max(m, std::abs(evaluator(grid.x(j), t)));
    return m;
  }
};

}  // namespace hardy
