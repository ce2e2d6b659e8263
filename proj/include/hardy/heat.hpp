#pragma once

// Heat evolution d_t u = u_xx + V(x,t) u on the periodic box, the explicit solutions
// u_R, and the symmetric / skew parts S, A of the heat operator conjugated by the
// Gaussian weight e^{a x^2 + b x xi - T xi^2}.

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/spectral.hpp"
#include "hardy/time_curve.hpp"
#include "hardy/weights.hpp"

namespace hardy::heat {

struct Trajectory {
  std::vector<Field> frames;

  const SpaceGrid& grid() const { return frames.front().grid(); }
  std::size_t size() const { return frames.size(); }

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(frames.size());
    for (const auto& f : frames) t.push_back(f.time());
    return t;
  }

  /// frames.csv (`index,t,file`) plus one `x,re,im` CSV per frame.
  void write_directory(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream index(dir / "frames.csv");
    if (!index) throw std::runtime_error("cannot write " + (dir / "frames.csv").string());
    index << "index,t,file\n";
    for (std::size_t i = 0; i < frames.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%04zu.csv", i);
      index << i << ',' << detail::format_number(frames[i].time()) << ',' << name << '\n';
      std::ofstream os(dir / name);
      frames[i].write_csv(os);
    }
  }
};

struct EvolveOptions {
  std::size_t store_every = 1;
  double max_dt = 1e-3;
  double tail_tol = 1e-8;
  bool check_initial_tail = true;
  bool check_tail = true;
};

/// Strang splitting: e^{dt/2 V(t_n)} e^{dt d_xx} e^{dt/2 V(t_{n+1})}, with the diffusion
/// step exact on the discrete Fourier basis. Frames are stored every store_every steps
/// (the initial field is frame 0).
inline Trajectory evolve(const Field& u0, const PotentialSpec& V, double t0, double t1, std::size_t steps,
                         const EvolveOptions& opt = {}) {
  detail::require(t0 < t1, "evolve: need t0 < t1");
  detail::require(steps >= 1, "evolve: need at least one step");
  detail::require(opt.store_every >= 1 && steps % opt.store_every == 0,
                  "evolve: steps must be a multiple of store_every");
  const double dt = (t1 - t0) / static_cast<double>(steps);
  detail::require(V.is_zero() || dt <= opt.max_dt * (1.0 + 1e-12),
                  "evolve: step count too small for requested accuracy (dt = " + std::to_string(dt) + ")");
  if (opt.check_initial_tail) u0.check_tail(opt.tail_tol, "evolve: initial data");

  const SpaceGrid& grid = u0.grid();
  const std::size_t n = grid.size();
  const Fft fft(n);
  std::vector<cplx> diffusion(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = grid.wavenumber(j);
    diffusion[j] = std::exp(-dt * k * k);
  }

  auto half_potential = [&](std::vector<cplx>& u, double t) {
    if (V.is_zero()) return;
    for (std::size_t j = 0; j < n; ++j) u[j] *= std::exp(0.5 * dt * V(grid.x(j), t));
  };

  Trajectory traj;
  traj.frames.reserve(steps / opt.store_every + 1);
  Field first = u0;
  first.set_time(t0);
  traj.frames.push_back(first);
  std::vector<cplx> u(u0.samples().begin(), u0.samples().end());
  std::vector<cplx> hat(n);
  for (std::size_t s = 0; s < steps; ++s) {
    const double ta = t0 + (t1 - t0) * static_cast<double>(s) / static_cast<double>(steps);
    const double tb = t0 + (t1 - t0) * static_cast<double>(s + 1) / static_cast<double>(steps);
    half_potential(u, ta);
    fft.forward(u, hat);
    for (std::size_t j = 0; j < n; ++j) hat[j] *= diffusion[j];
    fft.backward(hat, u);
    half_potential(u, tb);
    if ((s + 1) % opt.store_every == 0) {
      traj.frames.emplace_back(grid, u, tb);
      if (opt.check_tail) traj.frames.back().check_tail(opt.tail_tol, "evolve: frame at t = " + std::to_string(tb));
    }
  }
  return traj;
}

/// u_R(x,t) = (t - iR)^{-1/2} e^{-x^2 / 4(t - iR)}, principal branch.
inline cplx eval_uR(double x, double t, double R) {
  detail::require(!(t == 0.0 && R == 0.0), "eval_uR: singular point (t, R) = (0, 0)");
  const cplx z(t, -R);
  return std::exp(-x * x / (4.0 * z)) / std::sqrt(z);
}

inline Field sample_uR(const SpaceGrid& grid, double t, double R) {
  return Field::sample(grid, [t, R](double x) { return eval_uR(x, t, R); }, t);
}

/// Free heat evolution of e^{-lambda x^2}: (1 + 4 lambda t)^{-1/2} e^{-lambda x^2 / (1 + 4 lambda t)}.
inline double gaussian_heat(double x, double t, double lambda) {
  const double s = 1.0 + 4.0 * lambda * t;
  return std::exp(-lambda * x * x / s) / std::sqrt(s);
}

/// Weight-family coefficients and their time derivatives, interpolated at any t in [0,1].
class CoefficientTable {
 public:
  struct Values {
    double a, da, dda;
    double b, db, ddb;
    double T, dT, ddT;
    double A;
    double convexity;  // (e^{8A} a)'' from a direct second difference
  };

  explicit CoefficientTable(const weights::WeightFamily& w)
      : a_(w.a), da_(w.a.derivative(1)), dda_(w.a.derivative(2)),
        b_(w.b), db_(w.b.derivative(1)), ddb_(w.b.derivative(2)),
        T_(w.T), dT_(w.T.derivative(1)), ddT_(w.T.derivative(2)),
        A_(w.A), conv_(make_convexity(w)) {}

  Values at(double t) const {
    return {a_(t), da_(t), dda_(t), b_(t), db_(t), ddb_(t), T_(t), dT_(t), ddT_(t), A_(t), conv_(t)};
  }

 private:
  static TimeCurve make_convexity(const weights::WeightFamily& w) {
    TimeCurve ea = w.a;
    for (std::size_t i = 0; i < ea.size(); ++i) ea[i] = std::exp(8.0 * w.A[i]) * w.a[i];
    return ea.derivative(2);
  }

  TimeCurve a_, da_, dda_, b_, db_, ddb_, T_, dT_, ddT_, A_, conv_;
};

namespace detail {

// (a' + 4a^2) x^2 + (b' + 4ab) x xi + (b^2 - T') xi^2
inline double s_multiplier(const CoefficientTable::Values& c, double x, double xi) {
  return (c.da + 4.0 * c.a * c.a) * x * x + (c.db + 4.0 * c.a * c.b) * x * xi + (c.b * c.b - c.dT) * xi * xi;
}

// multiplier part of S_t + [S, A]
inline double commutator_multiplier(const CoefficientTable::Values& c, double x, double xi) {
  const double a = c.a, b = c.b;
  return (c.dda + 16.0 * a * c.da + 32.0 * a * a * a) * x * x +
         (c.ddb + 8.0 * a * c.db + 8.0 * c.da * b + 32.0 * a * a * b) * x * xi +
         (8.0 * a * b * b + 4.0 * b * c.db - c.ddT) * xi * xi;
}

}  // namespace detail

struct OperatorOptions {
  double tail_tol = 1e-8;
};

inline Field apply_S(const Field& f, const CoefficientTable& coef, double t, double xi,
                     const OperatorOptions& opt = {}) {
  f.check_tail(opt.tail_tol, "apply_S");
  const auto c = coef.at(t);
  Field out = laplacian(f);
  for (std::size_t j = 0; j < f.size(); ++j) out[j] += detail::s_multiplier(c, f.grid().x(j), xi) * f[j];
  return out;
}

/// S = d_xx + (a' + 4a^2) x^2 + (b' + 4ab) x xi + (b^2 - T') xi^2 at time t.
inline Field apply_S(const Field& f, const weights::WeightFamily& w, double t, double xi,
                     const OperatorOptions& opt = {}) {
  return apply_S(f, CoefficientTable(w), t, xi, opt);
}

inline Field apply_A(const Field& f, const CoefficientTable& coef, double t, double xi,
                     const OperatorOptions& opt = {}) {
  f.check_tail(opt.tail_tol, "apply_A");
  const auto c = coef.at(t);
  // A = c d_x + c'/2 with c = -(4a x + 2b xi), written as (c d_x + d_x c)/2 so that the
  // discrete operator is exactly skew.
  Field cf = f;
  for (std::size_t j = 0; j < f.size(); ++j) cf[j] *= -(4.0 * c.a * f.grid().x(j) + 2.0 * c.b * xi);
  Field out = gradient(f);
  const Field dcf = gradient(cf);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double cj = -(4.0 * c.a * f.grid().x(j) + 2.0 * c.b * xi);
    out[j] = 0.5 * (cj * out[j] + dcf[j]);
  }
  return out;
}

/// A = -2(2a x + b xi) d_x - 2n a with n = 1, at time t.
inline Field apply_A(const Field& f, const weights::WeightFamily& w, double t, double xi,
                     const OperatorOptions& opt = {}) {
  return apply_A(f, CoefficientTable(w), t, xi, opt);
}

struct CommutatorForm {
  double lhs = 0.0;  // ((e^{8A}(S_t + [S,A]) + (e^{8A})' S) f, f)
  double rhs = 0.0;  // int (e^{8A} a)'' (x + xi)^2 |f|^2
};

/// Assembles lhs from the displayed form S_t + [S,A] = -8a d_xx + multiplier, with the
/// coefficient time derivatives taken from finite differences of the curves; rhs uses a
/// direct second difference of e^{8A} a. Throws certificate_error when
/// |lhs - rhs| > rel_tol * |rhs|.
inline CommutatorForm commutator_form(const Field& f, const CoefficientTable& coef, double t, double xi,
                                      double rel_tol = 1e-4, const OperatorOptions& opt = {}) {
  f.check_tail(opt.tail_tol, "commutator_form");
  const auto c = coef.at(t);
  const double g = std::exp(8.0 * c.A);
  const Field lap = laplacian(f);
  Field op(f.grid(), f.time());
  double rhs = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double x = f.grid().x(j);
    const cplx comm = -8.0 * c.a * lap[j] + detail::commutator_multiplier(c, x, xi) * f[j];
    const cplx s = lap[j] + detail::s_multiplier(c, x, xi) * f[j];
    op[j] = g * comm + 8.0 * c.a * g * s;
    rhs += c.convexity * (x + xi) * (x + xi) * std::norm(f[j]);
  }
  CommutatorForm out{inner(op, f).real(), rhs * f.grid().spacing()};
  hardy::detail::certify(std::fabs(out.lhs - out.rhs) <= rel_tol * std::fabs(out.rhs),
                         "commutator_form: assembled and integrated forms disagree (lhs = " +
                             std::to_string(out.lhs) + ", rhs = " + std::to_string(out.rhs) + ")");
  return out;
}

inline CommutatorForm commutator_form(const Field& f, const weights::WeightFamily& w, double t, double xi,
                                      double rel_tol = 1e-4, const OperatorOptions& opt = {}) {
  return commutator_form(f, CoefficientTable(w), t, xi, rel_tol, opt);
}

/// Fourth-order time derivative across uniformly spaced frames, for frame i.
inline Field frame_time_derivative(const std::vector<Field>& frames, std::size_t i) {
  const std::size_t count = frames.size();
  hardy::detail::require(count >= 7, "frame_time_derivative: need at least 7 frames");
  const auto plan = hardy::detail::cached_plan(hardy::detail::PlanKind::derivative1, count - 1, 4);
  const double span = frames.back().time() - frames.front().time();
  // plan weights assume spacing 1/(count-1) on [0,1]
  const double rescale = 1.0 / span;
  Field out(frames[i].grid(), frames[i].time());
  const auto& w = plan->weights[i];
  const std::size_t s = plan->start[i];
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto& fk = frames[s + k];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w[k] * rescale * fk[j];
  }
  return out;
}

/// Largest relative residual ||d_t u - u_xx - V u|| / ||u|| over the frames.
inline double pde_residual(const Trajectory& traj, const PotentialSpec& V) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Field& u = traj.frames[i];
    Field r = frame_time_derivative(traj.frames, i);
    const Field lap = laplacian(u);
    for (std::size_t j = 0; j < u.size(); ++j) r[j] -= lap[j] + V(u.grid().x(j), u.time()) * u[j];
    worst = std::max(worst, r.norm() / u.norm());
  }
  return worst;
}

/// Energy inequality ||u(t)|| <= e^{(t - t0) sup Re V} ||u(t0)||, sup taken over grid nodes and
/// frame times (clamped below at zero). Returns the largest relative excess; <= 0 means it holds.
inline double energy_excess(const Trajectory& traj, const PotentialSpec& V) {
  const auto times = traj.times();
  double growth = 0.0;
  for (double t : times)
    for (std::size_t j = 0; j < traj.grid().size(); ++j) growth = std::max(growth, V(traj.grid().x(j), t).real());
  const double n0 = traj.frames.front().norm();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& f : traj.frames) {
    const double bound = std::exp(growth * (f.time() - times.front())) * n0;
    worst = std::max(worst, (f.norm() - bound) / n0);
  }
  return worst;
}

}  // namespace hardy::heat
