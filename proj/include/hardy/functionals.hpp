#pragma once

// Weighted norms, the log-convexity engine, the Appell transformation and the
// bound / sharpness verifiers built on top of the heat and weights modules.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/heat.hpp"
#include "hardy/spectral.hpp"
#include "hardy/time_curve.hpp"
#include "hardy/weights.hpp"

namespace hardy::functionals {

using heat::Trajectory;

/// Gaussian weight e^{a x^2 + b x xi - T xi^2} frozen at one time slice.
struct WeightedNormSpec {
  double a = 0.0;
  double b = 0.0;
  double T = 0.0;
  double xi = 0.0;

  double exponent(double x) const { return a * x * x + b * x * xi - T * xi * xi; }
};

/// ||e^{a x^2 + b x xi - T xi^2} u|| by the periodic trapezoidal rule. The weighted
/// integrand must carry at most tail_tol of its mass beyond 0.9 L; otherwise the weight
/// defeats the decay of u and tail_error is thrown instead of returning a truncated value.
inline double weighted_norm(const Field& u, const WeightedNormSpec& spec, double tail_tol = 1e-8) {
  const auto& grid = u.grid();
  const double edge = 0.9 * grid.half_width();
  double total = 0.0, tail = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = grid.x(j);
    const double v = std::exp(2.0 * spec.exponent(x)) * std::norm(u[j]);
    total += v;
    if (std::fabs(x) > edge) tail += v;
  }
  if (!std::isfinite(total) || !(tail <= tail_tol * total))
    throw tail_error("weighted_norm: weighted tail fraction " + std::to_string(tail / total) +
                     " exceeds tolerance (norm is infinite at this truncation)");
  return std::sqrt(total * grid.spacing());
}

/// e^{a x^2 + b x xi - T xi^2} u pointwise.
inline Field weighted_field(const Field& u, const WeightedNormSpec& spec) {
  Field f = u;
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= std::exp(spec.exponent(u.grid().x(j)));
  return f;
}

namespace detail {

inline std::size_t node_index(const TimeCurve& c, double t, const char* what) {
  const double x = t * static_cast<double>(c.intervals());
  const double r = std::round(x);
  hardy::detail::require(t >= 0.0 && t <= 1.0 && std::fabs(x - r) <= 1e-9,
                         std::string(what) + ": endpoint must be a grid node in [0,1]");
  return static_cast<std::size_t>(r);
}

}  // namespace detail

/// theta(t) = int_t^d ds/gamma / int_c^d ds/gamma.
inline double theta(double t, double c, double d, const TimeCurve& gamma) {
  hardy::detail::require(c < d && c <= t && t <= d && c >= 0.0 && d <= 1.0, "theta: need 0 <= c <= t <= d <= 1");
  for (double g : gamma.values()) hardy::detail::require(g > 0.0, "theta: gamma must be positive");
  if (t == c) return 1.0;
  if (t == d) return 0.0;
  const TimeCurve g = gamma.map([](double v) { return 1.0 / v; }).cumulative_integral();
  return (g(d) - g(t)) / (g(d) - g(c));
}

/// theta sampled at every node of [c, d] (c, d node indices); 1 before c, 0 after d.
inline TimeCurve theta_curve(const TimeCurve& gamma, std::size_t c, std::size_t d) {
  for (double g : gamma.values()) hardy::detail::require(g > 0.0, "theta: gamma must be positive");
  const TimeCurve g = gamma.map([](double v) { return 1.0 / v; }).cumulative_integral();
  TimeCurve th = g;
  const double den = g[d] - g[c];
  for (std::size_t i = 0; i < g.size(); ++i)
    th[i] = i <= c ? 1.0 : i >= d ? 0.0 : (g[d] - g[i]) / den;
  return th;
}

/// Solves (gamma M')' = -source on [c, d], M(c) = M(d) = 0, by double quadrature. The
/// ODE is checked in once-integrated form, gamma M' + int_c^t source = const on [c, d],
/// since a second difference of a quadrature-built M amplifies noise in a sampled source.
inline TimeCurve solve_M_epsilon(const TimeCurve& gamma, const TimeCurve& source, double c, double d,
                                 double tol = 1e-6) {
  hardy::detail::require(gamma.same_grid(source), "solve_M_epsilon: grid mismatch");
  for (double g : gamma.values()) hardy::detail::require(g > 0.0, "solve_M_epsilon: gamma must be positive");
  const std::size_t ic = detail::node_index(gamma, c, "solve_M_epsilon");
  const std::size_t id = detail::node_index(gamma, d, "solve_M_epsilon");
  hardy::detail::require(ic < id, "solve_M_epsilon: need c < d");
  TimeCurve M = solve_weighted_dirichlet(gamma, -1.0 * source, ic, id);

  const TimeCurve flux = gamma * M.derivative(1) + source.cumulative_integral();
  const std::size_t margin = static_cast<std::size_t>(gamma.order());
  const std::size_t lo = ic == 0 ? 0 : ic + margin;
  const std::size_t hi = id + 1 == gamma.size() ? id : id - std::min(id, margin);
  double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin, scale = 0.0;
  for (std::size_t i = ic; i <= id; ++i) scale = std::max(scale, std::fabs(source[i]));
  for (std::size_t i = lo; i <= hi; ++i) {
    fmin = std::min(fmin, flux[i]);
    fmax = std::max(fmax, flux[i]);
  }
  const double residual = lo <= hi ? fmax - fmin : 0.0;
  hardy::detail::certify(residual <= tol * std::max(1.0, scale),
                         "solve_M_epsilon: residual " + hardy::detail::format_number(residual) +
                             " exceeds tolerance");
  return M;
}

struct ConvexityReport {
  TimeCurve H;      // ||f(t)||^2
  TimeCurve theta;
  TimeCurve M;      // M_epsilon
  double Nval = 0.0;
  TimeCurve slack;  // rhs - lhs of the interpolation inequality
  double epsilon = 0.0;
  double min_slack = 0.0;
  double scale = 0.0;                 // max H
  double conjugation_residual = 0.0;  // max ||(d_t f - S f - A f) - V f|| / ||f||
  double commutator_min = 0.0;        // min over nodes of the hypothesis form / its scale

  void write_csv(std::ostream& os) const {
    using hardy::detail::format_number;
    os << "t,H,theta,M,slack\n";
    for (std::size_t i = 0; i < H.size(); ++i)
      os << format_number(H.node(i)) << ',' << format_number(H[i]) << ',' << format_number(theta[i]) << ','
         << format_number(M[i]) << ',' << format_number(slack[i]) << '\n';
  }
};

struct ConvexityOptions {
  double tail_tol = 1e-8;
  double conjugation_tol = 1e-3;  // relative to ||f||; dominated by the t = 1 frames
  double commutator_rel_tol = 1e-4;
  double commutator_floor = 1e-8; // hypothesis form must be >= -floor * scale
  double bvp_tol = 1e-6;
};

/// Runs the log-convexity inequality
///   H(t) + eps <= (H(c) + eps)^theta (H(d) + eps)^(1 - theta) e^{M_eps(t) + 2 N_eps}
/// on f(t) = e^{a x^2 + b x xi - T xi^2} u(t), gamma = e^{8A}. Trajectory frames must sit
/// on the weight grid nodes t_i = i / M. The hypothesis (commutator positivity) is certified
/// frame by frame, and d_t f - S f - A f is checked against V f.
inline ConvexityReport check_logconvexity(const Trajectory& traj, const weights::WeightFamily& w, double xi,
                                          const PotentialSpec& V, double epsilon, double c, double d,
                                          const ConvexityOptions& opt = {}) {
  using hardy::detail::certify;
  using hardy::detail::require;
  const std::size_t m = w.a.intervals();
  require(traj.size() == m + 1, "check_logconvexity: trajectory must have one frame per weight node");
  for (std::size_t i = 0; i <= m; ++i)
    require(std::fabs(traj.frames[i].time() - w.a.node(i)) <= 1e-9,
            "check_logconvexity: frame times must match the weight grid on [0,1]");
  require(epsilon > 0.0, "check_logconvexity: epsilon must be positive");
  const std::size_t ic = detail::node_index(w.a, c, "check_logconvexity");
  const std::size_t id = detail::node_index(w.a, d, "check_logconvexity");
  require(ic < id, "check_logconvexity: need c < d");

  const heat::CoefficientTable coef(w);
  heat::OperatorOptions op_opt{opt.tail_tol};
  std::vector<Field> f;
  f.reserve(m + 1);
  for (std::size_t i = 0; i <= m; ++i) {
    Field fi = weighted_field(traj.frames[i], {w.a[i], w.b[i], w.T[i], xi});
    fi.check_tail(opt.tail_tol, "check_logconvexity: weighted frame");
    f.push_back(std::move(fi));
  }

  ConvexityReport rep;
  rep.epsilon = epsilon;
  rep.H = w.a;
  TimeCurve source = w.a, n_integrand = w.a;
  const TimeCurve gamma = exp_of(w.A, 8.0);
  rep.commutator_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = w.a.node(i);
    const double h = f[i].norm_squared();
    rep.H[i] = h;
    Field r = heat::frame_time_derivative(f, i);
    const Field s = heat::apply_S(f[i], coef, t, xi, op_opt);
    const Field a = heat::apply_A(f[i], coef, t, xi, op_opt);
    r -= s;
    r -= a;
    Field vf = f[i];
    for (std::size_t j = 0; j < vf.size(); ++j) vf[j] *= V(vf.grid().x(j), t);
    rep.conjugation_residual = std::max(rep.conjugation_residual, (r - vf).norm() / std::sqrt(h));
    source[i] = gamma[i] * r.norm_squared() / (h + epsilon);
    n_integrand[i] = std::fabs(inner(r, f[i]).real()) / (h + epsilon);

    const auto form = heat::commutator_form(f[i], coef, t, xi, opt.commutator_rel_tol, op_opt);
    const double form_scale = std::max(std::fabs(form.rhs), 1e-300);
    rep.commutator_min = std::min(rep.commutator_min, form.lhs / std::max(form_scale, h));
    certify(form.lhs >= -opt.commutator_floor * std::max(1.0, h),
            "check_logconvexity: hypothesis certificate fails at t = " + std::to_string(t));
  }
  certify(rep.conjugation_residual <= opt.conjugation_tol,
          "check_logconvexity: conjugation identity residual " + std::to_string(rep.conjugation_residual) +
              " too large");

  const TimeCurve n_cum = n_integrand.cumulative_integral();
  rep.Nval = n_cum[id] - n_cum[ic];
  rep.M = solve_M_epsilon(gamma, source, c, d, opt.bvp_tol);
  rep.theta = theta_curve(gamma, ic, id);
  rep.slack = w.a;
  rep.scale = rep.H.sup_norm();
  rep.min_slack = std::numeric_limits<double>::infinity();
  const double hc = rep.H[ic] + epsilon, hd = rep.H[id] + epsilon;
  for (std::size_t i = 0; i <= m; ++i) {
    if (i < ic || i > id) {
      rep.slack[i] = 0.0;
      continue;
    }
    const double th = rep.theta[i];
    const double bound = std::pow(hc, th) * std::pow(hd, 1.0 - th) * std::exp(rep.M[i] + 2.0 * rep.Nval);
    rep.slack[i] = bound - (rep.H[i] + epsilon);
    rep.min_slack = std::min(rep.min_slack, rep.slack[i]);
  }
  return rep;
}

/// Constant weight gamma_w, b = T = 0 on the grid of M intervals. With xi = 0 the
/// hypothesis form reduces to (e^{8A} a)'' x^2 = 64 a^3 e^{8A} x^2 >= 0.
inline weights::WeightFamily constant_weight_family(double a, std::size_t intervals, int order = 4) {
  weights::WeightFamily w;
  w.delta = 0.0;
  w.a = TimeCurve::constant(intervals, a, order);
  w.A = TimeCurve::sample(intervals, [a](double t) { return a * (t - 1.0); }, order);
  w.b = TimeCurve::constant(intervals, 0.0, order);
  w.T = TimeCurve::constant(intervals, 0.0, order);
  return w;
}

// ---------------------------------------------------------------------------
// Appell transformation

struct AppellParams {
  double alpha = 1.0;
  double beta = 1.0;

  double denominator(double t) const { return alpha * (1.0 - t) + beta * t; }
  /// source time s(t) = beta t / (alpha (1 - t) + beta t)
  double source_time(double t) const { return beta * t / denominator(t); }
  /// source point y(x, t) = sqrt(alpha beta) x / (alpha (1 - t) + beta t)
  double source_point(double x, double t) const { return std::sqrt(alpha * beta) * x / denominator(t); }
  double amplitude(double t) const { return std::sqrt(std::sqrt(alpha * beta) / denominator(t)); }
  /// coefficient of x^2 in the Gaussian multiplier
  double chirp(double t) const { return (alpha - beta) / (4.0 * denominator(t)); }
  /// weight coefficient on u(s) equivalent to gamma on the transformed field at time t(s)
  double pulled_back_weight(double gamma, double s) const {
    const double q = alpha * s + beta * (1.0 - s);
    return gamma * alpha * beta / (q * q) + (alpha - beta) / (4.0 * q);
  }
};

using SourceFunction = std::function<cplx(double, double)>;

/// u~(x,t) = amplitude(t) u(y(x,t), s(t)) e^{chirp(t) x^2} for a closed-form source.
inline Trajectory appell_transform(const SourceFunction& u, const SpaceGrid& grid, const AppellParams& p,
                                   std::span<const double> times, double tail_tol = 1e-8) {
  hardy::detail::require(p.alpha > 0.0 && p.beta > 0.0, "appell_transform: alpha, beta must be positive");
  Trajectory out;
  for (double t : times) {
    const double s = p.source_time(t);
    Field f = Field::sample(
        grid, [&](double x) { return p.amplitude(t) * u(p.source_point(x, t), s) * std::exp(p.chirp(t) * x * x); },
        t);
    f.check_tail(tail_tol, "appell_transform: transformed frame");
    out.frames.push_back(std::move(f));
  }
  return out;
}

struct ResampleOptions {
  double tail_tol = 1e-8;
  double spectral_tol = 1e-10;  // energy fraction allowed in the top eighth of the spectrum
  int time_points = 6;          // Lagrange points for interpolation between frames
};

namespace detail {

// Band-limited (trigonometric) interpolant of a periodic field at point y; zero outside the box.
class BandLimited {
 public:
  explicit BandLimited(const Field& f) : grid_(f.grid()), hat_(f.size()) {
    Fft(f.size()).forward(f.samples(), hat_);
    for (auto& c : hat_) c /= static_cast<double>(f.size());
  }

  double high_band_fraction() const {
    const std::size_t n = hat_.size();
    double hi = 0.0, total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double e = std::norm(hat_[j]);
      total += e;
      const std::size_t dist = std::min(j, n - j);
      if (dist > 3 * n / 8) hi += e;
    }
    return total > 0.0 ? hi / total : 0.0;
  }

  cplx operator()(double y) const {
    const double L = grid_.half_width();
    if (std::fabs(y) >= L) return 0.0;
    const std::size_t n = hat_.size();
    const double k0 = std::numbers::pi / L;
    const double phase = k0 * (y + L);
    const cplx step = std::polar(1.0, phase);
    cplx pos = 1.0, acc = hat_[0];
    // symmetric pairing of +k and -k; the Nyquist slot is split evenly
    cplx neg = 1.0;
    const cplx step_neg = std::conj(step);
    for (std::size_t j = 1; j < n / 2; ++j) {
      pos *= step;
      neg *= step_neg;
      acc += hat_[j] * pos + hat_[n - j] * neg;
    }
    pos *= step;
    acc += hat_[n / 2] * std::cos(static_cast<double>(n / 2) * phase);
    return acc;
  }

 private:
  SpaceGrid grid_;
  std::vector<cplx> hat_;
};

}  // namespace detail

/// Appell transform of a stored trajectory: Lagrange interpolation across frames in time,
/// band-limited interpolation in space. Throws certificate_error when the source spectrum
/// is not resolved well enough for band-limited resampling.
inline Trajectory appell_transform(const Trajectory& src, const AppellParams& p, std::span<const double> times,
                                   const ResampleOptions& opt = {}) {
  hardy::detail::require(p.alpha > 0.0 && p.beta > 0.0, "appell_transform: alpha, beta must be positive");
  hardy::detail::require(src.size() >= static_cast<std::size_t>(opt.time_points),
                         "appell_transform: not enough source frames");
  const auto src_times = src.times();
  const SpaceGrid& grid = src.grid();
  Trajectory out;
  for (double t : times) {
    const double s = p.source_time(t);
    hardy::detail::require(s >= src_times.front() - 1e-12 && s <= src_times.back() + 1e-12,
                           "appell_transform: source time outside the trajectory");
    const auto it = std::upper_bound(src_times.begin(), src_times.end(), s);
    const std::ptrdiff_t cell = std::clamp<std::ptrdiff_t>(it - src_times.begin() - 1, 0,
                                                           static_cast<std::ptrdiff_t>(src_times.size()) - 2);
    const std::ptrdiff_t q = opt.time_points;
    const std::size_t start = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        cell - (q / 2 - 1), 0, static_cast<std::ptrdiff_t>(src_times.size()) - q));
    std::vector<double> nodes(static_cast<std::size_t>(q));
    for (std::size_t k = 0; k < nodes.size(); ++k) nodes[k] = src_times[start + k];
    const auto lw = stencil::lagrange_weights(s, nodes);
    Field at_s(grid, s);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      for (std::size_t j = 0; j < grid.size(); ++j) at_s[j] += lw[k] * src.frames[start + k][j];

    const detail::BandLimited interp(at_s);
    hardy::detail::certify(interp.high_band_fraction() <= opt.spectral_tol,
                           "appell_transform: resampling accuracy loss (unresolved spectrum)");
    Field f(grid, t);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double x = grid.x(j);
      f[j] = p.amplitude(t) * interp(p.source_point(x, t)) * std::exp(p.chirp(t) * x * x);
    }
    f.check_tail(opt.tail_tol, "appell_transform: transformed frame");
    out.frames.push_back(std::move(f));
  }
  return out;
}

/// V~(x,t) = alpha beta / (alpha(1-t) + beta t)^2 V(y(x,t), s(t)); the sup-norm is bounded
/// by max(alpha/beta, beta/alpha) ||V||.
inline PotentialSpec transformed_potential(const PotentialSpec& V, const AppellParams& p) {
  PotentialSpec out;
  out.name = V.name + "-appell";
  out.evaluator = [V, p](double x, double t) {
    const double q = p.denominator(t);
    return p.alpha * p.beta / (q * q) * V(p.source_point(x, t), p.source_time(t));
  };
  out.sup_norm = std::max(p.alpha / p.beta, p.beta / p.alpha) * V.sup_norm;
  return out;
}

// ---------------------------------------------------------------------------
// Bound and sharpness verifiers

struct BoundReport {
  double lhs_sup = 0.0;   // max over frames of ||e^{t x^2 / 4(t^2 + R^2)} u(t)||
  double rhs_data = 0.0;  // ||u(0)|| + ||e^{T x^2 / 4(T^2 + R^2)} u(T)||
  double ratio = 0.0;
  bool finite = false;
  double argmax_time = 0.0;
  double potential_sup = 0.0;
  std::vector<double> times;
  std::vector<double> weighted;  // per-frame weighted norm

  void write_csv(std::ostream& os) const {
    using hardy::detail::format_number;
    os << "t,weight,weighted_norm\n";
    for (std::size_t i = 0; i < times.size(); ++i)
      os << format_number(times[i]) << ',' << format_number(0.0) << ',' << format_number(weighted[i]) << '\n';
  }
};

inline double theorem_weight(double t, double R) { return t / (4.0 * (t * t + R * R)); }

/// Evaluates both sides of the interior Gaussian bound on a stored trajectory. The
/// universal constant is not computable; the report carries the ratio lhs / rhs.
inline BoundReport verify_theorem_bound(const Trajectory& traj, double R, const PotentialSpec& V,
                                        double tail_tol = 1e-8) {
  hardy::detail::require(R > 0.0, "verify_theorem_bound: R must be positive");
  hardy::detail::require(traj.size() >= 2, "verify_theorem_bound: need at least two frames");
  BoundReport rep;
  rep.potential_sup = V.sup_norm;
  const Field& last = traj.frames.back();
  double final_norm = 0.0;
  try {
    final_norm = weighted_norm(last, {theorem_weight(last.time(), R), 0.0, 0.0, 0.0}, tail_tol);
  } catch (const tail_error& e) {
    throw precondition_error(std::string("verify_theorem_bound: final-time weighted norm is infinite: ") + e.what());
  }
  rep.rhs_data = traj.frames.front().norm() + final_norm;
  rep.finite = true;
  for (const auto& f : traj.frames) {
    double n = 0.0;
    try {
      n = weighted_norm(f, {theorem_weight(f.time(), R), 0.0, 0.0, 0.0}, tail_tol);
    } catch (const tail_error&) {
      n = std::numeric_limits<double>::infinity();
      rep.finite = false;
    }
    rep.times.push_back(f.time());
    rep.weighted.push_back(n);
    if (n > rep.lhs_sup) {
      rep.lhs_sup = n;
      rep.argmax_time = f.time();
    }
  }
  rep.ratio = rep.lhs_sup / rep.rhs_data;
  return rep;
}

enum class Convergence { convergent, divergent };

inline const char* to_string(Convergence c) { return c == Convergence::convergent ? "convergent" : "divergent"; }

struct SharpnessReport {
  double R = 0.0, t = 0.0, gamma_factor = 0.0, gamma = 0.0;
  std::vector<double> boxes;
  std::vector<double> norms;
  Convergence verdict = Convergence::divergent;
  double fit_exponent = 0.0;  // slope of log(norm) against log(L)
  double growth_rate = 0.0;   // slope of log(norm) against L^2 over the last two boxes

  void write_csv(std::ostream& os) const {
    using hardy::detail::format_number;
    os << "L,norm\n";
    for (std::size_t i = 0; i < boxes.size(); ++i)
      os << format_number(boxes[i]) << ',' << format_number(norms[i]) << '\n';
  }
};

/// ||e^{gamma x^2} u_R(., t)||_{L^2(-L, L)} for each L, gamma = gamma_factor t / 4(t^2 + R^2).
/// Convergent iff the last two norms agree to relative tol.
inline SharpnessReport sharpness_probe(double R, double t, double gamma_factor, std::vector<double> boxes,
                                       double tol = 1e-6, double points_per_unit = 64.0) {
  hardy::detail::require(gamma_factor > 0.0, "sharpness_probe: gamma_factor must be positive");
  hardy::detail::require(t > 0.0 && R > 0.0, "sharpness_probe: t and R must be positive");
  hardy::detail::require(boxes.size() >= 2, "sharpness_probe: need at least two boxes");
  hardy::detail::require(std::is_sorted(boxes.begin(), boxes.end()) && boxes.front() > 0.0,
                         "sharpness_probe: boxes must be positive and increasing");
  SharpnessReport rep;
  rep.R = R;
  rep.t = t;
  rep.gamma_factor = gamma_factor;
  rep.gamma = gamma_factor * theorem_weight(t, R);
  rep.boxes = boxes;
  const cplx z(t, -R);
  for (double L : boxes) {
    // composite Simpson on [-L, L]; the integrand is formed from log |e^{gamma x^2} u_R| because
    // the two factors separately overflow and underflow on large boxes
    std::size_t n = static_cast<std::size_t>(std::ceil(2.0 * L * points_per_unit));
    n += n % 2;
    const double h = 2.0 * L / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double x = -L + h * static_cast<double>(j);
      const double v = std::exp(2.0 * (rep.gamma * x * x + std::real(-x * x / (4.0 * z))) - std::log(std::abs(z)));
      const double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      acc += w * v;
    }
    rep.norms.push_back(std::sqrt(acc * h / 3.0));
  }
  const std::size_t k = rep.norms.size();
  rep.verdict = std::fabs(rep.norms[k - 1] - rep.norms[k - 2]) <= tol * rep.norms[k - 1] ? Convergence::convergent
                                                                                        : Convergence::divergent;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(boxes[i]), y = std::log(rep.norms[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double kk = static_cast<double>(k);
  rep.fit_exponent = (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
  const double l1 = boxes[k - 2], l2 = boxes[k - 1];
  rep.growth_rate = (std::log(rep.norms[k - 1]) - std::log(rep.norms[k - 2])) / (l2 * l2 - l1 * l1);
  return rep;
}

}  // namespace hardy::functionals
