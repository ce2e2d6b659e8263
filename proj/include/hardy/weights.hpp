#pragma once

// Gaussian weight families (a, A, b, T) on [0,1] and the monotone iteration that
// drives a_k toward t / 4(t^2 + R^2).
//
// For a weight a with antiderivative A (A(1) = 0):
//   b solves (e^{8A} b)'' = 2 (e^{8A} a)'',          b(0) = b(1) = 0
//   T solves (e^{8A} T')' = 2 (e^{8A} b^2)' - (e^{8A} a)'',  T(0) = T(1) = 0
// and the quadratic form in (x, xi) attached to them collapses to (e^{8A} a)'' |x + xi|^2.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hardy/errors.hpp"
#include "hardy/time_curve.hpp"

namespace hardy::weights {

struct Tolerances {
  double residual = 1e-6;     // sup-norm of ODE residuals
  double agreement = 1e-6;    // two evaluation routes of the same curve
  double boundary = 1e-12;    // boundary data
  double consistency = 1e-6;  // A' = a
};

struct WeightFamily {
  double delta = 0.0;
  TimeCurve a;
  TimeCurve A;
  TimeCurve b;
  TimeCurve T;
  bool singular = false;  // delta == 2: a = 1/4t, sampled as 1/4max(t, t_min)
  double t_min = 0.0;

  double R() const { return std::sqrt(std::max(0.0, delta * delta / 4.0 - 1.0)); }
};

/// A solution curve together with the two independent checks run on it.
struct BvpSolution {
  TimeCurve value;
  double route_gap = 0.0;  // sup |closed form - double-quadrature BVP solve|
  double residual = 0.0;   // sup of the expanded ODE residual
};

enum class Verdict { positive, nonnegative, failed };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::positive: return "positive";
    case Verdict::nonnegative: return "nonnegative";
    default: return "failed";
  }
}

struct ConvexityReport {
  TimeCurve identity_form;  // e^{8A} (a'' + 24 a a' + 64 a^3)
  TimeCurve direct_form;    // second difference of e^{8A} a
  double min_identity = 0.0;
  double min_direct = 0.0;
  double disagreement = 0.0;
  Verdict verdict = Verdict::failed;
};

struct CoefficientResiduals {
  TimeCurve r1;  // (e^{8A} b)'' - 2 (e^{8A} a)''
  TimeCurve r2;  // 2 (e^{8A} b^2)' - (e^{8A} T')' - (e^{8A} a)''
  double sup_r1 = 0.0;
  double sup_r2 = 0.0;
};

namespace detail {

inline double sup_diff(const TimeCurve& x, const TimeCurve& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::fabs(x[i] - y[i]));
  return m;
}

// e^{8A} (a'' + 24 a a' + 64 a^3), i.e. (e^{8A} a)'' expanded with A' = a.
inline TimeCurve convexity_identity(const TimeCurve& a, const TimeCurve& A) {
  const TimeCurve da = a.derivative(1);
  const TimeCurve dda = a.derivative(2);
  TimeCurve out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = std::exp(8.0 * A[i]) * (dda[i] + 24.0 * a[i] * da[i] + 64.0 * a[i] * a[i] * a[i]);
  return out;
}

}  // namespace detail

/// a_1(t) = t / (delta + 2 - 2t)^2, the first member of the iteration.
inline TimeCurve first_weight(double delta, std::size_t intervals = 512, int order = 4) {
  hardy::detail::require(delta > 2.0, "first_weight: delta must exceed 2");
  return TimeCurve::sample(
      intervals, [delta](double t) { return t / ((delta + 2.0 - 2.0 * t) * (delta + 2.0 - 2.0 * t)); }, order);
}

/// Antiderivative of a normalized by A(1) = 0.
inline TimeCurve antiderivative_A(const TimeCurve& a) {
  TimeCurve c = a.cumulative_integral();
  const double end = c.back();
  for (auto& v : c.values()) v -= end;
  c[c.size() - 1] = 0.0;
  return c;
}

/// b = 2 (a - t e^{-8A} / delta^2), cross-checked against a double-quadrature solve of
/// the defining BVP and against the expanded ODE residual.
inline BvpSolution solve_b(const TimeCurve& a, const TimeCurve& A, double delta, const Tolerances& tol = {}) {
  using hardy::detail::require;
  require(a.same_grid(A), "solve_b: grid mismatch");
  require(delta > 0.0, "solve_b: delta must be positive");
  require(std::fabs(a.front()) <= tol.boundary, "solve_b: boundary data violated, a(0) != 0");
  require(std::fabs(a.back() - 1.0 / (delta * delta)) <= tol.boundary,
          "solve_b: boundary data violated, a(1) != 1/delta^2");
  const double inv_d2 = 1.0 / (delta * delta);
  TimeCurve b = a;
  for (std::size_t i = 0; i < a.size(); ++i) b[i] = 2.0 * (a[i] - a.node(i) * std::exp(-8.0 * A[i]) * inv_d2);
  b[0] = 0.0;
  b[b.size() - 1] = 0.0;

  const TimeCurve conv = detail::convexity_identity(a, A);
  const TimeCurve one = TimeCurve::constant(a.intervals(), 1.0, a.order());
  const TimeCurve y = solve_weighted_dirichlet(one, 2.0 * conv, 0, a.intervals());
  TimeCurve b_bvp = y;
  for (std::size_t i = 0; i < y.size(); ++i) b_bvp[i] = std::exp(-8.0 * A[i]) * y[i];

  const TimeCurve da = a.derivative(1), db = b.derivative(1), ddb = b.derivative(2);
  double residual = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double lhs = std::exp(8.0 * A[i]) *
                       (ddb[i] + 16.0 * a[i] * db[i] + 8.0 * da[i] * b[i] + 64.0 * a[i] * a[i] * b[i]);
    residual = std::max(residual, std::fabs(lhs - 2.0 * conv[i]));
  }
  BvpSolution out{std::move(b), 0.0, residual};
  out.route_gap = detail::sup_diff(out.value, b_bvp);
  hardy::detail::certify(out.route_gap <= tol.agreement,
                         "solve_b: closed form and BVP solve disagree by " + std::to_string(out.route_gap));
  hardy::detail::certify(out.residual <= tol.residual,
                         "solve_b: residual " + std::to_string(out.residual) + " exceeds tolerance");
  return out;
}

/// T(t) = 2 int_0^t b^2 - a - 8 int_0^t a^2 - alpha int_0^t e^{-8A}, alpha chosen so that
/// T(1) = 0; cross-checked against a weighted double-quadrature BVP solve.
/// When check_sign is set and delta > 2, T must be positive at interior nodes.
inline BvpSolution solve_T(const TimeCurve& a, const TimeCurve& A, const TimeCurve& b, double delta,
                           const Tolerances& tol = {}, bool check_sign = true) {
  using hardy::detail::require;
  require(a.same_grid(A) && a.same_grid(b), "solve_T: grid mismatch");
  require(std::fabs(a.front()) <= tol.boundary, "solve_T: a(0) != 0");
  require(std::fabs(b.front()) <= tol.boundary && std::fabs(b.back()) <= tol.boundary,
          "solve_T: b must vanish at both ends");
  const TimeCurve b2 = (b * b).cumulative_integral();
  const TimeCurve a2 = (a * a).cumulative_integral();
  const TimeCurve e = exp_of(A, -8.0).cumulative_integral();
  const double alpha = (2.0 * b2.back() - a.back() - 8.0 * a2.back()) / e.back();
  TimeCurve T = a;
  for (std::size_t i = 0; i < a.size(); ++i) T[i] = 2.0 * b2[i] - a[i] - 8.0 * a2[i] - alpha * e[i];
  T[0] = 0.0;
  T[T.size() - 1] = 0.0;

  const TimeCurve conv = detail::convexity_identity(a, A);
  const TimeCurve db = b.derivative(1);
  TimeCurve rhs = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    rhs[i] = std::exp(8.0 * A[i]) * (16.0 * a[i] * b[i] * b[i] + 4.0 * b[i] * db[i]) - conv[i];
  const TimeCurve T_bvp = solve_weighted_dirichlet(exp_of(A, 8.0), rhs, 0, a.intervals());

  const TimeCurve dT = T.derivative(1), ddT = T.derivative(2);
  double residual = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double flux = std::exp(8.0 * A[i]) * (ddT[i] + 8.0 * a[i] * dT[i]);
    residual = std::max(residual, std::fabs(rhs[i] - flux));
  }
  BvpSolution out{std::move(T), 0.0, residual};
  out.route_gap = detail::sup_diff(out.value, T_bvp);
  hardy::detail::certify(out.route_gap <= tol.agreement,
                         "solve_T: closed form and BVP solve disagree by " + std::to_string(out.route_gap));
  hardy::detail::certify(out.residual <= tol.residual,
                         "solve_T: residual " + std::to_string(out.residual) + " exceeds tolerance");
  if (check_sign && delta > 2.0)
    hardy::detail::certify(out.value.interior_min() > 0.0, "solve_T: sign failure, T <= 0 at an interior node");
  return out;
}

/// Interior minimum of (e^{8A} a)'' evaluated two ways: the expanded identity and a
/// direct second difference. The two must agree within tol.agreement (relative to scale).
inline ConvexityReport convexity_certificate(const TimeCurve& a, const TimeCurve& A, const Tolerances& tol = {}) {
  hardy::detail::require(a.same_grid(A), "convexity_certificate: grid mismatch");
  ConvexityReport rep;
  rep.identity_form = detail::convexity_identity(a, A);
  TimeCurve ea = a;
  for (std::size_t i = 0; i < a.size(); ++i) ea[i] = std::exp(8.0 * A[i]) * a[i];
  rep.direct_form = ea.derivative(2);
  rep.min_identity = rep.identity_form.interior_min();
  rep.min_direct = rep.direct_form.interior_min();
  double scale = 1.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    rep.disagreement = std::max(rep.disagreement, std::fabs(rep.identity_form[i] - rep.direct_form[i]));
    scale = std::max(scale, std::fabs(rep.identity_form[i]));
  }
  hardy::detail::certify(rep.disagreement <= tol.agreement * scale,
                         "convexity_certificate: identity and direct second difference disagree by " +
                             std::to_string(rep.disagreement) + " (grid too coarse?)");
  const double lo = std::min(rep.min_identity, rep.min_direct);
  rep.verdict = lo > 0.0 ? Verdict::positive : lo >= -tol.agreement * scale ? Verdict::nonnegative : Verdict::failed;
  return rep;
}

/// Residual curves of the two coefficient identities in expanded form (no throw).
inline CoefficientResiduals coefficient_residuals(const WeightFamily& w) {
  const auto& a = w.a;
  const auto& A = w.A;
  const auto& b = w.b;
  const auto& T = w.T;
  const TimeCurve conv = detail::convexity_identity(a, A);
  const TimeCurve da = a.derivative(1);
  const TimeCurve db = b.derivative(1), ddb = b.derivative(2);
  const TimeCurve dT = T.derivative(1), ddT = T.derivative(2);
  CoefficientResiduals out{a, a, 0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double g = std::exp(8.0 * A[i]);
    const double eb2 = g * (ddb[i] + 16.0 * a[i] * db[i] + 8.0 * da[i] * b[i] + 64.0 * a[i] * a[i] * b[i]);
    const double d_eb2 = g * (8.0 * a[i] * b[i] * b[i] + 2.0 * b[i] * db[i]);
    const double d_eT = g * (ddT[i] + 8.0 * a[i] * dT[i]);
    out.r1[i] = eb2 - 2.0 * conv[i];
    out.r2[i] = 2.0 * d_eb2 - d_eT - conv[i];
  }
  out.sup_r1 = out.r1.sup_norm();
  out.sup_r2 = out.r2.sup_norm();
  return out;
}

/// Residuals certifying that the quadratic form collapses to (e^{8A} a)'' |x + xi|^2.
/// Throws certificate_error when either sup-norm exceeds tol.residual.
inline CoefficientResiduals commutator_coefficient_residuals(const WeightFamily& w, const Tolerances& tol = {}) {
  auto res = coefficient_residuals(w);
  hardy::detail::certify(res.sup_r1 <= tol.residual && res.sup_r2 <= tol.residual,
                         "commutator residuals exceed tolerance: r1 = " + std::to_string(res.sup_r1) +
                             ", r2 = " + std::to_string(res.sup_r2));
  return res;
}

/// Smallest N >= 1 with N + b/2 >= 1 and T <= 2 (int_0^t b^2 + N) at every node.
inline double choose_ndelta(const TimeCurve& b, const TimeCurve& T) {
  hardy::detail::require(b.same_grid(T), "choose_ndelta: grid mismatch");
  const TimeCurve b2 = (b * b).cumulative_integral();
  double n = 1.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    n = std::max(n, 1.0 - 0.5 * b[i]);
    n = std::max(n, 0.5 * T[i] - b2[i]);
  }
  return n;
}

struct WeightStep {
  TimeCurve a;
  TimeCurve A;
  double consistency = 0.0;  // sup |A' - a|
};

/// a_{k+1} = a_k + b_k^2 / 8(int_0^t b_k^2 + N),  A_{k+1} = A_k + log((int_0^t b_k^2 + N)/(int_0^1 b_k^2 + N))/8.
/// The closed form of A_{k+1} is checked against differentiation.
inline WeightStep iterate_weight(const TimeCurve& a, const TimeCurve& A, const TimeCurve& b, double ndelta,
                                 const Tolerances& tol = {}) {
  hardy::detail::require(a.same_grid(A) && a.same_grid(b), "iterate_weight: grid mismatch");
  hardy::detail::require(ndelta >= 1.0, "iterate_weight: N_delta must be >= 1");
  const TimeCurve b2 = (b * b).cumulative_integral();
  const double tail = std::log(b2.back() + ndelta);
  WeightStep out{a, A, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double den = b2[i] + ndelta;
    out.a[i] = a[i] + b[i] * b[i] / (8.0 * den);
    out.A[i] = A[i] + (std::log(den) - tail) / 8.0;
  }
  out.A[out.A.size() - 1] = A.back();
  const TimeCurve dA = out.A.derivative(1);
  for (std::size_t i = 0; i < a.size(); ++i) out.consistency = std::max(out.consistency, std::fabs(dA[i] - out.a[i]));
  hardy::detail::certify(out.consistency <= tol.consistency,
                         "iterate_weight: consistency failure, sup|A' - a| = " + std::to_string(out.consistency));
  return out;
}

/// Builds (a, A, b, T) for delta from a weight and its antiderivative.
inline WeightFamily make_family(const TimeCurve& a, const TimeCurve& A, double delta, const Tolerances& tol = {}) {
  WeightFamily w;
  w.delta = delta;
  w.a = a;
  w.A = A;
  w.b = solve_b(a, A, delta, tol).value;
  w.T = solve_T(a, A, w.b, delta, tol).value;
  return w;
}

/// The closed-form limit a(t) = t / 4(t^2 + R^2), a e^{8A} = t / delta^2, b = 0.
/// For delta = 2 the weight 1/4t is singular at 0; it is sampled as 1/4max(t, t_min),
/// the family is flagged singular and T is left at zero.
inline WeightFamily limit_weight(double delta, std::size_t intervals = 512, int order = 4, double t_min = 1e-3,
                                 const Tolerances& tol = {}) {
  hardy::detail::require(delta >= 2.0, "limit_weight: delta must be >= 2");
  hardy::detail::require(t_min > 0.0 && t_min < 1.0, "limit_weight: t_min must lie in (0, 1)");
  WeightFamily w;
  w.delta = delta;
  const double r2 = delta * delta / 4.0 - 1.0;
  const double d2 = delta * delta;
  if (r2 <= 0.0) {
    w.singular = true;
    w.t_min = t_min;
    w.a = TimeCurve::sample(intervals, [t_min](double t) { return 1.0 / (4.0 * std::max(t, t_min)); }, order);
    w.A = TimeCurve::sample(intervals, [t_min](double t) { return 0.25 * std::log(std::max(t, t_min)); }, order);
    w.b = TimeCurve::constant(intervals, 0.0, order);
    w.T = TimeCurve::constant(intervals, 0.0, order);
    return w;
  }
  w.a = TimeCurve::sample(intervals, [r2](double t) { return t / (4.0 * (t * t + r2)); }, order);
  w.A = TimeCurve::sample(intervals, [r2, d2](double t) { return std::log(4.0 * (t * t + r2) / d2) / 8.0; }, order);
  w.A[w.A.size() - 1] = 0.0;
  w.a[w.a.size() - 1] = 1.0 / d2;
  w.b = w.a;
  for (std::size_t i = 0; i < w.a.size(); ++i)
    w.b[i] = 2.0 * (w.a[i] - w.a.node(i) * std::exp(-8.0 * w.A[i]) / d2);
  w.b[0] = 0.0;
  w.b[w.b.size() - 1] = 0.0;
  w.T = solve_T(w.a, w.A, w.b, delta, tol, false).value;
  return w;
}

struct IterationOptions {
  std::size_t intervals = 1024;
  int order = 6;  // iterates sharpen near t = 1; order 4 stencils lose the 1e-6 residual by k ~ 50
  Tolerances tol{};
  bool keep_families = true;
};

struct IterationStep {
  int k = 0;
  double ndelta_min = 1.0;   // minimal feasible N for this iterate
  double ndelta = 1.0;       // running maximum used for the update
  double sup_b = 0.0;
  double gap_to_limit = 0.0; // sup |a_k - t/4(t^2+R^2)|
  double convexity_min = 0.0;
  double residual_b = 0.0;
  double residual_T = 0.0;
  double min_T = 0.0;
  double a_mid = 0.0;        // a_k(1/2)
};

struct IterationTrace {
  double delta = 0.0;
  std::vector<WeightFamily> families;  // k = 1..K, when kept
  std::vector<IterationStep> steps;
  double ndelta = 1.0;
  bool converged = false;

  /// Least-squares slope of log(gap) against log(k) over the second half of the trace.
  double empirical_rate() const {
    const std::size_t n = steps.size();
    if (n < 4) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = n / 2; i < n; ++i, ++m) {
      const double x = std::log(static_cast<double>(steps[i].k));
      const double y = std::log(steps[i].gap_to_limit);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }

  double final_gap() const { return steps.empty() ? 0.0 : steps.back().gap_to_limit; }
  double final_sup_b() const { return steps.empty() ? 0.0 : steps.back().sup_b; }

  void write_csv(std::ostream& os) const {
    using hardy::detail::format_number;
    os << "k,ndelta_min,ndelta,sup_b,gap_to_limit,convexity_min,residual_b,residual_T,min_T,a_mid\n";
    for (const auto& s : steps)
      os << s.k << ',' << format_number(s.ndelta_min) << ',' << format_number(s.ndelta) << ','
         << format_number(s.sup_b) << ',' << format_number(s.gap_to_limit) << ','
         << format_number(s.convexity_min) << ',' << format_number(s.residual_b) << ','
         << format_number(s.residual_T) << ',' << format_number(s.min_T) << ',' << format_number(s.a_mid) << '\n';
  }
};

/// Runs the weight iteration from a_1 for at most K iterates, stopping once sup|b_k| < tol.
/// Every iterate is re-certified: convexity of e^{8A}a, Riccati sign a' + 4a^2 >= 0,
/// b <= 0, T > 0, and after each update the chain a_k <= a_{k+1} <= 1/(delta^2 - 4).
/// Invariant violations throw certificate_error; running out of iterates does not
/// (the trace is returned with converged = false).
inline IterationTrace run_iteration(double delta, int K, double tol, const IterationOptions& opt = {}) {
  hardy::detail::require(delta > 2.0, "run_iteration: delta must exceed 2");
  hardy::detail::require(K >= 1, "run_iteration: K must be >= 1");
  IterationTrace trace;
  trace.delta = delta;
  const double ceiling = 1.0 / (delta * delta - 4.0);
  const double r2 = delta * delta / 4.0 - 1.0;
  TimeCurve a = first_weight(delta, opt.intervals, opt.order);
  a[a.size() - 1] = 1.0 / (delta * delta);
  TimeCurve A = antiderivative_A(a);
  double ndelta = 1.0;
  for (int k = 1; k <= K; ++k) {
    const auto bsol = solve_b(a, A, delta, opt.tol);
    const auto tsol = solve_T(a, A, bsol.value, delta, opt.tol);
    const auto cert = convexity_certificate(a, A, opt.tol);
    hardy::detail::certify(cert.verdict != Verdict::failed,
                           "run_iteration: convexity certificate failed at k = " + std::to_string(k));
    const TimeCurve da = a.derivative(1);
    for (std::size_t i = 0; i < a.size(); ++i)
      hardy::detail::certify(da[i] + 4.0 * a[i] * a[i] >= -opt.tol.residual,
                             "run_iteration: Riccati sign a' + 4a^2 >= 0 violated at k = " + std::to_string(k));
    hardy::detail::certify(bsol.value.interior_max() <= 0.0,
                           "run_iteration: b_k > 0 at an interior node, k = " + std::to_string(k));

    IterationStep step;
    step.k = k;
    step.ndelta_min = choose_ndelta(bsol.value, tsol.value);
    ndelta = std::max(ndelta, step.ndelta_min);
    step.ndelta = ndelta;
    step.sup_b = bsol.value.sup_norm();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double t = a.node(i);
      step.gap_to_limit = std::max(step.gap_to_limit, std::fabs(a[i] - t / (4.0 * (t * t + r2))));
    }
    step.convexity_min = std::min(cert.min_identity, cert.min_direct);
    step.residual_b = bsol.residual;
    step.residual_T = tsol.residual;
    step.min_T = tsol.value.interior_min();
    step.a_mid = a(0.5);
    trace.steps.push_back(step);
    if (opt.keep_families) trace.families.push_back(WeightFamily{delta, a, A, bsol.value, tsol.value, false, 0.0});

    if (step.sup_b < tol) {
      trace.converged = true;
      break;
    }
    if (k == K) break;

    auto next = iterate_weight(a, A, bsol.value, ndelta, opt.tol);
    for (std::size_t i = 0; i < a.size(); ++i) {
      hardy::detail::certify(next.a[i] >= a[i], "run_iteration: chain a_k <= a_{k+1} violated at k = " +
                                                    std::to_string(k));
      hardy::detail::certify(next.a[i] <= ceiling * (1.0 + 1e-12),
                             "run_iteration: ceiling a_{k+1} <= 1/(delta^2-4) violated at k = " + std::to_string(k));
    }
    a = std::move(next.a);
    A = std::move(next.A);
  }
  trace.ndelta = ndelta;
  return trace;
}

}  // namespace hardy::weights
