#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hardy/errors.hpp"
#include "hardy/time_curve.hpp"

using hardy::TimeCurve;

namespace {

double sup_error(const TimeCurve& c, auto&& exact) {
  double m = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, std::fabs(c[i] - exact(c.node(i))));
  return m;
}

}  // namespace

TEST(TimeCurve, RejectsCoarseGridAndBadOrder) {
  EXPECT_THROW(TimeCurve::constant(32, 1.0), hardy::precondition_error);
  EXPECT_THROW(TimeCurve::constant(64, 1.0, 5), hardy::precondition_error);
  EXPECT_THROW(TimeCurve::constant(64, 1.0, 2), hardy::precondition_error);
  EXPECT_NO_THROW(TimeCurve::constant(64, 1.0, 8));
}

TEST(TimeCurve, PolynomialsOfDegreeOrderAreExact) {
  for (int order : {4, 6, 8}) {
    const auto p = [order](double t) { return std::pow(t - 0.3, order) + 2.0 * t; };
    const auto c = TimeCurve::sample(64, p, order);
    const auto d1 = c.derivative(1);
    const auto d2 = c.derivative(2);
    const auto integ = c.cumulative_integral();
    const double n = order;
    EXPECT_LT(sup_error(d1, [&](double t) { return n * std::pow(t - 0.3, order - 1) + 2.0; }), 1e-9);
    EXPECT_LT(sup_error(d2, [&](double t) { return n * (n - 1) * std::pow(t - 0.3, order - 2); }), 1e-6);
    EXPECT_LT(sup_error(integ,
                        [&](double t) {
                          return (std::pow(t - 0.3, order + 1) - std::pow(-0.3, order + 1)) / (n + 1) + t * t;
                        }),
              1e-13);
  }
}

TEST(TimeCurve, DerivativeConvergesAtStencilOrder) {
  const auto f = [](double t) { return std::sin(3.0 * t) * std::exp(t); };
  const auto df = [](double t) { return std::exp(t) * (std::sin(3.0 * t) + 3.0 * std::cos(3.0 * t)); };
  for (int order : {4, 6}) {
    const double e1 = sup_error(TimeCurve::sample(64, f, order).derivative(1), df);
    const double e2 = sup_error(TimeCurve::sample(128, f, order).derivative(1), df);
    EXPECT_GT(e1 / e2, 0.8 * std::pow(2.0, order)) << "order " << order;
  }
}

TEST(TimeCurve, InterpolationAndIntegral) {
  const auto c = TimeCurve::sample(128, [](double t) { return std::cos(2.0 * t); });
  for (double t : {0.0, 0.0123, 0.5, 0.777, 1.0}) EXPECT_NEAR(c(t), std::cos(2.0 * t), 1e-11);
  EXPECT_NEAR(c.integral(), std::sin(2.0) / 2.0, 1e-12);
}

TEST(TimeCurve, CsvFormatAndRoundTrip) {
  const auto c = TimeCurve::sample(64, [](double t) { return t * t / 3.0; });
  std::ostringstream os;
  c.write_csv(os);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("t,value\n0,0\n0.015625,8.13802083333e-05\n", 0), 0u);
  std::istringstream is(s);
  const auto back = TimeCurve::read_csv(is);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(back[i], c[i], 1e-12 * std::max(1.0, c[i]));
  std::istringstream bad("x,y\n0,1\n");
  EXPECT_THROW(TimeCurve::read_csv(bad), hardy::precondition_error);
}

TEST(TimeCurve, WeightedDirichletUnitWeight) {
  // -y'' = 1, y(0) = y(1) = 0  =>  y = t(1-t)/2
  const auto one = TimeCurve::constant(64, 1.0);
  const auto y = hardy::solve_weighted_dirichlet(one, -1.0 * one, 0, 64);
  EXPECT_LT(sup_error(y, [](double t) { return t * (1 - t) / 2; }), 1e-14);
}

TEST(TimeCurve, WeightedDirichletVariableWeight) {
  // gamma = e^t, y = sin(pi t): (gamma y')' = e^t (pi cos(pi t) - pi^2 sin(pi t))
  const double pi = std::numbers::pi;
  const auto g = TimeCurve::sample(256, [](double t) { return std::exp(t); });
  const auto rhs = TimeCurve::sample(
      256, [pi](double t) { return std::exp(t) * (pi * std::cos(pi * t) - pi * pi * std::sin(pi * t)); });
  const auto y = hardy::solve_weighted_dirichlet(g, rhs, 0, 256);
  EXPECT_LT(sup_error(y, [pi](double t) { return std::sin(pi * t); }), 1e-9);
}

TEST(TimeCurve, WeightedDirichletSubinterval) {
  const auto one = TimeCurve::constant(128, 1.0);
  const auto y = hardy::solve_weighted_dirichlet(one, -1.0 * one, 32, 96);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double t = y.node(i);
    const double expect = (i <= 32 || i >= 96) ? 0.0 : (t - 0.25) * (0.75 - t) / 2;
    EXPECT_NEAR(y[i], expect, 1e-14);
  }
}
