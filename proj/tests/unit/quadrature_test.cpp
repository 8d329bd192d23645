#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "overage/analytic.hpp"
#include "overage/errors.hpp"
#include "overage/quadrature.hpp"

using namespace overage;

namespace {

const QuadratureSpec kSpec{};

TEST(AdaptiveIntegration, ScalarAndVector) {
  auto f = [](double x) { return std::array<double, 2>{std::sqrt(x), std::cos(x)}; };
  const auto r = integrate_adaptive<2>(f, 0.0, 1.0, kSpec);
  EXPECT_NEAR(r.value[0], 2.0 / 3.0, 1e-10);
  EXPECT_NEAR(r.value[1], std::sin(1.0), 1e-12);
  EXPECT_LT(r.error, 1e-8);
}

TEST(AdaptiveIntegration, InfiniteUpperLimit) {
  auto f = [](double x) { return std::array<double, 1>{std::exp(-x) * x}; };
  EXPECT_NEAR(integrate_adaptive<1>(f, 0.0, std::numeric_limits<double>::infinity(), kSpec).value[0], 1.0, 1e-10);
}

TEST(AdaptiveIntegration, BreakpointsAndEmptyIntervals) {
  auto f = [](double x) { return std::array<double, 1>{x < 0.3 ? 0.0 : 1.0}; };
  const double breaks[] = {0.3};
  EXPECT_NEAR(integrate_adaptive<1>(f, 0.0, 1.0, breaks, kSpec).value[0], 0.7, 1e-14);
  EXPECT_EQ(integrate_adaptive<1>(f, 1.0, 1.0, kSpec).value[0], 0.0);
  EXPECT_EQ(integrate_adaptive<1>(f, 2.0, 1.0, kSpec).value[0], 0.0);
}

TEST(AdaptiveIntegration, BudgetExhaustionThrows) {
  QuadratureSpec tight;
  tight.max_subdivisions = 3;
  auto f = [](double x) { return std::array<double, 1>{std::sin(1.0 / x)}; };
  EXPECT_THROW(integrate_adaptive<1>(f, 1e-4, 1.0, tight), ConvergenceError);
  try {
    integrate_adaptive<1>(f, 1e-4, 1.0, tight);
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.error_estimate(), 0.0);
  }
}

TEST(NestedQuadrature, Triangle) {
  std::vector<Axis> axes{Axis::fixed(0.0, 1.0),
                         Axis{nullptr, [](std::span<const double> x) { return x[0]; }, nullptr}};
  const auto r = nested_quadrature([](std::span<const double>) { return 1.0; }, axes);
  EXPECT_NEAR(r.value, 0.5, 1e-13);
}

TEST(NestedQuadrature, CubeMoment) {
  std::vector<Axis> axes{Axis::fixed(0.0, 1.0), Axis::fixed(0.0, 2.0), Axis::fixed(0.0, 1.0, {0.5})};
  const auto r = nested_quadrature([](std::span<const double> x) { return x[0] * x[1] * x[2]; }, axes);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  EXPECT_THROW(nested_quadrature([](std::span<const double>) { return 1.0; }, std::span<const Axis>{}), ParameterError);
}

TEST(JointDensity, NormalizedWithKnownMarginals) {
  const JointDensityTY f(1.0, 2.0);
  std::vector<Axis> axes{Axis::fixed(0.0, f.system_time_cut(1e-14)), Axis::fixed(0.0, f.inter_departure_cut(1e-14))};
  const auto total = nested_quadrature([&](std::span<const double> x) { return f(x[1], x[0]); }, axes);
  EXPECT_NEAR(total.value, 1.0, 1e-10);
  for (double t : {0.1, 1.0, 3.0}) {
    auto row = [&](double y) { return std::array<double, 1>{f(y, t)}; };
    EXPECT_NEAR(integrate_adaptive<1>(row, 0.0, 60.0, kSpec).value[0], f.system_time_density(t), 1e-10);
  }
  // Departures of a stable M/M/1 queue form a Poisson process of rate lambda.
  for (double y : {0.2, 1.5}) {
    auto column = [&](double t) { return std::array<double, 1>{f(y, t)}; };
    EXPECT_NEAR(integrate_adaptive<1>(column, 0.0, 60.0, kSpec).value[0], std::exp(-y), 1e-10);
  }
  EXPECT_THROW(JointDensityTY(2.0, 2.0), StabilityError);
}

// Overage probability of M/M/1 from a symbolic integration of the joint density.
TEST(Mm1Quadrature, OverageProbabilityReference) {
  struct Ref {
    double lambda, mu, h, po;
  };
  const Ref refs[] = {{1.0, 2.0, 1.0, 0.69763247380448888910},
                      {1.0, 2.0, 0.0, 1.0},
                      {0.5, 1.0, 0.25, 0.99253904372705086357},
                      {1.0, 4.0, 3.0, 0.066479542707707514613},
                      {2.0, 4.0, 1.0, 0.33274329415490135451}};
  for (const auto& r : refs) {
    const auto m = mm1_metrics(r.lambda, r.mu, r.h);
    EXPECT_NEAR(m.overage_probability, r.po, 1e-7) << r.lambda << " " << r.mu << " " << r.h;
    EXPECT_EQ(m.method, Method::Quadrature);
  }
}

TEST(Mm1Quadrature, MatchesClosedFormArea) {
  for (double h : {0.0, 0.25, 1.0, 3.0}) {
    const auto m = mm1_metrics(1.0, 2.0, h);
    EXPECT_NEAR(m.average_overage, 1.0 * mm1_overage_area(1.0, 2.0, h), 1e-7);
  }
}

TEST(Mg11Quadrature, MatchesClosedFormTerms) {
  for (double h : {0.0, 0.25, 1.0, 3.0}) {
    double error = 0.0;
    const auto q = mg11_terms(1.0, ServiceDistribution::exponential(2.0), h, kSpec, &error);
    const auto c = mm11_terms(1.0, 2.0, h);
    EXPECT_NEAR(q.idle.overage_time, c.idle.overage_time, 1e-8);
    EXPECT_NEAR(q.idle.overage_area, c.idle.overage_area, 1e-8);
    EXPECT_NEAR(q.idle.age_area, c.idle.age_area, 1e-8);
    EXPECT_LT(error, 1e-6);
  }
}

TEST(Mg12StarQuadrature, BothBusyRoutesMatchClosedForm) {
  for (double h : {0.25, 1.0, 3.0}) {
    const auto c = mm12star_terms(1.0, 2.0, h);
    for (BusyRoute route : {BusyRoute::Reduced, BusyRoute::Nested}) {
      const auto q = mg12star_terms(1.0, ServiceDistribution::exponential(2.0), h, kSpec, route);
      EXPECT_NEAR(q.idle.overage_time, c.idle.overage_time, 1e-8);
      EXPECT_NEAR(q.idle.overage_area, c.idle.overage_area, 1e-8);
      EXPECT_NEAR(q.busy.overage_time, c.busy.overage_time, 1e-8);
      EXPECT_NEAR(q.busy.overage_area, c.busy.overage_area, 1e-8);
      EXPECT_NEAR(q.busy.age_area, c.busy.age_area, 1e-8);
      EXPECT_NEAR(q.stale_busy, c.stale_busy, 1e-10);
    }
  }
}

TEST(Mg12StarQuadrature, RoutesAgreeForGammaService) {
  for (double alpha : {0.5, 2.0}) {
    const auto dist = ServiceDistribution::gamma_with_mean(alpha, 0.6);
    const auto a = mg12star_terms(1.3, dist, 1.0, kSpec, BusyRoute::Reduced);
    const auto b = mg12star_terms(1.3, dist, 1.0, kSpec, BusyRoute::Nested);
    EXPECT_NEAR(a.busy.overage_time, b.busy.overage_time, 1e-7);
    EXPECT_NEAR(a.busy.overage_area, b.busy.overage_area, 1e-7);
    EXPECT_NEAR(a.busy.age_area, b.busy.age_area, 1e-7);
  }
}

TEST(Quadrature, GammaShapeOneIsExponential) {
  const auto g = ServiceDistribution::gamma(1.0, 2.0);
  const auto e = ServiceDistribution::exponential(2.0);
  for (QueueModel model : {QueueModel::MG11, QueueModel::MG12Star}) {
    const auto a = evaluate_quadrature({model, 1.0, g, 1.0});
    const auto b = evaluate_quadrature({model, 1.0, e, 1.0});
    EXPECT_NEAR(a.overage_probability, b.overage_probability, 1e-9);
    EXPECT_NEAR(a.average_overage, b.average_overage, 1e-9);
    EXPECT_NEAR(a.stale_update_probability, b.stale_update_probability, 1e-12);
  }
}

TEST(Quadrature, ContinuousAcrossShapeOne) {
  // Shapes below one use a change of variables; the metrics must not jump there.
  for (QueueModel model : {QueueModel::MG11, QueueModel::MG12Star}) {
    const auto below = evaluate_quadrature({model, 1.0, ServiceDistribution::gamma_with_mean(0.9999, 0.5), 1.0});
    const auto at = evaluate_quadrature({model, 1.0, ServiceDistribution::gamma_with_mean(1.0, 0.5), 1.0});
    EXPECT_NEAR(below.overage_probability, at.overage_probability, 1e-4);
    EXPECT_NEAR(below.average_overage, at.average_overage, 1e-4);
  }
}

TEST(Quadrature, ZeroThresholdIdentities) {
  for (const auto& dist : {ServiceDistribution::gamma(0.5, 1.0), ServiceDistribution::deterministic(0.4),
                           ServiceDistribution::gamma(3.0, 5.0)}) {
    for (QueueModel model : {QueueModel::MG11, QueueModel::MG12Star}) {
      const auto m = evaluate_quadrature({model, 0.8, dist, 0.0});
      EXPECT_NEAR(m.stale_update_probability, 1.0, 1e-12) << dist.describe();
      EXPECT_NEAR(m.overage_probability, 1.0, 1e-7) << dist.describe();
      EXPECT_NEAR(m.average_overage, m.average_aoi, 1e-12) << dist.describe();
    }
  }
}

TEST(Quadrature, Mg11AverageAoiMatchesRenewalFormula) {
  const double lambda = 1.5;
  const double d = 0.4;
  const auto m = evaluate_quadrature({QueueModel::MG11, lambda, ServiceDistribution::deterministic(d), 0.0});
  // Every interval has T_prev = d and Y = d + Z, Z ~ Exp(lambda); deliveries occur at rate lambda p_I.
  const double ez = 1.0 / lambda;
  const double ez2 = 2.0 / (lambda * lambda);
  const double area = d * (d + ez) + 0.5 * (d * d + 2.0 * d * ez + ez2);
  const double rate = lambda / (1.0 + lambda * d);
  EXPECT_NEAR(m.average_aoi, rate * area, 1e-12);
}

TEST(Quadrature, RegionMassesArePartitions) {
  for (const auto& dist : {ServiceDistribution::exponential(2.0), ServiceDistribution::gamma(0.5, 1.0),
                           ServiceDistribution::deterministic(0.7)}) {
    for (BusyRoute route : {BusyRoute::Reduced, BusyRoute::Nested}) {
      const auto m = mg12star_region_masses(1.0, dist, 1.0, kSpec, route);
      double idle = 0.0;
      double busy = m.busy_dropped;
      for (double v : m.idle) idle += v;
      for (double v : m.busy) busy += v;
      EXPECT_NEAR(idle, 1.0, 1e-8) << dist.describe();
      EXPECT_NEAR(busy, 1.0, 1e-8) << dist.describe();
    }
  }
  // Exponential residual service: Pr{X < W} = lambda / (lambda + mu).
  const auto e = mg12star_region_masses(1.0, ServiceDistribution::exponential(2.0), 1.0);
  EXPECT_NEAR(e.busy_dropped, 1.0 / 3.0, 1e-9);
  const auto d = mg12star_region_masses(1.0, ServiceDistribution::deterministic(0.7), 1.0);
  EXPECT_NEAR(d.busy_dropped, 1.0 + std::expm1(-0.7) / 0.7, 1e-12);
}

TEST(Quadrature, ErrorEstimateIsReported) {
  const auto m = evaluate_quadrature({QueueModel::MG12Star, 1.0, ServiceDistribution::gamma(2.0, 4.0), 1.0});
  EXPECT_GT(m.error_estimate, 0.0);
  EXPECT_LT(m.error_estimate, 1e-6);
  EXPECT_EQ(m.provenance, "quadrature");
}

TEST(Quadrature, RejectsInvalidInput) {
  EXPECT_THROW(evaluate_quadrature({QueueModel::MG11, 0.0, ServiceDistribution::exponential(1.0), 1.0}), ParameterError);
  EXPECT_THROW(evaluate_quadrature({QueueModel::MM1, 3.0, ServiceDistribution::exponential(1.0), 1.0}), StabilityError);
  QuadratureSpec bad;
  bad.tail_quantile = 0.0;
  EXPECT_THROW(mg11_metrics({QueueModel::MG11, 1.0, ServiceDistribution::exponential(1.0), 1.0}, bad), ParameterError);
}

}  // namespace
