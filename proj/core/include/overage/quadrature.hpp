#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "overage/adaptive_integration.hpp"
#include "overage/scenario.hpp"
#include "overage/terms.hpp"

namespace overage {

// ---------------------------------------------------------------------------
// Generic nested integration (up to three axes)
// ---------------------------------------------------------------------------

/// Bounds of one axis as functions of the outer coordinates (outermost first).
/// An infinite upper bound is integrated through a rational map of [0, 1).
struct Axis {
  std::function<double(std::span<const double>)> lower;
  std::function<double(std::span<const double>)> upper;
  /// Optional interior points where the integrand has kinks or jumps.
  std::function<std::vector<double>(std::span<const double>)> breakpoints;

  static Axis fixed(double lo, double hi, std::vector<double> breaks = {});
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
};

namespace detail {

template <std::size_t N>
Estimate<N> nested_level(const std::function<std::array<double, N>(std::span<const double>)>& f,
                         std::span<const Axis> axes, std::array<double, 3>& point, std::size_t level,
                         const QuadratureSpec& spec) {
  const std::span<const double> outer(point.data(), level);
  const Axis& axis = axes[level];
  const double lo = axis.lower ? axis.lower(outer) : 0.0;
  const double hi = axis.upper(outer);
  std::vector<double> breaks;
  if (axis.breakpoints) breaks = axis.breakpoints(outer);
  auto slice = [&](double x) -> Estimate<N> {
    point[level] = x;
    if (level + 1 == axes.size()) return Estimate<N>{f(std::span<const double>(point.data(), level + 1)), 0.0};
    return nested_level<N>(f, axes, point, level + 1, spec);
  };
  return integrate_adaptive<N>(slice, lo, hi, breaks, spec);
}

}  // namespace detail

/// Integrates f over the region described by `axes` (1 to 3 axes, outermost first).
/// Degenerate axes (lower >= upper) contribute exactly zero.
template <std::size_t N>
Estimate<N> nested_quadrature(const std::function<std::array<double, N>(std::span<const double>)>& f,
                              std::span<const Axis> axes, const QuadratureSpec& spec) {
  spec.validate();
  if (axes.empty() || axes.size() > 3) throw ParameterError("nested_quadrature supports 1 to 3 axes");
  std::array<double, 3> point{};
  return detail::nested_level<N>(f, axes, point, 0, spec);
}

QuadratureResult nested_quadrature(const std::function<double(std::span<const double>)>& f,
                                   std::span<const Axis> axes, const QuadratureSpec& spec = {});

// ---------------------------------------------------------------------------
// M/M/1 joint law of (T_{i-1}, Y_i)
// ---------------------------------------------------------------------------

/// Joint density of the previous packet's system time T and the next
/// inter-departure time Y in a stable M/M/1 FCFS queue.
struct JointDensityTY {
  double lambda;
  double mu;

  JointDensityTY(double lambda, double mu);

  double operator()(double y, double t) const;
  /// Marginal density of T: (mu - lambda) exp(-(mu - lambda) t).
  double system_time_density(double t) const;
  /// Truncation points with at most `tail` survival mass on each axis.
  double system_time_cut(double tail) const;
  double inter_departure_cut(double tail) const;
};

// ---------------------------------------------------------------------------
// Queue metric integrals
// ---------------------------------------------------------------------------

/// How the M/G/1/2* busy-arrival integral is evaluated.
enum class BusyRoute {
  /// Continuous laws: integrate over T = W + S_{i-1} with a convolution density.
  Reduced,
  /// Literal nesting over (W, S_{i-1}, S_i); used for point-mass service.
  Nested,
};

Mg11Terms mg11_terms(double lambda, const ServiceDistribution& dist, double threshold,
                     const QuadratureSpec& spec = {}, double* error = nullptr);
Mg12StarTerms mg12star_terms(double lambda, const ServiceDistribution& dist, double threshold,
                             const QuadratureSpec& spec = {}, BusyRoute route = BusyRoute::Reduced,
                             double* error = nullptr);

MetricSet mg11_metrics(const Scenario& scenario, const QuadratureSpec& spec = {});
MetricSet mg12star_metrics(const Scenario& scenario, const QuadratureSpec& spec = {});
MetricSet mm1_metrics(double lambda, double mu, double threshold, const QuadratureSpec& spec = {});

/// Dispatch on scenario.model.
MetricSet evaluate_quadrature(const Scenario& scenario, const QuadratureSpec& spec = {});

/// Probability mass of each case region behind the M/G/1/2* integrals.
/// Index: [T_{i-1} < H, next arrival during service] , [T >= H, during],
///        [T < H, next arrival after departure], [T >= H, after].
struct Mg12StarRegionMasses {
  std::array<double, 4> idle{};
  std::array<double, 4> busy{};
  /// Busy arrivals replaced before reaching the server (X < W).
  double busy_dropped = 0.0;
};

Mg12StarRegionMasses mg12star_region_masses(double lambda, const ServiceDistribution& dist,
                                            double threshold, const QuadratureSpec& spec = {},
                                            BusyRoute route = BusyRoute::Reduced);

}  // namespace overage
