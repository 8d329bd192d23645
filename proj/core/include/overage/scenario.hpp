#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "overage/service_distribution.hpp"

namespace overage {

enum class QueueModel { MG11, MG12Star, MM1 };

std::string_view to_string(QueueModel model);
std::optional<QueueModel> parse_queue_model(std::string_view name);

/// One experiment: queue discipline, Poisson arrival rate, service law and age threshold H.
struct Scenario {
  QueueModel model = QueueModel::MG11;
  double arrival_rate = 1.0;
  ServiceDistribution service = ServiceDistribution::exponential(1.0);
  double threshold = 0.0;

  double utilization() const { return arrival_rate * service.mean(); }

  /// Throws ParameterError (or StabilityError for M/M/1 with rho >= 1).
  void validate() const;
};

enum class Method { Analytic, Quadrature, Simulation };

std::string_view to_string(Method method);
std::optional<Method> parse_method(std::string_view name);

/// The three threshold metrics plus average AoI and delivery probability.
struct MetricSet {
  double overage_probability = 0.0;
  double average_overage = 0.0;
  double stale_update_probability = 0.0;
  double average_aoi = 0.0;
  double delivery_probability = 1.0;

  Method method = Method::Analytic;
  /// Free-form provenance, e.g. "closed-form", "quadrature-fallback".
  std::string provenance;
  /// Conservative absolute error bound on the quadrature-derived fields (0 if exact).
  double error_estimate = 0.0;
};

}  // namespace overage
