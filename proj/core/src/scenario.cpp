#include "overage/scenario.hpp"

#include <cmath>
#include <sstream>

#include "overage/errors.hpp"
#include "overage/format.hpp"

namespace overage {

std::string_view to_string(QueueModel model) {
  switch (model) {
    case QueueModel::MG11:
      return "mg11";
    case QueueModel::MG12Star:
      return "mg12star";
    case QueueModel::MM1:
      return "mm1";
  }
  return "unknown";
}

std::optional<QueueModel> parse_queue_model(std::string_view name) {
  if (name == "mg11") return QueueModel::MG11;
  if (name == "mg12star") return QueueModel::MG12Star;
  if (name == "mm1") return QueueModel::MM1;
  return std::nullopt;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Analytic:
      return "analytic";
    case Method::Quadrature:
      return "quadrature";
    case Method::Simulation:
      return "simulation";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "analytic") return Method::Analytic;
  if (name == "quadrature") return Method::Quadrature;
  if (name == "simulation") return Method::Simulation;
  return std::nullopt;
}

void Scenario::validate() const {
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
    throw ParameterError("arrival rate lambda must be positive and finite");
  if (!(threshold >= 0.0) || !std::isfinite(threshold))
    throw ParameterError("threshold H must be nonnegative and finite");
  if (model == QueueModel::MM1) {
    if (service.kind() != ServiceKind::Exponential)
      throw ParameterError("model mm1 requires exponential service");
    const double rho = utilization();
    if (!(rho < 1.0)) {
      std::ostringstream msg;
      msg << "model mm1 requires utilization rho = lambda/mu < 1 (got rho = " << format_number(rho) << ")";
      throw StabilityError(msg.str());
    }
  }
}

}  // namespace overage
