#include "overage/service_distribution.hpp"

#include <cmath>
#include <limits>

#include "overage/errors.hpp"
#include "overage/format.hpp"
#include "overage/special_functions.hpp"

namespace overage {
namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive and finite");
}

template <class Survival>
double bisect_upper_quantile(Survival survival, double start, double tail) {
  double lo = 0.0;
  double hi = start;
  while (survival(hi) > tail) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (survival(mid) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

}  // namespace

ServiceDistribution::ServiceDistribution(ServiceKind kind, double shape, double rate, double value)
    : kind_(kind), shape_(shape), rate_(rate), value_(value) {
  if (kind_ == ServiceKind::Gamma) log_norm_ = shape_ * std::log(rate_) - std::lgamma(shape_);
}

ServiceDistribution ServiceDistribution::exponential(double rate) {
  require_positive(rate, "exponential rate mu");
  return ServiceDistribution(ServiceKind::Exponential, 1.0, rate, 0.0);
}

ServiceDistribution ServiceDistribution::gamma(double shape, double rate) {
  require_positive(shape, "gamma shape alpha");
  require_positive(rate, "gamma rate beta");
  return ServiceDistribution(ServiceKind::Gamma, shape, rate, 0.0);
}

ServiceDistribution ServiceDistribution::deterministic(double value) {
  require_positive(value, "deterministic service time d");
  return ServiceDistribution(ServiceKind::Deterministic, 0.0, 0.0, value);
}

ServiceDistribution ServiceDistribution::gamma_with_mean(double shape, double mean) {
  require_positive(mean, "mean service time");
  return gamma(shape, shape / mean);
}

double ServiceDistribution::density(double s) const {
  if (s < 0.0) return 0.0;
  switch (kind_) {
    case ServiceKind::Exponential:
      return rate_ * std::exp(-rate_ * s);
    case ServiceKind::Gamma:
      if (s == 0.0) {
        if (shape_ < 1.0) return std::numeric_limits<double>::infinity();
        return shape_ == 1.0 ? rate_ : 0.0;
      }
      return std::exp(log_norm_ + (shape_ - 1.0) * std::log(s) - rate_ * s);
    case ServiceKind::Deterministic:
      return s == value_ ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return 0.0;
}

double ServiceDistribution::cdf(double s) const {
  if (s < 0.0) return 0.0;
  switch (kind_) {
    case ServiceKind::Exponential:
      return -std::expm1(-rate_ * s);
    case ServiceKind::Gamma:
      return regularized_gamma_p(shape_, rate_ * s);
    case ServiceKind::Deterministic:
      return s >= value_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double ServiceDistribution::survival(double s) const {
  if (s < 0.0) return 1.0;
  switch (kind_) {
    case ServiceKind::Exponential:
      return std::exp(-rate_ * s);
    case ServiceKind::Gamma:
      return regularized_gamma_q(shape_, rate_ * s);
    case ServiceKind::Deterministic:
      return s < value_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double ServiceDistribution::mean() const noexcept {
  switch (kind_) {
    case ServiceKind::Exponential:
      return 1.0 / rate_;
    case ServiceKind::Gamma:
      return shape_ / rate_;
    case ServiceKind::Deterministic:
      return value_;
  }
  return 0.0;
}

double ServiceDistribution::second_moment() const noexcept {
  switch (kind_) {
    case ServiceKind::Exponential:
      return 2.0 / (rate_ * rate_);
    case ServiceKind::Gamma:
      return shape_ * (shape_ + 1.0) / (rate_ * rate_);
    case ServiceKind::Deterministic:
      return value_ * value_;
  }
  return 0.0;
}

double ServiceDistribution::mgf_at_minus(double lambda) const {
  if (!(lambda >= 0.0)) throw ParameterError("MGF argument lambda must be nonnegative");
  switch (kind_) {
    case ServiceKind::Exponential:
      return rate_ / (rate_ + lambda);
    case ServiceKind::Gamma:
      return std::exp(shape_ * std::log(rate_ / (rate_ + lambda)));
    case ServiceKind::Deterministic:
      return std::exp(-lambda * value_);
  }
  return 1.0;
}

double ServiceDistribution::equilibrium_density(double w) const {
  if (w < 0.0) return 0.0;
  return survival(w) / mean();
}

double ServiceDistribution::equilibrium_survival(double w) const {
  if (w <= 0.0) return 1.0;
  switch (kind_) {
    case ServiceKind::Exponential:
      return std::exp(-rate_ * w);
    case ServiceKind::Gamma: {
      const double x = rate_ * w;
      const double v = regularized_gamma_q(shape_ + 1.0, x) - (x / shape_) * regularized_gamma_q(shape_, x);
      return std::max(0.0, v);
    }
    case ServiceKind::Deterministic:
      return std::max(0.0, 1.0 - w / value_);
  }
  return 0.0;
}

double ServiceDistribution::upper_quantile(double tail) const {
  if (!(tail > 0.0 && tail < 1.0)) throw ParameterError("tail probability must lie in (0, 1)");
  switch (kind_) {
    case ServiceKind::Exponential:
      return -std::log(tail) / rate_;
    case ServiceKind::Gamma:
      return bisect_upper_quantile([this](double s) { return survival(s); }, mean(), tail);
    case ServiceKind::Deterministic:
      return value_;
  }
  return 0.0;
}

double ServiceDistribution::equilibrium_upper_quantile(double tail) const {
  if (!(tail > 0.0 && tail < 1.0)) throw ParameterError("tail probability must lie in (0, 1)");
  switch (kind_) {
    case ServiceKind::Exponential:
      return -std::log(tail) / rate_;
    case ServiceKind::Gamma:
      return bisect_upper_quantile([this](double w) { return equilibrium_survival(w); }, mean(), tail);
    case ServiceKind::Deterministic:
      return value_;
  }
  return 0.0;
}

double ServiceDistribution::sample(RandomSource& source) const {
  switch (kind_) {
    case ServiceKind::Exponential:
      return source.exponential(rate_);
    case ServiceKind::Gamma:
      return std::gamma_distribution<double>(shape_, 1.0 / rate_)(source.engine());
    case ServiceKind::Deterministic:
      return value_;
  }
  return 0.0;
}

std::string ServiceDistribution::kind_name() const {
  switch (kind_) {
    case ServiceKind::Exponential:
      return "exponential";
    case ServiceKind::Gamma:
      return "gamma";
    case ServiceKind::Deterministic:
      return "deterministic";
  }
  return "unknown";
}

std::string ServiceDistribution::describe() const {
  switch (kind_) {
    case ServiceKind::Exponential:
      return "mu=" + format_number(rate_);
    case ServiceKind::Gamma:
      return "alpha=" + format_number(shape_) + ";beta=" + format_number(rate_);
    case ServiceKind::Deterministic:
      return "d=" + format_number(value_);
  }
  return {};
}

double distribution_eval(const ServiceDistribution& dist, double point, Evaluate which) {
  if (!(point >= 0.0)) throw ParameterError("evaluation point must be nonnegative");
  switch (which) {
    case Evaluate::Density:
      return dist.density(point);
    case Evaluate::Cdf:
      return dist.cdf(point);
    case Evaluate::Survival:
      return dist.survival(point);
  }
  return 0.0;
}

ServiceSampler::ServiceSampler(const ServiceDistribution& dist) : dist_(dist), law_(0.0) {
  switch (dist.kind()) {
    case ServiceKind::Exponential:
      law_ = std::monostate{};
      break;
    case ServiceKind::Gamma:
      law_ = std::gamma_distribution<double>(dist.shape(), 1.0 / dist.rate());
      break;
    case ServiceKind::Deterministic:
      law_ = dist.value();
      break;
  }
}

double ServiceSampler::operator()(RandomSource& source) {
  switch (law_.index()) {
    case 0:
      return source.exponential(dist_.rate());
    case 1:
      return std::get<1>(law_)(source.engine());
    default:
      return std::get<2>(law_);
  }
}

}  // namespace overage
