#pragma once

#include <random>
#include <string>
#include <variant>

#include "overage/random_source.hpp"

namespace overage {

enum class ServiceKind { Exponential, Gamma, Deterministic };

enum class Evaluate { Density, Cdf, Survival };

/// Service-time law S. Exponential(mu), Gamma(shape alpha, rate beta) with
/// mean alpha/beta, or a point mass at d. Immutable after construction.
class ServiceDistribution {
 public:
  static ServiceDistribution exponential(double rate);
  static ServiceDistribution gamma(double shape, double rate);
  static ServiceDistribution deterministic(double value);
  /// Gamma law with the given shape, rate chosen so that E[S] = mean.
  static ServiceDistribution gamma_with_mean(double shape, double mean);

  ServiceKind kind() const noexcept { return kind_; }
  bool is_continuous() const noexcept { return kind_ != ServiceKind::Deterministic; }

  /// Exponential mu or gamma beta.
  double rate() const noexcept { return rate_; }
  /// Gamma alpha; 1 for exponential.
  double shape() const noexcept { return shape_; }
  /// Deterministic d.
  double value() const noexcept { return value_; }

  // Defined on the whole real line (zero mass below 0). The deterministic law
  // has no density: density() is 0 off the atom and +inf on it.
  double density(double s) const;
  double cdf(double s) const;
  double survival(double s) const;

  double mean() const noexcept;
  double second_moment() const noexcept;

  /// E[exp(-lambda S)].
  double mgf_at_minus(double lambda) const;

  /// Stationary-excess density Pr{S > w} / E[S].
  double equilibrium_density(double w) const;
  /// Pr{W > w} for W with the stationary-excess density, i.e. E[(S - w)^+] / E[S].
  double equilibrium_survival(double w) const;

  /// Smallest s with survival(s) <= tail (bisection for gamma).
  double upper_quantile(double tail) const;
  /// Same for the stationary-excess law.
  double equilibrium_upper_quantile(double tail) const;

  /// Log of the gamma normalizer beta^alpha / Gamma(alpha).
  double log_normalizer() const noexcept { return log_norm_; }

  double sample(RandomSource& source) const;

  /// "mu=2", "alpha=2;beta=4", "d=0.5".
  std::string describe() const;
  std::string kind_name() const;

 private:
  ServiceDistribution(ServiceKind kind, double shape, double rate, double value);

  ServiceKind kind_;
  double shape_;
  double rate_;
  double value_;
  double log_norm_ = 0.0;
};

/// Density, CDF or survival at a nonnegative point.
double distribution_eval(const ServiceDistribution& dist, double point, Evaluate which);

/// Stateful sampler reused across many draws (keeps std::gamma_distribution state).
class ServiceSampler {
 public:
  explicit ServiceSampler(const ServiceDistribution& dist);
  double operator()(RandomSource& source);

 private:
  ServiceDistribution dist_;
  std::variant<std::monostate, std::gamma_distribution<double>, double> law_;  // exponential draws go through RandomSource
};

}  // namespace overage
