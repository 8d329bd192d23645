#pragma once

#include "overage/scenario.hpp"
#include "overage/service_distribution.hpp"
#include "overage/terms.hpp"

namespace overage {

struct StationaryProbabilities {
  double p_idle = 1.0;
  double p_busy = 0.0;
  double p_busy_empty = 0.0;  // B1: busy, nothing waiting
  double p_busy_full = 0.0;   // B2: busy, one packet in the buffer
  double cycle_length = 0.0;  // mean idle + busy cycle
  double delivery_probability = 1.0;
};

StationaryProbabilities stationary_mg11(double lambda, const ServiceDistribution& dist);
StationaryProbabilities stationary_mg12star(double lambda, const ServiceDistribution& dist);
/// M/M/1 (or M/G/1) FCFS: p_idle = 1 - rho, every packet is delivered.
StationaryProbabilities stationary_mm1(double lambda, const ServiceDistribution& dist);

/// Relative gap |lambda - mu| / mu below which the exponential closed forms are
/// replaced by quadrature.
inline constexpr double kNearEqualRatesGap = 1e-2;

// Closed-form conditional terms for exponential service. Require lambda != mu.
Mg11Terms mm11_terms(double lambda, double mu, double threshold);
Mg12StarTerms mm12star_terms(double lambda, double mu, double threshold);
/// E[Q] for M/M/1 FCFS, expectation over generated packets.
double mm1_overage_area(double lambda, double mu, double threshold);

MetricSet closed_mm11(double lambda, double mu, double threshold);
MetricSet closed_mm12star(double lambda, double mu, double threshold);
/// The overage probability is taken from quadrature over the (T, Y) joint density.
MetricSet closed_mm1(double lambda, double mu, double threshold);

/// Dispatch on scenario.model; the service law must be exponential.
MetricSet evaluate_analytic(const Scenario& scenario);

// Metric assembly from conditional terms, shared with the quadrature engine.
MetricSet assemble_mg11(double lambda, const ServiceDistribution& dist, double threshold,
                        const StationaryProbabilities& stationary, const Mg11Terms& terms);
MetricSet assemble_mg12star(double lambda, const ServiceDistribution& dist, double threshold,
                            const StationaryProbabilities& stationary,
                            const Mg12StarTerms& terms);

}  // namespace overage
