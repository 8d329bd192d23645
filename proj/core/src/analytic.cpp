#include "overage/analytic.hpp"

#include <algorithm>
#include <cmath>

#include "overage/errors.hpp"
#include "overage/quadrature.hpp"

namespace overage {
namespace {

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

void require_rates(double lambda, double mu, double threshold) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("arrival rate lambda must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("service rate mu must be positive");
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) throw ParameterError("threshold H must be nonnegative");
}

bool near_equal_rates(double lambda, double mu) { return std::abs(lambda - mu) / mu < kNearEqualRatesGap; }

// 1 - E[exp(-lambda S)] without cancellation for small lambda.
double one_minus_mgf(const ServiceDistribution& dist, double lambda) {
  switch (dist.kind()) {
    case ServiceKind::Exponential:
      return lambda / (dist.rate() + lambda);
    case ServiceKind::Gamma:
      return -std::expm1(-dist.shape() * std::log1p(lambda / dist.rate()));
    case ServiceKind::Deterministic:
      return -std::expm1(-lambda * dist.value());
  }
  return 0.0;
}

// M/M/1/1 conditional expectations given the previous packet arrived idle.
double mm11_overage_time(double l, double m, double H) {
  const double eM = std::exp(-m * H);
  const double eL = std::exp(-l * H);
  return (1.0 / l + 1.0 / m) * eM + l * H * eM / (l - m) + m * m * (eL - eM) / (l * (l - m) * (l - m));
}

double mm11_overage_area(double l, double m, double H) {
  const double eM = std::exp(-m * H);
  const double eL = std::exp(-l * H);
  const double d = l - m;
  const double d2 = d * d;
  double q = eM * (1.0 / (l * l) - H * (1.0 / l + 1.0 / m) + 1.0 / (m * m) + 1.0 / (l * m));
  q += (H * eM + eM / m) * (1.0 / l + 1.0 / m);
  q += m * m / (d * d2 * d) * ((eL + eM) * (l * l - 2.0 * l * m + m * m) * H * H + (eL - eM) * (2.0 * l - 2.0 * m) * H);
  q -= m * m * H * H * (eL - eM) / d2;
  q += m * m * (eL - eM) / (l * l * d2);
  q -= 2.0 * m * m * H * (eL - eM * (m * H - l * H + 1.0)) / (d2 * d);
  q += l * H * eM / (m * d);
  return q;
}

double mm12star_idle_overage_time(double l, double m, double H) {
  const double eM = std::exp(-H * m);
  const double eL = std::exp(-H * l);
  const double eLM = std::exp(-H * (l + m));
  return H * eM + eM / m + (eL - eM) / l - eM * (eL - 1.0) / (l - m) + m * eLM / (l * l + m * l) +
         eL * (1.0 - eM) / m + l * eL * (eM - 1.0) / (m * (l - m));
}

double mm12star_busy_overage_time(double l, double m, double H) {
  const double eM = std::exp(-H * m);
  const double eL = std::exp(-H * l);
  const double eLM = std::exp(-H * (l + m));
  const double s = l + m;
  double e = eM * (1.0 - eL) / l + eLM / s;
  e += -eL * (eM - 1.0) / l - eL * (eM - 1.0) / m - H * eLM;
  e += H * m * eM / l + m * m * eLM / (l * s * s) + 2.0 * m * eM * (eL - 1.0) / (l * l);
  e += H * eLM * (l - m) / (l - m) + H * m * m * eLM / (l * l + m * l);
  e += l * eL * (eM - 1.0) / (m * (l - m)) - m * eM * (eL - 1.0) / (l * (l - m));
  return e;
}

double mm12star_idle_overage_area(double l, double m, double H) {
  const double eM = std::exp(-H * m);
  const double eL = std::exp(-H * l);
  const double eLM = std::exp(-H * (l + m));
  const double s = l + m;
  double q = eM / (m * m) + H * (eL - eLM) / m + eM * (H * m + 1.0) / (m * m);
  q += -eL * (eM - 1.0) / (m * m) + eLM / (l * s) + (eL - eLM) / (l * l);
  q += m * eLM / (l * l * s) + (eM - eLM) / (m * (l - m));
  q += -l * (eL - eLM) / (m * m * (l - m)) + H * eL * (eM - 1.0) / m;
  q += m * eLM * (H * s + 1.0) / (l * s * s) - H * m * eLM / (l * s);
  // Completing term of the idle-arrival overage area.
  q += (eL - eM) / (l * m);
  return q;
}

double mm12star_busy_overage_area(double l, double m, double H) {
  const double eM = std::exp(-H * m);
  const double eLM = std::exp(-H * (l + m));
  const double s = l + m;
  const double s2 = s * s;
  const double s3 = s2 * s;
  double q = 2.0 * eLM / (m * s) - (2.0 * eLM - 2.0 * eM) / (l * m) - eLM / s2;
  q += eLM * (H * s + 1.0) / s2 - 2.0 * H * eLM / s - m * eLM / s3;
  q -= m * eLM * (H * s + 1.0) / s3;
  q += eLM *
       (H * l * l * l + 3.0 * H * l * l * m + l * l + 3.0 * H * l * m * m + 3.0 * l * m + H * m * m * m + m * m) /
       (l * l * s2);
  q += 2.0 * eM * (std::exp(-H * l) - 1.0) / (l * l) + H * eM / l + H * eLM / l;
  // exp(-H(l+m)) (l e^{Hl} - m e^{Hm}) folded into exp(-Hm) and exp(-Hl).
  const double tail = eLM * (l - m + H * l * l - H * m * m) - l * eM + m * std::exp(-H * l);
  q -= tail / (l * l * (l - m));
  return q;
}

double mm12star_stale_busy(double l, double m, double H) {
  const double eM = std::exp(-H * m);
  const double eLM = std::exp(-H * (l + m));
  return m * eLM / (l + m) - m * eM * (std::exp(-H * l) - 1.0) / l;
}

MetricSet fallback(MetricSet metrics) {
  metrics.method = Method::Analytic;
  metrics.provenance = "quadrature-fallback";
  return metrics;
}

}  // namespace

StationaryProbabilities stationary_mg11(double lambda, const ServiceDistribution& dist) {
  if (!(lambda > 0.0)) throw ParameterError("arrival rate lambda must be positive");
  StationaryProbabilities p;
  p.cycle_length = 1.0 / lambda + dist.mean();
  p.p_idle = 1.0 / (lambda * p.cycle_length);
  p.p_busy = dist.mean() / p.cycle_length;
  p.p_busy_empty = p.p_busy;
  p.p_busy_full = 0.0;
  p.delivery_probability = p.p_idle;
  return p;
}

StationaryProbabilities stationary_mg12star(double lambda, const ServiceDistribution& dist) {
  if (!(lambda > 0.0)) throw ParameterError("arrival rate lambda must be positive");
  const double mgf = dist.mgf_at_minus(lambda);
  const double es = dist.mean();
  StationaryProbabilities p;
  p.cycle_length = 1.0 / lambda + es / mgf;
  p.p_idle = mgf / (mgf + lambda * es);
  p.p_busy = lambda * es / (mgf + lambda * es);
  // p_B2 = p_B (1 + (MGF - 1) / (lambda E[S])), so p_B1 = p_B (1 - MGF) / (lambda E[S]).
  p.p_busy_empty = p.p_busy * one_minus_mgf(dist, lambda) / (lambda * es);
  p.p_busy_full = p.p_busy - p.p_busy_empty;
  p.delivery_probability = p.p_idle + p.p_busy_empty;
  return p;
}

StationaryProbabilities stationary_mm1(double lambda, const ServiceDistribution& dist) {
  if (!(lambda > 0.0)) throw ParameterError("arrival rate lambda must be positive");
  const double rho = lambda * dist.mean();
  if (!(rho < 1.0)) throw StabilityError("utilization rho must be < 1 for the infinite-buffer queue");
  StationaryProbabilities p;
  p.p_idle = 1.0 - rho;
  p.p_busy = rho;
  p.p_busy_empty = rho * (1.0 - rho);
  p.p_busy_full = rho * rho;
  p.cycle_length = 1.0 / (lambda * (1.0 - rho));
  p.delivery_probability = 1.0;
  return p;
}

Mg11Terms mm11_terms(double lambda, double mu, double threshold) {
  require_rates(lambda, mu, threshold);
  if (lambda == mu) throw ParameterError("closed form undefined at lambda == mu");
  Mg11Terms t;
  t.idle.overage_time = mm11_overage_time(lambda, mu, threshold);
  t.idle.overage_area = mm11_overage_area(lambda, mu, threshold);
  t.idle.age_area = mm11_overage_area(lambda, mu, 0.0);
  return t;
}

Mg12StarTerms mm12star_terms(double lambda, double mu, double threshold) {
  require_rates(lambda, mu, threshold);
  if (lambda == mu) throw ParameterError("closed form undefined at lambda == mu");
  Mg12StarTerms t;
  t.idle.overage_time = mm12star_idle_overage_time(lambda, mu, threshold);
  t.idle.overage_area = mm12star_idle_overage_area(lambda, mu, threshold);
  t.idle.age_area = mm12star_idle_overage_area(lambda, mu, 0.0);
  t.busy.overage_time = mm12star_busy_overage_time(lambda, mu, threshold);
  t.busy.overage_area = mm12star_busy_overage_area(lambda, mu, threshold);
  t.busy.age_area = mm12star_busy_overage_area(lambda, mu, 0.0);
  t.stale_busy = mm12star_stale_busy(lambda, mu, threshold);
  return t;
}

double mm1_overage_area(double l, double m, double H) {
  require_rates(l, m, H);
  if (l == m) throw ParameterError("closed form undefined at lambda == mu");
  const double eM = std::exp(-m * H);
  const double eL = std::exp(-l * H);
  const double eD = std::exp((l - m) * H);
  const double d = l - m;
  double q = eM / (l * l) - eM / (m * m) - eD / (m * d);
  q += -eM * (m * H + 1.0) / (m * m) - (eD - eM) / (m * m) + H * eD / d;
  q += -eD * (H * d - 1.0) / (d * d) - H * eM / l;
  q += -m * (eL - eM) / (l * l * d) + (eD - eM) / (l * m) + l * eD / (m * m * d);
  q += eM * (m * H + 1.0) / (l * m) + l * eD * (H * d - 1.0) / (m * d * d);
  q -= l * H * eD / (m * d);
  return q;
}

MetricSet assemble_mg11(double lambda, const ServiceDistribution& dist, double threshold,
                        const StationaryProbabilities& stationary, const Mg11Terms& terms) {
  const double rate = lambda * stationary.p_idle;
  MetricSet m;
  m.overage_probability = clamp_probability(rate * terms.idle.overage_time);
  m.average_overage = std::max(0.0, rate * terms.idle.overage_area);
  m.average_aoi = rate * terms.idle.age_area;
  m.stale_update_probability = clamp_probability(1.0 - stationary.p_idle * dist.cdf(threshold));
  m.delivery_probability = stationary.delivery_probability;
  return m;
}

MetricSet assemble_mg12star(double lambda, const ServiceDistribution& dist, double threshold,
                            const StationaryProbabilities& stationary, const Mg12StarTerms& terms) {
  const double pi = stationary.p_idle;
  const double pb = stationary.p_busy;
  auto mix = [&](double idle, double busy) { return lambda * (idle * pi + busy * pb); };
  MetricSet m;
  m.overage_probability = clamp_probability(mix(terms.idle.overage_time, terms.busy.overage_time));
  m.average_overage = std::max(0.0, mix(terms.idle.overage_area, terms.busy.overage_area));
  m.average_aoi = mix(terms.idle.age_area, terms.busy.age_area);
  const double stale_delivered = pi * dist.survival(threshold) + pb * terms.stale_busy;
  m.stale_update_probability = clamp_probability(1.0 - stationary.delivery_probability + stale_delivered);
  m.delivery_probability = stationary.delivery_probability;
  return m;
}

MetricSet closed_mm11(double lambda, double mu, double threshold) {
  require_rates(lambda, mu, threshold);
  const auto service = ServiceDistribution::exponential(mu);
  if (near_equal_rates(lambda, mu))
    return fallback(mg11_metrics(Scenario{QueueModel::MG11, lambda, service, threshold}));
  MetricSet m = assemble_mg11(lambda, service, threshold, stationary_mg11(lambda, service),
                              mm11_terms(lambda, mu, threshold));
  m.method = Method::Analytic;
  m.provenance = "closed-form";
  return m;
}

MetricSet closed_mm12star(double lambda, double mu, double threshold) {
  require_rates(lambda, mu, threshold);
  const auto service = ServiceDistribution::exponential(mu);
  if (near_equal_rates(lambda, mu))
    return fallback(mg12star_metrics(Scenario{QueueModel::MG12Star, lambda, service, threshold}));
  MetricSet m = assemble_mg12star(lambda, service, threshold, stationary_mg12star(lambda, service),
                                  mm12star_terms(lambda, mu, threshold));
  m.method = Method::Analytic;
  m.provenance = "closed-form";
  return m;
}

MetricSet closed_mm1(double lambda, double mu, double threshold) {
  require_rates(lambda, mu, threshold);
  if (!(lambda < mu)) throw StabilityError("model mm1 requires utilization rho = lambda/mu < 1");
  if (near_equal_rates(lambda, mu)) return fallback(mm1_metrics(lambda, mu, threshold));

  const MetricSet numeric = mm1_metrics(lambda, mu, threshold);
  MetricSet m;
  m.overage_probability = numeric.overage_probability;
  m.error_estimate = numeric.error_estimate;
  m.average_overage = std::max(0.0, lambda * mm1_overage_area(lambda, mu, threshold));
  m.average_aoi = lambda * mm1_overage_area(lambda, mu, 0.0);
  m.stale_update_probability = clamp_probability(std::exp(-(mu - lambda) * threshold));
  m.delivery_probability = 1.0;
  m.method = Method::Analytic;
  m.provenance = "closed-form; overage probability by quadrature";
  return m;
}

MetricSet evaluate_analytic(const Scenario& scenario) {
  scenario.validate();
  if (scenario.service.kind() != ServiceKind::Exponential)
    throw ParameterError("analytic method requires exponential service (got " + scenario.service.kind_name() + ")");
  const double mu = scenario.service.rate();
  switch (scenario.model) {
    case QueueModel::MG11:
      return closed_mm11(scenario.arrival_rate, mu, scenario.threshold);
    case QueueModel::MG12Star:
      return closed_mm12star(scenario.arrival_rate, mu, scenario.threshold);
    case QueueModel::MM1:
      return closed_mm1(scenario.arrival_rate, mu, scenario.threshold);
  }
  throw ParameterError("unknown queue model");
}

}  // namespace overage
