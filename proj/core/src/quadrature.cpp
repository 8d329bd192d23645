#include "overage/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>

#include "overage/analytic.hpp"
#include "overage/errors.hpp"

namespace overage {

Axis Axis::fixed(double lo, double hi, std::vector<double> breaks) {
  Axis axis;
  axis.lower = [lo](std::span<const double>) { return lo; };
  axis.upper = [hi](std::span<const double>) { return hi; };
  if (!breaks.empty())
    axis.breakpoints = [breaks = std::move(breaks)](std::span<const double>) { return breaks; };
  return axis;
}

QuadratureResult nested_quadrature(const std::function<double(std::span<const double>)>& f,
                                   std::span<const Axis> axes, const QuadratureSpec& spec) {
  const std::function<std::array<double, 1>(std::span<const double>)> wrapped =
      [&f](std::span<const double> x) { return std::array<double, 1>{f(x)}; };
  const Estimate<1> r = nested_quadrature<1>(wrapped, axes, spec);
  return {r.value[0], r.error};
}

JointDensityTY::JointDensityTY(double lambda_, double mu_) : lambda(lambda_), mu(mu_) {
  if (!(lambda > 0.0) || !(mu > 0.0)) throw ParameterError("rates must be positive");
  if (!(lambda < mu)) throw StabilityError("model mm1 requires utilization rho = lambda/mu < 1");
}

double JointDensityTY::operator()(double y, double t) const {
  if (y < 0.0 || t < 0.0) return 0.0;
  const double l = lambda;
  const double m = mu;
  return (m * m - l * m) * std::exp(l * t - m * y - m * t) - m * m * std::exp(-m * y - m * t) +
         l * m * std::exp(-l * y - m * t);
}

double JointDensityTY::system_time_density(double t) const {
  if (t < 0.0) return 0.0;
  return (mu - lambda) * std::exp(-(mu - lambda) * t);
}

double JointDensityTY::system_time_cut(double tail) const { return -std::log(tail) / (mu - lambda); }

double JointDensityTY::inter_departure_cut(double tail) const {
  return (-std::log(tail) + std::log(mu / (mu - lambda))) / lambda;
}

namespace {

using Vec3 = std::array<double, 3>;

template <std::size_t N>
Estimate<N> scaled(Estimate<N> e, double w) {
  for (double& v : e.value) v *= w;
  e.error *= std::abs(w);
  return e;
}

// Interval quantities when the next inter-departure time is exactly c.
// Components: overage time, overage area, age area (H = 0).
Vec3 kernel_fixed(double T, double c, double H) {
  const double age_area = 0.5 * c * c + c * T;
  if (T >= H) return {c, 0.5 * c * c + c * (T - H), age_area};
  const double e = std::max(0.0, T + c - H);
  return {e, 0.5 * e * e, age_area};
}

// Same with Y = c + Z, Z ~ Exp(lambda), averaged over Z.
Vec3 kernel_idle_wait(double T, double c, double H, double lambda) {
  const double m1 = 1.0 / lambda;
  const double m2 = 2.0 / (lambda * lambda);
  const double square = 0.5 * (m2 + 2.0 * c * m1 + c * c);
  const double age_area = square + (c + m1) * T;
  if (T >= H) return {c + m1, square + (c + m1) * (T - H), age_area};
  const double a = H - T - c;
  if (a <= 0.0) return {m1 - a, 0.5 * (m2 - 2.0 * a * m1 + a * a), age_area};
  const double ea = std::exp(-lambda * a);
  return {ea * m1, ea * m1 * m1, age_area};
}

// Expectations over the service law and its stationary-excess law, with
// tail truncation at spec.tail_quantile on every infinite axis.
class LawIntegrator {
 public:
  LawIntegrator(const ServiceDistribution& dist, const QuadratureSpec& spec)
      : dist_(dist),
        spec_(spec),
        cut_(dist.upper_quantile(spec.tail_quantile)),
        equilibrium_cut_(dist.equilibrium_upper_quantile(spec.tail_quantile)) {
    if (dist_.kind() == ServiceKind::Gamma && dist_.shape() < 1.0)
      power_coef_ = std::exp(dist_.shape() * std::log(dist_.rate()) - std::lgamma(dist_.shape() + 1.0));
  }

  bool point_mass() const { return dist_.kind() == ServiceKind::Deterministic; }
  double cut() const { return cut_; }
  double equilibrium_cut() const { return equilibrium_cut_; }

  /// E[g(S)].
  template <std::size_t N, class G>
  Estimate<N> service(G&& g, std::initializer_list<double> breaks) const {
    if (point_mass()) return detail::call_integrand<N>(g, dist_.value());
    Estimate<N> r = over_density<N>(g, cut_, breaks);
    r.error += spec_.tail_quantile * detail::max_abs(detail::call_integrand<N>(g, cut_).value);
    return r;
  }

  /// E[g(S); S < hi] for a continuous law.
  template <std::size_t N, class G>
  Estimate<N> service_below(G&& g, double hi, std::initializer_list<double> breaks) const {
    if (point_mass()) {
      if (dist_.value() < hi) return detail::call_integrand<N>(g, dist_.value());
      return {};
    }
    return over_density<N>(g, std::min(hi, cut_), breaks);
  }

  /// E[g(W)] for W with the stationary-excess density.
  template <std::size_t N, class G>
  Estimate<N> equilibrium(G&& g, std::span<const double> breaks) const {
    auto h = [&](double w) { return scaled(detail::call_integrand<N>(g, w), dist_.equilibrium_density(w)); };
    Estimate<N> r = integrate_adaptive<N>(h, 0.0, equilibrium_cut_, breaks, spec_);
    if (!point_mass())
      r.error += spec_.tail_quantile * detail::max_abs(detail::call_integrand<N>(g, equilibrium_cut_).value);
    return r;
  }

 private:
  template <std::size_t N, class G>
  Estimate<N> over_density(G& g, double hi, std::initializer_list<double> breaks) const {
    if (!(hi > 0.0)) return {};
    if (power_coef_ > 0.0) {
      // s = t^(1/alpha) removes the s^(alpha-1) singularity at the origin.
      const double alpha = dist_.shape();
      const double beta = dist_.rate();
      auto h = [&](double t) {
        const double s = std::pow(t, 1.0 / alpha);
        return scaled(detail::call_integrand<N>(g, s), power_coef_ * std::exp(-beta * s));
      };
      std::vector<double> mapped;
      for (double b : breaks)
        if (b > 0.0) mapped.push_back(std::pow(b, alpha));
      return integrate_adaptive<N>(h, 0.0, std::pow(hi, alpha), mapped, spec_);
    }
    auto h = [&](double s) { return scaled(detail::call_integrand<N>(g, s), dist_.density(s)); };
    const std::vector<double> list(breaks);
    return integrate_adaptive<N>(h, 0.0, hi, list, spec_);
  }

  const ServiceDistribution& dist_;
  const QuadratureSpec& spec_;
  double cut_;
  double equilibrium_cut_;
  double power_coef_ = 0.0;
};

void require_inputs(double lambda, double threshold, const QuadratureSpec& spec) {
  spec.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("arrival rate lambda must be positive");
  if (!(threshold >= 0.0) || !std::isfinite(threshold)) throw ParameterError("threshold H must be nonnegative");
}

ConditionalTerms to_terms(const Vec3& v) { return {v[0], v[1], v[2]}; }

BusyRoute effective_route(const ServiceDistribution& dist, BusyRoute route) {
  return dist.is_continuous() ? route : BusyRoute::Nested;
}

// Breakpoints of the residual-service axis where a point-mass kernel has kinks.
std::vector<double> residual_breaks(const ServiceDistribution& dist, double H) {
  std::vector<double> b{H};
  if (!dist.is_continuous()) {
    b.push_back(H - dist.value());
    b.push_back(H - 2.0 * dist.value());
  }
  return b;
}

Estimate<3> mg12star_busy_reduced(double lambda, const ServiceDistribution& dist, double H,
                                  const LawIntegrator& law, const QuadratureSpec& spec) {
  const double es = dist.mean();
  auto integrand = [&](double T) -> Estimate<3> {
    auto conv = [&](double s) {
      const double w = T - s;
      const double fw = dist.survival(w) / es;
      return std::array<double, 2>{fw, fw * std::exp(-lambda * w)};
    };
    const Estimate<2> c = law.service_below<2>(conv, T, {});
    auto pair = [&](double s2) {
      const Vec3 a = kernel_fixed(T, s2, H);
      const Vec3 b = kernel_idle_wait(T, s2, H, lambda);
      return std::array<double, 6>{a[0], a[1], a[2], b[0], b[1], b[2]};
    };
    const Estimate<6> ab = law.service<6>(pair, {H - T});
    const double eT = std::exp(-lambda * T);
    Estimate<3> out;
    double a_abs = 0.0;
    double b_abs = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const double A = ab.value[k];
      const double B = ab.value[k + 3];
      out.value[k] = c.value[1] * A + c.value[0] * eT * (B - A);
      a_abs = std::max(a_abs, std::abs(A));
      b_abs = std::max(b_abs, std::abs(B));
    }
    out.error = (c.value[0] + c.value[1]) * ab.error + c.error * (a_abs + b_abs);
    return out;
  };
  const double upper = law.cut() + law.equilibrium_cut();
  const double breaks[] = {H};
  return integrate_adaptive<3>(integrand, 0.0, upper, breaks, spec);
}

Estimate<3> mg12star_busy_nested(double lambda, const ServiceDistribution& dist, double H,
                                 const LawIntegrator& law) {
  auto over_w = [&](double w) {
    const double ew = std::exp(-lambda * w);
    auto over_s1 = [&](double s1) {
      const double T = w + s1;
      const double eT = std::exp(-lambda * T);
      auto over_s2 = [&](double s2) {
        const Vec3 a = kernel_fixed(T, s2, H);
        const Vec3 b = kernel_idle_wait(T, s2, H, lambda);
        Vec3 r;
        for (std::size_t k = 0; k < 3; ++k) r[k] = (ew - eT) * a[k] + eT * b[k];
        return r;
      };
      return law.service<3>(over_s2, {H - T});
    };
    return law.service<3>(over_s1, {H - w});
  };
  const std::vector<double> breaks = residual_breaks(dist, H);
  return law.equilibrium<3>(over_w, breaks);
}

Estimate<1> mg12star_stale_busy(double lambda, const ServiceDistribution& dist, double H,
                                const LawIntegrator& law) {
  auto g = [&](double w) { return std::array<double, 1>{std::exp(-lambda * w) * dist.survival(H - w)}; };
  std::vector<double> breaks{H};
  if (!dist.is_continuous()) breaks.push_back(H - dist.value());
  return law.equilibrium<1>(g, breaks);
}

MetricSet finish(MetricSet m, double error) {
  m.method = Method::Quadrature;
  m.provenance = "quadrature";
  m.error_estimate = error;
  return m;
}

}  // namespace

Mg11Terms mg11_terms(double lambda, const ServiceDistribution& dist, double threshold,
                     const QuadratureSpec& spec, double* error) {
  require_inputs(lambda, threshold, spec);
  const double H = threshold;
  const LawIntegrator law(dist, spec);
  auto outer = [&](double s1) {
    auto inner = [&](double s2) { return kernel_idle_wait(s1, s2, H, lambda); };
    return law.service<3>(inner, {H - s1});
  };
  const Estimate<3> r = law.service<3>(outer, {H});
  if (error) *error = r.error;
  return Mg11Terms{to_terms(r.value)};
}

Mg12StarTerms mg12star_terms(double lambda, const ServiceDistribution& dist, double threshold,
                             const QuadratureSpec& spec, BusyRoute route, double* error) {
  require_inputs(lambda, threshold, spec);
  const double H = threshold;
  const LawIntegrator law(dist, spec);

  auto idle_outer = [&](double s1) {
    const double during = -std::expm1(-lambda * s1);
    const double after = std::exp(-lambda * s1);
    auto inner = [&](double s2) {
      const Vec3 a = kernel_fixed(s1, s2, H);
      const Vec3 b = kernel_idle_wait(s1, s2, H, lambda);
      Vec3 r;
      for (std::size_t k = 0; k < 3; ++k) r[k] = during * a[k] + after * b[k];
      return r;
    };
    return law.service<3>(inner, {H - s1});
  };
  const Estimate<3> idle = law.service<3>(idle_outer, {H});

  const Estimate<3> busy = effective_route(dist, route) == BusyRoute::Reduced
                               ? mg12star_busy_reduced(lambda, dist, H, law, spec)
                               : mg12star_busy_nested(lambda, dist, H, law);
  const Estimate<1> stale = mg12star_stale_busy(lambda, dist, H, law);

  if (error) *error = idle.error + busy.error + stale.error;
  Mg12StarTerms t;
  t.idle = to_terms(idle.value);
  t.busy = to_terms(busy.value);
  t.stale_busy = stale.value[0];
  return t;
}

MetricSet mg11_metrics(const Scenario& scenario, const QuadratureSpec& spec) {
  scenario.validate();
  const double lambda = scenario.arrival_rate;
  double error = 0.0;
  const Mg11Terms terms = mg11_terms(lambda, scenario.service, scenario.threshold, spec, &error);
  const StationaryProbabilities p = stationary_mg11(lambda, scenario.service);
  return finish(assemble_mg11(lambda, scenario.service, scenario.threshold, p, terms), lambda * error);
}

MetricSet mg12star_metrics(const Scenario& scenario, const QuadratureSpec& spec) {
  scenario.validate();
  const double lambda = scenario.arrival_rate;
  double error = 0.0;
  const Mg12StarTerms terms =
      mg12star_terms(lambda, scenario.service, scenario.threshold, spec, BusyRoute::Reduced, &error);
  const StationaryProbabilities p = stationary_mg12star(lambda, scenario.service);
  return finish(assemble_mg12star(lambda, scenario.service, scenario.threshold, p, terms), lambda * error);
}

MetricSet mm1_metrics(double lambda, double mu, double threshold, const QuadratureSpec& spec) {
  require_inputs(lambda, threshold, spec);
  const JointDensityTY joint(lambda, mu);
  const double H = threshold;
  const double t_cut = joint.system_time_cut(spec.tail_quantile);
  const double y_cut = joint.inter_departure_cut(spec.tail_quantile);

  auto outer = [&](double t) {
    auto inner = [&](double y) {
      Vec3 k = kernel_fixed(t, y, H);
      const double f = joint(y, t);
      for (double& v : k) v *= f;
      return k;
    };
    const double breaks[] = {H - t};
    return integrate_adaptive<3>(inner, 0.0, y_cut, breaks, spec);
  };
  const double breaks[] = {H};
  Estimate<3> r = integrate_adaptive<3>(outer, 0.0, t_cut, breaks, spec);
  r.error += 2.0 * spec.tail_quantile * detail::max_abs(kernel_fixed(t_cut, y_cut, H));

  MetricSet m;
  m.overage_probability = std::clamp(lambda * r.value[0], 0.0, 1.0);
  m.average_overage = std::max(0.0, lambda * r.value[1]);
  m.average_aoi = lambda * r.value[2];
  m.stale_update_probability = std::exp(-(mu - lambda) * H);
  m.delivery_probability = 1.0;
  return finish(m, lambda * r.error);
}

MetricSet evaluate_quadrature(const Scenario& scenario, const QuadratureSpec& spec) {
  scenario.validate();
  switch (scenario.model) {
    case QueueModel::MG11:
      return mg11_metrics(scenario, spec);
    case QueueModel::MG12Star:
      return mg12star_metrics(scenario, spec);
    case QueueModel::MM1:
      return mm1_metrics(scenario.arrival_rate, scenario.service.rate(), scenario.threshold, spec);
  }
  throw ParameterError("unknown queue model");
}

Mg12StarRegionMasses mg12star_region_masses(double lambda, const ServiceDistribution& dist, double threshold,
                                            const QuadratureSpec& spec, BusyRoute route) {
  require_inputs(lambda, threshold, spec);
  const double H = threshold;
  const LawIntegrator law(dist, spec);
  using Vec4 = std::array<double, 4>;
  auto split = [H](double T, double during, double after) {
    return T < H ? Vec4{during, 0.0, after, 0.0} : Vec4{0.0, during, 0.0, after};
  };

  Mg12StarRegionMasses out;
  auto idle = [&](double s1) { return split(s1, -std::expm1(-lambda * s1), std::exp(-lambda * s1)); };
  out.idle = law.service<4>(idle, {H}).value;

  if (effective_route(dist, route) == BusyRoute::Reduced) {
    const double es = dist.mean();
    auto busy = [&](double T) {
      auto conv = [&](double s) {
        const double w = T - s;
        const double fw = dist.survival(w) / es;
        return std::array<double, 2>{fw, fw * std::exp(-lambda * w)};
      };
      const Estimate<2> c = law.service_below<2>(conv, T, {});
      const double after = std::exp(-lambda * T) * c.value[0];
      return Estimate<4>{split(T, c.value[1] - after, after), c.error};
    };
    const double breaks[] = {H};
    out.busy = integrate_adaptive<4>(busy, 0.0, law.cut() + law.equilibrium_cut(), breaks, spec).value;
  } else {
    auto busy = [&](double w) {
      const double ew = std::exp(-lambda * w);
      auto inner = [&](double s1) {
        const double eT = std::exp(-lambda * (w + s1));
        return split(w + s1, ew - eT, eT);
      };
      return law.service<4>(inner, {H - w});
    };
    const std::vector<double> breaks = residual_breaks(dist, H);
    out.busy = law.equilibrium<4>(busy, breaks).value;
  }

  auto dropped = [&](double w) { return std::array<double, 1>{-std::expm1(-lambda * w)}; };
  out.busy_dropped = law.equilibrium<1>(dropped, std::span<const double>{}).value[0];
  return out;
}

}  // namespace overage
