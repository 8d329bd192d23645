#pragma once

// Globally adaptive Gauss-Kronrod (7/15) integration of small vector-valued
// integrands. The integrand may return either std::array<double, N> or an
// Estimate<N>; in the latter case the inner error bound is integrated along
// with the value and added to the reported error (nested integration).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <type_traits>
#include <vector>

#include "overage/errors.hpp"

namespace overage {

struct QuadratureSpec {
  double relative_tolerance = 1e-8;
  double absolute_tolerance = 1e-10;
  /// Survival mass left beyond the truncation point of each infinite axis.
  double tail_quantile = 1e-13;
  /// Bisection budget per one-dimensional integral.
  int max_subdivisions = 200;

  void validate() const {
    if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0))
      throw ParameterError("quadrature tolerances must be positive");
    if (!(tail_quantile > 0.0 && tail_quantile < 1.0))
      throw ParameterError("tail_quantile must lie in (0, 1)");
    if (max_subdivisions < 1) throw ParameterError("max_subdivisions must be >= 1");
  }
};

template <std::size_t N>
struct Estimate {
  std::array<double, N> value{};
  double error = 0.0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the nodes kKronrodNodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Segment {
  double a = 0.0;
  double b = 0.0;
  std::array<double, N> value{};
  double error = 0.0;    // quadrature error of this segment (max over components)
  double carried = 0.0;  // integrated inner error
};

template <std::size_t N, class F>
Estimate<N> call_integrand(F& f, double x) {
  using R = std::invoke_result_t<F&, double>;
  if constexpr (std::is_same_v<R, Estimate<N>>) {
    return f(x);
  } else {
    static_assert(std::is_same_v<R, std::array<double, N>>,
                  "integrand must return std::array<double, N> or Estimate<N>");
    return Estimate<N>{f(x), 0.0};
  }
}

template <std::size_t N, class F>
Segment<N> kronrod15(F& f, double a, double b) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  std::array<Estimate<N>, 15> samples;
  samples[0] = call_integrand<N>(f, centre);
  for (std::size_t k = 0; k < 7; ++k) {
    const double dx = half * kKronrodNodes[k];
    samples[1 + 2 * k] = call_integrand<N>(f, centre - dx);
    samples[2 + 2 * k] = call_integrand<N>(f, centre + dx);
  }

  Segment<N> seg;
  seg.a = a;
  seg.b = b;
  double carried = kKronrodWeights[7] * samples[0].error;
  for (std::size_t k = 0; k < 7; ++k)
    carried += kKronrodWeights[k] * (samples[1 + 2 * k].error + samples[2 + 2 * k].error);
  seg.carried = std::abs(half) * carried;

  for (std::size_t c = 0; c < N; ++c) {
    const double fc = samples[0].value[c];
    double kronrod = kKronrodWeights[7] * fc;
    double gauss = kGaussWeights[3] * fc;
    double abs_sum = kKronrodWeights[7] * std::abs(fc);
    for (std::size_t k = 0; k < 7; ++k) {
      const double lo = samples[1 + 2 * k].value[c];
      const double hi = samples[2 + 2 * k].value[c];
      kronrod += kKronrodWeights[k] * (lo + hi);
      abs_sum += kKronrodWeights[k] * (std::abs(lo) + std::abs(hi));
      if (k % 2 == 1) gauss += kGaussWeights[k / 2] * (lo + hi);
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(fc - mean);
    for (std::size_t k = 0; k < 7; ++k)
      asc += kKronrodWeights[k] *
             (std::abs(samples[1 + 2 * k].value[c] - mean) + std::abs(samples[2 + 2 * k].value[c] - mean));

    const double h = std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * h;
    const double resabs = abs_sum * h;
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);

    seg.value[c] = kronrod * half;
    seg.error = std::max(seg.error, err);
  }
  return seg;
}

template <std::size_t N>
double max_abs(const std::array<double, N>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

template <std::size_t N, class F>
Estimate<N> integrate_finite(F& f, double a, double b, std::span<const double> breakpoints,
                             const QuadratureSpec& spec) {
  std::vector<double> cuts;
  cuts.reserve(breakpoints.size() + 2);
  cuts.push_back(a);
  for (double p : breakpoints)
    if (p > a && p < b && std::isfinite(p)) cuts.push_back(p);
  cuts.push_back(b);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto by_error = [](const Segment<N>& l, const Segment<N>& r) { return l.error < r.error; };
  std::vector<Segment<N>> heap;
  std::vector<Segment<N>> frozen;  // segments too narrow to split further
  heap.reserve(cuts.size() + 2 * static_cast<std::size_t>(spec.max_subdivisions));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) heap.push_back(kronrod15<N>(f, cuts[i], cuts[i + 1]));
  std::make_heap(heap.begin(), heap.end(), by_error);

  auto totals = [&](std::array<double, N>& value, double& error, double& carried) {
    value.fill(0.0);
    error = 0.0;
    carried = 0.0;
    for (const auto* group : {&heap, &frozen})
      for (const auto& s : *group) {
        for (std::size_t c = 0; c < N; ++c) value[c] += s.value[c];
        error += s.error;
        carried += s.carried;
      }
  };

  std::array<double, N> value{};
  double error = 0.0;
  double carried = 0.0;
  totals(value, error, carried);

  int subdivisions = 0;
  while (!heap.empty()) {
    const double tolerance = std::max(spec.absolute_tolerance, spec.relative_tolerance * max_abs(value));
    if (error <= tolerance) break;
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "adaptive quadrature did not converge on [" << a << ", " << b << "] after "
          << subdivisions << " subdivisions (error estimate " << error << ", tolerance " << tolerance << ")";
      throw ConvergenceError(msg.str(), error + carried);
    }
    std::pop_heap(heap.begin(), heap.end(), by_error);
    Segment<N> worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) {
      frozen.push_back(worst);
      continue;
    }
    Segment<N> left = kronrod15<N>(f, worst.a, mid);
    Segment<N> right = kronrod15<N>(f, mid, worst.b);
    for (std::size_t c = 0; c < N; ++c) value[c] += left.value[c] + right.value[c] - worst.value[c];
    error += left.error + right.error - worst.error;
    carried += left.carried + right.carried - worst.carried;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end(), by_error);
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end(), by_error);
    ++subdivisions;
    if (subdivisions % 64 == 0) totals(value, error, carried);
  }

  totals(value, error, carried);
  const double tolerance = std::max(spec.absolute_tolerance, spec.relative_tolerance * max_abs(value));
  if (error > tolerance && heap.empty()) {
    // Only unsplittable segments remain; accept if their error is at roundoff level.
    if (error > 1e3 * tolerance)
      throw ConvergenceError("adaptive quadrature stalled at machine resolution", error + carried);
  }
  return Estimate<N>{value, error + carried};
}

}  // namespace detail

/// Integrates f over [a, b]; b may be +infinity (mapped through x = a + t/(1 - t)).
/// An empty or inverted interval yields exactly zero.
template <std::size_t N, class F>
Estimate<N> integrate_adaptive(F&& f, double a, double b, std::span<const double> breakpoints,
                               const QuadratureSpec& spec) {
  if (!(a < b)) return Estimate<N>{};
  if (std::isinf(b)) {
    auto mapped = [&f, a](double t) {
      const double one_minus = 1.0 - t;
      const double x = a + t / one_minus;
      const double jac = 1.0 / (one_minus * one_minus);
      Estimate<N> e = detail::call_integrand<N>(f, x);
      for (double& v : e.value) v *= jac;
      e.error *= jac;
      return e;
    };
    std::vector<double> mapped_breaks;
    for (double p : breakpoints)
      if (p > a && std::isfinite(p)) mapped_breaks.push_back((p - a) / (1.0 + p - a));
    return detail::integrate_finite<N>(mapped, 0.0, 1.0, mapped_breaks, spec);
  }
  return detail::integrate_finite<N>(f, a, b, breakpoints, spec);
}

template <std::size_t N, class F>
Estimate<N> integrate_adaptive(F&& f, double a, double b, const QuadratureSpec& spec) {
  return integrate_adaptive<N>(std::forward<F>(f), a, b, std::span<const double>{}, spec);
}

}  // namespace overage
