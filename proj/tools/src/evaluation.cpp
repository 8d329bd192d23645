#include "overage/cli/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <ostream>
#include <thread>

#include "overage/analytic.hpp"
#include "overage/format.hpp"
#include "overage/quadrature.hpp"

namespace overage::cli {
namespace {

double metric_value(const MetricSet& m, Metric metric) {
  switch (metric) {
    case Metric::OverageProbability:
      return m.overage_probability;
    case Metric::AverageOverage:
      return m.average_overage;
    case Metric::StaleProbability:
      return m.stale_update_probability;
    case Metric::AverageAoi:
      return m.average_aoi;
  }
  return 0.0;
}

const MetricEstimate& metric_estimate(const SimEstimate& e, Metric metric) {
  switch (metric) {
    case Metric::OverageProbability:
      return e.overage_probability;
    case Metric::AverageOverage:
      return e.average_overage;
    case Metric::StaleProbability:
      return e.stale_update_probability;
    case Metric::AverageAoi:
      return e.average_aoi;
  }
  return e.overage_probability;
}

ResultRow base_row(const Scenario& s) {
  ResultRow row;
  row.model = std::string(to_string(s.model));
  row.lambda = s.arrival_rate;
  row.service_kind = s.service.kind_name();
  row.service_params = s.service.describe();
  row.threshold = s.threshold;
  return row;
}

void put_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_number(*v);
}

}  // namespace

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::OverageProbability:
      return "P_o";
    case Metric::AverageOverage:
      return "avg_overage";
    case Metric::StaleProbability:
      return "P_s";
    case Metric::AverageAoi:
      return "avg_aoi";
  }
  return "P_o";
}

std::vector<ResultRow> evaluate_point(const PointRequest& request, std::ostream* ledger) {
  std::vector<ResultRow> rows;
  for (Method method : request.methods) {
    const auto start = std::chrono::steady_clock::now();
    std::optional<MetricSet> set;
    std::optional<SimEstimate> sim;
    switch (method) {
      case Method::Analytic:
        set = evaluate_analytic(request.scenario);
        break;
      case Method::Quadrature:
        set = evaluate_quadrature(request.scenario);
        break;
      case Method::Simulation: {
        SimRun run = run_simulation(request.scenario, request.sim);
        if (ledger) write_ledger_csv(*ledger, run.ledger);
        sim = run.estimate;
        break;
      }
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (Metric metric : request.metrics) {
      ResultRow row = base_row(request.scenario);
      row.metric = metric;
      row.method = method;
      row.runtime_seconds = elapsed;
      if (sim) {
        const MetricEstimate& e = metric_estimate(*sim, metric);
        row.value = e.point;
        row.ci_low = e.ci_low;
        row.ci_high = e.ci_high;
        row.packets = request.sim.total_generated_packets;
        row.seed = request.sim.seed;
      } else {
        row.value = metric_value(*set, metric);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ResultRow> evaluate_points(const std::vector<PointRequest>& requests, unsigned workers) {
  std::vector<std::vector<ResultRow>> results(requests.size());
  std::vector<std::exception_ptr> errors(requests.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < requests.size();) {
      try {
        results[i] = evaluate_point(requests[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned count = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(std::max<std::size_t>(requests.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < count; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ResultRow> rows;
  for (auto& r : results) rows.insert(rows.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  return rows;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool include_runtime) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << r.model << ',' << format_number(r.lambda) << ',' << r.service_kind << ',' << r.service_params << ','
        << format_number(r.threshold) << ',' << to_string(r.metric) << ',' << to_string(r.method) << ','
        << format_number(r.value) << ',';
    put_optional(out, r.ci_low);
    out << ',';
    put_optional(out, r.ci_high);
    out << ',';
    if (r.packets) out << *r.packets;
    out << ',';
    if (r.seed) out << *r.seed;
    out << ',';
    if (include_runtime) out << format_number(r.runtime_seconds);
    out << '\n';
  }
}

}  // namespace overage::cli
