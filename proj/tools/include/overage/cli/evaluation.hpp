#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "overage/scenario.hpp"
#include "overage/simulator.hpp"

namespace overage::cli {

enum class Metric { OverageProbability, AverageOverage, StaleProbability, AverageAoi };

inline constexpr std::array<Metric, 4> kAllMetrics = {Metric::OverageProbability, Metric::AverageOverage,
                                                      Metric::StaleProbability, Metric::AverageAoi};

/// CSV spelling: P_o, avg_overage, P_s, avg_aoi.
std::string_view to_string(Metric metric);

struct PointRequest {
  Scenario scenario;
  std::vector<Method> methods;
  std::vector<Metric> metrics{kAllMetrics.begin(), kAllMetrics.end()};
  SimConfig sim;
};

struct ResultRow {
  std::string model;
  double lambda = 0.0;
  std::string service_kind;
  std::string service_params;
  double threshold = 0.0;
  Metric metric = Metric::OverageProbability;
  Method method = Method::Analytic;
  double value = 0.0;
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  std::optional<std::uint64_t> packets;
  std::optional<std::uint64_t> seed;
  double runtime_seconds = 0.0;
};

inline constexpr std::string_view kCsvHeader =
    "model,lambda,service_kind,service_params,H,metric,method,value,ci_low,ci_high,n_packets,seed,runtime_seconds";

/// Rows for one point in method order, then metric order. If `ledger` is set,
/// the simulation ledger is written there as CSV.
std::vector<ResultRow> evaluate_point(const PointRequest& request, std::ostream* ledger = nullptr);

/// Evaluates points on up to `workers` threads; the result order follows the
/// request order. The exception of the lowest failing index is rethrown.
std::vector<ResultRow> evaluate_points(const std::vector<PointRequest>& requests, unsigned workers);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool include_runtime = true);

}  // namespace overage::cli
