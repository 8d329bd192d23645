#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "overage/random_source.hpp"
#include "overage/scenario.hpp"

namespace overage {

enum class PacketOutcome { Delivered, DroppedBlocked, DroppedReplaced };

/// One generated packet. Service start and departure are absent for dropped packets.
struct PacketRecord {
  double generation_time = 0.0;
  std::optional<double> service_start;
  std::optional<double> departure_time;
  PacketOutcome outcome = PacketOutcome::Delivered;

  bool delivered() const noexcept { return outcome == PacketOutcome::Delivered; }
  /// Departure minus generation; only meaningful for delivered packets.
  double system_time() const { return *departure_time - generation_time; }
};

/// Quantities of the inter-departure interval that ends with delivery i.
struct IntervalContribution {
  std::size_t index = 0;            // ledger index of packet i
  double end_time = 0.0;            // departure of packet i
  double inter_departure = 0.0;     // Y_i
  double previous_system_time = 0.0;  // T_{i-1}
  double peak_age = 0.0;            // T_{i-1} + Y_i
  double epsilon = 0.0;             // time spent with age above H
  double area = 0.0;                // integral of (age - H)^+
};

struct SimConfig {
  std::uint64_t total_generated_packets = 1'000'000;
  double warmup_fraction = 0.05;
  int batch_count = 20;
  std::uint64_t seed = 1;
  std::uint64_t stream_id = 0;

  void validate() const;
};

/// Point estimate with a batch-means standard error and a 99% normal CI.
struct MetricEstimate {
  double point = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct SimEstimate {
  MetricEstimate overage_probability;
  MetricEstimate average_overage;
  MetricEstimate stale_update_probability;
  MetricEstimate average_aoi;

  std::uint64_t generated = 0;  // post-warmup N(T)
  std::uint64_t delivered = 0;  // n(T)
  std::uint64_t dropped = 0;
  std::uint64_t stale_delivered = 0;
  double horizon = 0.0;

  double mean_peak_age = 0.0;
  double max_peak_age = 0.0;
  std::size_t intervals = 0;
};

/// Estimation window: [start, end] in time, and the first packet counted for P_s.
/// `start` is a departure instant (or 0, the virtual initial delivery).
struct ObservationWindow {
  double start = 0.0;
  double end = 0.0;
  std::size_t first_packet = 0;
};

struct SimRun {
  std::vector<PacketRecord> ledger;
  std::vector<IntervalContribution> contributions;
  ObservationWindow window;
  SimEstimate estimate;
};

/// Runs one replication; deterministic in (config.seed, config.stream_id).
SimRun run_simulation(const Scenario& scenario, const SimConfig& config);

/// Queue dynamics on given arrival instants (ascending). `next_service` is called
/// once per packet that enters service, in order of service start.
std::vector<PacketRecord> simulate_ledger(QueueModel model, std::span<const double> arrivals,
                                          const std::function<double()>& next_service);

/// Age-path decomposition per inter-departure interval. The receiver starts with
/// age 0 at t = 0 (a virtual delivery with T_0 = 0), which opens the first interval.
std::vector<IntervalContribution> interval_contributions(std::span<const PacketRecord> ledger,
                                                         double threshold);

/// Time-average and per-packet estimates over the window, with batch-means CIs
/// when batch_count >= 10 (batch_count = 0 gives points only).
SimEstimate aggregate_metrics(std::span<const IntervalContribution> contributions,
                              std::span<const PacketRecord> ledger, const ObservationWindow& window,
                              double threshold, int batch_count);

struct BatchStatistics {
  double mean = 0.0;
  double standard_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Standard normal quantile used for the 99% intervals.
inline constexpr double kZ99 = 2.5758293035489004;

/// Nonoverlapping batch means; requires at least 10 batches.
BatchStatistics batch_confidence(std::span<const double> batch_values);

struct PathConsistencyReport {
  double time_above_path = 0.0;
  double time_above_intervals = 0.0;
  double area_path = 0.0;
  double area_intervals = 0.0;
  double max_relative_discrepancy = 0.0;
  bool consistent = false;
};

/// Rebuilds the sawtooth age path from generation and departure instants and
/// compares its exact threshold integrals with the interval sums.
PathConsistencyReport path_consistency_check(std::span<const PacketRecord> ledger,
                                             std::span<const IntervalContribution> contributions,
                                             double threshold, double tolerance = 1e-9);

/// gen_time,service_start,departure,outcome
void write_ledger_csv(std::ostream& out, std::span<const PacketRecord> ledger);
std::vector<PacketRecord> read_ledger_csv(std::istream& in);

}  // namespace overage
