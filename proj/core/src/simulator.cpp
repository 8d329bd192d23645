#include "overage/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "overage/errors.hpp"
#include "overage/format.hpp"

namespace overage {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::string_view outcome_name(PacketOutcome outcome) {
  switch (outcome) {
    case PacketOutcome::Delivered:
      return "delivered";
    case PacketOutcome::DroppedBlocked:
      return "dropped_blocked";
    case PacketOutcome::DroppedReplaced:
      return "dropped_replaced";
  }
  return "delivered";
}

std::vector<std::size_t> delivered_by_departure(std::span<const PacketRecord> ledger) {
  std::vector<std::size_t> order;
  order.reserve(ledger.size());
  for (std::size_t i = 0; i < ledger.size(); ++i)
    if (ledger[i].delivered()) order.push_back(i);
  auto by_departure = [&](std::size_t a, std::size_t b) { return *ledger[a].departure_time < *ledger[b].departure_time; };
  if (!std::is_sorted(order.begin(), order.end(), by_departure))
    std::stable_sort(order.begin(), order.end(), by_departure);
  return order;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

MetricEstimate make_estimate(double point, const std::vector<double>& batches, double lo, double hi) {
  MetricEstimate m;
  m.point = point;
  if (batches.empty()) {
    m.ci_low = m.ci_high = point;
    return m;
  }
  const BatchStatistics s = batch_confidence(batches);
  m.standard_error = s.standard_error;
  m.ci_low = std::clamp(point - kZ99 * s.standard_error, lo, hi);
  m.ci_high = std::clamp(point + kZ99 * s.standard_error, lo, hi);
  return m;
}

double parse_double(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    throw ParameterError("ledger line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return v;
}

}  // namespace

void SimConfig::validate() const {
  if (total_generated_packets < 2) throw ParameterError("total_generated_packets must be at least 2");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 0.5)) throw ParameterError("warmup_fraction must lie in [0, 0.5)");
  if (batch_count < 10) throw ParameterError("batch_count must be at least 10");
}

std::vector<PacketRecord> simulate_ledger(QueueModel model, std::span<const double> arrivals,
                                          const std::function<double()>& next_service) {
  std::vector<PacketRecord> ledger(arrivals.size());
  double free_at = -kInfinity;
  std::optional<std::size_t> buffered;

  auto serve = [&](std::size_t i, double start) {
    const double departure = start + next_service();
    ledger[i].service_start = start;
    ledger[i].departure_time = departure;
    ledger[i].outcome = PacketOutcome::Delivered;
    free_at = departure;
  };

  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const double t = arrivals[i];
    if (i > 0 && t < arrivals[i - 1]) throw ParameterError("arrival times must be nondecreasing");
    ledger[i].generation_time = t;
    switch (model) {
      case QueueModel::MG11:
        if (t >= free_at)
          serve(i, t);
        else
          ledger[i].outcome = PacketOutcome::DroppedBlocked;
        break;
      case QueueModel::MG12Star:
        if (buffered && free_at <= t) {
          serve(*buffered, free_at);
          buffered.reset();
        }
        if (t >= free_at) {
          serve(i, t);
        } else {
          if (buffered) ledger[*buffered].outcome = PacketOutcome::DroppedReplaced;
          buffered = i;
        }
        break;
      case QueueModel::MM1:
        serve(i, std::max(t, free_at));
        break;
    }
  }
  if (buffered) serve(*buffered, free_at);
  return ledger;
}

std::vector<IntervalContribution> interval_contributions(std::span<const PacketRecord> ledger, double threshold) {
  std::vector<IntervalContribution> out;
  const std::vector<std::size_t> order = delivered_by_departure(ledger);
  out.reserve(order.size());
  double previous_departure = 0.0;
  double previous_system_time = 0.0;
  for (std::size_t i : order) {
    const PacketRecord& p = ledger[i];
    IntervalContribution c;
    c.index = i;
    c.end_time = *p.departure_time;
    c.inter_departure = c.end_time - previous_departure;
    c.previous_system_time = previous_system_time;
    c.peak_age = previous_system_time + c.inter_departure;
    if (c.peak_age > threshold) {
      if (previous_system_time < threshold) {
        c.epsilon = c.peak_age - threshold;
        c.area = 0.5 * c.epsilon * c.epsilon;
      } else {
        c.epsilon = c.inter_departure;
        c.area = 0.5 * c.inter_departure * c.inter_departure + c.inter_departure * (previous_system_time - threshold);
      }
    }
    out.push_back(c);
    previous_departure = c.end_time;
    previous_system_time = p.system_time();
  }
  return out;
}

BatchStatistics batch_confidence(std::span<const double> batch_values) {
  const std::size_t n = batch_values.size();
  if (n < 10) throw EstimateError("batch means need at least 10 batches, got " + std::to_string(n));
  BatchStatistics s;
  for (double v : batch_values) s.mean += v;
  s.mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : batch_values) ss += (v - s.mean) * (v - s.mean);
  s.standard_error = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
  s.ci_low = s.mean - kZ99 * s.standard_error;
  s.ci_high = s.mean + kZ99 * s.standard_error;
  return s;
}

SimEstimate aggregate_metrics(std::span<const IntervalContribution> contributions,
                              std::span<const PacketRecord> ledger, const ObservationWindow& window,
                              double threshold, int batch_count) {
  const double horizon = window.end - window.start;
  if (!(horizon > 0.0)) throw EstimateError("observation horizon is zero; no complete inter-departure interval");
  if (batch_count < 0) throw ParameterError("batch_count must be nonnegative");
  const std::size_t batches = static_cast<std::size_t>(batch_count);
  const double width = batches ? horizon / static_cast<double>(batches) : horizon;
  auto batch_of = [&](double t) {
    if (!batches) return std::size_t{0};
    const double k = std::floor((t - window.start) / width);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(batches - 1)));
  };

  SimEstimate est;
  est.horizon = horizon;
  const std::size_t slots = std::max<std::size_t>(batches, 1);
  std::vector<double> eps(slots, 0.0), area(slots, 0.0), age(slots, 0.0);
  std::vector<double> generated(slots, 0.0), stale(slots, 0.0);

  double eps_sum = 0.0, area_sum = 0.0, age_sum = 0.0, peak_sum = 0.0;
  for (const IntervalContribution& c : contributions) {
    if (!(c.end_time > window.start) || c.end_time > window.end) continue;
    const std::size_t b = batch_of(c.end_time);
    const double y = c.inter_departure;
    const double age_area = y * c.previous_system_time + 0.5 * y * y;
    eps[b] += c.epsilon;
    area[b] += c.area;
    age[b] += age_area;
    eps_sum += c.epsilon;
    area_sum += c.area;
    age_sum += age_area;
    peak_sum += c.peak_age;
    est.max_peak_age = std::max(est.max_peak_age, c.peak_age);
    ++est.intervals;
  }
  if (est.intervals) est.mean_peak_age = peak_sum / static_cast<double>(est.intervals);

  for (std::size_t i = window.first_packet; i < ledger.size(); ++i) {
    const PacketRecord& p = ledger[i];
    const std::size_t b = batch_of(p.generation_time);
    ++est.generated;
    generated[b] += 1.0;
    if (!p.delivered()) {
      ++est.dropped;
      stale[b] += 1.0;
    } else {
      ++est.delivered;
      if (p.system_time() > threshold) {
        ++est.stale_delivered;
        stale[b] += 1.0;
      }
    }
  }
  if (est.generated == 0) throw EstimateError("no generated packets in the observation window");

  std::vector<double> po, ao, ps, aoi;
  if (batches) {
    for (std::size_t b = 0; b < batches; ++b) {
      if (generated[b] == 0.0) throw EstimateError("a batch received no packets; use fewer batches or more packets");
      po.push_back(eps[b] / width);
      ao.push_back(area[b] / width);
      ps.push_back(stale[b] / generated[b]);
      aoi.push_back(age[b] / width);
    }
  }
  const double stale_fraction =
      static_cast<double>(est.dropped + est.stale_delivered) / static_cast<double>(est.generated);
  est.overage_probability = make_estimate(eps_sum / horizon, po, 0.0, 1.0);
  est.average_overage = make_estimate(area_sum / horizon, ao, 0.0, kInfinity);
  est.stale_update_probability = make_estimate(stale_fraction, ps, 0.0, 1.0);
  est.average_aoi = make_estimate(age_sum / horizon, aoi, 0.0, kInfinity);
  return est;
}

SimRun run_simulation(const Scenario& scenario, const SimConfig& config) {
  scenario.validate();
  config.validate();
  RandomSource source(config.seed, config.stream_id);
  const std::size_t n = static_cast<std::size_t>(config.total_generated_packets);

  std::vector<double> arrivals(n);
  double t = 0.0;
  for (double& a : arrivals) {
    t += source.exponential(scenario.arrival_rate);
    a = t;
  }
  ServiceSampler sampler(scenario.service);
  const std::function<double()> next_service = [&] { return sampler(source); };

  SimRun run;
  run.ledger = simulate_ledger(scenario.model, arrivals, next_service);
  run.contributions = interval_contributions(run.ledger, scenario.threshold);
  if (run.contributions.empty()) throw EstimateError("simulation produced no deliveries");

  run.window.first_packet = static_cast<std::size_t>(std::floor(config.warmup_fraction * static_cast<double>(n)));
  run.window.end = run.contributions.back().end_time;
  if (run.window.first_packet > 0) {
    const double first_generation = run.ledger[run.window.first_packet].generation_time;
    const auto it = std::lower_bound(run.contributions.begin(), run.contributions.end(), first_generation,
                                     [](const IntervalContribution& c, double g) { return c.end_time < g; });
    if (it == run.contributions.end()) throw EstimateError("no departure after the warmup period");
    run.window.start = it->end_time;
  }
  run.estimate = aggregate_metrics(run.contributions, run.ledger, run.window, scenario.threshold, config.batch_count);
  return run;
}

PathConsistencyReport path_consistency_check(std::span<const PacketRecord> ledger,
                                             std::span<const IntervalContribution> contributions, double threshold,
                                             double tolerance) {
  PathConsistencyReport r;
  // Between departures the age is t - u, u the generation time of the latest delivery.
  double last_departure = 0.0;
  double freshest = 0.0;
  for (std::size_t i : delivered_by_departure(ledger)) {
    const double d = *ledger[i].departure_time;
    const double crossing = freshest + threshold;
    r.time_above_path += std::max(0.0, d - std::max(last_departure, crossing));
    const double hi = std::max(0.0, d - crossing);
    const double lo = std::max(0.0, last_departure - crossing);
    r.area_path += 0.5 * (hi * hi - lo * lo);
    last_departure = d;
    freshest = ledger[i].generation_time;
  }
  for (const IntervalContribution& c : contributions) {
    r.time_above_intervals += c.epsilon;
    r.area_intervals += c.area;
  }
  r.max_relative_discrepancy = std::max(relative_gap(r.time_above_path, r.time_above_intervals),
                                        relative_gap(r.area_path, r.area_intervals));
  r.consistent = r.max_relative_discrepancy <= tolerance;
  return r;
}

void write_ledger_csv(std::ostream& out, std::span<const PacketRecord> ledger) {
  out << "gen_time,service_start,departure,outcome\n";
  for (const PacketRecord& p : ledger) {
    out << format_number(p.generation_time) << ',';
    if (p.service_start) out << format_number(*p.service_start);
    out << ',';
    if (p.departure_time) out << format_number(*p.departure_time);
    out << ',' << outcome_name(p.outcome) << '\n';
  }
}

std::vector<PacketRecord> read_ledger_csv(std::istream& in) {
  std::vector<PacketRecord> ledger;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "gen_time,service_start,departure,outcome")
        throw ParameterError("ledger header must be gen_time,service_start,departure,outcome");
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      fields.push_back(rest.substr(0, pos));
    fields.push_back(rest);
    if (fields.size() != 4) throw ParameterError("ledger line " + std::to_string(line_no) + ": expected 4 fields");

    PacketRecord p;
    p.generation_time = parse_double(fields[0], line_no);
    if (!fields[1].empty()) p.service_start = parse_double(fields[1], line_no);
    if (!fields[2].empty()) p.departure_time = parse_double(fields[2], line_no);
    if (fields[3] == "delivered")
      p.outcome = PacketOutcome::Delivered;
    else if (fields[3] == "dropped_blocked")
      p.outcome = PacketOutcome::DroppedBlocked;
    else if (fields[3] == "dropped_replaced")
      p.outcome = PacketOutcome::DroppedReplaced;
    else
      throw ParameterError("ledger line " + std::to_string(line_no) + ": unknown outcome '" + std::string(fields[3]) + "'");
    if (p.delivered() != p.departure_time.has_value())
      throw ParameterError("ledger line " + std::to_string(line_no) + ": departure present iff delivered");
    ledger.push_back(p);
  }
  return ledger;
}

}  // namespace overage
