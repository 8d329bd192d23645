// Coverage of the 99% batch-means interval for the M/M/1 stale update probability.
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <vector>

#include "overage/simulator.hpp"

using namespace overage;

int main() {
  constexpr int kReplications = 100;
  constexpr int kRequired = 95;
  const Scenario scenario{QueueModel::MM1, 1.0, ServiceDistribution::exponential(2.0), 1.0};
  const double target = std::exp(-1.0);

  std::atomic<int> next{0};
  std::atomic<int> covered{0};
  auto work = [&] {
    for (int r; (r = next.fetch_add(1)) < kReplications;) {
      SimConfig config;
      config.seed = 7;
      config.stream_id = static_cast<std::uint64_t>(r);
      const MetricEstimate e = run_simulation(scenario, config).estimate.stale_update_probability;
      if (e.ci_low <= target && target <= e.ci_high) ++covered;
    }
  };
  std::vector<std::thread> pool;
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::printf("P_s interval covered exp(-1) in %d of %d replications (required %d)\n", covered.load(), kReplications,
              kRequired);
  return covered >= kRequired ? 0 : 1;
}
