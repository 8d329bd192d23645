#include "overage/cli/presets.hpp"

#include <span>

namespace overage::cli {
namespace {

constexpr std::array<QueueModel, 3> kModels = {QueueModel::MG11, QueueModel::MG12Star, QueueModel::MM1};

// Grid values are k / divisor so that every point is the correctly rounded decimal.
std::vector<double> grid(int first, int last, double divisor) {
  std::vector<double> v;
  for (int k = first; k <= last; ++k) v.push_back(k / divisor);
  return v;
}

std::vector<PresetPoint> fig3() {
  const std::vector<Metric> metrics{Metric::OverageProbability, Metric::StaleProbability};
  std::vector<PresetPoint> points;
  for (QueueModel model : kModels)
    for (double h : grid(1, 50, 10.0))
      points.push_back({Scenario{model, 1.0, ServiceDistribution::exponential(2.0), h}, metrics});
  return points;
}

std::vector<PresetPoint> fig4(std::span<const QueueModel> models, std::span<const double> thresholds) {
  const std::vector<Metric> metrics{Metric::AverageAoi, Metric::AverageOverage};
  const double mu = 2.0;
  std::vector<PresetPoint> points;
  for (QueueModel model : models)
    for (double h : thresholds)
      for (double rho : grid(1, 19, 20.0))
        points.push_back({Scenario{model, rho * mu, ServiceDistribution::exponential(mu), h}, metrics});
  return points;
}

std::vector<PresetPoint> fig5() {
  const std::vector<Metric> metrics{Metric::OverageProbability, Metric::StaleProbability};
  std::vector<PresetPoint> points;
  for (double alpha : kGammaShapes)
    for (double lambda : grid(1, 20, 5.0))
      points.push_back({Scenario{QueueModel::MG11, lambda, ServiceDistribution::gamma_with_mean(alpha, 0.5), 1.0}, metrics});
  return points;
}

std::vector<PresetPoint> fig6() {
  const std::vector<Metric> metrics{Metric::OverageProbability, Metric::StaleProbability};
  std::vector<PresetPoint> points;
  for (double alpha : kGammaShapes)
    for (double mean : grid(1, 20, 10.0))
      points.push_back({Scenario{QueueModel::MG12Star, 1.0, ServiceDistribution::gamma_with_mean(alpha, mean), 1.0}, metrics});
  return points;
}

}  // namespace

std::optional<std::vector<PresetPoint>> preset_points(std::string_view name) {
  if (name == "fig3") return fig3();
  if (name == "fig4a") {
    const double h[] = {1.0};
    return fig4(kModels, h);
  }
  if (name == "fig4b") {
    const QueueModel m[] = {QueueModel::MM1};
    return fig4(m, kFig4bThresholds);
  }
  if (name == "fig5") return fig5();
  if (name == "fig6") return fig6();
  return std::nullopt;
}

}  // namespace overage::cli
