#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "overage/scenario.hpp"
#include "overage/simulator.hpp"

namespace overage::cli {

/// Malformed input: bad JSON, unknown or missing keys, wrong types. Exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimSettings {
  std::uint64_t packets = 1'000'000;
  double warmup_fraction = 0.05;
  int batches = 20;
  std::uint64_t seed = 1;

  SimConfig config(std::uint64_t stream_id) const;
};

enum class SweepParameter { Lambda, Threshold, Rho, MeanService };

std::string_view to_string(SweepParameter parameter);

struct Sweep {
  SweepParameter parameter = SweepParameter::Lambda;
  std::vector<double> values;
};

struct ScenarioFile {
  Scenario scenario;
  /// Canonical order (analytic, quadrature, simulation); empty means "all defined".
  std::vector<Method> methods;
  SimSettings sim;
  std::optional<Sweep> sweep;
};

/// Strict parse: unknown keys and type mismatches raise InputError, parameter
/// domain violations raise ParameterError.
ScenarioFile parse_scenario(std::string_view text);
ScenarioFile load_scenario(const std::string& path);

/// The scenario with defaults filled in, in file syntax.
nlohmann::ordered_json normalized(const ScenarioFile& file);

bool method_defined(Method method, const Scenario& scenario);
std::vector<Method> defined_methods(const Scenario& scenario);
/// Comma separated method names, e.g. "analytic,simulation".
std::vector<Method> parse_method_list(std::string_view list);

/// The base scenario with the swept parameter set to `value`.
Scenario apply_sweep(const Scenario& base, SweepParameter parameter, double value);

}  // namespace overage::cli
