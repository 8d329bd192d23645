#include "overage/cli/app.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "overage/cli/evaluation.hpp"
#include "overage/cli/presets.hpp"
#include "overage/cli/scenario_file.hpp"
#include "overage/errors.hpp"

namespace overage::cli {
namespace {

struct GlobalOptions {
  std::optional<std::string> methods;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> packets;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::optional<std::string> output;
  bool omit_runtime = false;
};

void require_defined(const std::vector<Method>& methods, const Scenario& scenario) {
  for (Method m : methods)
    if (!method_defined(m, scenario))
      throw ParameterError("method " + std::string(to_string(m)) + " requires exponential service (got " +
                           scenario.service.kind_name() + ")");
}

ScenarioFile load_with_overrides(const std::string& path, const GlobalOptions& g) {
  ScenarioFile file = load_scenario(path);
  if (g.methods) file.methods = parse_method_list(*g.methods);
  if (g.seed) file.sim.seed = *g.seed;
  if (g.packets) file.sim.packets = *g.packets;
  file.sim.config(0).validate();
  require_defined(file.methods, file.scenario);
  return file;
}

std::vector<Method> methods_for(const ScenarioFile& file) {
  return file.methods.empty() ? defined_methods(file.scenario) : file.methods;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw InputError("failed writing '" + path + "'");
}

std::string run_command(const std::string& path, const std::optional<std::string>& ledger_path, const GlobalOptions& g) {
  const ScenarioFile file = load_with_overrides(path, g);
  PointRequest request{file.scenario, methods_for(file), {kAllMetrics.begin(), kAllMetrics.end()}, file.sim.config(0)};
  const bool simulates = std::find(request.methods.begin(), request.methods.end(), Method::Simulation) != request.methods.end();
  if (ledger_path && !simulates) throw InputError("--ledger requires the simulation method");

  std::ostringstream ledger;
  const std::vector<ResultRow> rows = evaluate_point(request, ledger_path ? &ledger : nullptr);
  if (ledger_path) write_file(*ledger_path, ledger.str());
  std::ostringstream csv;
  write_csv(csv, rows, !g.omit_runtime);
  return csv.str();
}

std::string sweep_command(const std::string& path, const GlobalOptions& g) {
  const ScenarioFile file = load_with_overrides(path, g);
  if (!file.sweep) throw InputError("scenario file has no 'sweep' block");
  std::vector<double> values = file.sweep->values;
  std::stable_sort(values.begin(), values.end());
  std::vector<PointRequest> requests;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const Scenario point = apply_sweep(file.scenario, file.sweep->parameter, values[i]);
    requests.push_back({point, methods_for(file), {kAllMetrics.begin(), kAllMetrics.end()}, file.sim.config(i)});
  }
  std::ostringstream csv;
  write_csv(csv, evaluate_points(requests, g.workers), !g.omit_runtime);
  return csv.str();
}

std::string figure_command(const std::string& name, const GlobalOptions& g) {
  const auto points = preset_points(name);
  if (!points) {
    std::string names;
    for (std::string_view n : kPresetNames) names += (names.empty() ? "" : ", ") + std::string(n);
    throw InputError("unknown figure preset '" + name + "' (valid: " + names + ")");
  }
  SimSettings sim;
  if (g.seed) sim.seed = *g.seed;
  if (g.packets) sim.packets = *g.packets;
  sim.config(0).validate();
  const std::optional<std::vector<Method>> wanted =
      g.methods ? std::optional(parse_method_list(*g.methods)) : std::nullopt;

  std::vector<PointRequest> requests;
  for (std::size_t i = 0; i < points->size(); ++i) {
    const PresetPoint& p = (*points)[i];
    std::vector<Method> methods;
    for (Method m : defined_methods(p.scenario))
      if (!wanted || std::find(wanted->begin(), wanted->end(), m) != wanted->end()) methods.push_back(m);
    requests.push_back({p.scenario, methods, p.metrics, sim.config(i)});
  }
  std::ostringstream csv;
  write_csv(csv, evaluate_points(requests, g.workers), !g.omit_runtime);
  return csv.str();
}

std::string validate_command(const std::string& path, const GlobalOptions& g) {
  return normalized(load_with_overrides(path, g)).dump(2) + "\n";
}

}  // namespace

int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Overage probability, average overage and stale update probability of status-update queues",
               "overage"};
  app.set_version_flag("--version", "overage 0.1.0");
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--methods", g.methods, "Comma separated subset of analytic,quadrature,simulation");
  app.add_option("--seed", g.seed, "Simulation seed");
  app.add_option("--packets", g.packets, "Generated packets per simulation run");
  app.add_option("--workers", g.workers, "Worker threads for sweeps and presets")->check(CLI::PositiveNumber);
  app.add_option("--output", g.output, "Write the result here instead of standard output");
  app.add_flag("--omit-runtime", g.omit_runtime, "Leave the runtime_seconds column empty");

  std::string file;
  std::string preset;
  std::optional<std::string> ledger;
  auto* run = app.add_subcommand("run", "Evaluate one scenario file");
  run->add_option("file", file, "Scenario file (JSON)")->required();
  run->add_option("--ledger", ledger, "Write the simulated packet ledger as CSV");
  auto* sweep = app.add_subcommand("sweep", "Evaluate the sweep block of a scenario file");
  sweep->add_option("file", file, "Scenario file (JSON)")->required();
  auto* figure = app.add_subcommand("figure", "Emit the data grid of a figure preset");
  figure->add_option("name", preset, "fig3, fig4a, fig4b, fig5 or fig6")->required();
  auto* validate = app.add_subcommand("validate", "Check a scenario file and print it with defaults filled in");
  validate->add_option("file", file, "Scenario file (JSON)")->required();
  for (auto* sub : {run, sweep, figure, validate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return kInputError;
  }

  try {
    std::string result;
    if (*run)
      result = run_command(file, ledger, g);
    else if (*sweep)
      result = sweep_command(file, g);
    else if (*figure)
      result = figure_command(preset, g);
    else
      result = validate_command(file, g);
    if (g.output)
      write_file(*g.output, result);
    else
      out << result << std::flush;
    return kSuccess;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const ParameterError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const EstimateError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomainError;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << '\n';
    return kConvergenceError;
  }
}

}  // namespace overage::cli
