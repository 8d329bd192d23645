#include "overage/cli/scenario_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "overage/errors.hpp"

namespace overage::cli {
namespace {

using nlohmann::json;

constexpr std::array<Method, 3> kMethodOrder = {Method::Analytic, Method::Quadrature, Method::Simulation};

std::string location(std::string_view text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void require_object(const json& value, const std::string& where) {
  if (!value.is_object()) throw InputError(where + " must be an object");
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& item : obj.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw InputError("unknown key '" + item.key() + "' in " + where);
}

const json& require_key(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError("missing key '" + key + "' in " + where);
  return *it;
}

double as_number(const json& value, const std::string& what) {
  if (!value.is_number()) throw InputError(what + " must be a number");
  return value.get<double>();
}

std::uint64_t as_count(const json& value, const std::string& what) {
  if (!value.is_number()) throw InputError(what + " must be an integer");
  if (value.is_number_unsigned()) return value.get<std::uint64_t>();
  const double v = value.get<double>();
  if (v < 0.0 || v != std::floor(v) || v > 1.8e19) throw InputError(what + " must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

std::string as_string(const json& value, const std::string& what) {
  if (!value.is_string()) throw InputError(what + " must be a string");
  return value.get<std::string>();
}

ServiceDistribution parse_service(const json& node) {
  require_object(node, "service");
  check_keys(node, "service", {"kind", "params"});
  const std::string kind = as_string(require_key(node, "kind", "service"), "service.kind");
  const json& params = require_key(node, "params", "service");
  require_object(params, "service.params");
  auto param = [&](const char* name) {
    return as_number(require_key(params, name, "service.params"), std::string("service.params.") + name);
  };
  if (kind == "exponential") {
    check_keys(params, "service.params", {"mu"});
    return ServiceDistribution::exponential(param("mu"));
  }
  if (kind == "gamma") {
    check_keys(params, "service.params", {"alpha", "beta"});
    return ServiceDistribution::gamma(param("alpha"), param("beta"));
  }
  if (kind == "deterministic") {
    check_keys(params, "service.params", {"d"});
    return ServiceDistribution::deterministic(param("d"));
  }
  throw InputError("service.kind must be one of exponential, gamma, deterministic (got '" + kind + "')");
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) {
  if (name == "lambda") return SweepParameter::Lambda;
  if (name == "H") return SweepParameter::Threshold;
  if (name == "rho") return SweepParameter::Rho;
  if (name == "mean_service") return SweepParameter::MeanService;
  return std::nullopt;
}

std::vector<Method> canonical(std::vector<Method> methods) {
  std::vector<Method> out;
  for (Method m : kMethodOrder)
    if (std::find(methods.begin(), methods.end(), m) != methods.end()) out.push_back(m);
  return out;
}

nlohmann::ordered_json service_json(const ServiceDistribution& s) {
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  switch (s.kind()) {
    case ServiceKind::Exponential:
      params["mu"] = s.rate();
      break;
    case ServiceKind::Gamma:
      params["alpha"] = s.shape();
      params["beta"] = s.rate();
      break;
    case ServiceKind::Deterministic:
      params["d"] = s.value();
      break;
  }
  return nlohmann::ordered_json{{"kind", s.kind_name()}, {"params", params}};
}

}  // namespace

SimConfig SimSettings::config(std::uint64_t stream_id) const {
  SimConfig c;
  c.total_generated_packets = packets;
  c.warmup_fraction = warmup_fraction;
  c.batch_count = batches;
  c.seed = seed;
  c.stream_id = stream_id;
  return c;
}

std::string_view to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::Lambda:
      return "lambda";
    case SweepParameter::Threshold:
      return "H";
    case SweepParameter::Rho:
      return "rho";
    case SweepParameter::MeanService:
      return "mean_service";
  }
  return "lambda";
}

bool method_defined(Method method, const Scenario& scenario) {
  return method != Method::Analytic || scenario.service.kind() == ServiceKind::Exponential;
}

std::vector<Method> defined_methods(const Scenario& scenario) {
  std::vector<Method> out;
  for (Method m : kMethodOrder)
    if (method_defined(m, scenario)) out.push_back(m);
  return out;
}

std::vector<Method> parse_method_list(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view name = list.substr(start, comma - start);
    const auto m = parse_method(name);
    if (!m) throw InputError("unknown method '" + std::string(name) + "' (expected analytic, quadrature, simulation)");
    out.push_back(*m);
    start = comma + 1;
  }
  return canonical(out);
}

Scenario apply_sweep(const Scenario& base, SweepParameter parameter, double value) {
  Scenario s = base;
  switch (parameter) {
    case SweepParameter::Lambda:
      s.arrival_rate = value;
      break;
    case SweepParameter::Threshold:
      s.threshold = value;
      break;
    case SweepParameter::Rho:
      if (!(value > 0.0)) throw ParameterError("swept utilization rho must be positive");
      s.arrival_rate = value / s.service.mean();
      break;
    case SweepParameter::MeanService:
      switch (s.service.kind()) {
        case ServiceKind::Exponential:
          if (!(value > 0.0)) throw ParameterError("mean service time must be positive");
          s.service = ServiceDistribution::exponential(1.0 / value);
          break;
        case ServiceKind::Gamma:
          s.service = ServiceDistribution::gamma_with_mean(s.service.shape(), value);
          break;
        case ServiceKind::Deterministic:
          s.service = ServiceDistribution::deterministic(value);
          break;
      }
      break;
  }
  return s;
}

ScenarioFile parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw InputError("malformed JSON at " + location(text, e.byte) + ": " + msg);
  }
  require_object(root, "scenario");
  check_keys(root, "scenario", {"model", "lambda", "service", "threshold_H", "methods", "sim", "sweep"});

  ScenarioFile file;
  const std::string model = as_string(require_key(root, "model", "scenario"), "model");
  const auto parsed_model = parse_queue_model(model);
  if (!parsed_model) throw InputError("model must be one of mg11, mg12star, mm1 (got '" + model + "')");
  file.scenario.model = *parsed_model;
  file.scenario.arrival_rate = as_number(require_key(root, "lambda", "scenario"), "lambda");
  file.scenario.service = parse_service(require_key(root, "service", "scenario"));
  file.scenario.threshold = as_number(require_key(root, "threshold_H", "scenario"), "threshold_H");

  if (const auto it = root.find("methods"); it != root.end()) {
    if (!it->is_array() || it->empty()) throw InputError("methods must be a nonempty array");
    std::vector<Method> methods;
    for (const json& m : *it) {
      const std::string name = as_string(m, "methods entry");
      const auto method = parse_method(name);
      if (!method) throw InputError("unknown method '" + name + "' (expected analytic, quadrature, simulation)");
      methods.push_back(*method);
    }
    file.methods = canonical(methods);
  }

  if (const auto it = root.find("sim"); it != root.end()) {
    require_object(*it, "sim");
    check_keys(*it, "sim", {"packets", "warmup_fraction", "batches", "seed"});
    if (it->contains("packets")) file.sim.packets = as_count(it->at("packets"), "sim.packets");
    if (it->contains("warmup_fraction"))
      file.sim.warmup_fraction = as_number(it->at("warmup_fraction"), "sim.warmup_fraction");
    if (it->contains("batches")) {
      const std::uint64_t b = as_count(it->at("batches"), "sim.batches");
      if (b > 1'000'000) throw ParameterError("sim.batches is unreasonably large");
      file.sim.batches = static_cast<int>(b);
    }
    if (it->contains("seed")) file.sim.seed = as_count(it->at("seed"), "sim.seed");
  }

  if (const auto it = root.find("sweep"); it != root.end()) {
    require_object(*it, "sweep");
    check_keys(*it, "sweep", {"parameter", "values"});
    const std::string name = as_string(require_key(*it, "parameter", "sweep"), "sweep.parameter");
    const auto parameter = parse_sweep_parameter(name);
    if (!parameter) throw InputError("sweep.parameter must be one of lambda, H, rho, mean_service (got '" + name + "')");
    const json& values = require_key(*it, "values", "sweep");
    if (!values.is_array() || values.empty()) throw InputError("sweep.values must be a nonempty array");
    Sweep sweep{*parameter, {}};
    for (const json& v : values) sweep.values.push_back(as_number(v, "sweep.values entry"));
    file.sweep = std::move(sweep);
  }

  // Domain checks run after the whole document is known to be well formed.
  file.scenario.validate();
  file.sim.config(0).validate();
  for (Method m : file.methods)
    if (!method_defined(m, file.scenario))
      throw ParameterError("method analytic requires exponential service (got " + file.scenario.service.kind_name() + ")");
  if (file.sweep)
    for (double v : file.sweep->values) apply_sweep(file.scenario, file.sweep->parameter, v).validate();
  return file;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

nlohmann::ordered_json normalized(const ScenarioFile& file) {
  nlohmann::ordered_json out;
  out["model"] = to_string(file.scenario.model);
  out["lambda"] = file.scenario.arrival_rate;
  out["service"] = service_json(file.scenario.service);
  out["threshold_H"] = file.scenario.threshold;
  auto methods = nlohmann::ordered_json::array();
  for (Method m : file.methods.empty() ? defined_methods(file.scenario) : file.methods) methods.push_back(to_string(m));
  out["methods"] = methods;
  out["sim"] = {{"packets", file.sim.packets},
                {"warmup_fraction", file.sim.warmup_fraction},
                {"batches", file.sim.batches},
                {"seed", file.sim.seed}};
  if (file.sweep) out["sweep"] = {{"parameter", to_string(file.sweep->parameter)}, {"values", file.sweep->values}};
  return out;
}

}  // namespace overage::cli
