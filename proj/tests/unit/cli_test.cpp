#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "overage/cli/app.hpp"
#include "overage/cli/presets.hpp"
#include "overage/cli/scenario_file.hpp"
#include "overage/errors.hpp"

using namespace overage;
using namespace overage::cli;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "overage");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_app(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("overage-cli-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string path(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, kCsvHeader);
  while (std::getline(ss, line)) rows.push_back(split(line, ','));
  return rows;
}

bool parses_as_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(v);
}

const char* kMm1 =
    R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1,"methods":["analytic"]})";
const char* kGamma =
    R"({"model":"mg11","lambda":1,"service":{"kind":"gamma","params":{"alpha":2,"beta":4}},"threshold_H":1,
        "methods":["quadrature","simulation"]})";

TEST(ScenarioFile, DefaultsAndNormalization) {
  const ScenarioFile f = parse_scenario(kMm1);
  EXPECT_EQ(f.scenario.model, QueueModel::MM1);
  EXPECT_EQ(f.sim.seed, 1u);
  EXPECT_EQ(f.sim.packets, 1000000u);
  const auto n = normalized(f);
  EXPECT_EQ(n["sim"]["seed"], 1);
  EXPECT_EQ(n["sim"]["warmup_fraction"], 0.05);
  EXPECT_EQ(n["sim"]["batches"], 20);
  EXPECT_EQ(n["methods"].size(), 1u);
  const ScenarioFile all = parse_scenario(R"({"model":"mg11","lambda":1,"service":{"kind":"gamma","params":{"alpha":2,"beta":4}},"threshold_H":1})");
  EXPECT_EQ(normalized(all)["methods"], nlohmann::json::array({"quadrature", "simulation"}));
}

TEST(ScenarioFile, StrictSchema) {
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1,"x":0})"), InputError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2,"beta":1}},"threshold_H":1})"), InputError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":"1","service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1})"), InputError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2}}})"), InputError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm2","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1})"), InputError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1,"sim":{"packets":1.5}})"), InputError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1,"sweep":{"parameter":"mu","values":[1]}})"), InputError);
  try {
    parse_scenario("{\"model\": \"mm1\",\n  \"lambda\": 1,,\n}");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2, column 15"), std::string::npos) << e.what();
  }
}

TEST(ScenarioFile, DomainErrors) {
  EXPECT_THROW(parse_scenario(R"({"model":"mg11","lambda":1,"service":{"kind":"gamma","params":{"alpha":2,"beta":0}},"threshold_H":1})"), ParameterError);
  EXPECT_THROW(parse_scenario(R"({"model":"mg11","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":-1})"), ParameterError);
  EXPECT_THROW(parse_scenario(R"({"model":"mg11","lambda":1,"service":{"kind":"gamma","params":{"alpha":2,"beta":4}},"threshold_H":1,"methods":["analytic"]})"), ParameterError);
  EXPECT_THROW(parse_scenario(R"({"model":"mm1","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1,"sweep":{"parameter":"rho","values":[0.5,1.2]}})"), StabilityError);
  try {
    parse_scenario(R"({"model":"mm1","lambda":3,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1})");
    FAIL();
  } catch (const StabilityError& e) {
    EXPECT_NE(std::string(e.what()).find("rho"), std::string::npos);
  }
}

TEST(ScenarioFile, SweepParameters) {
  const Scenario base{QueueModel::MG12Star, 1.0, ServiceDistribution::gamma(2.0, 4.0), 1.0};
  EXPECT_DOUBLE_EQ(apply_sweep(base, SweepParameter::Rho, 0.25).arrival_rate, 0.5);
  const Scenario m = apply_sweep(base, SweepParameter::MeanService, 2.0);
  EXPECT_DOUBLE_EQ(m.service.shape(), 2.0);
  EXPECT_DOUBLE_EQ(m.service.mean(), 2.0);
  EXPECT_DOUBLE_EQ(apply_sweep(base, SweepParameter::Threshold, 3.0).threshold, 3.0);
  EXPECT_DOUBLE_EQ(apply_sweep(base, SweepParameter::Lambda, 3.0).arrival_rate, 3.0);
  EXPECT_THROW(parse_method_list("analytic,magic"), InputError);
  EXPECT_EQ(parse_method_list("simulation,analytic"), (std::vector<Method>{Method::Analytic, Method::Simulation}));
}

TEST(Cli, RunAnalyticMm1) {
  TempDir dir;
  const auto r = invoke({"run", dir.write("mm1.json", kMm1)});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2][5], "P_s");
  EXPECT_EQ(rows[2][6], "analytic");
  EXPECT_NEAR(std::stod(rows[2][7]), std::exp(-1.0), 1e-15);
  EXPECT_EQ(rows[2][8], "");
}

TEST(Cli, QuadratureInsideSimulationInterval) {
  TempDir dir;
  const auto r = invoke({"run", dir.write("g.json", kGamma)});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& q = rows[k];
    const auto& s = rows[k + 4];
    ASSERT_EQ(q[5], s[5]);
    EXPECT_EQ(q[6], "quadrature");
    EXPECT_EQ(s[6], "simulation");
    const double value = std::stod(q[7]);
    EXPECT_LE(std::stod(s[8]), value) << q[5];
    EXPECT_GE(std::stod(s[9]), value) << q[5];
    EXPECT_EQ(s[10], "1000000");
    EXPECT_EQ(s[11], "1");
  }
}

TEST(Cli, CsvFieldsRoundTrip) {
  TempDir dir;
  const auto file = dir.write("s.json", R"({"model":"mg12star","lambda":0.7,"service":{"kind":"gamma","params":{"alpha":0.5,"beta":1}},
     "threshold_H":0.3,"sim":{"packets":20000,"seed":5}})");
  const auto r = invoke({"run", file});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : csv_rows(r.out)) {
    ASSERT_EQ(row.size(), 13u);
    for (std::size_t i : {1u, 4u, 7u, 12u}) EXPECT_TRUE(parses_as_number(row[i])) << row[i];
    if (row[6] == "simulation")
      for (std::size_t i : {8u, 9u, 10u, 11u}) EXPECT_TRUE(parses_as_number(row[i])) << row[i];
  }
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const auto malformed = invoke({"run", dir.write("bad.json", "{\"model\": \"mm1\",")});
  EXPECT_EQ(malformed.code, 2);
  EXPECT_TRUE(malformed.out.empty());
  EXPECT_NE(malformed.err.find("line 1"), std::string::npos);

  const auto unstable = invoke({"validate", dir.write("u.json", R"({"model":"mm1","lambda":3,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1})")});
  EXPECT_EQ(unstable.code, 3);
  EXPECT_NE(unstable.err.find("rho"), std::string::npos);

  const auto beta = invoke({"validate", dir.write("b.json", R"({"model":"mg11","lambda":1,"service":{"kind":"gamma","params":{"alpha":2,"beta":-1}},"threshold_H":1})")});
  EXPECT_EQ(beta.code, 3);

  const auto preset = invoke({"figure", "fig9"});
  EXPECT_EQ(preset.code, 2);
  for (auto name : kPresetNames) EXPECT_NE(preset.err.find(std::string(name)), std::string::npos);

  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"run"}).code, 2);
  EXPECT_EQ(invoke({"run", dir.path("missing.json")}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"--methods", "analytic", "run", dir.write("g.json", kGamma)}).code, 3);
  EXPECT_EQ(invoke({"--packets", "1", "run", dir.write("m.json", kMm1)}).code, 3);
  EXPECT_EQ(invoke({"sweep", dir.write("m2.json", kMm1)}).code, 2);
}

TEST(Cli, ValidateEchoesDefaults) {
  TempDir dir;
  const auto r = invoke({"validate", dir.write("m.json", kMm1), "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto echo = nlohmann::json::parse(r.out);
  EXPECT_EQ(echo["sim"]["seed"], 9);
  EXPECT_EQ(echo["sim"]["packets"], 1000000);
}

TEST(Cli, SweepIsSortedAndWorkerIndependent) {
  TempDir dir;
  const auto file = dir.write("s.json", R"({"model":"mg12star","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},
     "threshold_H":1,"sim":{"packets":20000},"sweep":{"parameter":"H","values":[2,0.5,1,3]}})");
  const auto one = invoke({"sweep", file, "--workers", "1", "--omit-runtime"});
  const auto three = invoke({"sweep", file, "--workers", "3", "--omit-runtime"});
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(one.out, three.out);
  double previous = -1.0;
  for (const auto& row : csv_rows(one.out)) {
    const double h = std::stod(row[4]);
    EXPECT_GE(h, previous);
    previous = h;
    EXPECT_EQ(row[12], "");
  }
}

TEST(Cli, SingleValueSweepMatchesRun) {
  TempDir dir;
  const std::string body = R"("model":"mg11","lambda":1,"service":{"kind":"exponential","params":{"mu":2}},"threshold_H":1,"sim":{"packets":20000})";
  const auto run = invoke({"run", dir.write("r.json", "{" + body + "}"), "--omit-runtime"});
  const auto sweep = invoke({"sweep", dir.write("s.json", "{" + body + R"(,"sweep":{"parameter":"lambda","values":[1]}})"), "--omit-runtime"});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(run.out, sweep.out);
}

TEST(Cli, OutputFileAndLedger) {
  TempDir dir;
  const auto file = dir.write("s.json", R"({"model":"mg11","lambda":1,"service":{"kind":"deterministic","params":{"d":0.5}},
     "threshold_H":1,"methods":["simulation"],"sim":{"packets":1000}})");
  const auto r = invoke({"run", file, "--output", dir.path("out.csv"), "--ledger", dir.path("ledger.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream csv(dir.path("out.csv"));
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, kCsvHeader);
  std::ifstream ledger(dir.path("ledger.csv"));
  const auto records = read_ledger_csv(ledger);
  EXPECT_EQ(records.size(), 1000u);

  const auto no_sim = invoke({"run", dir.write("m.json", kMm1), "--ledger", dir.path("x.csv")});
  EXPECT_EQ(no_sim.code, 2);
}

TEST(Presets, GridsAreFixed) {
  EXPECT_EQ(preset_points("fig3")->size(), 150u);
  EXPECT_EQ(preset_points("fig4a")->size(), 57u);
  EXPECT_EQ(preset_points("fig4b")->size(), 76u);
  EXPECT_EQ(preset_points("fig5")->size(), 80u);
  EXPECT_EQ(preset_points("fig6")->size(), 80u);
  EXPECT_FALSE(preset_points("fig7"));
  const auto fig3 = *preset_points("fig3");
  EXPECT_EQ(fig3[2].scenario.threshold, 0.3);
  EXPECT_EQ(fig3[49].scenario.threshold, 5.0);
  const auto fig6 = *preset_points("fig6");
  EXPECT_DOUBLE_EQ(fig6[0].scenario.service.mean(), 0.1);
  EXPECT_EQ(fig6[79].scenario.service.shape(), 4.0);
}

TEST(Presets, FigureOutputRestrictedToDefinedMethods) {
  const auto r = invoke({"figure", "fig5", "--methods", "analytic,quadrature", "--omit-runtime"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows.size(), 160u);
  for (const auto& row : rows) EXPECT_EQ(row[6], "quadrature");
}

}  // namespace
