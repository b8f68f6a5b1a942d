#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "seirs/cli.hpp"

namespace fs = std::filesystem;
using seirs::cli::json;

namespace {

const char* kMinimal = R"({
  "model": {
    "coefficients": {
      "Lambda": {"kind": "constant", "value": 2},
      "mu": {"kind": "constant", "value": 2},
      "beta": {"kind": "constant", "value": 4},
      "eta": {"kind": "constant", "value": 0.1},
      "epsilon": {"kind": "constant", "value": 1},
      "gamma": {"kind": "constant", "value": 0.02}
    }
  }
})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("seirs_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(SEIRS_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) { return std::string(SEIRS_CONFIG_DIR) + "/" + name; }

std::string config_error(const std::string& text) {
  try {
    seirs::cli::parse_config(text);
  } catch (const seirs::ConfigError& e) {
    return e.what();
  }
  return "";
}

json with(const char* pointer, json value) {
  json doc = json::parse(kMinimal);
  doc[json::json_pointer(pointer)] = std::move(value);
  return doc;
}

}  // namespace

TEST(ParseConfig, FillsDefaults) {
  const auto cfg = seirs::cli::parse_config(kMinimal);
  EXPECT_EQ(cfg.numerics.step, 1e-3);
  EXPECT_EQ(cfg.numerics.t_end, 300.0);
  EXPECT_EQ(cfg.numerics.burn_in, 100.0);
  EXPECT_EQ(cfg.numerics.scan_length, 100.0);
  EXPECT_EQ(cfg.numerics.scan_step, 0.01);
  EXPECT_EQ(cfg.lambdas, std::vector<double>{1.0});
  EXPECT_FALSE(cfg.p.has_value());
  EXPECT_NEAR(cfg.spec.incidence.cap(), 1.5 * 2.0 * std::numbers::e, 1e-12);
  EXPECT_EQ(cfg.thin, 100);
  EXPECT_EQ(cfg.verify_samples, 1000);

  const json n = seirs::cli::normalize(cfg);
  EXPECT_EQ(n["model"]["incidence"]["kind"], "mass_action");
  EXPECT_EQ(n["numerics"]["scan_step"], 0.01);
  EXPECT_TRUE(n["threshold"]["p"].is_null());
  EXPECT_NEAR(n["model"]["domain_cap"].get<double>(), 1.5 * 2.0 * std::numbers::e, 1e-12);
  EXPECT_NEAR(n["initial_state"]["S"].get<double>(), 0.7, 1e-12);
}

TEST(ParseConfig, RoundTripIsIdempotent) {
  for (const char* name : {"mm_persistence.json", "region_b_beta.json", "robustness_mm.json",
                           "verify_saturated.json", "periodic_counterexample.json"}) {
    const auto first = seirs::cli::normalize(seirs::cli::parse_config(slurp(config_path(name))));
    const auto second = seirs::cli::normalize(seirs::cli::parse_document(first));
    EXPECT_EQ(first.dump(), second.dump()) << name;
  }
}

TEST(ParseConfig, AmplitudeOutOfRange) {
  const auto doc = with("/model/coefficients/beta",
                        {{"kind", "periodic_cosine"}, {"base", 6}, {"amp_frac", 1.5}, {"period", 1}});
  const std::string msg = config_error(doc.dump());
  EXPECT_NE(msg.find("amp_frac out of range (-1,1)"), std::string::npos) << msg;
  EXPECT_NE(msg.find("model.coefficients.beta.amp_frac"), std::string::npos) << msg;
}

TEST(ParseConfig, UnknownKeysNameTheirPath) {
  EXPECT_NE(config_error(with("/numerics/stp", 0.01).dump()).find("numerics.stp"), std::string::npos);
  EXPECT_NE(config_error(with("/model/coefficients/beta/amplitude", 1).dump())
                .find("model.coefficients.beta.amplitude"),
            std::string::npos);
  EXPECT_NE(config_error(with("/extra", 1).dump()).find("extra"), std::string::npos);
}

TEST(ParseConfig, SchemaViolations) {
  EXPECT_NE(config_error("{").find("<document>"), std::string::npos);
  EXPECT_NE(config_error(with("/model/coefficients/mu/kind", "wavy").dump()).find("unknown coefficient kind"),
            std::string::npos);
  EXPECT_NE(config_error(with("/model/incidence", {{"kind", "bilinear"}}).dump()).find("model.incidence.kind"),
            std::string::npos);
  EXPECT_NE(config_error(with("/numerics/step", -1).dump()).find("numerics.step"), std::string::npos);
  EXPECT_NE(config_error(with("/threshold/lambdas", json::array({0.0})).dump()).find("threshold.lambdas"),
            std::string::npos);
  EXPECT_NE(config_error(with("/model/coefficients/mu/value", 0).dump()).find("mu"), std::string::npos);
  EXPECT_NE(config_error(with("/sweep", {{"axis1", {{"name", "zeta"}, {"values", {1}}}},
                                         {"axis2", {{"name", "beta"}, {"values", {1}}}}})
                             .dump())
                .find("sweep.axis1.name"),
            std::string::npos);
  json no_mu = json::parse(kMinimal);
  no_mu["model"]["coefficients"].erase("mu");
  EXPECT_NE(config_error(no_mu.dump()).find("model.coefficients.mu"), std::string::npos);
}

TEST(ParseConfig, AxisRangesExpand) {
  const auto cfg = seirs::cli::parse_config(slurp(config_path("region_b_beta.json")));
  ASSERT_TRUE(cfg.axis1 && cfg.axis2);
  EXPECT_EQ(cfg.axis1->values.size(), 81u);
  EXPECT_EQ(cfg.axis2->values.size(), 65u);
  const auto fam = seirs::cli::family_from_model(cfg);
  EXPECT_EQ(fam.beta, 6.06);
  EXPECT_EQ(fam.mu, 2.0);
}

TEST(Run, SimulatePersistenceConfig) {
  const auto dir = scratch("simulate");
  ASSERT_EQ(run_tool("simulate --config " + config_path("mm_persistence.json") + " --out " + dir.string()), 0);
  std::ifstream in(dir / "trajectory.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,S,E,I,R,N");
  double tail_min = 1e300;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 6u);
    if (v[0] >= 270.0) tail_min = std::min(tail_min, v[3]);
  }
  EXPECT_GT(tail_min, 1e-4);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(Run, ThresholdsWriteReportAndClosedForms) {
  const auto dir = scratch("thresholds");
  ASSERT_EQ(run_tool("thresholds --config " + config_path("mm_persistence.json") + " --out " + dir.string()), 0);
  const std::string report = slurp(dir / "report.csv");
  EXPECT_EQ(report.substr(0, report.find('\n')), "lambda,p,logRe,logRp,logRe*,logRp*,G,H,verdict_clause");
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 2);
  EXPECT_NE(report.find("RpStar_G"), std::string::npos);

  std::ifstream closed(dir / "closed_forms.csv");
  std::string line;
  bool found = false;
  while (std::getline(closed, line)) {
    if (line.rfind("R_p_M,", 0) == 0) {
      found = true;
      EXPECT_NEAR(std::stod(line.substr(line.rfind(',') + 1)), 1.650, 0.01);
    }
  }
  EXPECT_TRUE(found);
}

TEST(Run, VerifyMassActionAllPass) {
  const auto dir = scratch("verify");
  json doc = json::parse(kMinimal);
  doc["command"] = "verify-incidence";
  std::ofstream(dir / "cfg.json") << doc.dump();
  ASSERT_EQ(run_tool("verify-incidence --config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string()), 0);
  std::ifstream in(dir / "o" / "hypotheses.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "check,pass,value");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_NE(line.find(",true,"), std::string::npos) << line;
  }
  EXPECT_GE(rows, 7);
}

TEST(Run, OutputIsByteIdenticalAcrossRuns) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    ASSERT_EQ(run_tool("thresholds --config " + config_path("periodic_counterexample.json") + " --out " + dir.string()), 0);
    ASSERT_EQ(run_tool("verify-incidence --config " + config_path("verify_saturated.json") + " --out " + dir.string()), 0);
    ASSERT_EQ(run_tool("robustness --config " + config_path("robustness_mm.json") + " --out " + dir.string()), 0);
  }
  for (const char* f : {"report.csv", "closed_forms.csv", "hypotheses.csv", "robustness.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Run, ManifestRecordsDefaults) {
  const auto dir = scratch("manifest");
  std::ofstream(dir / "cfg.json") << kMinimal;
  ASSERT_EQ(run_tool("thresholds --config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string()), 0);
  const json m = json::parse(slurp(dir / "o" / "manifest.json"));
  EXPECT_EQ(m["version"], seirs::cli::kToolVersion);
  EXPECT_TRUE(m.contains("wall_clock_seconds"));
  const json& c = m["config"];
  for (const char* key : {"step", "t_end", "burn_in", "scan_length", "scan_step", "z0"}) {
    EXPECT_TRUE(c["numerics"].contains(key)) << key;
  }
  EXPECT_TRUE(c["model"].contains("domain_cap"));
  EXPECT_TRUE(c["model"].contains("omega"));
  EXPECT_EQ(c["threshold"]["lambdas"], json::array({1.0}));
  EXPECT_EQ(c["output"]["thin"], 100);
  EXPECT_EQ(c["verify"]["samples"], 1000);
}

TEST(Run, ConfigErrorExitsTwoWithoutOutputs) {
  const auto dir = scratch("bad_config");
  std::ofstream(dir / "cfg.json") << with("/numerics/typo", 1).dump();
  EXPECT_EQ(run_tool("simulate --config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "o" / "trajectory.csv"));

  // Sweep without a sweep section fails at run time.
  EXPECT_EQ(run_tool("sweep --config " + config_path("mm_persistence.json") + " --out " + (dir / "s").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "s" / "region.csv"));
  EXPECT_FALSE(fs::exists(dir / "s" / "manifest.json"));
}

TEST(Run, NumericalFailureExitsThreeAndCleansUp) {
  const auto dir = scratch("numerical");
  json doc = with("/model/coefficients/mu", {{"kind", "constant"}, {"value", 100}});
  doc["model"]["coefficients"]["Lambda"]["value"] = 100;
  doc["numerics"] = {{"step", 0.1}, {"t_end", 50}};
  std::ofstream(dir / "cfg.json") << doc.dump();
  EXPECT_EQ(run_tool("simulate --config " + (dir / "cfg.json").string() + " --out " + (dir / "o").string()), 3);
  EXPECT_FALSE(fs::exists(dir / "o" / "trajectory.csv"));
  EXPECT_FALSE(fs::exists(dir / "o" / "manifest.json"));
}

TEST(Run, UnknownSubcommandIsUsageError) {
  EXPECT_NE(run_tool("plot --config " + config_path("mm_persistence.json")), 0);
}

TEST(Csv, ShortestRoundTripFormatting) {
  EXPECT_EQ(seirs::csv::format(0.1), "0.1");
  EXPECT_EQ(seirs::csv::format(1.0), "1");
  EXPECT_EQ(seirs::csv::format(-2.5e-10), "-2.5e-10");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(seirs::csv::format(x)), x);
}
