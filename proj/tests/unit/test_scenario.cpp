#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "core/scenario.hpp"
#include "test_util.hpp"

using namespace dtlab;

namespace {

const char* kTinyHeat =
    "[scenario]\n"
    "name = tiny_heat\n"
    "kind = pde\n"
    "[law]\n"
    "type = ideal\n"
    "full_line = true\n"
    "[coefficients]\n"
    "mode = direct\n"
    "A = 1\n"
    "K = 0\n"
    "B = 0\n"
    "[grid]\n"
    "lo = 0\n"
    "hi = 1\n"
    "n = 24\n"
    "[problem]\n"
    "u_star = 0\n"
    "u0 = sine\n"
    "amplitude = 1\n"
    "t_end = 0.05\n"
    "[checks]\n"
    "max_principle = true\n";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("preset registry") {
  const auto& presets = preset_list();
  REQUIRE(presets.size() == 7);
  bool found_heat = false, found_mc = false;
  for (const auto& p : presets) {
    CHECK_FALSE(p.name.empty());
    CHECK_FALSE(p.description.empty());
    found_heat |= p.name == "heat_baseline";
    found_mc |= p.name == "mc_validation";
  }
  CHECK(found_heat);
  CHECK(found_mc);

  std::string text = preset_config_text("heat_baseline");
  CHECK(text.find("[scenario]") != std::string::npos);
  CHECK(text.find("kind") != std::string::npos);
  CHECK_ERRCODE(Err::Config, preset_config_text("no_such_preset"));

  std::string listing = list_presets_text(false);
  for (const auto& p : presets) CHECK(listing.find(p.name) != std::string::npos);
  std::string json = list_presets_text(true);
  CHECK(json.front() == '[');
  CHECK(json.find("\"heat_baseline\"") != std::string::npos);
}

TEST_CASE("tiny scenario runs and reports constants") {
  Config cfg = Config::parse_string(kTinyHeat, "tiny");
  ScenarioOutcome out = run_scenario_config(cfg, {});
  CHECK(out.name == "tiny_heat");
  CHECK(out.passed);
  REQUIRE(!out.reports.empty());
  CHECK(out.reports.front().name == "max_principle");
  CHECK(out.metrics.at("c0") == doctest::Approx(1.0));
  CHECK(out.metrics.at("m_star") == doctest::Approx(0.0));
  CHECK(out.metrics.at("M_star") == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(out.constants_text.find("beta") != std::string::npos);
  CHECK(out.constants_text.find("T_star") != std::string::npos);
  CHECK(out.files_written.empty());
}

TEST_CASE("scenario rejects unknown keys with their location") {
  std::string text = std::string(kTinyHeat) + "typo_key = 3\n";
  Config cfg = Config::parse_string(text, "tiny");
  const std::string msg = testutil::message_of([&] { run_scenario_config(cfg, {}); });
  CHECK(msg.find("typo_key") != std::string::npos);
  CHECK(msg.find("line") != std::string::npos);

  Config no_name = Config::parse_string("[scenario]\nkind = pde\n");
  CHECK_ERRCODE(Err::Config, run_scenario_config(no_name, {}));

  Config bad_kind = Config::parse_string("[scenario]\nname = x\nkind = nonsense\n");
  CHECK_ERRCODE(Err::Config, run_scenario_config(bad_kind, {}));

  CHECK_ERRCODE(Err::Config, run_scenario_file("missing_scenario_file.cfg", {}));
  CHECK_ERRCODE(Err::Config, run_preset("no_such_preset", {}));
}

TEST_CASE("output files are deterministic byte for byte") {
  namespace fs = std::filesystem;
  Config cfg1 = Config::parse_string(kTinyHeat, "tiny");
  Config cfg2 = Config::parse_string(kTinyHeat, "tiny");
  RunOptions a;
  a.out_dir = "scenario_out_a";
  RunOptions b;
  b.out_dir = "scenario_out_b";
  ScenarioOutcome oa = run_scenario_config(cfg1, a);
  ScenarioOutcome ob = run_scenario_config(cfg2, b);
  REQUIRE(!oa.files_written.empty());
  REQUIRE(oa.files_written.size() == ob.files_written.size());
  for (std::size_t i = 0; i < oa.files_written.size(); ++i) {
    CHECK(fs::exists(oa.files_written[i]));
    CHECK(slurp(oa.files_written[i]) == slurp(ob.files_written[i]));
  }
  fs::remove_all("scenario_out_a");
  fs::remove_all("scenario_out_b");
}
