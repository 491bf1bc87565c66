#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "fundsol_cli");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int status = fundsol::app::run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("fundsol_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, EvolveBurgersHasNoEventsAndOneGenuineCurve) {
  const Result r = cli({"evolve", "--flux", "burgers", "--mass", "1", "--t-end", "10", "--snapshot", "1", "-o", at("ev")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(json::parse(slurp(at("ev/events.json"))), json::array());
  std::istringstream shocks(slurp(at("ev/shocks.csv")));
  std::string line;
  std::getline(shocks, line);
  EXPECT_EQ(line, "shock_id,t,x,type");
  std::set<std::string> curves;
  while (std::getline(shocks, line)) curves.insert(line.substr(0, line.find(',')) + line.substr(line.rfind(',')));
  EXPECT_EQ(curves, std::set<std::string>{"0,G"});
  EXPECT_TRUE(fs::exists(at("ev/snapshot_000.csv")));
}

TEST_F(Cli, EnvelopeCubicPartition) {
  const Result r = cli({"envelope", "--flux", "cubic", "--rho-bar", "2", "-o", at("en")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json p = json::parse(slurp(at("en/partition.json")));
  ASSERT_EQ(p["convex"].size(), 3u);
  EXPECT_NEAR(p["convex"][1].get<double>(), 0.75, 1e-9);
  EXPECT_EQ(p["concave"], json::array({0.0, 2.0}));
  EXPECT_EQ(slurp(at("en/envelope.csv")).substr(0, 8), "u,f,h,k\n");
}

TEST_F(Cli, CatalogListsThreeDemos) {
  const Result r = cli({"catalog", "-o", at("cat")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json c = json::parse(slurp(at("cat/catalog.json")));
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0]["name"], "burgers");
  EXPECT_TRUE(c[0]["catalogue"]["levels"].empty());
  EXPECT_EQ(c[1]["catalogue"]["levels"].size(), 2u);
  EXPECT_EQ(c[2]["catalogue"]["levels"].size(), 7u);
}

TEST_F(Cli, MalformedConfigNamesTheField) {
  std::ofstream(at("bad.json")) << R"({"flux": "cubic", "weno": {"cels": 10}})";
  Result r = cli({"evolve", "-c", at("bad.json"), "-o", at("x")});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("weno.cels"), std::string::npos) << r.err;

  std::ofstream(at("neg.json")) << R"({"flux": "cubic", "tolerances": {"mass": -1}})";
  r = cli({"evolve", "-c", at("neg.json"), "-o", at("x")});
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.err.find("tolerances.mass"), std::string::npos) << r.err;

  std::ofstream(at("broken.json")) << "{";
  EXPECT_EQ(cli({"evolve", "-c", at("broken.json")}).status, 1);
  EXPECT_EQ(cli({"evolve", "--flux", "no_such_flux", "-o", at("x")}).status, 1);
  EXPECT_EQ(cli({"frobnicate"}).status, 1);
  EXPECT_EQ(cli({"evolve", "--flux", "cubic", "--t0", "2", "--t-end", "1", "-o", at("x")}).status, 1);
}

TEST_F(Cli, PiecewiseFluxFromConfig) {
  // u^2/2 split at u = 1, written around the breakpoint.
  std::ofstream(at("pw.json")) << R"({"flux": {"pieces": [
      {"lo": 0, "hi": 1, "coeffs": [0, 0, 0.5]},
      {"lo": 1, "hi": 20, "coeffs": [0, 0, 0.5]}]}, "t_end": 2})";
  const Result r = cli({"evolve", "-c", at("pw.json"), "-o", at("pw")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(json::parse(slurp(at("pw/events.json"))), json::array());
  std::ofstream(at("gap.json")) << R"({"flux": {"pieces": [
      {"lo": 0, "hi": 1, "coeffs": [0, 0, 0.5]}, {"lo": 1.5, "hi": 4, "coeffs": [0, 0, 0.5]}]}})";
  EXPECT_EQ(cli({"evolve", "-c", at("gap.json"), "-o", at("gap")}).status, 1);
}

TEST_F(Cli, OutputsAreDeterministic) {
  for (const char* d : {"a", "b"})
    ASSERT_EQ(cli({"evolve", "--flux", "cubic", "--t-end", "2", "--snapshot", "1", "-o", at(d)}).status, 0);
  for (const char* f : {"events.json", "shocks.csv", "steps.csv", "snapshot_000.csv"})
    EXPECT_EQ(slurp(at(std::string("a/") + f)), slurp(at(std::string("b/") + f))) << f;
  json ma = json::parse(slurp(at("a/manifest.json"))), mb = json::parse(slurp(at("b/manifest.json")));
  ma["config"].erase("output_dir");
  mb["config"].erase("output_dir");
  EXPECT_EQ(ma, mb);
}

TEST_F(Cli, ManifestRecordsEveryTolerance) {
  ASSERT_EQ(cli({"evolve", "--flux", "burgers", "--t-end", "1", "-o", at("m")}).status, 0);
  const json m = json::parse(slurp(at("m/manifest.json")));
  const json defaults = fundsol::app::to_json(fundsol::app::RunConfig{});
  for (const auto& [k, v] : defaults["tolerances"].items()) EXPECT_TRUE(m["config"]["tolerances"].contains(k)) << k;
  for (const char* k : {"tangency", "mass", "event_time"}) EXPECT_TRUE(m["config"]["tolerances"].contains(k)) << k;
  EXPECT_TRUE(m["internal"].contains("flux_join_tolerance"));
  EXPECT_EQ(m["command"], "evolve");
  EXPECT_NE(std::find(m["outputs"].begin(), m["outputs"].end(), "events.json"), m["outputs"].end());
}

TEST_F(Cli, ProbeAndCharmap) {
  Result r = cli({"probe", "--flux", "burgers", "--t-end", "4", "--point", "1,2", "--point", "5,2", "-o", at("p")});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream rows(slurp(at("p/probe.csv")));
  std::string header, first, second;
  std::getline(rows, header);
  std::getline(rows, first);
  std::getline(rows, second);
  EXPECT_EQ(header, "x,t,u_left,u_right");
  const double u = std::stod(first.substr(first.rfind(',') + 1));
  EXPECT_NEAR(u, 0.5, 1e-6);
  EXPECT_EQ(second, "5,2,0,0");
  EXPECT_EQ(cli({"probe", "--flux", "burgers", "--t-end", "4", "--point", "1,9", "-o", at("p")}).status, 1);

  r = cli({"charmap", "--flux", "cubic", "--t-end", "2", "-o", at("c")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(slurp(at("c/charmap.csv")).substr(0, 21), "entity,id,t,x,label\ns");
  EXPECT_EQ(slurp(at("c/charmap.svg")).substr(0, 4), "<svg");
}

TEST_F(Cli, WenoAndCompare) {
  Result r = cli({"weno", "--flux", "burgers", "--t-end", "0.5", "--cells", "256", "-o", at("w")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json w = json::parse(slurp(at("w/weno.json")));
  EXPECT_EQ(w["cells"], 256);
  EXPECT_NEAR(w["mass0"].get<double>(), 1.0, 1e-12);
  EXPECT_TRUE(fs::exists(at("w/weno_000.csv")));

  r = cli({"compare", "--flux", "burgers", "--t-end", "1", "--time", "1", "--cells", "512", "-o", at("cmp")});
  ASSERT_EQ(r.status, 0) << r.err;
  const json c = json::parse(slurp(at("cmp/compare.json")));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0]["time"], 1.0);
  ASSERT_EQ(c[0]["shocks"].size(), 1u);
  EXPECT_LE(std::abs(c[0]["shocks"][0]["offset_cells"].get<double>()), 3.0);
  EXPECT_EQ(cli({"compare", "--flux", "burgers", "--t-end", "1", "--time", "2", "-o", at("cmp")}).status, 1);
}
