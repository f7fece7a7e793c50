#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mep/errors.hpp"
#include "mep/runner.hpp"
#include "mep/scenario.hpp"

using namespace mep;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "domain": {"min": [0, 0], "max": [10, 10]},
  "nodes": [{"x": 5, "y": 5, "model": "attenuated_disk", "params": {"lambda": 4, "mu": 2}}],
  "sources": [[0, 4]],
  "goal": [10, 6.5]
})";

std::string with(const std::string& key, const std::string& value) {
  std::string s = kMinimal;
  s.insert(s.rfind('}'), ",\n  \"" + key + "\": " + value + "\n");
  return s;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mep_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("minimal document gets defaults") {
  const Scenario s = parse_scenario(kMinimal);
  CHECK(s.nodes.size() == 1);
  CHECK(std::get<AttenuatedDisk>(s.nodes[0].model).lambda == 4.0);
  CHECK(s.mode == IntensityMode::MaxSensor);
  CHECK(s.solver == SolverConfig{});
  CHECK(s.grid == GridConfig{});
  CHECK(s.optimizer == OptimizerConfig{});
  CHECK(s.obstacles.empty());
  CHECK(!s.h_eval);
  CHECK(s.eval_resolution() == doctest::Approx(1e-3 * std::sqrt(200.0)));
}

TEST_CASE("unknown and mistyped fields are parse errors naming the field") {
  CHECK_THROWS_AS(parse_scenario(with("colour", "1")), ParseError);
  CHECK_THROWS_WITH_AS(parse_scenario(with("solver", R"({"dt": 0.1, "speeed": 1})")),
                       doctest::Contains("speeed"), ParseError);
  CHECK_THROWS_WITH_AS(parse_scenario(with("solver", R"({"dt": "fast"})")),
                       doctest::Contains("solver.dt"), ParseError);
  std::string no_goal = kMinimal;
  no_goal.replace(no_goal.find("\"goal\""), 6, "\"gaol\"");
  CHECK_THROWS_AS(parse_scenario(no_goal), ParseError);
  CHECK_THROWS_AS(parse_scenario(with("intensity", R"({"mode": "sum"})")), ParseError);
}

TEST_CASE("syntax errors report the line") {
  std::string broken = kMinimal;
  broken.replace(broken.find("\"sources\""), 9, "\"sources\" [");
  try {
    parse_scenario(broken);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
}

TEST_CASE("invariant violations are validation errors") {
  CHECK_THROWS_AS(parse_scenario(with("obstacles", "[[[9, 5], [11, 5], [11, 8], [9, 8]]]")),
                  ValidationError);
  Scenario s = parse_scenario(kMinimal);
  s.obstacles = {{{2, 2}, {3, 2}, {3, 3}, {2, 3}}};
  s.goal = {2.5, 2.5};
  CHECK_THROWS_AS(s.validate(), GoalInObstacle);
  CHECK_THROWS_AS(parse_scenario(serialize_scenario(s)), GoalInObstacle);
  s.goal = {10, 6.5};
  s.sources = {{0, 4}, {2.2, 2.7}};
  CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("source 1"), SourceInObstacle);
  CHECK_THROWS_AS(parse_scenario(with("solver", R"({"dt": -1})")), ValidationError);
  CHECK_THROWS_AS(parse_scenario(with("intensity", R"({"omega": 0.5})")), ValidationError);
  std::string far_goal = kMinimal;
  far_goal.replace(far_goal.find("[10, 6.5]"), 9, "[11, 6.5]");
  CHECK_THROWS_AS(parse_scenario(far_goal), ValidationError);
}

TEST_CASE("serialization round-trips") {
  Scenario s = parse_scenario(kMinimal);
  s.obstacles = {{{2, 2}, {3, 2}, {3, 3}, {2, 3}}};
  s.nodes.push_back({{1.0 / 3.0, 7}, BooleanDisk{0.7, 0.01}});
  s.nodes.push_back({{2, 9}, ProbabilityExp{0.3, 1.7}});
  s.nodes.push_back({{8, 1}, NoisyProbability{}});
  s.mode = IntensityMode::AllSensor;
  s.omega = 37.5;
  s.sources.push_back({0.1, 0.2});
  s.grid.rng_seed = 99;
  s.solver.eval_method = EvalMethod::Sweeps;
  s.solver.n_directions = 48;
  s.h_eval = 0.003;
  s.optimizer.candidates = 8;
  const std::string text = serialize_scenario(s);
  const Scenario back = parse_scenario(text);
  CHECK(back == s);
  CHECK(serialize_scenario(back) == text);
}

TEST_CASE("32-node reconstruction parses and validates") {
  const Scenario s = load_scenario(fs::path(MEP_SOURCE_DIR) / "scenarios" / "illustrative_32.json");
  CHECK(s.nodes.size() == 32);
  CHECK(s.goal == Vec2{10, 6.5});
  CHECK(s.sources == std::vector<Vec2>{{0, 4}, {0, 8}, {5, 0}});
  for (const auto& n : s.nodes) {
    CHECK(std::get<AttenuatedDisk>(n.model) == AttenuatedDisk{4, 2});
  }
}

TEST_CASE("node import") {
  std::string rows = "# x y\n";
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 500);
  for (int i = 0; i < 30; ++i) {
    rows += std::to_string(u(rng)) + (i % 2 ? "," : "\t") + std::to_string(u(rng)) + "\n";
  }
  rows += "\n";
  const auto nodes = parse_nodes(rows, benchmark_node_model());
  CHECK(nodes.size() == 30);
  CHECK(std::get<NoisyProbability>(nodes[7].model) == NoisyProbability{100, 1, 1, 6});
  try {
    parse_nodes("1 2\n3 4 5\n", benchmark_node_model());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_nodes("1 abc\n", benchmark_node_model()), ParseError);
}

TEST_CASE("several sources share one solve") {
  Scenario s = parse_scenario(kMinimal);
  s.sources = {{0, 4}, {0, 8}, {5, 0}};
  s.grid.points_per_node = 800;
  const fs::path out = temp_dir("reuse");
  const auto calls = solve_invocations();
  const RunReport r = run_solve(s, {out, 0, true});
  CHECK(solve_invocations() == calls + 1);
  REQUIRE(r.sources.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(r.sources[i].result);
    CHECK(r.sources[i].result->exposure > 0.0);
    CHECK(r.sources[i].result->exposure <= r.sources[i].result->exposure_extracted);
    CHECK(fs::exists(out / ("path_" + std::to_string(i) + ".csv")));
    const Path back = read_path_csv(out / ("path_" + std::to_string(i) + ".csv"));
    CHECK(back.waypoints == r.sources[i].result->path.waypoints);
  }
  for (const char* f : {"field.csv", "grid.csv", "result.json"}) CHECK(fs::exists(out / f));
  std::ifstream field(out / "field.csv");
  std::string header;
  std::getline(field, header);
  CHECK(header == "x,y,vbar,V_scaled");
}

TEST_CASE("run_solve is deterministic across worker counts") {
  Scenario s = parse_scenario(kMinimal);
  s.grid.points_per_node = 400;
  const RunReport a = run_solve(s, {std::nullopt, 1, true});
  const RunReport b = run_solve(s, {std::nullopt, 4, true});
  REQUIRE(a.sources[0].result);
  REQUIRE(b.sources[0].result);
  CHECK(a.sources[0].result->exposure == b.sources[0].result->exposure);
  CHECK(a.sources[0].result->path.waypoints == b.sources[0].result->path.waypoints);
}

TEST_CASE("an eps-only field gives a near-zero, near-straight path") {
  // One vanishing disk in the corner; everywhere else only the floor is felt.
  Scenario s = parse_scenario(kMinimal);
  s.nodes = {{{10, 0}, BooleanDisk{1e-6, 0.0}}};
  s.grid.points_per_node = 1500;
  const RunReport r = run_solve(s);
  REQUIRE(r.sources[0].result);
  CHECK(r.sources[0].result->exposure == doctest::Approx(0.0));
  CHECK(r.sources[0].result->path.length() <= 1.05 * distance({0, 4}, {10, 6.5}));
}

TEST_CASE("per-source failures do not abort the others") {
  Scenario s = parse_scenario(kMinimal);
  s.obstacles = {{{2.5, 2.5}, {7.5, 2.5}, {7.5, 3}, {2.5, 3}},
                 {{7, 2.5}, {7.5, 2.5}, {7.5, 7.5}, {7, 7.5}},
                 {{2.5, 7}, {7.5, 7}, {7.5, 7.5}, {2.5, 7.5}},
                 {{2.5, 2.5}, {3, 2.5}, {3, 7.5}, {2.5, 7.5}}};
  s.nodes = {{{1, 1}, AttenuatedDisk{4, 2}}};
  s.sources = {{5, 5}, {0, 4}};
  s.grid.points_per_node = 400;
  const RunReport r = run_solve(s);
  CHECK(!r.sources[0].result);
  CHECK(!r.sources[0].error.empty());
  CHECK(r.sources[1].result);
}
