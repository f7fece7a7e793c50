// Command-line driver: solve, eval, oracle, grid, bench, import.
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "mep/benchmark.hpp"
#include "mep/errors.hpp"
#include "mep/oracle.hpp"
#include "mep/runner.hpp"
#include "mep/scenario.hpp"

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kNonConvergence = 3 };

using mep::format_double;

int cmd_solve(const std::string& file, const std::string& out, unsigned workers, bool no_opt) {
  const mep::Scenario s = mep::load_scenario(file);
  mep::RunOptions opts;
  if (!out.empty()) opts.out_dir = out;
  opts.workers = workers;
  opts.optimize = !no_opt;
  const mep::RunReport r = mep::run_solve(s, opts);
  std::printf("grid: %zu vertices, %zu triangles, delta_p %s\n", r.vertex_count,
              r.triangle_count, format_double(r.delta_p).c_str());
  std::printf("solve: %d outer iterations, %.3f s\n", r.outer_iters, r.solve_time);
  int code = kOk;
  for (std::size_t i = 0; i < r.sources.size(); ++i) {
    const auto& o = r.sources[i];
    if (o.result) {
      std::printf("source %zu: exposure %s (extracted %s), V_scaled %s, %zu waypoints, %.3f s\n",
                  i, format_double(o.result->exposure).c_str(),
                  format_double(o.result->exposure_extracted).c_str(),
                  format_double(o.result->value_at_source).c_str(),
                  o.result->path.waypoints.size(), o.result->wall_time);
    } else {
      std::printf("source %zu: %s\n", i, o.error.c_str());
      code = kFailure;
    }
  }
  return code;
}

int cmd_eval(const std::string& file, const std::string& path_file) {
  const mep::Scenario s = mep::load_scenario(file);
  const mep::Path path = mep::read_path_csv(path_file);
  std::printf("%s\n",
              format_double(mep::evaluate_exposure(s.field(), path, s.eval_resolution())).c_str());
  return kOk;
}

int cmd_oracle(const std::string& file, double h, std::size_t source, bool richardson) {
  const mep::Scenario s = mep::load_scenario(file);
  if (richardson) {
    const auto r = mep::richardson_oracle(s, h, source);
    for (std::size_t k = 0; k < r.h.size(); ++k) {
      std::printf("h %s: %s\n", format_double(r.h[k]).c_str(),
                  format_double(r.exposure[k]).c_str());
    }
    std::printf("limit: %s (order %.3f)\n", format_double(r.limit).c_str(), r.order);
  } else {
    std::printf("%s\n", format_double(mep::dijkstra_oracle(s, h, source).exposure).c_str());
  }
  return kOk;
}

int cmd_grid(const std::string& file, const std::string& out) {
  const mep::Scenario s = mep::load_scenario(file);
  const mep::SpatialGrid grid =
      mep::build_grid(s.domain(), s.field(), s.goal, s.sources, s.grid);
  mep::write_text_atomic(out, mep::grid_csv(grid));
  std::printf("%zu vertices, %zu triangles\n", grid.vertex_count(), grid.triangles().size());
  return kOk;
}

int cmd_bench(const std::string& manifest, const std::string& refs, unsigned jobs,
              const std::string& out) {
  const auto instances = mep::load_manifest(manifest);
  std::map<std::string, mep::BenchmarkReference> references;
  if (!refs.empty()) references = mep::load_references(refs);
  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  const auto records =
      mep::run_benchmark(instances, references, jobs > 0 ? jobs : mep::default_jobs(), out_dir);
  const std::string report = mep::benchmark_report(records, mep::summarize(records));
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    mep::write_text_atomic(*out_dir / "benchmark.csv", report);
  }
  std::cout << report;
  for (const auto& r : records) {
    if (!r.error.empty()) return kFailure;
  }
  return kOk;
}

int cmd_import(const std::string& nodes_file, const std::string& template_file,
               const std::string& out) {
  mep::Scenario s;
  if (!template_file.empty()) {
    s = mep::load_scenario(template_file);
  } else {
    s.bounds = {{0, 0}, {500, 500}};
    s.mode = mep::IntensityMode::AllSensor;
    s.eps_floor = 1e-12;
    s.sources = {{0, 150}};
    s.goal = {500, 350};
    s.grid.boundary_spacing = 10.0;
    s.solver.dt = 2.0;
  }
  const mep::SensingModel model =
      template_file.empty() ? mep::benchmark_node_model() : s.nodes.front().model;
  s.nodes = mep::import_nodes(nodes_file, model);
  s.validate();
  const std::string doc = mep::serialize_scenario(s);
  if (out.empty()) {
    std::cout << doc;
  } else {
    mep::write_text_atomic(out, doc);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal exposure paths through sensor fields"};
  app.require_subcommand(1);

  std::string scenario, out, path_file, manifest, refs, nodes, templ;
  unsigned workers = 0, jobs = 0;
  bool no_opt = false, richardson = false;
  double h = 0.0;
  std::size_t source = 0;

  auto* solve = app.add_subcommand("solve", "Solve a scenario and extract paths");
  solve->add_option("scenario", scenario)->required();
  solve->add_option("--out", out, "Output directory");
  solve->add_option("--workers", workers, "Threads per sweep (0 = all cores)");
  solve->add_flag("--no-optimize", no_opt, "Skip local path optimization");

  auto* eval = app.add_subcommand("eval", "Evaluate the exposure of a path file");
  eval->add_option("scenario", scenario)->required();
  eval->add_option("path", path_file)->required();

  auto* oracle = app.add_subcommand("oracle", "Lattice Dijkstra exposure");
  oracle->set_help_flag("--help", "Print this help message and exit");
  oracle->add_option("scenario", scenario)->required();
  oracle->add_option("--h", h, "Lattice spacing")->required();
  oracle->add_option("--source", source, "Source index");
  oracle->add_flag("--richardson", richardson, "Also run h/2, h/4 and extrapolate");

  auto* grid = app.add_subcommand("grid", "Write the sampled grid as CSV");
  grid->add_option("scenario", scenario)->required();
  grid->add_option("--out", out)->required();

  auto* bench = app.add_subcommand("bench", "Run a benchmark manifest");
  bench->add_option("manifest", manifest)->required();
  bench->add_option("--refs", refs, "Reference exposure table");
  bench->add_option("--jobs", jobs, "Concurrent instances (default MEP_JOBS or all cores)");
  bench->add_option("--out", out, "Output directory");

  auto* import = app.add_subcommand("import", "Convert a node coordinate table to a scenario");
  import->add_option("nodes", nodes)->required();
  import->add_option("--template", templ, "Scenario supplying everything but the nodes");
  import->add_option("--out", out, "Output scenario file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve) return cmd_solve(scenario, out, workers, no_opt);
    if (*eval) return cmd_eval(scenario, path_file);
    if (*oracle) return cmd_oracle(scenario, h, source, richardson);
    if (*grid) return cmd_grid(scenario, out);
    if (*bench) return cmd_bench(manifest, refs, jobs, out);
    if (*import) return cmd_import(nodes, templ, out);
  } catch (const mep::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kInvalid;
  } catch (const mep::ValidationError& e) {
    std::fprintf(stderr, "invalid: %s\n", e.what());
    return kInvalid;
  } catch (const mep::NonConvergence& e) {
    std::fprintf(stderr, "not converged: %s\n", e.what());
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
