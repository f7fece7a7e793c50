#include "mep/runner.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "mep/errors.hpp"

namespace mep {
namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunReport run_solve(const Scenario& scenario, const RunOptions& options) {
  scenario.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Domain domain = scenario.domain();
  const IntensityField field = scenario.field();
  SolverConfig config = scenario.solver;
  config.workers = options.workers;

  RunReport report;
  const SpatialGrid grid = build_grid(domain, field, scenario.goal, scenario.sources, scenario.grid);
  report.grid_time = seconds_since(t0);
  report.vertex_count = grid.vertex_count();
  report.triangle_count = grid.triangles().size();
  report.delta_p = grid.delta_p();

  const auto t1 = std::chrono::steady_clock::now();
  const ValueField value = solve(domain, field, grid, config);
  report.solve_time = seconds_since(t1);
  report.outer_iters = value.outer_iters;

  const double h_eval = scenario.eval_resolution();
  for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
    const auto ts = std::chrono::steady_clock::now();
    SourceOutcome outcome;
    try {
      PathResult r;
      const Path extracted =
          extract_path(value, field, domain, scenario.sources[i], scenario.goal, config);
      r.exposure_extracted = evaluate_exposure(field, extracted, h_eval);
      r.path = options.optimize ? local_optimize(field, domain, extracted, config.speed, h_eval,
                                                 scenario.optimizer)
                                : extracted;
      r.exposure = evaluate_exposure(field, r.path, h_eval);
      r.value_at_source = recover_value(value.vbar[grid.source_indices()[i]]);
      r.outer_iters = value.outer_iters;
      r.wall_time = i == 0 ? seconds_since(t0) : seconds_since(ts);
      outcome.result = std::move(r);
    } catch (const Unreachable& e) {
      outcome.error = std::string("unreachable: ") + e.what();
    }
    report.sources.push_back(std::move(outcome));
  }

  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    write_text_atomic(*options.out_dir / "field.csv", field_csv(grid, value));
    write_text_atomic(*options.out_dir / "grid.csv", grid_csv(grid));
    for (std::size_t i = 0; i < report.sources.size(); ++i) {
      if (!report.sources[i].result) continue;
      write_text_atomic(*options.out_dir / ("path_" + std::to_string(i) + ".csv"),
                        path_csv(report.sources[i].result->path));
    }
    write_text_atomic(*options.out_dir / "result.json", report_json(scenario, report));
  }
  return report;
}

std::string field_csv(const SpatialGrid& grid, const ValueField& value) {
  std::string out = "x,y,vbar,V_scaled\n";
  const auto pts = grid.vertices();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += format_double(pts[i].x) + "," + format_double(pts[i].y) + "," +
           format_double(value.vbar[i]) + "," + format_double(recover_value(value.vbar[i])) + "\n";
  }
  return out;
}

std::string grid_csv(const SpatialGrid& grid) {
  std::string out = "x,y,class\n";
  const auto pts = grid.vertices();
  const auto cls = grid.classes();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out += format_double(pts[i].x) + "," + format_double(pts[i].y) + "," +
           std::string(to_string(cls[i])) + "\n";
  }
  return out;
}

std::string path_csv(const Path& path) {
  std::string out = "t,x,y\n";
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    out += format_double(static_cast<double>(i) * path.dt) + "," +
           format_double(path.waypoints[i].x) + "," + format_double(path.waypoints[i].y) + "\n";
  }
  return out;
}

std::string report_json(const Scenario& scenario, const RunReport& report) {
  using nlohmann::json;
  json doc;
  doc["vertices"] = report.vertex_count;
  doc["triangles"] = report.triangle_count;
  doc["delta_p"] = report.delta_p;
  doc["outer_iters"] = report.outer_iters;
  doc["grid_time"] = report.grid_time;
  doc["solve_time"] = report.solve_time;
  json sources = json::array();
  for (std::size_t i = 0; i < report.sources.size(); ++i) {
    const SourceOutcome& o = report.sources[i];
    json s;
    s["source"] = json::array({scenario.sources[i].x, scenario.sources[i].y});
    if (o.result) {
      s["status"] = "ok";
      s["exposure"] = o.result->exposure;
      s["exposure_extracted"] = o.result->exposure_extracted;
      s["value_at_source"] = o.result->value_at_source;
      s["waypoints"] = o.result->path.waypoints.size();
      s["length"] = o.result->path.length();
      s["wall_time"] = o.result->wall_time;
    } else {
      s["status"] = "failed";
      s["error"] = o.error;
    }
    sources.push_back(s);
  }
  doc["sources"] = sources;
  return doc.dump(2) + "\n";
}

Path read_path_csv(const std::filesystem::path& file) {
  std::istringstream in(read_text(file));
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty path file");
  Path path;
  std::vector<double> times;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::array<double, 3> v{};
    std::size_t start = 0;
    for (int c = 0; c < 3; ++c) {
      const std::size_t end = c < 2 ? line.find(',', start) : line.size();
      if (end == std::string::npos) throw ParseError("expected t,x,y", lineno);
      const char* first = line.data() + start;
      const char* last = line.data() + end;
      while (first < last && *first == ' ') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v[static_cast<std::size_t>(c)]);
      if (ec != std::errc() || ptr != last) throw ParseError("malformed number", lineno);
      start = end + 1;
    }
    times.push_back(v[0]);
    path.waypoints.push_back({v[1], v[2]});
  }
  if (path.waypoints.size() < 2) throw ParseError("path needs at least 2 waypoints");
  path.dt = times[1] - times[0];
  return path;
}

}  // namespace mep
