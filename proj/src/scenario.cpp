#include "mep/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "json.hpp"
#include "mep/errors.hpp"

namespace mep {
namespace {

using nlohmann::json;

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

// Object view that remembers which keys were read so leftovers can be rejected.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ParseError("'" + where_ + "' must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& at(const std::string& key) {
    if (!has(key)) throw ParseError("missing field '" + name(key) + "'");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    return convert<T>(at(key), name(key));
  }

  template <class T>
  void get_to(const std::string& key, T& out) {
    if (has(key)) out = convert<T>(j_.at(key), name(key));
  }

  std::string name(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ParseError("unknown field '" + name(key) + "'");
    }
  }

  template <class T>
  static T convert(const json& v, const std::string& field) {
    try {
      if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ParseError("field '" + field + "' must be a number");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ParseError("field '" + field + "' must be an integer");
      }
      return v.get<T>();
    } catch (const json::exception&) {
      throw ParseError("field '" + field + "' has the wrong type");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Vec2 to_vec(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError("field '" + field + "' must be a [x, y] pair");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

json from_vec(Vec2 p) { return json::array({p.x, p.y}); }

SensingModel parse_model(const std::string& kind, const json* params, const std::string& where) {
  static const json empty = json::object();
  Fields f(params ? *params : empty, where + ".params");
  SensingModel model;
  if (kind == "boolean_disk") {
    BooleanDisk m;
    m.r = f.get<double>("r");
    m.delta = 0.05 * m.r;
    f.get_to("delta", m.delta);
    model = m;
  } else if (kind == "attenuated_disk") {
    AttenuatedDisk m;
    f.get_to("lambda", m.lambda);
    f.get_to("mu", m.mu);
    f.get_to("s_max", m.s_max);
    model = m;
  } else if (kind == "probability_exp") {
    ProbabilityExp m;
    f.get_to("alpha", m.alpha);
    f.get_to("beta", m.beta);
    model = m;
  } else if (kind == "noisy_probability") {
    NoisyProbability m;
    f.get_to("lambda", m.lambda);
    f.get_to("mu", m.mu);
    f.get_to("sigma", m.sigma);
    f.get_to("a_threshold", m.a_threshold);
    f.get_to("s_max", m.s_max);
    model = m;
  } else {
    throw ParseError("field '" + where + ".model' has unknown value '" + kind + "'");
  }
  f.finish();
  return model;
}

json model_params(const SensingModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, BooleanDisk>) {
          return {{"r", m.r}, {"delta", m.delta}};
        } else if constexpr (std::is_same_v<T, AttenuatedDisk>) {
          return {{"lambda", m.lambda}, {"mu", m.mu}, {"s_max", m.s_max}};
        } else if constexpr (std::is_same_v<T, ProbabilityExp>) {
          return {{"alpha", m.alpha}, {"beta", m.beta}};
        } else {
          return {{"lambda", m.lambda},
                  {"mu", m.mu},
                  {"sigma", m.sigma},
                  {"a_threshold", m.a_threshold},
                  {"s_max", m.s_max}};
        }
      },
      model);
}

Scenario from_json(const json& doc) {
  Scenario s;
  Fields top(doc, "");

  {
    Fields d(top.at("domain"), "domain");
    s.bounds = {to_vec(d.at("min"), "domain.min"), to_vec(d.at("max"), "domain.max")};
    d.finish();
  }

  if (top.has("obstacles")) {
    const json& obs = top.at("obstacles");
    if (!obs.is_array()) throw ParseError("field 'obstacles' must be a list of polygons");
    for (std::size_t k = 0; k < obs.size(); ++k) {
      const std::string where = "obstacles[" + std::to_string(k) + "]";
      if (!obs[k].is_array()) throw ParseError("field '" + where + "' must be a vertex list");
      Polygon poly;
      for (std::size_t i = 0; i < obs[k].size(); ++i) {
        poly.push_back(to_vec(obs[k][i], where + "[" + std::to_string(i) + "]"));
      }
      s.obstacles.push_back(std::move(poly));
    }
  }

  {
    const json& nodes = top.at("nodes");
    if (!nodes.is_array()) throw ParseError("field 'nodes' must be a list");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const std::string where = "nodes[" + std::to_string(k) + "]";
      Fields n(nodes[k], where);
      const Vec2 pos{n.get<double>("x"), n.get<double>("y")};
      const auto kind = n.get<std::string>("model");
      const json* params = n.has("params") ? &n.at("params") : nullptr;
      n.finish();
      s.nodes.push_back({pos, parse_model(kind, params, where)});
    }
  }

  if (top.has("intensity")) {
    Fields f(top.at("intensity"), "intensity");
    if (f.has("mode")) {
      const auto mode = f.get<std::string>("mode");
      if (mode == "max") {
        s.mode = IntensityMode::MaxSensor;
      } else if (mode == "all") {
        s.mode = IntensityMode::AllSensor;
      } else {
        throw ParseError("field 'intensity.mode' must be \"max\" or \"all\"");
      }
    }
    f.get_to("omega", s.omega);
    f.get_to("eps_floor", s.eps_floor);
    f.finish();
  }

  {
    const json& src = top.at("sources");
    if (!src.is_array()) throw ParseError("field 'sources' must be a list of [x, y] pairs");
    for (std::size_t k = 0; k < src.size(); ++k) {
      s.sources.push_back(to_vec(src[k], "sources[" + std::to_string(k) + "]"));
    }
  }
  s.goal = to_vec(top.at("goal"), "goal");

  if (top.has("grid")) {
    Fields f(top.at("grid"), "grid");
    f.get_to("points_per_node", s.grid.points_per_node);
    f.get_to("boundary_spacing", s.grid.boundary_spacing);
    f.get_to("base_rate", s.grid.base_rate);
    f.get_to("seed", s.grid.rng_seed);
    f.get_to("intensity_probes", s.grid.intensity_probes);
    f.finish();
  }

  if (top.has("solver")) {
    Fields f(top.at("solver"), "solver");
    f.get_to("dt", s.solver.dt);
    f.get_to("speed", s.solver.speed);
    f.get_to("n_directions", s.solver.n_directions);
    f.get_to("tol_policy_eval", s.solver.tol_policy_eval);
    f.get_to("tol_outer", s.solver.tol_outer);
    f.get_to("max_eval_sweeps", s.solver.max_eval_sweeps);
    f.get_to("max_outer_iters", s.solver.max_outer_iters);
    if (f.has("eval_method")) {
      const auto m = f.get<std::string>("eval_method");
      if (m == "direct") {
        s.solver.eval_method = EvalMethod::Direct;
      } else if (m == "sweeps") {
        s.solver.eval_method = EvalMethod::Sweeps;
      } else {
        throw ParseError("field 'solver.eval_method' must be \"direct\" or \"sweeps\"");
      }
    }
    f.finish();
  }

  if (top.has("eval")) {
    Fields f(top.at("eval"), "eval");
    if (f.has("h_eval")) s.h_eval = f.get<double>("h_eval");
    f.finish();
  }

  if (top.has("optimizer")) {
    Fields f(top.at("optimizer"), "optimizer");
    f.get_to("candidates", s.optimizer.candidates);
    f.get_to("radius_factor", s.optimizer.radius_factor);
    f.get_to("max_passes", s.optimizer.max_passes);
    f.get_to("seed", s.optimizer.seed);
    f.finish();
  }

  top.finish();
  return s;
}

}  // namespace

void Scenario::validate() const {
  const Domain d = domain();
  if (nodes.empty()) throw ValidationError("at least one sensor node is required");
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    mep::validate(nodes[k].model);
    if (!bounds.contains(nodes[k].position)) {
      throw ValidationError("node " + std::to_string(k) + " must lie within bounds");
    }
  }
  (void)field();
  if (sources.empty()) throw ValidationError("at least one source is required");
  if (!bounds.contains(goal)) throw ValidationError("goal must lie within bounds");
  if (d.point_in_obstacle(goal)) throw GoalInObstacle();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!bounds.contains(sources[i])) {
      throw ValidationError("source " + std::to_string(i) + " must lie within bounds");
    }
    if (d.point_in_obstacle(sources[i])) throw SourceInObstacle(i);
  }
  grid.validate();
  solver.validate();
  if (h_eval && !(*h_eval > 0.0)) throw ValidationError("h_eval must be > 0");
  if (optimizer.candidates < 0 || optimizer.max_passes < 0 || !(optimizer.radius_factor >= 0.0)) {
    throw ValidationError("optimizer settings must be non-negative");
  }
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  Scenario s = from_json(doc);
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& file) { return parse_scenario(read_text(file)); }

std::string serialize_scenario(const Scenario& s) {
  json doc;
  doc["domain"] = {{"min", from_vec(s.bounds.min)}, {"max", from_vec(s.bounds.max)}};
  json obs = json::array();
  for (const Polygon& poly : s.obstacles) {
    json ring = json::array();
    for (Vec2 v : poly) ring.push_back(from_vec(v));
    obs.push_back(ring);
  }
  doc["obstacles"] = obs;
  json nodes = json::array();
  for (const SensorNode& n : s.nodes) {
    nodes.push_back({{"x", n.position.x},
                     {"y", n.position.y},
                     {"model", std::string(model_name(n.model))},
                     {"params", model_params(n.model)}});
  }
  doc["nodes"] = nodes;
  doc["intensity"] = {{"mode", std::string(to_string(s.mode))},
                      {"omega", s.omega},
                      {"eps_floor", s.eps_floor}};
  json src = json::array();
  for (Vec2 p : s.sources) src.push_back(from_vec(p));
  doc["sources"] = src;
  doc["goal"] = from_vec(s.goal);
  doc["grid"] = {{"points_per_node", s.grid.points_per_node},
                 {"boundary_spacing", s.grid.boundary_spacing},
                 {"base_rate", s.grid.base_rate},
                 {"seed", s.grid.rng_seed},
                 {"intensity_probes", s.grid.intensity_probes}};
  doc["solver"] = {{"dt", s.solver.dt},
                   {"speed", s.solver.speed},
                   {"n_directions", s.solver.n_directions},
                   {"tol_policy_eval", s.solver.tol_policy_eval},
                   {"tol_outer", s.solver.tol_outer},
                   {"max_eval_sweeps", s.solver.max_eval_sweeps},
                   {"max_outer_iters", s.solver.max_outer_iters},
                   {"eval_method",
                    s.solver.eval_method == EvalMethod::Direct ? "direct" : "sweeps"}};
  if (s.h_eval) doc["eval"] = {{"h_eval", *s.h_eval}};
  doc["optimizer"] = {{"candidates", s.optimizer.candidates},
                      {"radius_factor", s.optimizer.radius_factor},
                      {"max_passes", s.optimizer.max_passes},
                      {"seed", s.optimizer.seed}};
  return doc.dump(2) + "\n";
}

std::vector<SensorNode> parse_nodes(const std::string& text, const SensingModel& model) {
  validate(model);
  std::vector<SensorNode> out;
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::replace(line.begin(), line.end(), '\t', ' ');
    std::istringstream row(line);
    std::vector<std::string> cols;
    for (std::string tok; row >> tok;) cols.push_back(tok);
    if (cols.empty()) continue;
    if (cols.size() != 2) {
      throw ParseError("expected 2 columns, found " + std::to_string(cols.size()), lineno);
    }
    double xy[2];
    for (int c = 0; c < 2; ++c) {
      std::size_t used = 0;
      try {
        xy[c] = std::stod(cols[static_cast<std::size_t>(c)], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cols[static_cast<std::size_t>(c)].size()) {
        throw ParseError("malformed number '" + cols[static_cast<std::size_t>(c)] + "'", lineno);
      }
    }
    out.push_back({{xy[0], xy[1]}, model});
  }
  return out;
}

std::vector<SensorNode> import_nodes(const std::filesystem::path& file,
                                     const SensingModel& model) {
  return parse_nodes(read_text(file), model);
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::filesystem::path& file, const std::string& text) {
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

}  // namespace mep
