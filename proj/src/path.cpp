#include "mep/path.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>
#include <random>

#include "mep/errors.hpp"

namespace mep {

double Path::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) total += distance(waypoints[i - 1], waypoints[i]);
  return total;
}

Path extract_path(const ValueField& value, const IntensityField& field, const Domain& domain,
                  Vec2 source, Vec2 goal, const SolverConfig& config) {
  const double reach = config.speed * config.dt;
  const auto max_steps =
      static_cast<std::size_t>(std::ceil(20.0 * domain.diameter() / reach));
  Path path{{source}, config.dt};
  Vec2 p = source;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    if (distance(p, goal) <= reach && domain.segment_clear(p, goal)) {
      path.waypoints.push_back(goal);
      return path;
    }
    if (step == max_steps) break;
    const BellmanResult r = bellman_update(value, field, domain, p, config);
    if (r.control == kNoControl || r.vbar >= 1.0 - 1e-12) {
      throw Unreachable("no admissible descent from (" + std::to_string(p.x) + ", " +
                        std::to_string(p.y) + ")");
    }
    p = p + value.controls[static_cast<std::size_t>(r.control)] * config.dt;
    path.waypoints.push_back(p);
  }
  throw Unreachable("path did not reach the goal within the step limit");
}

double segment_exposure(const IntensityField& field, Vec2 a, Vec2 b, double h_eval) {
  return trapezoid([&](Vec2 p) { return field.intensity(p); }, a, b, h_eval);
}

namespace {

// segment_exposure given the end intensities fa, fb, or nothing once offset plus it is
// sure to reach bound. Partial sums only grow, so an early exit never rejects a winner.
std::optional<double> exposure_below(const IntensityField& field, Vec2 a, double fa, Vec2 b,
                                     double fb, double h, double offset, double bound) {
  const double len = distance(a, b);
  if (len == 0.0) return offset < bound ? std::optional<double>(0.0) : std::nullopt;
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h)));
  const double scale = len / static_cast<double>(pieces);
  double sum = 0.5 * (fa + fb);
  for (std::size_t k = 1; k < pieces; ++k) {
    if (!(offset + sum * scale < bound)) return std::nullopt;
    sum += field.intensity(a + (b - a) * (static_cast<double>(k) / static_cast<double>(pieces)));
  }
  const double e = sum * scale;
  return offset + e < bound ? std::optional<double>(e) : std::nullopt;
}

}  // namespace

double evaluate_exposure(const IntensityField& field, const Path& path, double h_eval) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    total += segment_exposure(field, path.waypoints[i - 1], path.waypoints[i], h_eval);
  }
  return total;
}

Path local_optimize(const IntensityField& field, const Domain& domain, const Path& path,
                    double speed, double h_eval, const OptimizerConfig& config) {
  Path best = path;
  if (path.waypoints.size() < 3) return best;
  const double rho = config.radius_factor * speed * path.dt;
  std::mt19937_64 rng(config.seed);
  const auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  // seg[i] is the exposure of the leg w[i] -> w[i + 1].
  std::vector<double> seg(path.waypoints.size() - 1);
  for (std::size_t i = 0; i < seg.size(); ++i) {
    seg[i] = segment_exposure(field, path.waypoints[i], path.waypoints[i + 1], h_eval);
  }
  const auto sum = [](const std::vector<double>& v) {
    double t = 0.0;
    for (double x : v) t += x;
    return t;
  };
  double total = sum(seg);
  std::vector<double> at(path.waypoints.size());
  for (std::size_t i = 0; i < at.size(); ++i) at[i] = field.intensity(path.waypoints[i]);

  for (int pass = 0; pass < config.max_passes; ++pass) {
    Path trial = best;
    std::vector<double> trial_seg = seg, trial_at = at;
    auto& w = trial.waypoints;
    bool replaced = false;
    for (std::size_t i = 1; i + 1 < w.size(); ++i) {
      const Vec2 prev = w[i - 1], next = w[i + 1], centre = w[i];
      double local = trial_seg[i - 1] + trial_seg[i];
      for (int k = 0; k < config.candidates; ++k) {
        const double r = rho * std::sqrt(uniform());
        const double theta = 2.0 * std::numbers::pi * uniform();
        const Vec2 c = centre + Vec2{r * std::cos(theta), r * std::sin(theta)};
        if (!domain.segment_clear(prev, c) || !domain.segment_clear(c, next)) continue;
        const double fc = field.intensity(c);
        const auto head = exposure_below(field, prev, trial_at[i - 1], c, fc, h_eval, 0.0, local);
        if (!head) continue;
        const auto tail =
            exposure_below(field, c, fc, next, trial_at[i + 1], h_eval, *head, local);
        if (!tail) continue;
        local = *head + *tail;
        w[i] = c;
        trial_at[i] = fc;
        trial_seg[i - 1] = *head;
        trial_seg[i] = *tail;
        replaced = true;
      }
    }
    if (!replaced) break;
    const double trial_total = sum(trial_seg);
    if (trial_total > total) break;
    best = std::move(trial);
    seg = std::move(trial_seg);
    at = std::move(trial_at);
    total = trial_total;
  }
  return best;
}

}  // namespace mep
