#include "mep/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mep/errors.hpp"

namespace mep {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}

// lambda / d^mu with d = 0 mapped to +inf; callers cap the result.
double power_decay(double lambda, double mu, double d) {
  if (d == 0.0) return std::numeric_limits<double>::infinity();
  // Common exponents skip the general pow.
  if (mu == 2.0) return lambda / (d * d);
  if (mu == 1.0) return lambda / d;
  return lambda / std::pow(d, mu);
}

// -ln(Phi(x)) where Phi = 1 - Q, accurate in both tails.
double neg_log_cdf(double x) {
  if (x > 0.0) return -std::log1p(-q_function(x));
  return -std::log(q_function(-x));
}

}  // namespace

void validate(const SensingModel& model) {
  std::visit(Overloaded{
                 [](const BooleanDisk& m) {
                   require(m.r > 0.0, "boolean_disk: r must be > 0");
                   require(m.delta >= 0.0, "boolean_disk: delta must be >= 0");
                 },
                 [](const AttenuatedDisk& m) {
                   require(m.lambda > 0.0, "attenuated_disk: lambda must be > 0");
                   require(m.mu > 0.0, "attenuated_disk: mu must be > 0");
                   require(m.s_max > 0.0, "attenuated_disk: s_max must be > 0");
                 },
                 [](const ProbabilityExp& m) {
                   require(m.alpha > 0.0, "probability_exp: alpha must be > 0");
                   require(m.beta > 0.0, "probability_exp: beta must be > 0");
                 },
                 [](const NoisyProbability& m) {
                   require(m.lambda > 0.0, "noisy_probability: lambda must be > 0");
                   require(m.mu > 0.0, "noisy_probability: mu must be > 0");
                   require(m.sigma > 0.0, "noisy_probability: sigma must be > 0");
                   require(std::isfinite(m.a_threshold),
                           "noisy_probability: a_threshold must be finite");
                   require(m.s_max > 0.0, "noisy_probability: s_max must be > 0");
                 },
             },
             model);
}

std::string_view model_name(const SensingModel& model) {
  return std::visit(Overloaded{
                        [](const BooleanDisk&) { return std::string_view("boolean_disk"); },
                        [](const AttenuatedDisk&) { return std::string_view("attenuated_disk"); },
                        [](const ProbabilityExp&) { return std::string_view("probability_exp"); },
                        [](const NoisyProbability&) {
                          return std::string_view("noisy_probability");
                        },
                    },
                    model);
}

double sense_at_distance(const SensingModel& model, double d) {
  return std::visit(
      Overloaded{
          [d](const BooleanDisk& m) {
            if (m.delta == 0.0) return d <= m.r ? 1.0 : 0.0;
            const double lo = m.r - m.delta;
            const double hi = m.r + m.delta;
            if (d <= lo) return 1.0;
            if (d >= hi) return 0.0;
            const double t = (d - lo) / (hi - lo);
            return 1.0 - t * t * (3.0 - 2.0 * t);
          },
          [d](const AttenuatedDisk& m) {
            return std::min(power_decay(m.lambda, m.mu, d), m.s_max);
          },
          [d](const ProbabilityExp& m) { return std::exp(-m.alpha * std::pow(d, m.beta)); },
          [d](const NoisyProbability& m) {
            const double signal = power_decay(m.lambda, m.mu, d);
            if (std::isinf(signal)) return m.s_max;
            const double energy = neg_log_cdf((m.a_threshold - signal) / m.sigma);
            return std::isfinite(energy) ? std::min(energy, m.s_max) : m.s_max;
          },
      },
      model);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

std::string_view to_string(IntensityMode mode) {
  return mode == IntensityMode::AllSensor ? "all" : "max";
}

IntensityField::IntensityField(std::vector<SensorNode> nodes, IntensityMode mode, double omega,
                               double eps_floor)
    : nodes_(std::move(nodes)), mode_(mode), omega_(omega), eps_floor_(eps_floor) {
  require(!nodes_.empty(), "intensity field needs at least one node");
  require(omega_ >= 1.0, "intensity.omega must be >= 1");
  require(eps_floor_ > 0.0, "intensity.eps_floor must be > 0");
  for (const auto& node : nodes_) validate(node.model);
  auto& sq = inverse_square_;
  for (const auto& node : nodes_) {
    const auto* m = std::get_if<AttenuatedDisk>(&node.model);
    if (!m || m->mu != 2.0 || !(m->lambda > 0.0)) {
      sq = {};
      break;
    }
    sq.x.push_back(node.position.x);
    sq.y.push_back(node.position.y);
    sq.lambda.push_back(m->lambda);
    sq.s_max.push_back(m->s_max);
  }
}

double IntensityField::intensity(Vec2 p) const {
  double acc = 0.0;
  const auto& sq = inverse_square_;
  if (const std::size_t n = sq.x.size(); n > 0) {
    // lambda / 0 is +inf, which the cap turns into s_max.
    if (mode_ == IntensityMode::AllSensor) {
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = p.x - sq.x[i], dy = p.y - sq.y[i];
        const double q = sq.lambda[i] / (dx * dx + dy * dy);
        acc += q < sq.s_max[i] ? q : sq.s_max[i];
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = p.x - sq.x[i], dy = p.y - sq.y[i];
        const double d2 = dx * dx + dy * dy;
        // Clearly below the running max: the margin dwarfs rounding, so skip the divide.
        if (sq.lambda[i] < acc * d2 * (1.0 - 1e-15)) continue;
        const double q = sq.lambda[i] / d2;
        const double s = q < sq.s_max[i] ? q : sq.s_max[i];
        acc = acc < s ? s : acc;
      }
    }
    return acc;
  }
  if (mode_ == IntensityMode::AllSensor) {
    for (const auto& node : nodes_) acc += sense(node.model, node.position, p);
  } else {
    for (const auto& node : nodes_) acc = std::max(acc, sense(node.model, node.position, p));
  }
  return acc;
}

double IntensityField::scale(double raw) const { return std::max(raw / omega_, eps_floor_); }

}  // namespace mep
