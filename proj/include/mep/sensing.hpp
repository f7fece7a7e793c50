#pragma once

#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "mep/vec2.hpp"

namespace mep {

inline constexpr double kDefaultEnergyCap = 1e6;
inline constexpr double kDefaultIntensityFloor = 1e-9;

/// On/off detection within range r, smoothed by a cubic over [r - delta, r + delta]
/// so the resulting cost stays Lipschitz.
struct BooleanDisk {
  double r = 1.0;
  double delta = 0.05;

  bool operator==(const BooleanDisk&) const = default;
};

/// lambda / d^mu, capped at s_max.
struct AttenuatedDisk {
  double lambda = 1.0;
  double mu = 2.0;
  double s_max = kDefaultEnergyCap;

  bool operator==(const AttenuatedDisk&) const = default;
};

/// exp(-alpha d^beta).
struct ProbabilityExp {
  double alpha = 1.0;
  double beta = 1.0;

  bool operator==(const ProbabilityExp&) const = default;
};

/// -ln(1 - Q((A - lambda / d^mu) / sigma)), capped at s_max. Deterministic
/// replacement for the additive-noise model.
struct NoisyProbability {
  double lambda = 100.0;
  double mu = 1.0;
  double sigma = 1.0;
  double a_threshold = 6.0;
  double s_max = kDefaultEnergyCap;

  bool operator==(const NoisyProbability&) const = default;
};

using SensingModel = std::variant<BooleanDisk, AttenuatedDisk, ProbabilityExp, NoisyProbability>;

/// Boolean disk with the default smoothing band 0.05 r.
inline BooleanDisk boolean_disk(double r) { return BooleanDisk{r, 0.05 * r}; }

/// Throws ValidationError if a parameter is out of range.
void validate(const SensingModel& model);

std::string_view model_name(const SensingModel& model);

/// Sensing energy at distance d >= 0. Finite everywhere, including d = 0.
double sense_at_distance(const SensingModel& model, double d);

inline double sense(const SensingModel& model, Vec2 sensor, Vec2 p) {
  return sense_at_distance(model, distance(sensor, p));
}

/// Gaussian upper tail probability: Q(x) = P(Z > x).
double q_function(double x);

struct SensorNode {
  Vec2 position;
  SensingModel model;

  bool operator==(const SensorNode&) const = default;
};

enum class IntensityMode { AllSensor, MaxSensor };

std::string_view to_string(IntensityMode mode);

/// Composite field of a node set. `intensity` is the raw energy used for reporting;
/// `scaled_intensity` divides by omega and applies the positivity floor; it is the
/// running cost of the control problem.
class IntensityField {
 public:
  IntensityField(std::vector<SensorNode> nodes, IntensityMode mode, double omega = 100.0,
                 double eps_floor = kDefaultIntensityFloor);

  double intensity(Vec2 p) const;
  double scaled_intensity(Vec2 p) const { return scale(intensity(p)); }
  double scale(double raw) const;

  std::span<const SensorNode> nodes() const noexcept { return nodes_; }
  IntensityMode mode() const noexcept { return mode_; }
  double omega() const noexcept { return omega_; }
  double eps_floor() const noexcept { return eps_floor_; }

 private:
  // Columns of the nodes when all are lambda / d^2 disks with lambda > 0, the hot case.
  struct InverseSquare {
    std::vector<double> x, y, lambda, s_max;
  };

  std::vector<SensorNode> nodes_;
  IntensityMode mode_;
  double omega_;
  double eps_floor_;
  InverseSquare inverse_square_;
};

}  // namespace mep
