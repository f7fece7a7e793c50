#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mep/domain.hpp"
#include "mep/grid.hpp"
#include "mep/sensing.hpp"
#include "mep/vec2.hpp"

namespace mep {

enum class EvalMethod { Direct, Sweeps };

struct SolverConfig {
  double dt = 0.1;
  double speed = 1.0;
  int n_directions = 36;
  double tol_policy_eval = 1e-10;
  double tol_outer = 1e-8;
  int max_eval_sweeps = 1'000'000;
  int max_outer_iters = 10'000;
  /// Direct sparse solve of the fixed-policy system, or Jacobi sweeps.
  EvalMethod eval_method = EvalMethod::Direct;
  /// 0 picks the hardware concurrency.
  unsigned workers = 0;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

/// n_directions velocities of magnitude speed at headings 2 pi j / n.
std::vector<Vec2> control_set(const SolverConfig& config);

/// Trapezoidal running cost of one step under the scaled intensity.
double step_cost(const IntensityField& field, Vec2 p, Vec2 p_next, double u_norm, double dt);

/// -ln(1 - vbar), scaled-exposure units.
double recover_value(double vbar);

inline constexpr int kNoControl = -1;

/// Kruzkov value, policy and boundary flags over a grid.
struct ValueField {
  const SpatialGrid* grid = nullptr;
  std::vector<double> vbar;
  /// Index into the control set; kNoControl at frozen or trapped vertices.
  std::vector<int> policy;
  std::vector<std::uint8_t> frozen;
  std::vector<Vec2> controls;
  int outer_iters = 0;

  /// vbar = 1 everywhere, goal pinned to 0, obstacle vertices pinned to 1.
  static ValueField initial(const SpatialGrid& grid, const SolverConfig& config);

  std::optional<Vec2> velocity(std::size_t i) const {
    if (policy[i] == kNoControl) return std::nullopt;
    return controls[static_cast<std::size_t>(policy[i])];
  }
};

struct BellmanResult {
  double vbar = 1.0;
  int control = kNoControl;
};

/// Minimises 1 + (I(p + u dt) - 1) e^{-g} over admissible controls at an arbitrary point.
BellmanResult bellman_update(const ValueField& value, const IntensityField& field,
                             const Domain& domain, Vec2 p, const SolverConfig& config);

/// Precomputed per-vertex, per-control interpolation stencils for a fixed grid.
class BellmanOperator {
 public:
  BellmanOperator(const SpatialGrid& grid, const IntensityField& field, const Domain& domain,
                  const SolverConfig& config);

  std::size_t vertex_count() const noexcept { return n_; }
  std::size_t control_count() const noexcept { return m_; }

  /// One Jacobi sweep: writes T(v) into out and the argmin into policy.
  /// Frozen vertices copy their input value.
  void improve(std::span<const double> v, std::span<const std::uint8_t> frozen,
               std::span<double> out, std::span<int> policy) const;

  /// Value of the fixed policy, by direct sparse solve or by sweeps.
  void evaluate(std::span<const int> policy, std::span<const std::uint8_t> frozen,
                std::span<double> v) const;
  void evaluate_sweeps(std::span<const int> policy, std::span<const std::uint8_t> frozen,
                       std::span<double> v) const;
  void evaluate_direct(std::span<const int> policy, std::span<const std::uint8_t> frozen,
                       std::span<double> v) const;

 private:
  struct Entry {
    std::array<std::uint32_t, 3> idx;
    std::array<double, 3> w;
    double gain;   // 1 - e^{-g}
    double decay;  // e^{-g}
    bool admissible;
    bool outside;  // endpoint off the hull; interpolates to 1
  };

  double apply(const Entry& e, std::span<const double> v) const;
  const Entry& at(std::size_t i, std::size_t j) const { return entries_[i * m_ + j]; }

  std::size_t n_;
  std::size_t m_;
  SolverConfig config_;
  std::vector<Entry> entries_;
};

void policy_improve(ValueField& value, const BellmanOperator& op);
void policy_evaluate(ValueField& value, const BellmanOperator& op);

/// Policy iteration from the all-ones start. Throws NonConvergence.
ValueField solve(const Domain& domain, const IntensityField& field, const SpatialGrid& grid,
                 const SolverConfig& config);

/// Number of solve() calls made by this process.
std::uint64_t solve_invocations();

}  // namespace mep
