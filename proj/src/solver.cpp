#include "mep/solver.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>

#include "mep/errors.hpp"
#include "mep/parallel.hpp"

namespace mep {
namespace {

std::atomic<std::uint64_t> g_solve_calls{0};

struct ControlTerm {
  std::optional<Barycentric> bc;  // nullopt: endpoint outside the hull
  double gain;
  double decay;
};

// Everything about control u at p that does not depend on the value vector.
std::optional<ControlTerm> control_term(const SpatialGrid& grid, const IntensityField& field,
                                        const Domain& domain, Vec2 p, double ip, Vec2 u,
                                        const SolverConfig& config) {
  const Vec2 q = p + u * config.dt;
  if (!domain.segment_clear(p, q)) return std::nullopt;
  const double g = 0.5 * (ip + field.scaled_intensity(q)) * norm(u) * config.dt;
  return ControlTerm{grid.barycentric(q), -std::expm1(-g), std::exp(-g)};
}

}  // namespace

void SolverConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  if (!(speed > 0.0)) throw ValidationError("speed must be > 0");
  if (n_directions < 8) throw ValidationError("n_directions must be >= 8");
  if (!(tol_policy_eval > 0.0) || !(tol_outer > 0.0)) {
    throw ValidationError("tolerances must be > 0");
  }
  if (max_eval_sweeps < 1 || max_outer_iters < 1) {
    throw ValidationError("iteration limits must be >= 1");
  }
}

std::vector<Vec2> control_set(const SolverConfig& config) {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(config.n_directions));
  for (int j = 0; j < config.n_directions; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / config.n_directions;
    // Axis headings come out exact so moves along a domain edge stay on it.
    const auto snap = [](double c) { return std::abs(c) < 1e-15 ? 0.0 : c; };
    out.push_back({config.speed * snap(std::cos(theta)), config.speed * snap(std::sin(theta))});
  }
  return out;
}

double step_cost(const IntensityField& field, Vec2 p, Vec2 p_next, double u_norm, double dt) {
  return 0.5 * (field.scaled_intensity(p) + field.scaled_intensity(p_next)) * u_norm * dt;
}

double recover_value(double vbar) {
  return -std::log1p(-std::min(std::max(vbar, 0.0), 1.0 - 1e-15));
}

ValueField ValueField::initial(const SpatialGrid& grid, const SolverConfig& config) {
  ValueField f;
  const std::size_t n = grid.vertex_count();
  f.grid = &grid;
  f.vbar.assign(n, 1.0);
  f.policy.assign(n, kNoControl);
  f.frozen.assign(n, 0);
  f.controls = control_set(config);
  const auto classes = grid.classes();
  for (std::size_t i = 0; i < n; ++i) {
    if (classes[i] == VertexClass::Obstacle) f.frozen[i] = 1;
  }
  f.vbar[grid.goal_index()] = 0.0;
  f.frozen[grid.goal_index()] = 1;
  return f;
}

BellmanResult bellman_update(const ValueField& value, const IntensityField& field,
                             const Domain& domain, Vec2 p, const SolverConfig& config) {
  BellmanResult best;
  const double ip = field.scaled_intensity(p);
  for (std::size_t j = 0; j < value.controls.size(); ++j) {
    const auto term = control_term(*value.grid, field, domain, p, ip, value.controls[j], config);
    if (!term) continue;
    const Vec2 q = p + value.controls[j] * config.dt;
    const double r = term->bc ? value.grid->interpolate(value.vbar, q) : 1.0;
    const double candidate = r + term->gain * (1.0 - r);
    if (best.control == kNoControl || candidate < best.vbar) {
      best.vbar = candidate;
      best.control = static_cast<int>(j);
    }
  }
  if (best.control == kNoControl) best.vbar = 1.0;
  best.vbar = std::clamp(best.vbar, 0.0, 1.0);
  return best;
}

BellmanOperator::BellmanOperator(const SpatialGrid& grid, const IntensityField& field,
                                 const Domain& domain, const SolverConfig& config)
    : n_(grid.vertex_count()),
      m_(static_cast<std::size_t>(config.n_directions)),
      config_(config) {
  config.validate();
  const std::vector<Vec2> controls = control_set(config);
  entries_.resize(n_ * m_);
  const auto pts = grid.vertices();
  parallel_for(n_, config.workers, [&](std::size_t i) {
    const double ip = field.scaled_intensity(pts[i]);
    for (std::size_t j = 0; j < m_; ++j) {
      Entry& e = entries_[i * m_ + j];
      const auto term = control_term(grid, field, domain, pts[i], ip, controls[j], config);
      e.admissible = term.has_value();
      if (!term) continue;
      e.gain = term->gain;
      e.decay = term->decay;
      e.outside = !term->bc.has_value();
      if (term->bc) {
        e.idx = term->bc->vertices;
        e.w = term->bc->weights;
      }
    }
  });
}

double BellmanOperator::apply(const Entry& e, std::span<const double> v) const {
  double r = 1.0;
  if (!e.outside) {
    const double a = v[e.idx[0]], b = v[e.idx[1]], c = v[e.idx[2]];
    r = std::clamp(e.w[0] * a + e.w[1] * b + e.w[2] * c, std::min({a, b, c}),
                   std::max({a, b, c}));
  }
  // Exact at both ends: r = 1 stays 1 and r = 0 gives the gain.
  return r + e.gain * (1.0 - r);
}

void BellmanOperator::improve(std::span<const double> v, std::span<const std::uint8_t> frozen,
                              std::span<double> out, std::span<int> policy) const {
  parallel_for(n_, config_.workers, [&](std::size_t i) {
    if (frozen[i]) {
      out[i] = v[i];
      policy[i] = kNoControl;
      return;
    }
    double best = 1.0;
    int arg = kNoControl;
    for (std::size_t j = 0; j < m_; ++j) {
      const Entry& e = at(i, j);
      if (!e.admissible) continue;
      const double c = apply(e, v);
      if (arg == kNoControl || c < best) {
        best = c;
        arg = static_cast<int>(j);
      }
    }
    out[i] = arg == kNoControl ? 1.0 : std::clamp(best, 0.0, 1.0);
    policy[i] = arg;
  });
}

void BellmanOperator::evaluate(std::span<const int> policy, std::span<const std::uint8_t> frozen,
                               std::span<double> v) const {
  if (config_.eval_method == EvalMethod::Direct) {
    evaluate_direct(policy, frozen, v);
  } else {
    evaluate_sweeps(policy, frozen, v);
  }
}

void BellmanOperator::evaluate_sweeps(std::span<const int> policy,
                                      std::span<const std::uint8_t> frozen,
                                      std::span<double> v) const {
  std::vector<double> next(v.begin(), v.end());
  for (int sweep = 0; sweep < config_.max_eval_sweeps; ++sweep) {
    parallel_for(n_, config_.workers, [&](std::size_t i) {
      if (frozen[i]) return;
      next[i] = policy[i] == kNoControl
                    ? 1.0
                    : std::clamp(apply(at(i, static_cast<std::size_t>(policy[i])), v), 0.0, 1.0);
    });
    double change = 0.0;
    for (std::size_t i = 0; i < n_; ++i) change = std::max(change, std::abs(next[i] - v[i]));
    std::copy(next.begin(), next.end(), v.begin());
    if (change < config_.tol_policy_eval) return;
  }
  throw NonConvergence("policy evaluation exceeded max_eval_sweeps");
}

void BellmanOperator::evaluate_direct(std::span<const int> policy,
                                      std::span<const std::uint8_t> frozen,
                                      std::span<double> v) const {
  // Vertices whose policy chain never reaches a fixed value below one are exactly 1.
  // Find the rest by a backward search over the stencil dependencies.
  std::vector<std::vector<std::uint32_t>> dependents(n_);
  std::vector<std::uint32_t> stack;
  std::vector<std::uint8_t> reaches(n_, 0);
  for (std::size_t i = 0; i < n_; ++i) {
    if (frozen[i]) {
      if (v[i] < 1.0) {
        reaches[i] = 1;
        stack.push_back(static_cast<std::uint32_t>(i));
      }
      continue;
    }
    if (policy[i] == kNoControl) continue;
    const Entry& e = at(i, static_cast<std::size_t>(policy[i]));
    if (e.outside) continue;
    for (int k = 0; k < 3; ++k) {
      if (e.w[static_cast<std::size_t>(k)] > 0.0) {
        dependents[e.idx[static_cast<std::size_t>(k)]].push_back(static_cast<std::uint32_t>(i));
      }
    }
  }
  while (!stack.empty()) {
    const std::uint32_t j = stack.back();
    stack.pop_back();
    for (std::uint32_t i : dependents[j]) {
      if (!reaches[i]) {
        reaches[i] = 1;
        stack.push_back(i);
      }
    }
  }

  // Unknowns are the non-frozen vertices that reach; the rest are fixed.
  std::vector<std::int64_t> slot(n_, -1);
  std::size_t unknowns = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    if (frozen[i]) continue;
    if (!reaches[i]) {
      v[i] = 1.0;
      continue;
    }
    slot[i] = static_cast<std::int64_t>(unknowns++);
  }
  if (unknowns == 0) return;

  using Sparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(4 * unknowns);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(unknowns));
  for (std::size_t i = 0; i < n_; ++i) {
    if (slot[i] < 0) continue;
    const int row = static_cast<int>(slot[i]);
    const Entry& e = at(i, static_cast<std::size_t>(policy[i]));
    double b = e.gain;
    triplets.emplace_back(row, row, 1.0);
    if (e.outside) {
      b += e.decay;
    } else {
      for (int k = 0; k < 3; ++k) {
        const std::uint32_t col = e.idx[static_cast<std::size_t>(k)];
        const double w = e.w[static_cast<std::size_t>(k)];
        if (w == 0.0) continue;
        if (slot[col] < 0) {
          b += e.decay * w * v[col];
        } else {
          triplets.emplace_back(row, static_cast<int>(slot[col]), -e.decay * w);
        }
      }
    }
    rhs[row] = b;
  }
  Sparse a(static_cast<int>(unknowns), static_cast<int>(unknowns));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  Eigen::SparseLU<Sparse, Eigen::COLAMDOrdering<int>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NonConvergence("policy evaluation factorization failed");
  const Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success) throw NonConvergence("policy evaluation solve failed");
  for (std::size_t i = 0; i < n_; ++i) {
    if (slot[i] >= 0) v[i] = std::clamp(x[slot[i]], 0.0, 1.0);
  }
}

void policy_improve(ValueField& value, const BellmanOperator& op) {
  const std::vector<double> snapshot = value.vbar;
  op.improve(snapshot, value.frozen, value.vbar, value.policy);
}

void policy_evaluate(ValueField& value, const BellmanOperator& op) {
  op.evaluate(value.policy, value.frozen, value.vbar);
}

ValueField solve(const Domain& domain, const IntensityField& field, const SpatialGrid& grid,
                 const SolverConfig& config) {
  g_solve_calls.fetch_add(1, std::memory_order_relaxed);
  config.validate();
  const BellmanOperator op(grid, field, domain, config);
  ValueField value = ValueField::initial(grid, config);
  const std::size_t n = grid.vertex_count();
  std::vector<double> improved(n);
  std::vector<int> next_policy(n);
  for (int iter = 1; iter <= config.max_outer_iters; ++iter) {
    value.outer_iters = iter;
    op.improve(value.vbar, value.frozen, improved, next_policy);
    if (iter > 1 && next_policy == value.policy) return value;
    value.policy = next_policy;
    std::vector<double> evaluated = improved;
    op.evaluate(value.policy, value.frozen, evaluated);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      change = std::max(change, std::abs(evaluated[i] - value.vbar[i]));
    }
    value.vbar = std::move(evaluated);
    if (change < config.tol_outer) return value;
  }
  throw NonConvergence("policy iteration exceeded max_outer_iters");
}

std::uint64_t solve_invocations() { return g_solve_calls.load(std::memory_order_relaxed); }

}  // namespace mep
