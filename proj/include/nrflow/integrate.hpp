#pragma once

// Classical fixed-step RK4 over the packed first-order fields, optional
// post-step constraint projection, invariant sampling, and drift reporting.

#include "nrflow/dynamics.hpp"
#include "nrflow/invariants.hpp"
#include "nrflow/model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nrflow {

enum class Projection { None, Renormalize };

struct IntegrationConfig {
  double step = 1e-3;
  double t_end = 10.0;
  Projection projection = Projection::None;
  int sample_stride = 1;
  double singular_guard_radius = 0.0;

  void validate() const {
    if (!(step > 0.0)) throw std::invalid_argument("integration: step must be positive");
    if (t_end < 0.0) throw std::invalid_argument("integration: t_end must be nonnegative");
    if (t_end > 0.0 && step > t_end)
      throw std::invalid_argument("integration: step must not exceed t_end");
    if (sample_stride < 1)
      throw std::invalid_argument("integration: sample_stride must be >= 1");
  }
};

/// Sampled flow: time grid, packed states, per-sample invariant values
/// (family entries followed by the Hamiltonian), constraint residuals and,
/// on the ellipsoid side, the kappa diagnostic.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> invariant_samples;
  std::vector<std::pair<double, double>> constraint_residuals;
  std::vector<double> kappa_samples;
  bool truncated = false;
  double truncation_time = 0.0;
  std::string truncation_reason;

  std::size_t size() const noexcept { return times.size(); }
};

/// One classical RK4 step; local error O(h^5) on smooth fields.
inline Vec rk4_step(const Field& field, const Vec& state, double h) {
  const Vec k1 = field(state);
  const Vec k2 = field(state + (0.5 * h) * k1);
  const Vec k3 = field(state + (0.5 * h) * k2);
  const Vec k4 = field(state + h * k3);
  return state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Rescales the position block onto the constraint surface and projects the
/// velocity block onto its tangent plane. Sphere systems rescale by r/|x|;
/// ellipsoid systems by (sum q^2/b)^{-1/2}; the polar system projects its
/// radial block the ellipsoid way and leaves the angles alone.
inline Vec project_state(SystemTag tag, const Vec& state,
                         const SystemParams& params) {
  const Eigen::Index n = params.size();
  Vec out = state;
  switch (tag) {
    case SystemTag::Neumann:
    case SystemTag::Rosochatius: {
      Vec x = state.head(n);
      const double norm = x.norm();
      if (norm == 0.0) throw std::invalid_argument("project_state: zero position");
      x *= std::abs(params.r) / norm;
      out.head(n) = x;
      out.tail(n) = tangent_project(x, Vec(state.tail(n)));
      break;
    }
    case SystemTag::Jacobi:
    case SystemTag::DualRosochatius: {
      Vec q = state.head(n);
      const double s2 = q.cwiseQuotient(params.b).dot(q);
      if (!(s2 > 0.0)) throw std::invalid_argument("project_state: zero position");
      q *= 1.0 / std::sqrt(s2);
      const Vec g = q.cwiseQuotient(params.b);
      Vec p = state.tail(n);
      p -= g * (p.dot(g) / g.squaredNorm());
      out.head(n) = q;
      out.tail(n) = p;
      break;
    }
    case SystemTag::Polar2N: {
      Vec q = state.segment(0, n);
      const double s2 = q.cwiseQuotient(params.b).dot(q);
      if (!(s2 > 0.0)) throw std::invalid_argument("project_state: zero position");
      q *= 1.0 / std::sqrt(s2);
      const Vec g = q.cwiseQuotient(params.b);
      Vec qd = state.segment(2 * n, n);
      qd -= g * (qd.dot(g) / g.squaredNorm());
      out.segment(0, n) = q;
      out.segment(2 * n, n) = qd;
      break;
    }
  }
  return out;
}

/// Constraint residuals of a packed state under its system tag.
inline std::pair<double, double> constraint_residuals(SystemTag tag,
                                                      const Vec& state,
                                                      const SystemParams& params) {
  const Eigen::Index n = params.size();
  switch (tag) {
    case SystemTag::Neumann:
    case SystemTag::Rosochatius:
      return neumann_residuals({state.head(n), state.tail(n), false}, params);
    case SystemTag::Jacobi:
    case SystemTag::DualRosochatius:
      return jacobi_residuals({state.head(n), state.tail(n)}, params);
    case SystemTag::Polar2N: {
      const Vec q = state.segment(0, n);
      const Vec qd = state.segment(2 * n, n);
      return jacobi_residuals({q, qd}, params);
    }
  }
  throw std::logic_error("unreachable");
}

/// Family values + Hamiltonian used for drift monitoring of each system.
/// (Polar2N records the angular momenta q_k^2 theta_k'.)
inline Vec evaluate_invariants(SystemTag tag, const Vec& state,
                               const SystemParams& params) {
  const Eigen::Index n = params.size();
  Vec out(n + 1);
  switch (tag) {
    case SystemTag::Neumann: {
      const InvariantVector f =
          uhlenbeck_F(state.head(n), state.tail(n), params);
      out << f.values, f.hamiltonian;
      return out;
    }
    case SystemTag::Jacobi: {
      const InvariantVector g =
          uhlenbeck_G(state.head(n), state.tail(n), params);
      out << g.values, g.hamiltonian;
      return out;
    }
    case SystemTag::Rosochatius: {
      const InvariantVector h =
          rosochatius_H(state.head(n), state.tail(n), params);
      out << h.values, h.hamiltonian;
      return out;
    }
    case SystemTag::DualRosochatius: {
      const InvariantVector i =
          dual_I(state.head(n), state.tail(n), params);
      out << i.values, i.hamiltonian;
      return out;
    }
    case SystemTag::Polar2N: {
      const Vec q = state.segment(0, n);
      const Vec thd = state.segment(3 * n, n);
      for (Eigen::Index k = 0; k < n; ++k) out[k] = q[k] * q[k] * thd[k];
      out[n] = polar_geodesic_hamiltonian({q, state.segment(n, n),
                                           state.segment(2 * n, n), thd});
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

namespace detail {

// Returns the offending axis when a centrifugal axis is inside its guard
// radius; exact flows never get there, so a trip means the step size failed.
inline std::optional<Eigen::Index> singular_guard(SystemTag tag,
                                                  const Vec& state,
                                                  const SystemParams& params,
                                                  double guard_radius) {
  const Eigen::Index n = params.size();
  switch (tag) {
    case SystemTag::Rosochatius:
      for (Eigen::Index k = 0; k < n; ++k) {
        const double guard =
            std::max(1e-6 * std::abs(params.r), guard_radius);
        if (params.c[k] > 0.0 && std::abs(state[k]) < guard) return k;
      }
      return std::nullopt;
    case SystemTag::DualRosochatius:
      for (Eigen::Index k = 0; k < n; ++k) {
        const double guard =
            std::max(1e-6 * std::sqrt(params.b[k]), guard_radius);
        if (params.d[k] > 0.0 && std::abs(state[k]) < guard) return k;
      }
      return std::nullopt;
    case SystemTag::Polar2N:
      for (Eigen::Index k = 0; k < n; ++k) {
        const double guard =
            std::max(1e-6 * std::sqrt(params.b[k]), guard_radius);
        if (std::abs(state[k]) < guard) return k;
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

}  // namespace detail

/// Fixed-step RK4 flow of the tagged system, sampled every sample_stride
/// steps (initial and final states always included). A singular-guard trip
/// truncates the trajectory and reports the last good state and time.
/// `record_invariants` may be disabled, e.g. for lifted 2N runs whose
/// duplicated frequencies have no per-index family.
inline Trajectory integrate_flow(SystemTag tag, const Vec& initial,
                                 const SystemParams& params,
                                 const IntegrationConfig& config,
                                 bool record_invariants = true) {
  config.validate();
  if (initial.size() != packed_dimension(tag, params.size()))
    throw std::invalid_argument("integrate_flow: state has wrong dimension");

  const bool ellipsoid_side =
      tag == SystemTag::Jacobi || tag == SystemTag::DualRosochatius;

  Trajectory traj;
  auto record = [&](double t, const Vec& state) {
    traj.times.push_back(t);
    traj.states.push_back(state);
    traj.constraint_residuals.push_back(constraint_residuals(tag, state, params));
    if (record_invariants)
      traj.invariant_samples.push_back(evaluate_invariants(tag, state, params));
    if (ellipsoid_side) {
      const Eigen::Index n = params.size();
      const double r2 = state.head(n).cwiseQuotient(params.b).squaredNorm();
      double pb = 0.0;
      for (Eigen::Index k = 0; k < n; ++k)
        pb += state[n + k] * state[n + k] / params.b[k];
      traj.kappa_samples.push_back(pb > 0.0 ? 1.0 / std::sqrt(r2 * pb) : 0.0);
    }
  };

  Vec state = initial;
  // guard the start before the invariant families touch it: a centrifugal
  // axis at exactly zero would make them singular too
  if (auto k = detail::singular_guard(tag, state, params,
                                      config.singular_guard_radius)) {
    traj.truncated = true;
    traj.truncation_time = 0.0;
    traj.truncation_reason =
        "singular guard tripped on axis " + std::to_string(*k + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    traj.constraint_residuals.push_back(
        constraint_residuals(tag, state, params));
    return traj;
  }
  record(0.0, state);
  if (config.t_end == 0.0) return traj;

  const long nsteps =
      static_cast<long>(std::ceil(config.t_end / config.step - 1e-9));
  const double h = config.t_end / static_cast<double>(nsteps);
  const Field field = first_order_field(tag, params);

  for (long i = 0; i < nsteps; ++i) {
    const double t = h * static_cast<double>(i);
    if (auto k = detail::singular_guard(tag, state, params,
                                        config.singular_guard_radius)) {
      traj.truncated = true;
      traj.truncation_time = t;
      traj.truncation_reason =
          "singular guard tripped on axis " + std::to_string(*k + 1);
      return traj;
    }
    try {
      state = rk4_step(field, state, h);
    } catch (const SingularStateError& err) {
      traj.truncated = true;
      traj.truncation_time = t;
      traj.truncation_reason = err.what();
      return traj;
    }
    if (config.projection == Projection::Renormalize)
      state = project_state(tag, state, params);
    if ((i + 1) % config.sample_stride == 0 || i + 1 == nsteps)
      record(h * static_cast<double>(i + 1), state);
  }
  return traj;
}

/// Per-entry max_t |V_k(t) - V_k(0)| / (1 + |V_k(0)|) over the recorded
/// invariant samples (last entry is the Hamiltonian).
inline Vec drift_report(const Trajectory& traj) {
  if (traj.invariant_samples.empty())
    throw std::invalid_argument("drift_report: no invariant samples recorded");
  const Vec v0 = traj.invariant_samples.front();
  Vec worst = Vec::Zero(v0.size());
  for (const Vec& v : traj.invariant_samples)
    worst = worst.cwiseMax(
        (v - v0).cwiseAbs().cwiseQuotient(Vec::Ones(v0.size()) + v0.cwiseAbs()));
  return worst;
}

/// Largest constraint residual magnitude seen along the trajectory.
inline double max_constraint_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (auto [r1, r2] : traj.constraint_residuals)
    worst = std::max({worst, std::abs(r1), std::abs(r2)});
  return worst;
}

/// Relative spread of the kappa diagnostic along an ellipsoid trajectory.
inline double kappa_drift(const Trajectory& traj) {
  if (traj.kappa_samples.empty()) return 0.0;
  const double k0 = traj.kappa_samples.front();
  double worst = 0.0;
  for (double k : traj.kappa_samples)
    worst = std::max(worst, std::abs(k - k0));
  return k0 != 0.0 ? worst / std::abs(k0) : worst;
}

}  // namespace nrflow
