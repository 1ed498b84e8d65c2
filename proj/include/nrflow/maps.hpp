#pragma once

// Inter-system transformations: the Gauss map with its time
// reparametrization (ellipsoid -> sphere), gauge transformations, the polar
// embedding/reduction between 2N Cartesian and N polar variables, and the
// lifts that realize Rosochatius / dual-Rosochatius flows inside doubled
// Neumann / Jacobi systems.

#include "nrflow/integrate.hpp"
#include "nrflow/model.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace nrflow {

/// kappa = (R^2 sum p^2/b)^{-1/2}; a constant of the geodesic flow, used as
/// the time scale of the Gauss map.
inline double compute_kappa(const Vec& q, const Vec& p,
                            const SystemParams& params) {
  const double r2 = q.cwiseQuotient(params.b).squaredNorm();
  if (r2 == 0.0) throw std::invalid_argument("compute_kappa: R^2 = 0");
  double pb = 0.0;
  for (Eigen::Index k = 0; k < q.size(); ++k)
    pb += p[k] * p[k] / params.b[k];
  if (pb == 0.0)
    throw std::invalid_argument("compute_kappa: zero momentum");
  return 1.0 / std::sqrt(r2 * pb);
}

/// x_i = (r/R) q_i/b_i and y_i = (r/(R b_i))(p_i sdot + mu q_i) with
/// sdot = kappa R^2. The image satisfies sum x^2 = r^2 identically.
inline SphereState gauss_map(const Vec& q, const Vec& p,
                             const SystemParams& params, double mu = 0.0) {
  const Eigen::Index n = q.size();
  const double kappa = compute_kappa(q, p, params);
  const double r2 = q.cwiseQuotient(params.b).squaredNorm();
  const double R = std::sqrt(r2);
  const double sdot = kappa * r2;
  SphereState out;
  out.gauged = true;
  out.x.resize(n);
  out.w.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.x[k] = (params.r / R) * q[k] / params.b[k];
    out.w[k] = (params.r / (R * params.b[k])) * (p[k] * sdot + mu * q[k]);
  }
  return out;
}

/// A Gauss-mapped point bundled with its bookkeeping.
struct MappedPair {
  EllipsoidState source;
  SphereState target;  // gauged
  double kappa = 0.0;
  double mu = 0.0;
};

inline MappedPair make_mapped_pair(const EllipsoidState& src,
                                   const SystemParams& params,
                                   double mu = 0.0) {
  return {src, gauss_map(src.q, src.p, params, mu),
          compute_kappa(src.q, src.p, params), mu};
}

/// (x, y) -> (x, y + lambda x); leaves J_kl and every invariant family
/// unchanged.
inline SphereState gauge_transform(const SphereState& s, double lambda) {
  if (!s.gauged)
    throw std::invalid_argument("gauge_transform: state must be gauged");
  return {s.x, s.w + lambda * s.x, true};
}

/// z_k = x_k cos theta_k, z_{k+N} = x_k sin theta_k, with velocities by the
/// product rule.
inline std::pair<Vec, Vec> polar_embed(const PolarState& s) {
  const Eigen::Index n = s.size();
  Vec z(2 * n), w(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double ck = std::cos(s.theta[k]);
    const double sk = std::sin(s.theta[k]);
    z[k] = s.x[k] * ck;
    z[k + n] = s.x[k] * sk;
    w[k] = s.xdot[k] * ck - s.x[k] * s.thetadot[k] * sk;
    w[k + n] = s.xdot[k] * sk + s.x[k] * s.thetadot[k] * ck;
  }
  return {z, w};
}

struct PolarReduction {
  PolarState state;
  Vec sqrt_c;  // per-plane angular momenta x_k^2 thetadot_k
};

/// Inverse of polar_embed on its image (angles mod 2pi); also returns the
/// per-plane angular momenta z_k w_{k+N} - z_{k+N} w_k.
inline PolarReduction polar_reduce(const Vec& z, const Vec& w) {
  if (z.size() != w.size() || z.size() % 2 != 0)
    throw std::invalid_argument("polar_reduce: need matching 2N vectors");
  const Eigen::Index n = z.size() / 2;
  PolarReduction out;
  out.state.x.resize(n);
  out.state.theta.resize(n);
  out.state.xdot.resize(n);
  out.state.thetadot.resize(n);
  out.sqrt_c.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double radius = std::hypot(z[k], z[k + n]);
    if (radius == 0.0)
      throw SingularStateError(
          "polar_reduce: plane " + std::to_string(k + 1) +
              " collapsed to the origin (angle undefined)",
          k);
    const double ell = z[k] * w[k + n] - z[k + n] * w[k];
    out.state.x[k] = radius;
    out.state.theta[k] = std::atan2(z[k + n], z[k]);
    out.state.xdot[k] = (z[k] * w[k] + z[k + n] * w[k + n]) / radius;
    out.state.thetadot[k] = ell / (radius * radius);
    out.sqrt_c[k] = ell;
  }
  return out;
}

/// Initial data for a 2N flow realizing an N-dimensional reduced system.
struct LiftedState {
  Vec position;  // z (sphere side) or zeta (ellipsoid side), 2N components
  Vec velocity;  // w or pi
  SystemParams params_2n;  // duplicated frequencies, same r
};

/// Embeds a Rosochatius state into the 2N Neumann system: angular rates
/// thetadot_k = sqrt(c_k)/x_k^2 fix the per-plane angular momenta at
/// sqrt(c_k); the caller picks the initial angles (they drop out of the
/// reduced dynamics).
inline LiftedState lift_rosochatius(const Vec& x, const Vec& xdot,
                                    const SystemParams& params,
                                    const Vec& theta0) {
  const Eigen::Index n = params.size();
  detail::require_same_size(x, theta0, "lift_rosochatius theta0");
  PolarState s;
  s.x = x;
  s.theta = theta0;
  s.xdot = xdot;
  s.thetadot.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (params.c[k] > 0.0) {
      if (x[k] == 0.0)
        throw SingularStateError(
            "lift_rosochatius: x_" + std::to_string(k + 1) + " = 0 with c > 0",
            k);
      s.thetadot[k] = std::sqrt(params.c[k]) / (x[k] * x[k]);
    } else {
      s.thetadot[k] = 0.0;
    }
  }
  auto [z, w] = polar_embed(s);
  return {std::move(z), std::move(w), params.doubled()};
}

/// Embeds a dual-system state into the 2N Jacobi system: theta_k' =
/// sqrt(d_k)/q_k^2, i.e. f_k^2 theta_k' = sqrt(d_k)/b_k^2 for f_k = q_k/b_k.
inline LiftedState lift_dual(const Vec& q, const Vec& p,
                             const SystemParams& params, const Vec& theta0) {
  const Eigen::Index n = params.size();
  detail::require_same_size(q, theta0, "lift_dual theta0");
  PolarState s;
  s.x = q;
  s.theta = theta0;
  s.xdot = p;
  s.thetadot.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (params.d[k] > 0.0) {
      if (q[k] == 0.0)
        throw SingularStateError(
            "lift_dual: q_" + std::to_string(k + 1) + " = 0 with d > 0", k);
      s.thetadot[k] = std::sqrt(params.d[k]) / (q[k] * q[k]);
    } else {
      s.thetadot[k] = 0.0;
    }
  }
  auto [zeta, pi] = polar_embed(s);
  return {std::move(zeta), std::move(pi), params.doubled()};
}

namespace detail {

// Cumulative integral of samples f_j >= 0 over a monotone grid, fourth
// order: full Simpson pair-increments on two interleaved chains, seeded by a
// one-time quadratic estimate for t_1. The last interval may be shorter than
// the rest; it gets the general three-point Lagrange increment.
inline std::vector<double> cumulative_simpson(const std::vector<double>& s,
                                              const std::vector<double>& f) {
  const std::size_t m = s.size();
  std::vector<double> t(m, 0.0);
  if (m < 2) return t;
  if (m == 2) {  // trapezoid is all we can do
    t[1] = 0.5 * (s[1] - s[0]) * (f[0] + f[1]);
    return t;
  }
  auto lagrange_increment = [&](std::size_t i0, std::size_t i1,
                                std::size_t i2, double lo, double hi) {
    // integral over [lo, hi] of the quadratic through (s[i0..i2], f[i0..i2]),
    // evaluated in coordinates centered on s[i1] so every term stays O(h)
    // (differencing the antiderivative at the raw grid values loses ~eps/h
    // of each weight and the error random-walks along the chain)
    const double alpha = s[i1] - s[i0];
    const double beta = s[i2] - s[i1];
    const double u0 = lo - s[i1];
    const double u1 = hi - s[i1];
    auto cubic = [](double a2, double a1, double u) {
      return u * u * u / 3.0 + 0.5 * a2 * u * u + a1 * u;
    };
    const double w0 = (cubic(-beta, 0.0, u1) - cubic(-beta, 0.0, u0)) /
                      (alpha * (alpha + beta));
    const double w1 = -(cubic(alpha - beta, -alpha * beta, u1) -
                        cubic(alpha - beta, -alpha * beta, u0)) /
                      (alpha * beta);
    const double w2 = (cubic(alpha, 0.0, u1) - cubic(alpha, 0.0, u0)) /
                      ((alpha + beta) * beta);
    return w0 * f[i0] + w1 * f[i1] + w2 * f[i2];
  };

  t[1] = lagrange_increment(0, 1, 2, s[0], s[1]);
  for (std::size_t j = 2; j < m; ++j)
    t[j] = t[j - 2] + lagrange_increment(j - 2, j - 1, j, s[j - 2], s[j]);
  return t;
}

}  // namespace detail

/// Converts an arclength-parametrized ellipsoid trajectory to Neumann time:
/// t(s) = integral of 1/(kappa R^2) with kappa frozen from the first sample,
/// by cumulative Simpson quadrature over the stored grid. Times must come
/// out strictly increasing.
inline Trajectory reparametrize_time(const Trajectory& traj,
                                     const SystemParams& params) {
  const Eigen::Index n = params.size();
  if (traj.states.empty())
    throw std::invalid_argument("reparametrize_time: empty trajectory");
  const Vec q0 = traj.states.front().head(n);
  const Vec p0 = traj.states.front().tail(n);
  const double kappa = compute_kappa(q0, p0, params);

  std::vector<double> f(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const double r2 =
        traj.states[j].head(n).cwiseQuotient(params.b).squaredNorm();
    if (!(r2 > 0.0))
      throw std::invalid_argument("reparametrize_time: degenerate sample");
    f[j] = 1.0 / (kappa * r2);
  }
  Trajectory out = traj;
  out.times = detail::cumulative_simpson(traj.times, f);
  for (std::size_t j = 1; j < out.times.size(); ++j)
    if (!(out.times[j] > out.times[j - 1]))
      throw std::invalid_argument("reparametrize_time: non-monotone result");
  return out;
}

/// Maps a Jacobi trajectory sample-by-sample through the Gauss map and the
/// time reparametrization; states come out packed as constrained (x, v).
inline Trajectory gauss_map_trajectory(const Trajectory& traj,
                                       const SystemParams& params,
                                       double mu = 0.0) {
  const Eigen::Index n = params.size();
  Trajectory out = reparametrize_time(traj, params);
  out.invariant_samples.clear();
  out.constraint_residuals.clear();
  out.kappa_samples.clear();
  for (std::size_t j = 0; j < out.states.size(); ++j) {
    const SphereState mapped =
        gauss_map(out.states[j].head(n), out.states[j].tail(n), params, mu);
    Vec packed(2 * n);
    packed << mapped.x, tangent_project(mapped.x, mapped.w);
    out.states[j] = packed;
    out.constraint_residuals.push_back(
        neumann_residuals({packed.head(n), packed.tail(n), false}, params));
  }
  return out;
}

}  // namespace nrflow
