#pragma once

// Second-order right-hand sides for the five systems, with the Lagrange
// multiplier eliminated on the fly from the instantaneous state. The
// eta-multiplier vanishes identically on tangent states and is never
// represented.

#include "nrflow/model.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace nrflow {

enum class SystemTag { Neumann, Jacobi, Rosochatius, DualRosochatius, Polar2N };

inline const char* tag_name(SystemTag tag) {
  switch (tag) {
    case SystemTag::Neumann: return "neumann";
    case SystemTag::Jacobi: return "jacobi";
    case SystemTag::Rosochatius: return "rosochatius";
    case SystemTag::DualRosochatius: return "dual";
    case SystemTag::Polar2N: return "polar2n";
  }
  throw std::logic_error("unknown system tag");
}

inline SystemTag tag_from_name(const std::string& name) {
  if (name == "neumann") return SystemTag::Neumann;
  if (name == "jacobi") return SystemTag::Jacobi;
  if (name == "rosochatius") return SystemTag::Rosochatius;
  if (name == "dual") return SystemTag::DualRosochatius;
  if (name == "polar2n") return SystemTag::Polar2N;
  throw std::invalid_argument("unknown system \"" + name + "\"");
}

/// Acceleration together with the eliminated multiplier xi.
struct AccelResult {
  Vec accel;
  double multiplier = 0.0;
};

namespace detail {

// Shared sphere-side kernel. with_centrifugal gates the c_k terms so that
// the c = 0 evaluation runs the exact same operation sequence as Neumann.
inline AccelResult sphere_accel(const Vec& x, const Vec& xdot,
                                const SystemParams& params,
                                bool with_centrifugal) {
  require_same_size(x, xdot, "sphere accel");
  const Eigen::Index n = x.size();
  require_params_size(n, params, "sphere accel");
  const double x2 = x.squaredNorm();
  if (x2 == 0.0) throw std::invalid_argument("sphere accel: zero position");

  double bracket = 0.0;  // sum (xdot^2 - a x^2), plus sum c/x^2 when gated in
  for (Eigen::Index k = 0; k < n; ++k)
    bracket += xdot[k] * xdot[k] - params.a[k] * x[k] * x[k];
  if (with_centrifugal) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (params.c[k] > 0.0) {
        if (x[k] == 0.0)
          throw SingularStateError(
              "rosochatius: x_" + std::to_string(k + 1) +
                  " = 0 with c_" + std::to_string(k + 1) + " > 0",
              k);
        bracket += params.c[k] / (x[k] * x[k]);
      }
    }
  }

  const double xi = bracket / x2;
  AccelResult out;
  out.multiplier = xi;
  out.accel.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = -params.a[k] * x[k] - x[k] * xi;
    if (with_centrifugal && params.c[k] > 0.0)
      acc += params.c[k] / (x[k] * x[k] * x[k]);
    out.accel[k] = acc;
  }
  return out;
}

// Shared ellipsoid-side kernel; with_centrifugal gates the d_k terms.
inline AccelResult ellipsoid_accel(const Vec& q, const Vec& qprime,
                                   const SystemParams& params,
                                   bool with_centrifugal) {
  require_same_size(q, qprime, "ellipsoid accel");
  const Eigen::Index n = q.size();
  require_params_size(n, params, "ellipsoid accel");

  double r2 = 0.0;  // R^2 = sum q^2/b^2
  for (Eigen::Index k = 0; k < n; ++k) {
    const double g = q[k] / params.b[k];
    r2 += g * g;
  }
  if (r2 == 0.0) throw std::invalid_argument("ellipsoid accel: R^2 = 0");

  double sum = 0.0;  // sum (qprime^2 [+ d/q^2]) / b
  for (Eigen::Index k = 0; k < n; ++k) {
    double term = qprime[k] * qprime[k];
    if (with_centrifugal && params.d[k] > 0.0) {
      if (q[k] == 0.0)
        throw SingularStateError(
            "dual: q_" + std::to_string(k + 1) + " = 0 with d_" +
                std::to_string(k + 1) + " > 0",
            k);
      term += params.d[k] / (q[k] * q[k]);
    }
    sum += term / params.b[k];
  }

  const double xi = sum / r2;
  AccelResult out;
  out.multiplier = xi;
  out.accel.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = -xi * params.a[k] * q[k];
    if (with_centrifugal && params.d[k] > 0.0)
      acc += params.d[k] / (q[k] * q[k] * q[k]);
    out.accel[k] = acc;
  }
  return out;
}

}  // namespace detail

/// xdd_k = -a_k x_k - (x_k/x^2) sum_l (xdot_l^2 - a_l x_l^2).
/// The denominator is the live x^2, so constraint drift does not leak into
/// the force; multiplier is the eliminated xi.
inline AccelResult neumann_accel(const Vec& x, const Vec& xdot,
                                 const SystemParams& params) {
  return detail::sphere_accel(x, xdot, params, false);
}

/// Neumann plus the inverse-square barrier: extra c_k/x_k^3 on each axis and
/// + sum c_k/x_k^2 inside the multiplier bracket.
inline AccelResult rosochatius_accel(const Vec& x, const Vec& xdot,
                                     const SystemParams& params) {
  return detail::sphere_accel(x, xdot, params, true);
}

/// q_k'' = -(sum p^2/b) / R^2 * q_k/b_k with R^2 = sum q^2/b^2.
inline AccelResult jacobi_accel(const Vec& q, const Vec& qprime,
                                const SystemParams& params) {
  return detail::ellipsoid_accel(q, qprime, params, false);
}

/// q_k'' = d_k/q_k^3 - (a_k q_k / R^2) sum_j [(q_j')^2 + d_j/q_j^2] / b_j.
inline AccelResult dual_rosochatius_accel(const Vec& q, const Vec& qprime,
                                          const SystemParams& params) {
  return detail::ellipsoid_accel(q, qprime, params, true);
}

/// Geodesic equations in the polar variables (q_k, theta_k):
///   theta_k'' = -2 q_k' theta_k' / q_k
///   q_k''     = q_k theta_k'^2 - (a_k q_k / R^2) sum_j [(q_j')^2 + q_j^2 theta_j'^2]/b_j
inline std::pair<Vec, Vec> polar_geodesic_accel(const PolarState& s,
                                                const SystemParams& params) {
  const Eigen::Index n = s.size();
  detail::require_params_size(n, params, "polar accel");
  double r2 = 0.0;
  double sum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (s.x[k] == 0.0)
      throw SingularStateError(
          "polar: q_" + std::to_string(k + 1) + " = 0 (angle undefined)", k);
    const double g = s.x[k] / params.b[k];
    r2 += g * g;
    sum += (s.xdot[k] * s.xdot[k] +
            s.x[k] * s.x[k] * s.thetadot[k] * s.thetadot[k]) /
           params.b[k];
  }
  const double xi = sum / r2;
  Vec qacc(n), thacc(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    qacc[k] = s.x[k] * s.thetadot[k] * s.thetadot[k] - xi * params.a[k] * s.x[k];
    thacc[k] = -2.0 * s.xdot[k] * s.thetadot[k] / s.x[k];
  }
  return {qacc, thacc};
}

/// Packed first-order state layout: [positions; velocities]. For Polar2N the
/// position block is (q_1..q_N, theta_1..theta_N), 4N components total.
inline Eigen::Index packed_dimension(SystemTag tag, Eigen::Index n) {
  return tag == SystemTag::Polar2N ? 4 * n : 2 * n;
}

/// Evaluates the first-order vector field d/dt [pos; vel] = [vel; accel].
inline Vec as_first_order(SystemTag tag, const Vec& state,
                          const SystemParams& params) {
  const Eigen::Index n = params.size();
  if (state.size() != packed_dimension(tag, n))
    throw std::invalid_argument("as_first_order: state has wrong dimension");

  Vec out(state.size());
  if (tag == SystemTag::Polar2N) {
    PolarState s{state.segment(0, n), state.segment(n, n),
                 state.segment(2 * n, n), state.segment(3 * n, n)};
    auto [qacc, thacc] = polar_geodesic_accel(s, params);
    out << s.xdot, s.thetadot, qacc, thacc;
    return out;
  }

  const Vec pos = state.head(n);
  const Vec vel = state.tail(n);
  AccelResult res;
  switch (tag) {
    case SystemTag::Neumann: res = neumann_accel(pos, vel, params); break;
    case SystemTag::Jacobi: res = jacobi_accel(pos, vel, params); break;
    case SystemTag::Rosochatius:
      res = rosochatius_accel(pos, vel, params);
      break;
    case SystemTag::DualRosochatius:
      res = dual_rosochatius_accel(pos, vel, params);
      break;
    default: throw std::logic_error("unreachable");
  }
  out << vel, res.accel;
  return out;
}

using Field = std::function<Vec(const Vec&)>;

inline Field first_order_field(SystemTag tag, const SystemParams& params) {
  return [tag, params](const Vec& state) {
    return as_first_order(tag, state, params);
  };
}

}  // namespace nrflow
