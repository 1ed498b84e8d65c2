#pragma once

// Domain types shared by every system: parameter bundle, phase-space states
// on the sphere and on the ellipsoid, constraint residuals, and the tangent
// projection that converts gauged momenta into constrained velocities.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace nrflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Default absolute tolerance for admitting a state onto its constraint
/// surface. The exact flows treat the constraints as exact; numerically we
/// only monitor them.
inline constexpr double kAdmissionTol = 1e-9;

/// Raised when an operation hits a centrifugal singularity x_k = 0 (or
/// q_k = 0) with a nonzero inverse-square constant on that axis.
class SingularStateError : public std::runtime_error {
 public:
  SingularStateError(std::string msg, Eigen::Index index)
      : std::runtime_error(std::move(msg)), index_(index) {}
  Eigen::Index index() const noexcept { return index_; }

 private:
  Eigen::Index index_;
};

/// Frequencies a_k, semi-axis parameters b_k = 1/a_k, sphere radius r, and
/// the centrifugal constants c_k (sphere side) / d_k (ellipsoid side).
struct SystemParams {
  Vec a;     // strictly increasing, all positive
  Vec b;     // b_k = 1/a_k
  double r = 1.0;
  Vec c;     // nonnegative; zero vector when absent
  Vec d;     // nonnegative; zero vector when absent

  Eigen::Index size() const noexcept { return a.size(); }

  /// Parameter bundle for the 2N system with duplicated frequencies
  /// (a_{k+N} = a_k, b_{k+N} = b_k). Deliberately skips validation: the
  /// duplicated list is degenerate by construction and only the dynamics
  /// and the pair-combined invariant evaluations may consume it.
  SystemParams doubled() const {
    SystemParams out;
    const Eigen::Index n = size();
    out.a.resize(2 * n);
    out.b.resize(2 * n);
    out.a << a, a;
    out.b << b, b;
    out.r = r;
    out.c = Vec::Zero(2 * n);
    out.d = Vec::Zero(2 * n);
    return out;
  }
};

/// Point on (or near) the sphere x^2 = r^2 together with its momentum
/// companion. `gauged == false` means w is a velocity v with x.v = 0;
/// `gauged == true` means w is the unconstrained momentum y of the
/// first-class picture.
struct SphereState {
  Vec x;
  Vec w;
  bool gauged = false;
};

/// Point on the ellipsoid sum q^2/b = 1 with momentum p tangent to it
/// (sum q p / b = 0); evolution parameter is the arclength-like s.
struct EllipsoidState {
  Vec q;
  Vec p;
};

/// Polar coordinates (x_k, theta_k) of a 2N embedding z_k = x_k cos theta_k,
/// z_{k+N} = x_k sin theta_k, together with their derivatives.
struct PolarState {
  Vec x;
  Vec theta;
  Vec xdot;
  Vec thetadot;

  Eigen::Index size() const noexcept { return x.size(); }
};

namespace detail {

inline void require_same_size(const Vec& u, const Vec& v, const char* what) {
  if (u.size() != v.size())
    throw std::invalid_argument(std::string(what) + ": size mismatch (" +
                                std::to_string(u.size()) + " vs " +
                                std::to_string(v.size()) + ")");
}

inline void require_params_size(Eigen::Index n, const SystemParams& params,
                                const char* what) {
  if (params.size() != n)
    throw std::invalid_argument(std::string(what) + ": state has " +
                                std::to_string(n) + " components but params have " +
                                std::to_string(params.size()));
}

}  // namespace detail

/// Raw, not-yet-validated parameter input. Either a or b may be supplied;
/// the other is derived. c and d default to zero vectors.
struct RawParams {
  Vec a;  // may be empty if b given
  Vec b;  // may be empty if a given
  double r = 1.0;
  Vec c;  // may be empty
  Vec d;  // may be empty
};

/// Validates the standing assumptions (0 < a_1 < ... < a_N, r != 0,
/// c_k >= 0, d_k >= 0) and derives whichever of a/b is missing.
/// `allow_degenerate` admits N = 1 for integrator self-tests only.
inline SystemParams validate_params(const RawParams& raw,
                                    bool allow_degenerate = false) {
  SystemParams p;
  if (raw.a.size() == 0 && raw.b.size() == 0)
    throw std::invalid_argument("params: neither a nor b supplied");
  if (raw.a.size() > 0) {
    p.a = raw.a;
    if (raw.b.size() > 0) {
      detail::require_same_size(raw.a, raw.b, "params a/b");
      for (Eigen::Index k = 0; k < raw.a.size(); ++k)
        if (std::abs(raw.a[k] * raw.b[k] - 1.0) > 1e-12)
          throw std::invalid_argument(
              "params: b_k must equal 1/a_k (mismatch at index " +
              std::to_string(k) + ")");
      p.b = raw.b;
    } else {
      p.b = raw.a.cwiseInverse();
    }
  } else {
    p.b = raw.b;
    p.a = raw.b.cwiseInverse();
  }

  const Eigen::Index n = p.a.size();
  if (n < 2 && !allow_degenerate)
    throw std::invalid_argument("params: need at least 2 frequencies, got " +
                                std::to_string(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(p.a[k] > 0.0))
      throw std::invalid_argument("params: a_" + std::to_string(k + 1) +
                                  " must be positive");
    if (k > 0) {
      if (p.a[k] == p.a[k - 1])
        throw std::invalid_argument("params: duplicate frequency a_" +
                                    std::to_string(k) + " = a_" +
                                    std::to_string(k + 1));
      if (p.a[k] < p.a[k - 1])
        throw std::invalid_argument("params: a not strictly increasing");
    }
  }

  if (raw.r == 0.0) throw std::invalid_argument("params: r must be nonzero");
  p.r = raw.r;

  auto take_nonneg = [n](const Vec& src, const char* name) {
    if (src.size() == 0) return Vec(Vec::Zero(n));
    if (src.size() != n)
      throw std::invalid_argument(std::string("params: ") + name +
                                  " must have the same length as a");
    for (Eigen::Index k = 0; k < src.size(); ++k)
      if (src[k] < 0.0)
        throw std::invalid_argument(std::string("params: ") + name + "_" +
                                    std::to_string(k + 1) +
                                    " must be nonnegative");
    return Vec(src);
  };
  p.c = take_nonneg(raw.c, "c");
  p.d = take_nonneg(raw.d, "d");
  return p;
}

/// Idempotent re-validation of an already validated bundle.
inline SystemParams validate_params(const SystemParams& p,
                                    bool allow_degenerate = false) {
  RawParams raw{p.a, p.b, p.r, p.c, p.d};
  return validate_params(raw, allow_degenerate);
}

/// Constraint residuals of the Neumann/Rosochatius picture:
/// (sum x^2 - r^2, sum x.w). For gauged states the second constraint holds
/// identically after the change of variables, so it is reported as exact 0.
inline std::pair<double, double> neumann_residuals(const SphereState& s,
                                                   const SystemParams& params) {
  detail::require_same_size(s.x, s.w, "sphere state");
  const double omega1 = s.x.squaredNorm() - params.r * params.r;
  const double omega2 = s.gauged ? 0.0 : s.x.dot(s.w);
  return {omega1, omega2};
}

/// Constraint residuals of the Jacobi/dual picture:
/// (sum q^2/b - 1, sum q p / b).
inline std::pair<double, double> jacobi_residuals(const EllipsoidState& s,
                                                  const SystemParams& params) {
  detail::require_same_size(s.q, s.p, "ellipsoid state");
  const Vec qb = s.q.cwiseQuotient(params.b);
  return {qb.dot(s.q) - 1.0, qb.dot(s.p)};
}

inline bool is_admitted(const SphereState& s, const SystemParams& params,
                        double tol = kAdmissionTol) {
  auto [r1, r2] = neumann_residuals(s, params);
  return std::abs(r1) <= tol && std::abs(r2) <= tol;
}

inline bool is_admitted(const EllipsoidState& s, const SystemParams& params,
                        double tol = kAdmissionTol) {
  auto [r1, r2] = jacobi_residuals(s, params);
  return std::abs(r1) <= tol && std::abs(r2) <= tol;
}

/// v = y - x (x.y)/x^2: removes the radial component, so x.v = 0 to
/// rounding. Idempotent, and invariant under y -> y + lambda x.
inline Vec tangent_project(const Vec& x, const Vec& y) {
  detail::require_same_size(x, y, "tangent_project");
  const double x2 = x.squaredNorm();
  if (x2 == 0.0)
    throw std::invalid_argument("tangent_project: zero position vector");
  return y - x * (x.dot(y) / x2);
}

/// Constrained velocity of a sphere state in either representation.
inline Vec sphere_velocity(const SphereState& s) {
  return s.gauged ? tangent_project(s.x, s.w) : s.w;
}

/// (x, v) -> (x, y) needs a gauge choice; lambda = 0 makes y = v.
inline SphereState to_gauged(const SphereState& s, double lambda = 0.0) {
  if (s.gauged) return s;
  return SphereState{s.x, s.w + lambda * s.x, true};
}

inline SphereState to_constrained(const SphereState& s) {
  if (!s.gauged) return s;
  return SphereState{s.x, tangent_project(s.x, s.w), false};
}

}  // namespace nrflow
