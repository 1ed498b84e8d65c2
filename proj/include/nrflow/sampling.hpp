#pragma once

// Seeded, platform-stable random phase points on the constraint manifolds.
// The generator is hand-rolled (splitmix64 + Box-Muller) because the
// distributions in <random> are implementation-defined, which would break
// reproducibility of outputs across standard libraries.

#include "nrflow/model.hpp"

#include <cmath>
#include <cstdint>

namespace nrflow {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Standard normal via Box-Muller (cached second value).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    have_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

  Vec normal_vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index k = 0; k < n; ++k) v[k] = normal();
    return v;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

struct SampleOptions {
  // Rejection threshold on |x_k| relative to the per-axis scale (r on the
  // sphere, sqrt(b_k) on the ellipsoid); keeps barrier terms resolvable.
  double min_axis_fraction = 0.0;
  bool positive_orthant = false;
  // Momentum magnitude after tangent projection; <= 0 leaves it unscaled.
  double speed = 1.0;
};

/// Uniform position on the sphere |x| = r via a normalized Gaussian.
inline Vec random_sphere_position(const SystemParams& params, Rng& rng,
                                  const SampleOptions& opt = {}) {
  const Eigen::Index n = params.size();
  for (;;) {
    Vec g = rng.normal_vector(n);
    const double norm = g.norm();
    if (norm == 0.0) continue;
    Vec x = (std::abs(params.r) / norm) * g;
    if (opt.positive_orthant) x = x.cwiseAbs();
    if (opt.min_axis_fraction > 0.0 &&
        x.cwiseAbs().minCoeff() < opt.min_axis_fraction * std::abs(params.r))
      continue;
    return x;
  }
}

/// Sphere state with tangent (constrained) velocity.
inline SphereState random_sphere_state(const SystemParams& params, Rng& rng,
                                       const SampleOptions& opt = {}) {
  const Vec x = random_sphere_position(params, rng, opt);
  Vec v = tangent_project(x, rng.normal_vector(params.size()));
  if (opt.speed > 0.0 && v.norm() > 0.0) v *= opt.speed / v.norm();
  return {x, v, false};
}

/// Sphere position with a free (gauged) momentum.
inline SphereState random_gauged_state(const SystemParams& params, Rng& rng,
                                       const SampleOptions& opt = {}) {
  const Vec x = random_sphere_position(params, rng, opt);
  return {x, rng.normal_vector(params.size()), true};
}

/// Point on the ellipsoid via the sphere pullback q_k = sqrt(b_k) u_k.
inline Vec random_ellipsoid_position(const SystemParams& params, Rng& rng,
                                     const SampleOptions& opt = {}) {
  const Eigen::Index n = params.size();
  for (;;) {
    Vec u = rng.normal_vector(n);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    u /= norm;
    if (opt.positive_orthant) u = u.cwiseAbs();
    if (opt.min_axis_fraction > 0.0 &&
        u.cwiseAbs().minCoeff() < opt.min_axis_fraction)
      continue;
    Vec q(n);
    for (Eigen::Index k = 0; k < n; ++k)
      q[k] = std::sqrt(params.b[k]) * u[k];
    return q;
  }
}

/// Ellipsoid state with momentum projected onto the constraint tangent.
inline EllipsoidState random_ellipsoid_state(const SystemParams& params,
                                             Rng& rng,
                                             const SampleOptions& opt = {}) {
  const Vec q = random_ellipsoid_position(params, rng, opt);
  const Vec g = q.cwiseQuotient(params.b);
  Vec p = rng.normal_vector(params.size());
  p -= g * (p.dot(g) / g.squaredNorm());
  if (opt.speed > 0.0 && p.norm() > 0.0) p *= opt.speed / p.norm();
  return {q, p};
}

}  // namespace nrflow
