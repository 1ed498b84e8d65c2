#pragma once

// Conserved-quantity families F, G, H, I with their analytic gradients,
// per-system Hamiltonians, and the algebraic identities tying the sphere-side
// and ellipsoid-side families together under the Gauss map.

#include "nrflow/dynamics.hpp"
#include "nrflow/model.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace nrflow {

enum class FamilyTag { F, G, H, I };

inline const char* family_name(FamilyTag f) {
  switch (f) {
    case FamilyTag::F: return "F";
    case FamilyTag::G: return "G";
    case FamilyTag::H: return "H";
    case FamilyTag::I: return "I";
  }
  return "?";
}

/// One value per index k plus the family's associated Hamiltonian.
struct InvariantVector {
  Vec values;
  FamilyTag family = FamilyTag::F;
  double hamiltonian = 0.0;
};

namespace detail {

// Sphere-side family kernel: F when with_centrifugal is false, H otherwise.
// H_kl^2 = J_kl^2 + c_k x_l^2/x_k^2 + c_l x_k^2/x_l^2; the c terms are gated
// so the c = 0 path evaluates F with an identical operation sequence.
inline InvariantVector sphere_family(const Vec& x, const Vec& y,
                                     const SystemParams& params,
                                     bool with_centrifugal) {
  require_same_size(x, y, "sphere family");
  const Eigen::Index n = x.size();
  require_params_size(n, params, "sphere family");
  const double x2 = x.squaredNorm();
  if (x2 == 0.0) throw std::invalid_argument("sphere family: zero position");

  InvariantVector out;
  out.family = with_centrifugal ? FamilyTag::H : FamilyTag::F;
  out.values.resize(n);
  double ham = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      const double J = x[k] * y[l] - x[l] * y[k];
      double pair2 = J * J;
      if (with_centrifugal) {
        if (params.c[k] > 0.0) {
          if (x[k] == 0.0)
            throw SingularStateError("family H: x_" + std::to_string(k + 1) +
                                         " = 0 with c > 0",
                                     k);
          pair2 += params.c[k] * x[l] * x[l] / (x[k] * x[k]);
        }
        if (params.c[l] > 0.0) {
          if (x[l] == 0.0)
            throw SingularStateError("family H: x_" + std::to_string(l + 1) +
                                         " = 0 with c > 0",
                                     l);
          pair2 += params.c[l] * x[k] * x[k] / (x[l] * x[l]);
        }
      }
      s += pair2 / (params.a[k] - params.a[l]);
    }
    out.values[k] = x[k] * x[k] + s / x2;
    ham += params.a[k] * out.values[k];
  }
  out.hamiltonian = 0.5 * ham;
  return out;
}

// Ellipsoid-side family kernel: G / I with gated d terms.
inline InvariantVector ellipsoid_family(const Vec& q, const Vec& p,
                                        const SystemParams& params,
                                        bool with_centrifugal) {
  require_same_size(q, p, "ellipsoid family");
  const Eigen::Index n = q.size();
  require_params_size(n, params, "ellipsoid family");

  InvariantVector out;
  out.family = with_centrifugal ? FamilyTag::I : FamilyTag::G;
  out.values.resize(n);
  double ham = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      const double K = q[k] * p[l] - q[l] * p[k];
      double pair2 = K * K;
      if (with_centrifugal) {
        if (params.d[k] > 0.0) {
          if (q[k] == 0.0)
            throw SingularStateError("family I: q_" + std::to_string(k + 1) +
                                         " = 0 with d > 0",
                                     k);
          pair2 += params.d[k] * q[l] * q[l] / (q[k] * q[k]);
        }
        if (params.d[l] > 0.0) {
          if (q[l] == 0.0)
            throw SingularStateError("family I: q_" + std::to_string(l + 1) +
                                         " = 0 with d > 0",
                                     l);
          pair2 += params.d[l] * q[k] * q[k] / (q[l] * q[l]);
        }
      }
      s += pair2 / (params.b[k] - params.b[l]);
    }
    double value = p[k] * p[k] + s;
    if (with_centrifugal && params.d[k] > 0.0)
      value += params.d[k] / (q[k] * q[k]);
    out.values[k] = value;
    ham += value;
  }
  out.hamiltonian = 0.5 * ham;
  return out;
}

}  // namespace detail

/// Uhlenbeck integrals F_k = x_k^2 + (1/x^2) sum_{l!=k} J_kl^2/(a_k - a_l),
/// J_kl = x_k y_l - x_l y_k. Gauge invariant; sum_k F_k = x^2. The attached
/// Hamiltonian is (1/2) sum a_k F_k.
inline InvariantVector uhlenbeck_F(const Vec& x, const Vec& y,
                                   const SystemParams& params) {
  return detail::sphere_family(x, y, params, false);
}

/// Ellipsoid-side integrals G_k = p_k^2 + sum_{l!=k} K_kl^2/(b_k - b_l),
/// K_kl = q_k p_l - q_l p_k. On the constraint surface sum G_k/b_k = 0;
/// the attached Hamiltonian is (1/2) sum G_k = p^2/2.
inline InvariantVector uhlenbeck_G(const Vec& q, const Vec& p,
                                   const SystemParams& params) {
  return detail::ellipsoid_family(q, p, params, false);
}

/// Rosochatius integrals H_k: as F_k with J_kl^2 replaced by
/// H_kl^2 = J_kl^2 + c_k x_l^2/x_k^2 + c_l x_k^2/x_l^2. Reduces to F_k
/// exactly when c = 0.
inline InvariantVector rosochatius_H(const Vec& x, const Vec& y,
                                     const SystemParams& params) {
  return detail::sphere_family(x, y, params, true);
}

/// Dual-system integrals I_k = p_k^2 + d_k/q_k^2 + sum_{l!=k} I_kl^2/(b_k-b_l)
/// with I_kl^2 = K_kl^2 + d_k q_l^2/q_k^2 + d_l q_k^2/q_l^2. Reduces to G_k
/// exactly when d = 0.
inline InvariantVector dual_I(const Vec& q, const Vec& p,
                              const SystemParams& params) {
  return detail::ellipsoid_family(q, p, params, true);
}

// ---------------------------------------------------------------------------
// Analytic gradients, ordered [d/dpos; d/dmom] over the packed 2N phase point.

namespace detail {

inline Vec sphere_family_gradient(const Vec& x, const Vec& y,
                                  const SystemParams& params, Eigen::Index k,
                                  bool with_centrifugal) {
  const Eigen::Index n = x.size();
  const double x2 = x.squaredNorm();
  Vec grad = Vec::Zero(2 * n);

  // numerator sum S_k and its partials
  double S = 0.0;
  double dS_dxk = 0.0;
  double dS_dyk = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    if (l == k) continue;
    const double inv = 1.0 / (params.a[k] - params.a[l]);
    const double J = x[k] * y[l] - x[l] * y[k];
    double pair2 = J * J;
    double dpair_dxk = 2.0 * J * y[l];
    double dpair_dxl = -2.0 * J * y[k];
    if (with_centrifugal) {
      if (params.c[k] > 0.0) {
        pair2 += params.c[k] * x[l] * x[l] / (x[k] * x[k]);
        dpair_dxk += -2.0 * params.c[k] * x[l] * x[l] / (x[k] * x[k] * x[k]);
        dpair_dxl += 2.0 * params.c[k] * x[l] / (x[k] * x[k]);
      }
      if (params.c[l] > 0.0) {
        pair2 += params.c[l] * x[k] * x[k] / (x[l] * x[l]);
        dpair_dxk += 2.0 * params.c[l] * x[k] / (x[l] * x[l]);
        dpair_dxl += -2.0 * params.c[l] * x[k] * x[k] / (x[l] * x[l] * x[l]);
      }
    }
    S += pair2 * inv;
    dS_dxk += dpair_dxk * inv;
    dS_dyk += -2.0 * J * x[l] * inv;
    grad[l] += dpair_dxl * inv / x2;            // d/dx_l, l != k
    grad[n + l] += 2.0 * J * x[k] * inv / x2;   // d/dy_l, l != k
  }

  grad[k] = 2.0 * x[k] + dS_dxk / x2;
  grad[n + k] = dS_dyk / x2;
  // d(1/x^2)/dx_m = -2 x_m / x^4 acts on every position component
  for (Eigen::Index m = 0; m < n; ++m) grad[m] += -2.0 * x[m] * S / (x2 * x2);
  return grad;
}

inline Vec ellipsoid_family_gradient(const Vec& q, const Vec& p,
                                     const SystemParams& params,
                                     Eigen::Index k, bool with_centrifugal) {
  const Eigen::Index n = q.size();
  Vec grad = Vec::Zero(2 * n);

  double dq_k = 0.0;
  double dp_k = 2.0 * p[k];
  for (Eigen::Index l = 0; l < n; ++l) {
    if (l == k) continue;
    const double inv = 1.0 / (params.b[k] - params.b[l]);
    const double K = q[k] * p[l] - q[l] * p[k];
    double dpair_dqk = 2.0 * K * p[l];
    double dpair_dql = -2.0 * K * p[k];
    if (with_centrifugal) {
      if (params.d[k] > 0.0) {
        dpair_dqk += -2.0 * params.d[k] * q[l] * q[l] / (q[k] * q[k] * q[k]);
        dpair_dql += 2.0 * params.d[k] * q[l] / (q[k] * q[k]);
      }
      if (params.d[l] > 0.0) {
        dpair_dqk += 2.0 * params.d[l] * q[k] / (q[l] * q[l]);
        dpair_dql += -2.0 * params.d[l] * q[k] * q[k] / (q[l] * q[l] * q[l]);
      }
    }
    dq_k += dpair_dqk * inv;
    dp_k += -2.0 * K * q[l] * inv;
    grad[l] += dpair_dql * inv;
    grad[n + l] += 2.0 * K * q[k] * inv;
  }
  if (with_centrifugal && params.d[k] > 0.0)
    dq_k += -2.0 * params.d[k] / (q[k] * q[k] * q[k]);

  grad[k] += dq_k;
  grad[n + k] = dp_k;
  return grad;
}

}  // namespace detail

inline Vec grad_uhlenbeck_F(const Vec& x, const Vec& y,
                            const SystemParams& params, Eigen::Index k) {
  return detail::sphere_family_gradient(x, y, params, k, false);
}

inline Vec grad_uhlenbeck_G(const Vec& q, const Vec& p,
                            const SystemParams& params, Eigen::Index k) {
  return detail::ellipsoid_family_gradient(q, p, params, k, false);
}

inline Vec grad_rosochatius_H(const Vec& x, const Vec& y,
                              const SystemParams& params, Eigen::Index k) {
  return detail::sphere_family_gradient(x, y, params, k, true);
}

inline Vec grad_dual_I(const Vec& q, const Vec& p, const SystemParams& params,
                       Eigen::Index k) {
  return detail::ellipsoid_family_gradient(q, p, params, k, true);
}

// ---------------------------------------------------------------------------
// Hamiltonians

/// Gauge-invariant Neumann energy: (1/(2x^2)) sum_{k>l} J_kl^2
/// + (1/2) sum a_k x_k^2 for gauged states, or the plain kinetic-plus-
/// potential form for constrained (x, v) states.
inline double neumann_hamiltonian(const SphereState& s,
                                  const SystemParams& params) {
  const Eigen::Index n = s.x.size();
  double pot = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) pot += params.a[k] * s.x[k] * s.x[k];
  if (!s.gauged) return 0.5 * (s.w.squaredNorm() + pot);
  const double x2 = s.x.squaredNorm();
  double jsum = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < k; ++l) {
      const double J = s.x[k] * s.w[l] - s.x[l] * s.w[k];
      jsum += J * J;
    }
  return 0.5 * jsum / x2 + 0.5 * pot;
}

inline double jacobi_hamiltonian(const EllipsoidState& s) {
  return 0.5 * s.p.squaredNorm();
}

/// (1/2) sum (xdot^2 + c/x^2 + a x^2). Accepts either representation; the
/// gauged momentum is tangent-projected first.
inline double rosochatius_hamiltonian(const SphereState& s,
                                      const SystemParams& params) {
  const Vec v = sphere_velocity(s);
  double h = v.squaredNorm();
  for (Eigen::Index k = 0; k < s.x.size(); ++k) {
    h += params.a[k] * s.x[k] * s.x[k];
    if (params.c[k] > 0.0) {
      if (s.x[k] == 0.0)
        throw SingularStateError("hamiltonian: x_" + std::to_string(k + 1) +
                                     " = 0 with c > 0",
                                 k);
      h += params.c[k] / (s.x[k] * s.x[k]);
    }
  }
  return 0.5 * h;
}

inline double dual_hamiltonian(const EllipsoidState& s,
                               const SystemParams& params) {
  double h = s.p.squaredNorm();
  for (Eigen::Index k = 0; k < s.q.size(); ++k) {
    if (params.d[k] > 0.0) {
      if (s.q[k] == 0.0)
        throw SingularStateError("hamiltonian: q_" + std::to_string(k + 1) +
                                     " = 0 with d > 0",
                                 k);
      h += params.d[k] / (s.q[k] * s.q[k]);
    }
  }
  return 0.5 * h;
}

/// Kinetic energy of the polar geodesic flow: (1/2) sum (q'^2 + q^2 theta'^2).
inline double polar_geodesic_hamiltonian(const PolarState& s) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    h += s.xdot[k] * s.xdot[k] +
         s.x[k] * s.x[k] * s.thetadot[k] * s.thetadot[k];
  return 0.5 * h;
}

/// 2N Neumann energy in polar variables:
/// (1/2) sum (xdot^2 + x^2 thetadot^2 + a x^2).
inline double polar_neumann_hamiltonian(const PolarState& s,
                                        const SystemParams& params) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    h += s.xdot[k] * s.xdot[k] +
         s.x[k] * s.x[k] * s.thetadot[k] * s.thetadot[k] +
         params.a[k] * s.x[k] * s.x[k];
  return 0.5 * h;
}

/// Energy of the tagged system evaluated on a packed [pos; vel] state.
inline double hamiltonian(SystemTag tag, const Vec& state,
                          const SystemParams& params) {
  const Eigen::Index n = params.size();
  switch (tag) {
    case SystemTag::Neumann:
      return neumann_hamiltonian({state.head(n), state.tail(n), false}, params);
    case SystemTag::Jacobi:
      return jacobi_hamiltonian({state.head(n), state.tail(n)});
    case SystemTag::Rosochatius:
      return rosochatius_hamiltonian({state.head(n), state.tail(n), false},
                                     params);
    case SystemTag::DualRosochatius:
      return dual_hamiltonian({state.head(n), state.tail(n)}, params);
    case SystemTag::Polar2N:
      return polar_geodesic_hamiltonian({state.segment(0, n),
                                         state.segment(n, n),
                                         state.segment(2 * n, n),
                                         state.segment(3 * n, n)});
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// Degenerate 2N lifts. With duplicated frequencies the individual F_k of the
// 2N system are singular; only the pair sum F_k + F_{k+N} is defined, with
// the k <-> k+N terms cancelled and partner terms combined over the shared
// denominator a_k - a_l.

/// F_k + F_{k+N} of the 2N Neumann system with a_{k+N} = a_k, evaluated in
/// the cancellation-complete form. params carries the N-dimensional a.
inline Vec degenerate_pair_F(const Vec& z, const Vec& w,
                             const SystemParams& params) {
  const Eigen::Index n = params.size();
  if (z.size() != 2 * n || w.size() != 2 * n)
    throw std::invalid_argument("degenerate_pair_F: need 2N vectors");
  const double z2 = z.squaredNorm();
  auto J = [&](Eigen::Index i, Eigen::Index j) {
    return z[i] * w[j] - z[j] * w[i];
  };
  Vec out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      const double num = J(k, l) * J(k, l) + J(k, l + n) * J(k, l + n) +
                         J(k + n, l) * J(k + n, l) +
                         J(k + n, l + n) * J(k + n, l + n);
      s += num / (params.a[k] - params.a[l]);
    }
    out[k] = z[k] * z[k] + z[k + n] * z[k + n] + s / z2;
  }
  return out;
}

/// G_k + G_{k+N} of the 2N Jacobi system with b_{k+N} = b_k, pair-combined.
inline Vec degenerate_pair_G(const Vec& zeta, const Vec& pi,
                             const SystemParams& params) {
  const Eigen::Index n = params.size();
  if (zeta.size() != 2 * n || pi.size() != 2 * n)
    throw std::invalid_argument("degenerate_pair_G: need 2N vectors");
  auto K = [&](Eigen::Index i, Eigen::Index j) {
    return zeta[i] * pi[j] - zeta[j] * pi[i];
  };
  Vec out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == k) continue;
      const double num = K(k, l) * K(k, l) + K(k, l + n) * K(k, l + n) +
                         K(k + n, l) * K(k + n, l) +
                         K(k + n, l + n) * K(k + n, l + n);
      s += num / (params.b[k] - params.b[l]);
    }
    out[k] = pi[k] * pi[k] + pi[k + n] * pi[k + n] + s;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-map identities between the two families.

struct IdentityResidual {
  std::string name;
  double value = 0.0;
  // informational residuals are diagnostics, not correctness gates
  bool informational = false;
};

/// Residuals of the identities satisfied by Gauss-mapped data: the mapped
/// sphere-side family obeys F_k = -(r^2 kappa^2/b_k^2) G_k, hence
/// sum b_k F_k = 0 and sum b_k^2 F_k = -r^2 kappa^2 |p|^2, and the gauged
/// momenta lie on the manifold sum y^2/a = r^2(1 + mu^2/R^2). Two variant
/// normalizations of the weighted sums (against r^2/R^2 and against 0) are
/// also computed; they do not vanish and are reported as informational
/// diagnostics only.
inline std::vector<IdentityResidual> identity_residuals(
    const EllipsoidState& src, const SphereState& mapped,
    const SystemParams& params, double mu) {
  if (!mapped.gauged)
    throw std::invalid_argument("identity_residuals: mapped state must carry "
                                "the gauged momentum y");
  const Eigen::Index n = params.size();
  const double r = params.r;
  const double R2 = (src.q.cwiseQuotient(params.b)).squaredNorm();
  double pb = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    pb += src.p[k] * src.p[k] / params.b[k];
  const double kappa2 = 1.0 / (R2 * pb);
  const double p2 = src.p.squaredNorm();

  const InvariantVector F = uhlenbeck_F(mapped.x, mapped.w, params);
  const InvariantVector G = uhlenbeck_G(src.q, src.p, params);

  double map_max = 0.0;
  double sum_bF = 0.0, sum_b2F = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double predicted =
        -(r * r * kappa2 / (params.b[k] * params.b[k])) * G.values[k];
    map_max = std::max(map_max, std::abs(F.values[k] - predicted));
    sum_bF += params.b[k] * F.values[k];
    sum_b2F += params.b[k] * params.b[k] * F.values[k];
  }

  double y2a = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    y2a += mapped.w[k] * mapped.w[k] / params.a[k];

  std::vector<IdentityResidual> out;
  out.push_back({"family_map_F_vs_G", map_max, false});
  out.push_back({"weighted_sum_bF", std::abs(sum_bF), false});
  out.push_back(
      {"weighted_sum_b2F", std::abs(sum_b2F + r * r * kappa2 * p2), false});
  out.push_back({"gauge_manifold_y2_over_a",
                 std::abs(y2a - r * r * (1.0 + mu * mu / R2)), false});
  out.push_back(
      {"sphere_family_sum", std::abs(F.values.sum() - mapped.x.squaredNorm()),
       false});
  out.push_back(
      {"ellipsoid_family_sum",
       std::abs((G.values.cwiseQuotient(params.b)).sum()), false});
  out.push_back(
      {"variant_sum_bF_vs_r2_over_R2", std::abs(sum_bF - r * r / R2), true});
  out.push_back({"variant_sum_b2F_vs_zero", std::abs(sum_b2F), true});
  return out;
}

}  // namespace nrflow
