#pragma once

// Verification suites: each one realizes a family of claims as numeric
// checks with pinned tolerances and reports per-check residuals. Suites are
// pure computations; serialization of the reports lives with the CLI.

#include "nrflow/brackets.hpp"
#include "nrflow/dynamics.hpp"
#include "nrflow/integrate.hpp"
#include "nrflow/invariants.hpp"
#include "nrflow/maps.hpp"
#include "nrflow/model.hpp"
#include "nrflow/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace nrflow {

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool gating = true;  // informational checks never fail a suite
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;

  void add(const std::string& name, double residual, double tolerance,
           bool gating = true) {
    checks.push_back({name, residual, tolerance,
                      std::abs(residual) <= tolerance, gating});
  }

  bool passed() const {
    for (const Check& c : checks)
      if (c.gating && !c.pass) return false;
    return true;
  }
};

struct VerifyOptions {
  std::uint64_t seed = 2024;
  int points = 32;          // sample points for pointwise checks
  int trajectories = 4;     // initial conditions for flow-based checks
  std::optional<double> tol_override;  // replaces every gating tolerance
};

namespace detail {

inline void apply_tol_override(SuiteReport& report,
                               const VerifyOptions& opt) {
  if (!opt.tol_override) return;
  for (Check& c : report.checks) {
    if (!c.gating) continue;
    c.tolerance = *opt.tol_override;
    c.pass = std::abs(c.residual) <= c.tolerance;
  }
}

inline std::vector<Vec> pack_states(const std::vector<SphereState>& states) {
  std::vector<Vec> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    Vec pt(2 * s.x.size());
    pt << s.x, s.w;
    out.push_back(pt);
  }
  return out;
}

inline std::vector<Vec> pack_states(const std::vector<EllipsoidState>& states) {
  std::vector<Vec> out;
  out.reserve(states.size());
  for (const auto& s : states) {
    Vec pt(2 * s.q.size());
    pt << s.q, s.p;
    out.push_back(pt);
  }
  return out;
}

inline std::vector<Vec> sample_gauged_points(const SystemParams& params,
                                             Rng& rng, int count,
                                             double min_axis) {
  std::vector<SphereState> pts;
  SampleOptions opt;
  opt.min_axis_fraction = min_axis;
  for (int i = 0; i < count; ++i)
    pts.push_back(random_gauged_state(params, rng, opt));
  return pack_states(pts);
}

inline std::vector<Vec> sample_ellipsoid_points(const SystemParams& params,
                                                Rng& rng, int count,
                                                double min_axis) {
  std::vector<EllipsoidState> pts;
  SampleOptions opt;
  opt.min_axis_fraction = min_axis;
  opt.speed = 0.0;  // leave momenta unscaled
  for (int i = 0; i < count; ++i)
    pts.push_back(random_ellipsoid_state(params, rng, opt));
  return pack_states(pts);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// brackets suite

inline SuiteReport verify_brackets(const SystemParams& params,
                                   const VerifyOptions& opt = {}) {
  SuiteReport report{"brackets", {}};
  Rng rng(opt.seed);
  const Eigen::Index n = params.size();

  const auto sphere_pts =
      detail::sample_gauged_points(params, rng, opt.points, 0.15);
  const auto ellipsoid_pts =
      detail::sample_ellipsoid_points(params, rng, opt.points, 0.15);

  // exact antisymmetry of every structure at every sample point
  double antisym = 0.0;
  for (const Vec& pt : sphere_pts) {
    for (StructureKind kind : {StructureKind::Canonical,
                               StructureKind::GaugedNeumann,
                               StructureKind::DiracNeumann}) {
      const Mat pi = structure_matrix(kind, pt, params);
      antisym = std::max(antisym, (pi + pi.transpose()).cwiseAbs().maxCoeff());
    }
  }
  for (const Vec& pt : ellipsoid_pts) {
    const Mat pi = structure_matrix(StructureKind::DiracJacobi, pt, params);
    antisym = std::max(antisym, (pi + pi.transpose()).cwiseAbs().maxCoeff());
  }
  report.add("antisymmetry", antisym, 0.0);

  report.add("table_canonical",
             bracket_table_check(StructureKind::Canonical, sphere_pts, params),
             1e-12);
  report.add("table_gauged_neumann",
             bracket_table_check(StructureKind::GaugedNeumann, sphere_pts,
                                 params),
             1e-12);
  report.add("table_dirac_neumann",
             bracket_table_check(StructureKind::DiracNeumann, sphere_pts,
                                 params),
             1e-12);
  report.add("table_dirac_jacobi",
             bracket_table_check(StructureKind::DiracJacobi, ellipsoid_pts,
                                 params),
             1e-12);

  double chain = 0.0;
  for (const Vec& pt : sphere_pts)
    chain = std::max(chain, dirac_chain_residual(pt, params));
  report.add("dirac_chain_consistency", chain, 1e-10);

  double cas_n = 0.0, cas_j = 0.0, cas_leaf = 0.0;
  for (const Vec& pt : sphere_pts) {
    cas_n = std::max(cas_n, constraint_casimir_residual(
                                StructureKind::DiracNeumann, pt, params));
    cas_leaf = std::max(cas_leaf, leaf_casimir_residual(pt, params));
  }
  for (const Vec& pt : ellipsoid_pts)
    cas_j = std::max(cas_j, constraint_casimir_residual(
                                StructureKind::DiracJacobi, pt, params));
  report.add("casimir_dirac_neumann", cas_n, 1e-10);
  report.add("casimir_dirac_jacobi", cas_j, 1e-10);
  report.add("casimir_gauged_leaf", cas_leaf, 1e-10);

  // Jacobi identity: the Dirac structures are genuine Poisson structures;
  // the gauged table carries a gauge-direction anomaly with a closed form.
  double jac_n = 0.0, jac_j = 0.0, anomaly = 0.0, gauged_raw = 0.0;
  for (int i = 0; i < std::min<int>(opt.points, 8); ++i) {
    jac_n = std::max(jac_n,
                     jacobi_identity_residual(StructureKind::DiracNeumann,
                                              sphere_pts[i], params));
    jac_j = std::max(jac_j,
                     jacobi_identity_residual(StructureKind::DiracJacobi,
                                              ellipsoid_pts[i], params));
    anomaly = std::max(anomaly,
                       gauged_jacobi_anomaly_residual(sphere_pts[i], params));
    gauged_raw = std::max(
        gauged_raw, jacobi_identity_residual(StructureKind::GaugedNeumann,
                                             sphere_pts[i], params));
  }
  report.add("jacobi_identity_dirac_neumann_fd", jac_n, 1e-5);
  report.add("jacobi_identity_dirac_jacobi_fd", jac_j, 1e-5);
  report.add("gauged_jacobi_anomaly_closed_form", anomaly, 1e-5);
  report.add("jacobi_identity_gauged_fd", gauged_raw, 1e-5, /*gating=*/false);

  // analytic gradients vs the finite-difference oracle
  auto grad_check = [&](FamilyTag fam, const std::vector<Vec>& pts) {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const PhaseFunction analytic = family_function(fam, k, params, true);
      const PhaseFunction fd = family_function(fam, k, params, false);
      for (const Vec& pt : pts) {
        const Vec ga = analytic.gradient(pt);
        const Vec gf = fd.gradient(pt);
        worst = std::max(worst, (ga - gf).cwiseAbs().maxCoeff() /
                                    (1.0 + ga.cwiseAbs().maxCoeff()));
      }
    }
    return worst;
  };
  report.add("gradient_self_check_F", grad_check(FamilyTag::F, sphere_pts),
             1e-6);
  report.add("gradient_self_check_G", grad_check(FamilyTag::G, ellipsoid_pts),
             1e-6);
  report.add("gradient_self_check_H", grad_check(FamilyTag::H, sphere_pts),
             1e-6);
  report.add("gradient_self_check_I", grad_check(FamilyTag::I, ellipsoid_pts),
             1e-6);

  detail::apply_tol_override(report, opt);
  return report;
}

// ---------------------------------------------------------------------------
// involution suite

inline SuiteReport verify_involution(const SystemParams& params,
                                     const VerifyOptions& opt = {}) {
  SuiteReport report{"involution", {}};
  Rng rng(opt.seed);

  // run the configured N and N+1 (one more frequency appended)
  std::vector<SystemParams> param_sets{params};
  {
    RawParams raw;
    const Eigen::Index n = params.size();
    raw.a.resize(n + 1);
    raw.a.head(n) = params.a;
    raw.a[n] = 2.0 * params.a[n - 1];
    raw.r = params.r;
    raw.c = Vec::Zero(n + 1);
    raw.c.head(n) = params.c;
    raw.d = Vec::Zero(n + 1);
    raw.d.head(n) = params.d;
    param_sets.push_back(validate_params(raw));
  }

  for (const SystemParams& p : param_sets) {
    const std::string suffix = "_N" + std::to_string(p.size());
    const auto sphere_pts =
        detail::sample_gauged_points(p, rng, opt.points, 0.2);
    const auto ellipsoid_pts =
        detail::sample_ellipsoid_points(p, rng, opt.points, 0.2);

    auto offdiag_max = [](const Mat& m) {
      double worst = 0.0;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
          if (i != j) worst = std::max(worst, std::abs(m(i, j)));
      return worst;
    };

    report.add("involution_F_gauged_analytic" + suffix,
               offdiag_max(involution_matrix(FamilyTag::F,
                                             StructureKind::GaugedNeumann,
                                             sphere_pts, p, true)),
               1e-10);
    report.add("involution_F_gauged_fd" + suffix,
               offdiag_max(involution_matrix(FamilyTag::F,
                                             StructureKind::GaugedNeumann,
                                             sphere_pts, p, false)),
               1e-6);
    report.add("involution_G_canonical_analytic" + suffix,
               offdiag_max(involution_matrix(FamilyTag::G,
                                             StructureKind::Canonical,
                                             ellipsoid_pts, p, true)),
               1e-10);
    report.add("involution_G_canonical_fd" + suffix,
               offdiag_max(involution_matrix(FamilyTag::G,
                                             StructureKind::Canonical,
                                             ellipsoid_pts, p, false)),
               1e-6);
    // the H and I families are measured and reported, not asserted
    report.add("involution_H_gauged_analytic" + suffix,
               offdiag_max(involution_matrix(FamilyTag::H,
                                             StructureKind::GaugedNeumann,
                                             sphere_pts, p, true)),
               1e-10, /*gating=*/false);
    report.add("involution_I_canonical_analytic" + suffix,
               offdiag_max(involution_matrix(FamilyTag::I,
                                             StructureKind::Canonical,
                                             ellipsoid_pts, p, true)),
               1e-10, /*gating=*/false);
  }

  detail::apply_tol_override(report, opt);
  return report;
}

// ---------------------------------------------------------------------------
// gaussmap suite (flow commutation, kappa constancy, mapped identities)

namespace detail {

// Advances a Neumann state between consecutive target times with RK4
// substeps no longer than max_step.
inline Vec advance_to(const Field& field, Vec state, double t_from,
                      double t_to, double max_step) {
  const double dt = t_to - t_from;
  if (dt <= 0.0) return state;
  const long m = std::max(1L, static_cast<long>(std::ceil(dt / max_step - 1e-12)));
  const double h = dt / static_cast<double>(m);
  for (long i = 0; i < m; ++i) state = rk4_step(field, state, h);
  return state;
}

}  // namespace detail

inline SuiteReport verify_gaussmap(const SystemParams& params,
                                   const VerifyOptions& opt = {}) {
  SuiteReport report{"gaussmap", {}};
  Rng rng(opt.seed);
  const Eigen::Index n = params.size();
  const double t_horizon = 5.0;
  const double h_s = 1e-4;

  double sup_x = 0.0, sup_v = 0.0, kdrift = 0.0, sphere_img = 0.0;
  double gauge_indep = 0.0;
  double id_gating = 0.0;       // corrected identities along trajectories
  double id_variant = 0.0;      // historical variants, informational
  double id_gauge_manifold = 0.0;

  for (int trial = 0; trial < opt.trajectories; ++trial) {
    EllipsoidState s0 = random_ellipsoid_state(params, rng, {0.05, false, 0.0});
    // scale p so ds/dt = kappa R^2 = 1 at s = 0
    const double r2 = s0.q.cwiseQuotient(params.b).squaredNorm();
    s0.p *= compute_kappa(s0.q, s0.p, params) * r2;
    const double kappa = compute_kappa(s0.q, s0.p, params);
    const double mu = rng.uniform(-1.0, 1.0);

    // horizon in s guaranteeing t >= t_horizon: dt/ds >= b_min / kappa
    const double s_end =
        (t_horizon + 0.2) * kappa / params.b.minCoeff();

    IntegrationConfig config;
    config.step = h_s;
    config.t_end = s_end;
    config.sample_stride = 10;
    Vec packed(2 * n);
    packed << s0.q, s0.p;
    const Trajectory jac =
        integrate_flow(SystemTag::Jacobi, packed, params, config);
    kdrift = std::max(kdrift, kappa_drift(jac));

    const Trajectory mapped = gauss_map_trajectory(jac, params, mu);
    const Trajectory mapped2 =
        gauss_map_trajectory(jac, params, mu + 0.5);

    // direct Neumann flow through the mapped sample times
    const Field neumann = first_order_field(SystemTag::Neumann, params);
    Vec state = mapped.states.front();
    double t_prev = 0.0;
    for (std::size_t j = 1; j < mapped.size(); ++j) {
      const double t_j = mapped.times[j];
      if (t_j > t_horizon) break;
      state = detail::advance_to(neumann, state, t_prev, t_j, h_s);
      t_prev = t_j;
      sup_x = std::max(
          sup_x,
          (mapped.states[j].head(n) - state.head(n)).cwiseAbs().maxCoeff());
      sup_v = std::max(
          sup_v,
          (mapped.states[j].tail(n) - state.tail(n)).cwiseAbs().maxCoeff());
      gauge_indep = std::max(gauge_indep,
                             (mapped.states[j].head(n) -
                              mapped2.states[j].head(n)).cwiseAbs().maxCoeff());
    }

    // identities along the arclength samples (every 20th to keep cost flat)
    for (std::size_t j = 0; j < jac.size(); j += 20) {
      const Vec& st = jac.states[j];
      const EllipsoidState src{st.head(n), st.tail(n)};
      const SphereState tgt = gauss_map(src.q, src.p, params, mu);
      sphere_img = std::max(
          sphere_img,
          std::abs(tgt.x.squaredNorm() - params.r * params.r));
      for (const IdentityResidual& ir :
           identity_residuals(src, tgt, params, mu)) {
        if (ir.informational)
          id_variant = std::max(id_variant, ir.value);
        else if (ir.name == "gauge_manifold_y2_over_a")
          id_gauge_manifold = std::max(id_gauge_manifold, ir.value);
        else
          id_gating = std::max(id_gating, ir.value);
      }
    }
  }

  report.add("flow_commutation_sup_x", sup_x, 1e-6);
  report.add("velocity_consistency", sup_v, 1e-8);
  report.add("kappa_drift", kdrift, 1e-8);
  report.add("sphere_image_residual", sphere_img, 1e-12);
  report.add("gauge_parameter_independence_x", gauge_indep, 1e-10);
  report.add("mapped_identities", id_gating, 1e-10);
  report.add("mapped_gauge_manifold", id_gauge_manifold, 1e-10);
  report.add("variant_weighted_sums", id_variant, 1e-10, /*gating=*/false);

  detail::apply_tol_override(report, opt);
  return report;
}

// ---------------------------------------------------------------------------
// reduction suite (2N lifts against direct flows)

inline SuiteReport verify_reduction(const SystemParams& params,
                                    const VerifyOptions& opt = {}) {
  SuiteReport report{"reduction", {}};
  Rng rng(opt.seed);
  const Eigen::Index n = params.size();
  const double t_end = 5.0;
  const double h = 5e-4;

  SampleOptions orthant;
  orthant.min_axis_fraction = 0.3;
  orthant.positive_orthant = true;
  orthant.speed = 1.0;

  double ros_sup = 0.0, dual_sup = 0.0, polar_sup = 0.0;
  double momenta_drift = 0.0;
  double i_vs_pair = 0.0, h_vs_pair = 0.0;
  double energy_ros = 0.0, energy_dual = 0.0;

  for (int trial = 0; trial < opt.trajectories; ++trial) {
    // --- sphere side: Rosochatius vs reduced 2N Neumann ---
    const SphereState xs = random_sphere_state(params, rng, orthant);
    Vec theta0(n);
    for (Eigen::Index k = 0; k < n; ++k) theta0[k] = rng.uniform(0.0, 6.28);
    const LiftedState lift = lift_rosochatius(xs.x, xs.w, params, theta0);

    h_vs_pair = std::max(
        h_vs_pair,
        (degenerate_pair_F(lift.position, lift.velocity, params) -
         rosochatius_H(xs.x, xs.w, params).values).cwiseAbs().maxCoeff());
    energy_ros = std::max(
        energy_ros,
        std::abs(neumann_hamiltonian({lift.position, lift.velocity, false},
                                     lift.params_2n) -
                 rosochatius_hamiltonian(xs, params)));

    IntegrationConfig config;
    config.step = h;
    config.t_end = t_end;
    config.sample_stride = 100;

    Vec packed_lift(4 * n);
    packed_lift << lift.position, lift.velocity;
    const Trajectory big = integrate_flow(SystemTag::Neumann, packed_lift,
                                          lift.params_2n, config, false);
    Vec packed_direct(2 * n);
    packed_direct << xs.x, xs.w;
    const Trajectory direct = integrate_flow(SystemTag::Rosochatius,
                                             packed_direct, params, config);
    for (std::size_t j = 0; j < big.size(); ++j) {
      const PolarReduction red =
          polar_reduce(big.states[j].head(2 * n), big.states[j].tail(2 * n));
      ros_sup = std::max(ros_sup, (red.state.x - direct.states[j].head(n))
                                      .cwiseAbs()
                                      .maxCoeff());
      for (Eigen::Index k = 0; k < n; ++k)
        momenta_drift = std::max(
            momenta_drift, std::abs(red.sqrt_c[k] - std::sqrt(params.c[k])) /
                               (1.0 + std::sqrt(params.c[k])));
    }

    // --- ellipsoid side: dual system vs reduced 2N Jacobi, plus the polar
    // geodesic form of the same flow ---
    const EllipsoidState qs = random_ellipsoid_state(params, rng, orthant);
    const LiftedState liftd = lift_dual(qs.q, qs.p, params, theta0);

    i_vs_pair = std::max(
        i_vs_pair,
        (degenerate_pair_G(liftd.position, liftd.velocity, params) -
         dual_I(qs.q, qs.p, params).values).cwiseAbs().maxCoeff());
    energy_dual = std::max(
        energy_dual, std::abs(0.5 * liftd.velocity.squaredNorm() -
                              dual_hamiltonian(qs, params)));

    Vec packed_liftd(4 * n);
    packed_liftd << liftd.position, liftd.velocity;
    const Trajectory bigj = integrate_flow(SystemTag::Jacobi, packed_liftd,
                                           liftd.params_2n, config, false);
    Vec packed_dual(2 * n);
    packed_dual << qs.q, qs.p;
    const Trajectory directd = integrate_flow(SystemTag::DualRosochatius,
                                              packed_dual, params, config);

    Vec thetadot0(n);
    for (Eigen::Index k = 0; k < n; ++k)
      thetadot0[k] =
          params.d[k] > 0.0 ? std::sqrt(params.d[k]) / (qs.q[k] * qs.q[k])
                            : 0.0;
    Vec packed_polar(4 * n);
    packed_polar << qs.q, theta0, qs.p, thetadot0;
    const Trajectory polar = integrate_flow(SystemTag::Polar2N, packed_polar,
                                            params, config);

    for (std::size_t j = 0; j < bigj.size(); ++j) {
      const PolarReduction red = polar_reduce(bigj.states[j].head(2 * n),
                                              bigj.states[j].tail(2 * n));
      dual_sup = std::max(dual_sup, (red.state.x - directd.states[j].head(n))
                                        .cwiseAbs()
                                        .maxCoeff());
      polar_sup = std::max(polar_sup,
                           (red.state.x - polar.states[j].head(n))
                               .cwiseAbs()
                               .maxCoeff());
    }
  }

  report.add("rosochatius_reduction_sup", ros_sup, 1e-6);
  report.add("dual_reduction_sup", dual_sup, 1e-6);
  report.add("polar_vs_lifted_jacobi_sup", polar_sup, 1e-6);
  report.add("angular_momentum_drift", momenta_drift, 1e-8);
  report.add("I_vs_pair_G", i_vs_pair, 1e-10);
  report.add("H_vs_pair_F", h_vs_pair, 1e-10);
  report.add("lift_energy_match_rosochatius", energy_ros, 1e-12);
  report.add("lift_energy_match_dual", energy_dual, 1e-12);

  detail::apply_tol_override(report, opt);
  return report;
}

// ---------------------------------------------------------------------------
// identities suite (pointwise, no integration)

inline SuiteReport verify_identities(const SystemParams& params,
                                     const VerifyOptions& opt = {}) {
  SuiteReport report{"identities", {}};
  Rng rng(opt.seed);

  double family_map = 0.0, sum_bf = 0.0, sum_b2f = 0.0;
  double manifold = 0.0, manifold_mu0 = 0.0, gauge_shift = 0.0;
  double sum_f = 0.0, sum_g = 0.0;
  double variant_bf = 0.0, variant_b2f = 0.0;

  for (int i = 0; i < opt.points; ++i) {
    const EllipsoidState src =
        random_ellipsoid_state(params, rng, {0.0, false, 0.0});
    const MappedPair pair =
        make_mapped_pair(src, params, rng.uniform(-2.0, 2.0));
    const double mu = pair.mu;
    const SphereState& tgt = pair.target;
    for (const IdentityResidual& ir :
         identity_residuals(pair.source, tgt, params, mu)) {
      if (ir.name == "family_map_F_vs_G") family_map = std::max(family_map, ir.value);
      if (ir.name == "weighted_sum_bF") sum_bf = std::max(sum_bf, ir.value);
      if (ir.name == "weighted_sum_b2F") sum_b2f = std::max(sum_b2f, ir.value);
      if (ir.name == "gauge_manifold_y2_over_a")
        manifold = std::max(manifold, ir.value);
      if (ir.name == "sphere_family_sum") sum_f = std::max(sum_f, ir.value);
      if (ir.name == "ellipsoid_family_sum") sum_g = std::max(sum_g, ir.value);
      if (ir.name == "variant_sum_bF_vs_r2_over_R2")
        variant_bf = std::max(variant_bf, ir.value);
      if (ir.name == "variant_sum_b2F_vs_zero")
        variant_b2f = std::max(variant_b2f, ir.value);
    }

    // mu = 0 specialization of the gauge manifold
    const SphereState tgt0 = gauss_map(src.q, src.p, params, 0.0);
    double y2a = 0.0;
    for (Eigen::Index k = 0; k < params.size(); ++k)
      y2a += tgt0.w[k] * tgt0.w[k] / params.a[k];
    manifold_mu0 =
        std::max(manifold_mu0, std::abs(y2a - params.r * params.r));

    // gauge shift y -> y + nu x moves the manifold parameter mu -> mu + nu
    const double nu = rng.uniform(-3.0, 3.0);
    const SphereState shifted = gauge_transform(tgt, nu);
    const double r2q = src.q.cwiseQuotient(params.b).squaredNorm();
    double z2a = 0.0;
    for (Eigen::Index k = 0; k < params.size(); ++k)
      z2a += shifted.w[k] * shifted.w[k] / params.a[k];
    gauge_shift = std::max(
        gauge_shift,
        std::abs(z2a - params.r * params.r *
                           (1.0 + (mu + nu) * (mu + nu) / r2q)));
  }

  report.add("family_map_F_vs_G", family_map, 1e-10);
  report.add("weighted_sum_bF", sum_bf, 1e-10);
  report.add("weighted_sum_b2F", sum_b2f, 1e-10);
  report.add("gauge_manifold_y2_over_a", manifold, 1e-10);
  report.add("gauge_manifold_mu0", manifold_mu0, 1e-10);
  report.add("gauge_shift_manifold", gauge_shift, 1e-10);
  report.add("sphere_family_sum", sum_f, 1e-12);
  report.add("ellipsoid_family_sum", sum_g, 1e-10);
  report.add("variant_sum_bF_vs_r2_over_R2", variant_bf, 1e-10,
             /*gating=*/false);
  report.add("variant_sum_b2F_vs_zero", variant_b2f, 1e-10, /*gating=*/false);

  detail::apply_tol_override(report, opt);
  return report;
}

inline SuiteReport run_suite(const std::string& name,
                             const SystemParams& params,
                             const VerifyOptions& opt = {}) {
  if (name == "brackets") return verify_brackets(params, opt);
  if (name == "involution") return verify_involution(params, opt);
  if (name == "gaussmap") return verify_gaussmap(params, opt);
  if (name == "reduction") return verify_reduction(params, opt);
  if (name == "identities") return verify_identities(params, opt);
  throw std::invalid_argument("unknown verify suite \"" + name + "\"");
}

}  // namespace nrflow
