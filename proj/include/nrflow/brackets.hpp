#pragma once

// Poisson-bracket engine over explicit antisymmetric structure matrices:
// the canonical structure, the gauged sphere structure, and the two Dirac
// structures, plus the contraction {f, g} = grad f . Pi . grad g, involution
// tables, and cross-checks between the bracket tables.

#include "nrflow/invariants.hpp"
#include "nrflow/model.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nrflow {

enum class StructureKind { Canonical, GaugedNeumann, DiracNeumann, DiracJacobi };

inline const char* structure_name(StructureKind kind) {
  switch (kind) {
    case StructureKind::Canonical: return "canonical";
    case StructureKind::GaugedNeumann: return "gauged_neumann";
    case StructureKind::DiracNeumann: return "dirac_neumann";
    case StructureKind::DiracJacobi: return "dirac_jacobi";
  }
  return "?";
}

/// Structure matrix Pi_ab = {xi_a, xi_b} at a packed phase point
/// [positions; momenta]. Antisymmetric by construction: the lower triangle
/// is written as the negated upper triangle.
inline Mat structure_matrix(StructureKind kind, const Vec& point,
                            const SystemParams& params) {
  if (point.size() % 2 != 0)
    throw std::invalid_argument("structure_matrix: odd phase dimension");
  const Eigen::Index n = point.size() / 2;
  const auto pos = point.head(n);
  const auto mom = point.tail(n);

  Mat pi = Mat::Zero(2 * n, 2 * n);
  auto set = [&](Eigen::Index a, Eigen::Index b, double v) {
    pi(a, b) = v;
    pi(b, a) = -v;
  };

  switch (kind) {
    case StructureKind::Canonical:
      for (Eigen::Index i = 0; i < n; ++i) set(i, n + i, 1.0);
      break;
    case StructureKind::GaugedNeumann: {
      const double x2 = pos.squaredNorm();
      if (x2 == 0.0)
        throw std::invalid_argument("structure_matrix: zero position");
      for (Eigen::Index i = 0; i < n; ++i) set(i, n + i, 1.0);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          set(n + i, n + j, -(pos[i] * mom[j] - pos[j] * mom[i]) / x2);
      break;
    }
    case StructureKind::DiracNeumann: {
      const double x2 = pos.squaredNorm();
      if (x2 == 0.0)
        throw std::invalid_argument("structure_matrix: zero position");
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          set(i, n + j, (i == j ? 1.0 : 0.0) - pos[i] * pos[j] / x2);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          set(n + i, n + j, -(pos[i] * mom[j] - pos[j] * mom[i]) / x2);
      break;
    }
    case StructureKind::DiracJacobi: {
      const double r2 = pos.cwiseQuotient(params.b).squaredNorm();
      if (r2 == 0.0)
        throw std::invalid_argument("structure_matrix: R^2 = 0");
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          set(i, n + j,
              (i == j ? 1.0 : 0.0) -
                  pos[i] * pos[j] / (r2 * params.b[i] * params.b[j]));
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
          set(n + i, n + j,
              -(pos[i] * mom[j] - pos[j] * mom[i]) /
                  (r2 * params.b[i] * params.b[j]));
      break;
    }
  }
  return pi;
}

/// Scalar phase function with a gradient over the packed 2N phase point.
struct PhaseFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

inline PhaseFunction coordinate_function(Eigen::Index index,
                                         Eigen::Index dim) {
  return {[index](const Vec& pt) { return pt[index]; },
          [index, dim](const Vec&) {
            Vec g = Vec::Zero(dim);
            g[index] = 1.0;
            return g;
          }};
}

/// Central finite-difference gradient with step 1e-6 * scale; the analytic
/// gradients are checked against this.
inline std::function<Vec(const Vec&)> fd_gradient(
    std::function<double(const Vec&)> value, double rel_step = 1e-6) {
  return [value = std::move(value), rel_step](const Vec& pt) {
    const double scale = std::max(1.0, pt.cwiseAbs().maxCoeff());
    const double h = rel_step * scale;
    Vec g(pt.size());
    Vec probe = pt;
    for (Eigen::Index i = 0; i < pt.size(); ++i) {
      const double saved = probe[i];
      probe[i] = saved + h;
      const double fp = value(probe);
      probe[i] = saved - h;
      const double fm = value(probe);
      probe[i] = saved;
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };
}

/// The k-th member of an invariant family as a phase function, with either
/// the analytic gradient or the finite-difference one.
inline PhaseFunction family_function(FamilyTag family, Eigen::Index k,
                                     const SystemParams& params,
                                     bool analytic_gradient = true) {
  const Eigen::Index n = params.size();
  auto value = [family, k, params, n](const Vec& pt) {
    const Vec pos = pt.head(n);
    const Vec mom = pt.tail(n);
    switch (family) {
      case FamilyTag::F: return uhlenbeck_F(pos, mom, params).values[k];
      case FamilyTag::G: return uhlenbeck_G(pos, mom, params).values[k];
      case FamilyTag::H: return rosochatius_H(pos, mom, params).values[k];
      case FamilyTag::I: return dual_I(pos, mom, params).values[k];
    }
    throw std::logic_error("unreachable");
  };
  if (!analytic_gradient) return {value, fd_gradient(value)};
  auto gradient = [family, k, params, n](const Vec& pt) {
    const Vec pos = pt.head(n);
    const Vec mom = pt.tail(n);
    switch (family) {
      case FamilyTag::F: return grad_uhlenbeck_F(pos, mom, params, k);
      case FamilyTag::G: return grad_uhlenbeck_G(pos, mom, params, k);
      case FamilyTag::H: return grad_rosochatius_H(pos, mom, params, k);
      case FamilyTag::I: return grad_dual_I(pos, mom, params, k);
    }
    throw std::logic_error("unreachable");
  };
  return {value, gradient};
}

/// {f, g} = grad f . Pi . grad g at the given point, evaluated in the
/// antisymmetrized form so that {f, g} = -{g, f} holds bitwise and {f, f}
/// is exactly zero.
inline double bracket_eval(const PhaseFunction& f, const PhaseFunction& g,
                           StructureKind kind, const Vec& point,
                           const SystemParams& params) {
  const Vec gf = f.gradient(point);
  const Vec gg = g.gradient(point);
  const Mat pi = structure_matrix(kind, point, params);
  return 0.5 * (gf.dot(pi * gg) - gg.dot(pi * gf));
}

/// Entry (k, l) = max over the sample points of |{V_k, V_l}|; the diagonal
/// is exactly zero by antisymmetry.
inline Mat involution_matrix(FamilyTag family, StructureKind kind,
                             const std::vector<Vec>& points,
                             const SystemParams& params,
                             bool analytic_gradient = true) {
  const Eigen::Index n = params.size();
  Mat worst = Mat::Zero(n, n);
  std::vector<PhaseFunction> fns;
  fns.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k)
    fns.push_back(family_function(family, k, params, analytic_gradient));
  for (const Vec& pt : points) {
    const Mat pi = structure_matrix(kind, pt, params);
    std::vector<Vec> grads;
    grads.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) grads.push_back(fns[k].gradient(pt));
    for (Eigen::Index k = 0; k < n; ++k)
      for (Eigen::Index l = k + 1; l < n; ++l) {
        const double br = std::abs(grads[k].dot(pi * grads[l]));
        worst(k, l) = std::max(worst(k, l), br);
        worst(l, k) = worst(k, l);
      }
  }
  return worst;
}

/// Printed bracket-table entry {xi_a, xi_b} for the given structure; kept as
/// a separate expression so the gradient-contraction path has something
/// independent to reproduce.
inline double bracket_table_expected(StructureKind kind, Eigen::Index a,
                                     Eigen::Index b, const Vec& point,
                                     const SystemParams& params) {
  const Eigen::Index n = point.size() / 2;
  const auto pos = point.head(n);
  const auto mom = point.tail(n);
  const bool a_pos = a < n, b_pos = b < n;
  const Eigen::Index i = a_pos ? a : a - n;
  const Eigen::Index j = b_pos ? b : b - n;
  const double delta = (i == j) ? 1.0 : 0.0;

  if (a_pos && b_pos) return 0.0;
  switch (kind) {
    case StructureKind::Canonical:
      if (a_pos != b_pos) return a_pos ? delta : -delta;
      return 0.0;
    case StructureKind::GaugedNeumann: {
      const double x2 = pos.squaredNorm();
      if (a_pos != b_pos) return a_pos ? delta : -delta;
      return -(pos[i] * mom[j] - pos[j] * mom[i]) / x2;
    }
    case StructureKind::DiracNeumann: {
      const double x2 = pos.squaredNorm();
      if (a_pos != b_pos) {
        const double v = delta - pos[i] * pos[j] / x2;
        return a_pos ? v : -v;
      }
      return -(pos[i] * mom[j] - pos[j] * mom[i]) / x2;
    }
    case StructureKind::DiracJacobi: {
      const double r2 = pos.cwiseQuotient(params.b).squaredNorm();
      const double bb = params.b[i] * params.b[j];
      if (a_pos != b_pos) {
        const double v = delta - pos[i] * pos[j] / (r2 * bb);
        return a_pos ? v : -v;
      }
      return -(pos[i] * mom[j] - pos[j] * mom[i]) / (r2 * bb);
    }
  }
  throw std::logic_error("unreachable");
}

/// Max over points and index pairs of |contracted bracket - printed entry|.
inline double bracket_table_check(StructureKind kind,
                                  const std::vector<Vec>& points,
                                  const SystemParams& params) {
  double worst = 0.0;
  for (const Vec& pt : points) {
    const Eigen::Index dim = pt.size();
    for (Eigen::Index a = 0; a < dim; ++a)
      for (Eigen::Index b = 0; b < dim; ++b) {
        const double br = bracket_eval(coordinate_function(a, dim),
                                       coordinate_function(b, dim), kind, pt,
                                       params);
        worst = std::max(
            worst, std::abs(br - bracket_table_expected(kind, a, b, pt, params)));
      }
  }
  return worst;
}

/// Pushes the gauged structure through v_i = y_i - x_i (x.y)/x^2 by the
/// chain rule and compares with the Dirac table evaluated at (x, v(x, y)).
/// Returns the max entrywise discrepancy over both table blocks.
inline double dirac_chain_residual(const Vec& point,
                                   const SystemParams& params) {
  const Eigen::Index n = point.size() / 2;
  const Vec x = point.head(n);
  const Vec y = point.tail(n);
  const double x2 = x.squaredNorm();
  const double xy = x.dot(y);
  const Vec v = tangent_project(x, y);

  // gradients of v_j over (x, y)
  auto grad_v = [&](Eigen::Index j) {
    Vec g(2 * n);
    for (Eigen::Index m = 0; m < n; ++m) {
      const double delta = (j == m) ? 1.0 : 0.0;
      g[m] = -delta * xy / x2 - x[j] * y[m] / x2 +
             2.0 * x[j] * x[m] * xy / (x2 * x2);
      g[n + m] = delta - x[j] * x[m] / x2;
    }
    return g;
  };

  const Mat pi = structure_matrix(StructureKind::GaugedNeumann, point, params);
  Vec vpacked(2 * n);
  vpacked << x, v;

  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec gx = Vec::Zero(2 * n);
    gx[i] = 1.0;
    const Vec gvi = grad_v(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Vec gvj = grad_v(j);
      const double xv = gx.dot(pi * gvj);
      const double xv_table =
          bracket_table_expected(StructureKind::DiracNeumann, i, n + j,
                                 vpacked, params);
      worst = std::max(worst, std::abs(xv - xv_table));
      const double vv = gvi.dot(pi * gvj);
      const double vv_table =
          bracket_table_expected(StructureKind::DiracNeumann, n + i, n + j,
                                 vpacked, params);
      worst = std::max(worst, std::abs(vv - vv_table));
    }
  }
  return worst;
}

/// Jacobi-identity residual of a structure at one point: cyclic sum of
/// {xi_a, {xi_b, xi_c}} over all coordinate triples, with the inner-bracket
/// derivatives taken by central differences of the structure matrix.
inline double jacobi_identity_residual(StructureKind kind, const Vec& point,
                                       const SystemParams& params,
                                       double rel_step = 1e-6) {
  const Eigen::Index dim = point.size();
  const double scale = std::max(1.0, point.cwiseAbs().maxCoeff());
  const double h = rel_step * scale;

  // dPi[d](a,b) = d Pi_ab / d xi_d
  std::vector<Mat> dpi(static_cast<std::size_t>(dim));
  Vec probe = point;
  for (Eigen::Index v = 0; v < dim; ++v) {
    const double saved = probe[v];
    probe[v] = saved + h;
    const Mat plus = structure_matrix(kind, probe, params);
    probe[v] = saved - h;
    const Mat minus = structure_matrix(kind, probe, params);
    probe[v] = saved;
    dpi[static_cast<std::size_t>(v)] = (plus - minus) / (2.0 * h);
  }
  const Mat pi = structure_matrix(kind, point, params);

  double worst = 0.0;
  for (Eigen::Index va = 0; va < dim; ++va)
    for (Eigen::Index vb = va + 1; vb < dim; ++vb)
      for (Eigen::Index vc = vb + 1; vc < dim; ++vc) {
        double total = 0.0;
        for (Eigen::Index vd = 0; vd < dim; ++vd) {
          total += pi(va, vd) * dpi[static_cast<std::size_t>(vd)](vb, vc);
          total += pi(vb, vd) * dpi[static_cast<std::size_t>(vd)](vc, va);
          total += pi(vc, vd) * dpi[static_cast<std::size_t>(vd)](va, vb);
        }
        worst = std::max(worst, std::abs(total));
      }
  return worst;
}

/// The gauged table is a Poisson structure only modulo gauge directions: on
/// the triple (x_i, y_j, y_k) the cyclic Jacobi sum equals
/// -(x_j delta_ik - x_k delta_ij)/x^2 instead of zero. (Contracted with
/// gauge-invariant functions the obstruction vanishes, which is why the
/// invariant families still commute.) Returns the max deviation of the
/// finite-difference cyclic sum from that closed form over all such triples.
inline double gauged_jacobi_anomaly_residual(const Vec& point,
                                             const SystemParams& params,
                                             double rel_step = 1e-6) {
  const Eigen::Index n = point.size() / 2;
  const Vec x = point.head(n);
  const double x2 = x.squaredNorm();
  const double scale = std::max(1.0, point.cwiseAbs().maxCoeff());
  const double h = rel_step * scale;

  std::vector<Mat> dpi(static_cast<std::size_t>(2 * n));
  Vec probe = point;
  for (Eigen::Index v = 0; v < 2 * n; ++v) {
    const double saved = probe[v];
    probe[v] = saved + h;
    const Mat plus = structure_matrix(StructureKind::GaugedNeumann, probe, params);
    probe[v] = saved - h;
    const Mat minus = structure_matrix(StructureKind::GaugedNeumann, probe, params);
    probe[v] = saved;
    dpi[static_cast<std::size_t>(v)] = (plus - minus) / (2.0 * h);
  }
  const Mat pi = structure_matrix(StructureKind::GaugedNeumann, point, params);

  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = j + 1; k < n; ++k) {
        const Eigen::Index a = i, b = n + j, c = n + k;
        double cyc = 0.0;
        for (Eigen::Index d = 0; d < 2 * n; ++d) {
          cyc += pi(a, d) * dpi[static_cast<std::size_t>(d)](b, c);
          cyc += pi(b, d) * dpi[static_cast<std::size_t>(d)](c, a);
          cyc += pi(c, d) * dpi[static_cast<std::size_t>(d)](a, b);
        }
        const double predicted =
            -(x[j] * (i == k ? 1.0 : 0.0) - x[k] * (i == j ? 1.0 : 0.0)) / x2;
        worst = std::max(worst, std::abs(cyc - predicted));
      }
  return worst;
}

/// Bracket of the defining constraint with every coordinate function; the
/// Dirac structures annihilate their own constraint surface exactly.
inline double constraint_casimir_residual(StructureKind kind, const Vec& point,
                                          const SystemParams& params) {
  const Eigen::Index n = point.size() / 2;
  const Eigen::Index dim = 2 * n;
  Vec grad_constraint = Vec::Zero(dim);
  switch (kind) {
    case StructureKind::DiracNeumann:
      grad_constraint.head(n) = 2.0 * point.head(n);
      break;
    case StructureKind::DiracJacobi:
      grad_constraint.head(n) =
          2.0 * point.head(n).cwiseQuotient(params.b);
      break;
    default:
      throw std::invalid_argument(
          "constraint_casimir_residual: only the Dirac structures carry "
          "their constraint as a Casimir");
  }
  const Mat pi = structure_matrix(kind, point, params);
  const Vec row = pi.transpose() * grad_constraint;
  return row.cwiseAbs().maxCoeff();
}

/// The gauged-structure variant: with gradients restricted to the sphere
/// leaf (position block tangent-projected), sum x^2 brackets to zero with
/// every coordinate function.
inline double leaf_casimir_residual(const Vec& point,
                                    const SystemParams& params) {
  const Eigen::Index n = point.size() / 2;
  const Vec x = point.head(n);
  Vec grad_constraint = Vec::Zero(2 * n);
  grad_constraint.head(n) = tangent_project(x, Vec(2.0 * x));
  const Mat pi = structure_matrix(StructureKind::GaugedNeumann, point, params);
  const Vec row = pi.transpose() * grad_constraint;
  return row.cwiseAbs().maxCoeff();
}

}  // namespace nrflow
