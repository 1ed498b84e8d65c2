#include "nrflow/brackets.hpp"
#include "nrflow/sampling.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace nrflow;
using oracle::vec;

namespace {

SystemParams params3() {
  RawParams raw;
  raw.b = vec({4.0, 2.0, 1.0});
  raw.r = 1.0;
  raw.c = vec({0.05, 0.08, 0.03});
  raw.d = vec({0.04, 0.06, 0.1});
  return validate_params(raw);
}

Vec packed(const Vec& pos, const Vec& mom) {
  Vec pt(pos.size() + mom.size());
  pt << pos, mom;
  return pt;
}

}  // namespace

TEST_CASE("structure matrices reproduce the worked table entries") {
  RawParams raw;
  raw.b = vec({4.0, 1.0});
  raw.r = 1.0;
  const SystemParams p = validate_params(raw);

  const Mat dn = structure_matrix(StructureKind::DiracNeumann,
                                  packed(vec({1.0, 0.0}), vec({0.0, 1.0})), p);
  REQUIRE(dn(0, 2) == 0.0);   // {x_1, v_1} = 1 - x_1^2/x^2
  REQUIRE(dn(1, 3) == 1.0);   // {x_2, v_2}
  REQUIRE(dn(2, 3) == -1.0);  // {v_1, v_2} = -(x_1 v_2 - x_2 v_1)/x^2

  const Mat dj = structure_matrix(StructureKind::DiracJacobi,
                                  packed(vec({2.0, 0.0}), vec({0.0, 1.0})), p);
  REQUIRE(dj(0, 2) == 0.0);  // {q_1, p_1} = 1 - q_1^2/(R^2 b_1^2)

  const Mat can = structure_matrix(StructureKind::Canonical,
                                   packed(vec({2.0, 0.0}), vec({0.0, 1.0})), p);
  REQUIRE(can(0, 2) == 1.0);
  REQUIRE(can(1, 3) == 1.0);
  REQUIRE(can(0, 3) == 0.0);

  const Mat gn = structure_matrix(StructureKind::GaugedNeumann,
                                  packed(vec({1.0, 0.0}), vec({3.0, 4.0})), p);
  REQUIRE(gn.topLeftCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);  // {x_i, x_j}
  REQUIRE(gn(0, 2) == 1.0);
  REQUIRE(gn(2, 3) == -4.0);  // -(x_1 y_2 - x_2 y_1)/x^2
}

TEST_CASE("antisymmetry is exact at a million random points") {
  const SystemParams p = params3();
  Rng rng(89);
  double worst = 0.0;
  const int trials = 250000;
  for (int i = 0; i < trials; ++i) {
    const Vec pt = packed(random_sphere_position(p, rng), rng.normal_vector(3));
    for (StructureKind kind :
         {StructureKind::Canonical, StructureKind::GaugedNeumann,
          StructureKind::DiracNeumann, StructureKind::DiracJacobi}) {
      const Mat pi = structure_matrix(kind, pt, p);
      worst = std::max(worst, (pi + pi.transpose()).cwiseAbs().maxCoeff());
    }
  }
  REQUIRE(worst == 0.0);
}

TEST_CASE("bracket_eval basics") {
  const SystemParams p = params3();
  Rng rng(97);
  const Vec pt = packed(random_sphere_position(p, rng), rng.normal_vector(3));

  // {f, f} = 0 exactly
  const PhaseFunction f = family_function(FamilyTag::F, 0, p);
  REQUIRE(bracket_eval(f, f, StructureKind::GaugedNeumann, pt, p) == 0.0);

  // coordinate contraction picks out the table entry
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) {
      const double br =
          bracket_eval(coordinate_function(i, 6), coordinate_function(3 + j, 6),
                       StructureKind::GaugedNeumann, pt, p);
      REQUIRE(br == (i == j ? 1.0 : 0.0));
    }

  // constant functions bracket to zero
  const PhaseFunction constant{[](const Vec&) { return 7.0; },
                               [](const Vec& x) { return Vec(Vec::Zero(x.size())); }};
  REQUIRE(bracket_eval(constant, f, StructureKind::GaugedNeumann, pt, p) == 0.0);
}

TEST_CASE("bracket tables via gradient contraction") {
  const SystemParams p = params3();
  Rng rng(101);
  std::vector<Vec> sphere_pts, ellipsoid_pts;
  for (int i = 0; i < 32; ++i) {
    sphere_pts.push_back(
        packed(random_sphere_position(p, rng), rng.normal_vector(3)));
    const EllipsoidState e = random_ellipsoid_state(p, rng, {0.0, false, 0.0});
    ellipsoid_pts.push_back(packed(e.q, e.p));
  }
  REQUIRE(bracket_table_check(StructureKind::Canonical, sphere_pts, p) <= 1e-12);
  REQUIRE(bracket_table_check(StructureKind::GaugedNeumann, sphere_pts, p) <=
          1e-12);
  REQUIRE(bracket_table_check(StructureKind::DiracNeumann, sphere_pts, p) <=
          1e-12);
  REQUIRE(bracket_table_check(StructureKind::DiracJacobi, ellipsoid_pts, p) <=
          1e-12);
}

TEST_CASE("dirac table follows from the gauged table by the chain rule") {
  const SystemParams p = params3();
  Rng rng(103);
  for (int i = 0; i < 32; ++i) {
    const Vec pt = packed(random_sphere_position(p, rng), rng.normal_vector(3));
    REQUIRE(dirac_chain_residual(pt, p) <= 1e-10);
  }
}

TEST_CASE("involution of F (gauged) and G (canonical)") {
  const SystemParams p = params3();
  Rng rng(107);
  std::vector<Vec> sphere_pts, ellipsoid_pts;
  SampleOptions opt;
  opt.min_axis_fraction = 0.2;
  for (int i = 0; i < 8; ++i) {
    const SphereState s = random_gauged_state(p, rng, opt);
    sphere_pts.push_back(packed(s.x, s.w));
    const EllipsoidState e = random_ellipsoid_state(p, rng, opt);
    ellipsoid_pts.push_back(packed(e.q, e.p));
  }

  const Mat f_an = involution_matrix(FamilyTag::F, StructureKind::GaugedNeumann,
                                     sphere_pts, p, true);
  REQUIRE(f_an.diagonal().cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(f_an.maxCoeff() <= 1e-10);

  const Mat f_fd = involution_matrix(FamilyTag::F, StructureKind::GaugedNeumann,
                                     sphere_pts, p, false);
  REQUIRE(f_fd.maxCoeff() <= 1e-6);

  const Mat g_an = involution_matrix(FamilyTag::G, StructureKind::Canonical,
                                     ellipsoid_pts, p, true);
  REQUIRE(g_an.maxCoeff() <= 1e-10);

  // H and I come out in involution as well (measured, same machinery)
  const Mat h_an = involution_matrix(FamilyTag::H, StructureKind::GaugedNeumann,
                                     sphere_pts, p, true);
  REQUIRE(h_an.maxCoeff() <= 1e-10);
  const Mat i_an = involution_matrix(FamilyTag::I, StructureKind::Canonical,
                                     ellipsoid_pts, p, true);
  REQUIRE(i_an.maxCoeff() <= 1e-10);
}

TEST_CASE("single-frequency involution matrix is the 1x1 zero") {
  RawParams raw;
  raw.a = vec({2.0});
  raw.r = 1.0;
  const SystemParams p = validate_params(raw, /*allow_degenerate=*/true);
  const Mat m = involution_matrix(FamilyTag::F, StructureKind::GaugedNeumann,
                                  {packed(vec({1.0}), vec({0.3}))}, p, true);
  REQUIRE(m.rows() == 1);
  REQUIRE(m(0, 0) == 0.0);
}

TEST_CASE("analytic family gradients match finite differences") {
  const SystemParams p = params3();
  Rng rng(109);
  SampleOptions opt;
  opt.min_axis_fraction = 0.2;
  for (int i = 0; i < 8; ++i) {
    const SphereState s = random_gauged_state(p, rng, opt);
    const EllipsoidState e = random_ellipsoid_state(p, rng, opt);
    for (Eigen::Index k = 0; k < 3; ++k) {
      for (FamilyTag fam : {FamilyTag::F, FamilyTag::H}) {
        const Vec pt = packed(s.x, s.w);
        const Vec ga = family_function(fam, k, p, true).gradient(pt);
        const Vec gf = family_function(fam, k, p, false).gradient(pt);
        REQUIRE((ga - gf).cwiseAbs().maxCoeff() <=
                1e-6 * (1.0 + ga.cwiseAbs().maxCoeff()));
      }
      for (FamilyTag fam : {FamilyTag::G, FamilyTag::I}) {
        const Vec pt = packed(e.q, e.p);
        const Vec ga = family_function(fam, k, p, true).gradient(pt);
        const Vec gf = family_function(fam, k, p, false).gradient(pt);
        REQUIRE((ga - gf).cwiseAbs().maxCoeff() <=
                1e-6 * (1.0 + ga.cwiseAbs().maxCoeff()));
      }
    }
  }
}

TEST_CASE("jacobi identity holds for the dirac structures") {
  const SystemParams p = params3();
  Rng rng(113);
  for (int i = 0; i < 4; ++i) {
    const SphereState s = random_sphere_state(p, rng);
    REQUIRE(jacobi_identity_residual(StructureKind::DiracNeumann,
                                     packed(s.x, s.w), p) <= 1e-5);
    const EllipsoidState e = random_ellipsoid_state(p, rng);
    REQUIRE(jacobi_identity_residual(StructureKind::DiracJacobi,
                                     packed(e.q, e.p), p) <= 1e-5);
  }
}

TEST_CASE("gauged jacobi anomaly matches its closed form") {
  const SystemParams p = params3();
  Rng rng(127);
  for (int i = 0; i < 4; ++i) {
    const Vec pt = packed(random_sphere_position(p, rng), rng.normal_vector(3));
    REQUIRE(gauged_jacobi_anomaly_residual(pt, p) <= 1e-5);
    // and the raw residual really is order one, not noise
    REQUIRE(jacobi_identity_residual(StructureKind::GaugedNeumann, pt, p) >=
            1e-3);
  }
}

TEST_CASE("constraints are casimirs of their dirac structures") {
  const SystemParams p = params3();
  Rng rng(131);
  for (int i = 0; i < 32; ++i) {
    const SphereState s = random_sphere_state(p, rng);
    REQUIRE(constraint_casimir_residual(StructureKind::DiracNeumann,
                                        packed(s.x, s.w), p) <= 1e-10);
    const EllipsoidState e = random_ellipsoid_state(p, rng);
    REQUIRE(constraint_casimir_residual(StructureKind::DiracJacobi,
                                        packed(e.q, e.p), p) <= 1e-10);
    // gauged structure with leaf-tangent gradients
    const Vec pt = packed(s.x, rng.normal_vector(3));
    REQUIRE(leaf_casimir_residual(pt, p) <= 1e-10);
  }
}
