#include "nrflow/dynamics.hpp"
#include "nrflow/integrate.hpp"
#include "nrflow/maps.hpp"
#include "nrflow/sampling.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace nrflow;
using oracle::vec;

namespace {

SystemParams params12() {
  RawParams raw;
  raw.a = vec({1.0, 2.0});
  raw.r = 1.0;
  return validate_params(raw);
}

SystemParams params41() {
  RawParams raw;
  raw.b = vec({4.0, 1.0});
  raw.r = 1.0;
  return validate_params(raw);
}

}  // namespace

TEST_CASE("neumann acceleration worked values") {
  const SystemParams p = params12();
  const AccelResult r = neumann_accel(vec({0.0, 1.0}), vec({1.0, 0.0}), p);
  REQUIRE(r.accel[0] == 0.0);
  REQUIRE(r.accel[1] == -1.0);
  REQUIRE(r.multiplier == -1.0);  // sum(xdot^2 - a x^2) / x^2 = (1 - 2)/1

  const AccelResult eq = neumann_accel(vec({1.0, 0.0}), vec({0.0, 0.0}), p);
  REQUIRE(eq.accel.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("isotropic frequencies give free sphere motion") {
  // duplicated frequencies are rejected by validation but fine dynamically
  SystemParams p;
  p.a = vec({1.5, 1.5, 1.5});
  p.b = p.a.cwiseInverse();
  p.r = 1.0;
  p.c = Vec::Zero(3);
  p.d = Vec::Zero(3);
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const SphereState s = random_sphere_state(p, rng);
    const AccelResult r = neumann_accel(s.x, s.w, p);
    const Vec expected = -s.x * s.w.squaredNorm() / s.x.squaredNorm();
    REQUIRE((r.accel - expected).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("jacobi acceleration worked values") {
  const SystemParams p = params41();
  const AccelResult r = jacobi_accel(vec({2.0, 0.0}), vec({0.0, 1.0}), p);
  REQUIRE(r.accel[0] == -2.0);
  REQUIRE(r.accel[1] == 0.0);
  REQUIRE(r.multiplier == 4.0);  // (sum p^2/b) / R^2 = 1 / (1/4)

  const AccelResult rest = jacobi_accel(vec({2.0, 0.0}), vec({0.0, 0.0}), p);
  REQUIRE(rest.accel.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("spherical ellipsoid degenerates to great-circle dynamics") {
  SystemParams p;
  p.b = vec({2.5, 2.5, 2.5});
  p.a = p.b.cwiseInverse();
  p.r = 1.0;
  p.c = Vec::Zero(3);
  p.d = Vec::Zero(3);
  Rng rng(5);
  for (int i = 0; i < 20; ++i) {
    const EllipsoidState s = random_ellipsoid_state(p, rng);
    const AccelResult r = jacobi_accel(s.q, s.p, p);
    const Vec expected = -s.p.squaredNorm() * s.q / 2.5;
    REQUIRE((r.accel - expected).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("rosochatius acceleration worked values") {
  RawParams raw;
  raw.a = vec({1.0, 2.0});
  raw.r = 1.0;
  raw.c = vec({1.0, 1.0});
  const SystemParams p = validate_params(raw);
  const double is2 = 1.0 / std::sqrt(2.0);
  const AccelResult r = rosochatius_accel(vec({is2, is2}), vec({0.0, 0.0}), p);
  REQUIRE(r.multiplier == Catch::Approx(2.5).margin(1e-14));
  REQUIRE(r.accel[0] ==
          Catch::Approx(1.0 / (2.0 * std::sqrt(2.0))).margin(1e-14));
  REQUIRE(r.accel[1] ==
          Catch::Approx(-1.0 / (2.0 * std::sqrt(2.0))).margin(1e-14));
}

TEST_CASE("zero centrifugal constants reproduce neumann exactly") {
  RawParams raw;
  raw.a = vec({0.5, 1.25, 3.0});
  raw.r = 1.2;
  const SystemParams p = validate_params(raw);
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const Vec x = rng.normal_vector(3);
    const Vec v = rng.normal_vector(3);
    const AccelResult a = neumann_accel(x, v, p);
    const AccelResult b = rosochatius_accel(x, v, p);
    REQUIRE(oracle::exact_eq(a.accel, b.accel));
    REQUIRE(a.multiplier == b.multiplier);
  }
}

TEST_CASE("zero d reproduces jacobi exactly") {
  const SystemParams p = params41();
  Rng rng(19);
  for (int i = 0; i < 50; ++i) {
    const Vec q = rng.normal_vector(2);
    const Vec pr = rng.normal_vector(2);
    const AccelResult a = jacobi_accel(q, pr, p);
    const AccelResult b = dual_rosochatius_accel(q, pr, p);
    REQUIRE(oracle::exact_eq(a.accel, b.accel));
    REQUIRE(a.multiplier == b.multiplier);
  }
}

TEST_CASE("sphere tangency identity x.accel + |xdot|^2 = 0") {
  RawParams raw;
  raw.a = vec({0.5, 1.0, 2.0});
  raw.r = 1.0;
  raw.c = vec({0.1, 0.0, 0.2});
  const SystemParams p = validate_params(raw);
  Rng rng(23);
  SampleOptions opt;
  opt.min_axis_fraction = 0.2;
  for (int i = 0; i < 50; ++i) {
    const SphereState s = random_sphere_state(p, rng, opt);
    const AccelResult rn = neumann_accel(s.x, s.w, p);
    REQUIRE(std::abs(s.x.dot(rn.accel) + s.w.squaredNorm()) <= 1e-10);
    const AccelResult rr = rosochatius_accel(s.x, s.w, p);
    REQUIRE(std::abs(s.x.dot(rr.accel) + s.w.squaredNorm()) <= 1e-10);
  }
}

TEST_CASE("gauge invariance of the neumann field") {
  RawParams raw;
  raw.a = vec({1.0, 2.0, 3.0});
  raw.r = 1.0;
  const SystemParams p = validate_params(raw);
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const SphereState s = random_gauged_state(p, rng);
    const double lambda = rng.uniform(-10.0, 10.0);
    const Vec v1 = tangent_project(s.x, s.w);
    const Vec v2 = tangent_project(s.x, Vec(s.w + lambda * s.x));
    const Vec a1 = neumann_accel(s.x, v1, p).accel;
    const Vec a2 = neumann_accel(s.x, v2, p).accel;
    REQUIRE((a1 - a2).cwiseAbs().maxCoeff() <=
            1e-12 * (1.0 + a1.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("jacobi acceleration is parallel to q/b") {
  RawParams raw;
  raw.b = vec({4.0, 2.0, 1.0});
  raw.r = 1.0;
  const SystemParams p = validate_params(raw);
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const EllipsoidState s = random_ellipsoid_state(p, rng);
    const Vec accel = jacobi_accel(s.q, s.p, p).accel;
    const Vec dir = s.q.cwiseQuotient(p.b);
    for (Eigen::Index k = 0; k < 3; ++k)
      for (Eigen::Index l = k + 1; l < 3; ++l)
        REQUIRE(std::abs(accel[k] * dir[l] - accel[l] * dir[k]) <=
                1e-12 * (1.0 + accel.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rosochatius equals the reduced 2N neumann acceleration") {
  RawParams raw;
  raw.a = vec({0.25, 0.5, 1.0});
  raw.r = 1.0;
  raw.c = vec({0.05, 0.08, 0.03});
  const SystemParams p = validate_params(raw);
  Rng rng(37);
  SampleOptions opt;
  opt.min_axis_fraction = 0.25;
  opt.positive_orthant = true;
  for (int i = 0; i < 25; ++i) {
    const SphereState s = random_sphere_state(p, rng, opt);
    Vec theta0(3);
    for (Eigen::Index k = 0; k < 3; ++k) theta0[k] = rng.uniform(0.0, 6.28);
    const LiftedState lift = lift_rosochatius(s.x, s.w, p, theta0);
    const Vec az =
        neumann_accel(lift.position, lift.velocity, lift.params_2n).accel;
    // radial chain rule: xdd = (z.zdd + |zdot|^2 - xdot^2)/x per plane
    const Vec direct = rosochatius_accel(s.x, s.w, p).accel;
    for (Eigen::Index k = 0; k < 3; ++k) {
      const double zk = lift.position[k], zkn = lift.position[k + 3];
      const double wk = lift.velocity[k], wkn = lift.velocity[k + 3];
      const double radius = std::hypot(zk, zkn);
      const double rdot = (zk * wk + zkn * wkn) / radius;
      const double rdd =
          (zk * az[k] + zkn * az[k + 3] + wk * wk + wkn * wkn) / radius -
          rdot * rdot / radius;
      REQUIRE(std::abs(rdd - direct[k]) <= 1e-10 * (1.0 + std::abs(rdd)));
    }
  }
}

TEST_CASE("dual acceleration matches the polar form with theta' eliminated") {
  RawParams raw;
  raw.b = vec({4.0, 2.0, 1.0});
  raw.r = 1.0;
  raw.d = vec({0.3, 0.1, 0.7});
  const SystemParams p = validate_params(raw);
  Rng rng(41);
  SampleOptions opt;
  opt.min_axis_fraction = 0.2;
  opt.positive_orthant = true;
  for (int i = 0; i < 25; ++i) {
    const EllipsoidState s = random_ellipsoid_state(p, rng, opt);
    PolarState polar;
    polar.x = s.q;
    polar.theta = rng.normal_vector(3);
    polar.xdot = s.p;
    polar.thetadot.resize(3);
    for (Eigen::Index k = 0; k < 3; ++k)
      polar.thetadot[k] = std::sqrt(p.d[k]) / (s.q[k] * s.q[k]);
    const auto [qacc, thacc] = polar_geodesic_accel(polar, p);
    const Vec direct = dual_rosochatius_accel(s.q, s.p, p).accel;
    REQUIRE((qacc - direct).cwiseAbs().maxCoeff() <=
            1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("polar geodesics conserve per-plane angular momentum") {
  RawParams raw;
  raw.b = vec({4.0, 2.0, 1.0});
  raw.r = 1.0;
  const SystemParams p = validate_params(raw);
  Rng rng(43);
  SampleOptions opt;
  opt.min_axis_fraction = 0.25;
  opt.positive_orthant = true;
  const EllipsoidState s = random_ellipsoid_state(p, rng, opt);
  Vec state(12);
  const Vec theta = rng.normal_vector(3);
  const Vec thetadot = 0.3 * rng.normal_vector(3);
  state << s.q, theta, s.p, thetadot;
  const Field field = first_order_field(SystemTag::Polar2N, p);

  // with thetadot = 0 the angle block stays frozen and the radial equation
  // is the plain geodesic one
  Vec frozen = state;
  frozen.tail(3).setZero();
  const Vec rhs = field(frozen);
  REQUIRE(rhs.segment(9, 3).cwiseAbs().maxCoeff() == 0.0);
  const Vec jac_acc = jacobi_accel(s.q, s.p, p).accel;
  REQUIRE((rhs.segment(6, 3) - jac_acc).cwiseAbs().maxCoeff() <= 1e-13);

  // d/ds (q_k^2 theta_k') = 0 along the flow
  for (Eigen::Index k = 0; k < 3; ++k) {
    auto ell = [k](const Vec& st) { return st[k] * st[k] * st[9 + k]; };
    REQUIRE(std::abs(oracle::flow_derivative(ell, field, state)) <= 1e-8);
  }
}

TEST_CASE("dual flow conserves the I family (directional derivative)") {
  RawParams raw;
  raw.b = vec({4.0, 2.0, 1.0});
  raw.r = 1.0;
  raw.d = vec({0.3, 0.1, 0.7});
  const SystemParams p = validate_params(raw);
  Rng rng(47);
  SampleOptions opt;
  opt.min_axis_fraction = 0.3;
  opt.positive_orthant = true;
  const Field field = first_order_field(SystemTag::DualRosochatius, p);
  for (int i = 0; i < 10; ++i) {
    const EllipsoidState s = random_ellipsoid_state(p, rng, opt);
    Vec state(6);
    state << s.q, s.p;
    for (Eigen::Index k = 0; k < 3; ++k) {
      auto ik = [&, k](const Vec& st) {
        return dual_I(st.head(3), st.tail(3), p).values[k];
      };
      REQUIRE(std::abs(oracle::flow_derivative(ik, field, state)) <= 1e-6);
    }
  }
}

TEST_CASE("first-order packing") {
  const SystemParams p12 = params12();
  const Vec f =
      as_first_order(SystemTag::Neumann, vec({0.0, 1.0, 1.0, 0.0}), p12);
  REQUIRE(oracle::exact_eq(f, vec({1.0, 0.0, 0.0, -1.0})));

  const SystemParams p41 = params41();
  const Vec g =
      as_first_order(SystemTag::Jacobi, vec({2.0, 0.0, 0.0, 1.0}), p41);
  REQUIRE(oracle::exact_eq(g, vec({0.0, 1.0, -2.0, 0.0})));

  // rest at a coordinate-axis equilibrium: zero field
  const Vec h =
      as_first_order(SystemTag::Neumann, vec({1.0, 0.0, 0.0, 0.0}), p12);
  REQUIRE(h.cwiseAbs().maxCoeff() == 0.0);

  REQUIRE_THROWS_AS(as_first_order(SystemTag::Neumann, vec({1.0, 0.0}), p12),
                    std::invalid_argument);
}

TEST_CASE("singular configurations are reported with the offending axis") {
  RawParams raw;
  raw.a = vec({1.0, 2.0});
  raw.r = 1.0;
  raw.c = vec({0.0, 0.5});
  const SystemParams p = validate_params(raw);
  try {
    rosochatius_accel(vec({1.0, 0.0}), vec({0.0, 0.0}), p);
    FAIL("expected SingularStateError");
  } catch (const SingularStateError& err) {
    REQUIRE(err.index() == 1);
  }

  RawParams rawd;
  rawd.b = vec({4.0, 1.0});
  rawd.r = 1.0;
  rawd.d = vec({0.5, 0.0});
  const SystemParams pd = validate_params(rawd);
  REQUIRE_THROWS_AS(
      dual_rosochatius_accel(vec({0.0, 1.0}), vec({0.0, 0.0}), pd),
      SingularStateError);
}
