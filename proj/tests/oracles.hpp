#pragma once

// Test-only helpers: independent oracles and small utilities shared by the
// unit suites. Everything here is deliberately written from the definitions
// (brute-force sums, finite differences), not by calling the library paths
// it is meant to check.

#include "nrflow/nrflow.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using nrflow::Vec;

inline Vec vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double x : values) v[k++] = x;
  return v;
}

inline bool exact_eq(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

// Brute-force F_k straight from the definition, no shared kernel.
inline double brute_F(const Vec& x, const Vec& y, const Vec& a,
                      Eigen::Index k) {
  const double x2 = x.squaredNorm();
  double s = 0.0;
  for (Eigen::Index l = 0; l < x.size(); ++l) {
    if (l == k) continue;
    const double J = x[k] * y[l] - x[l] * y[k];
    s += J * J / (a[k] - a[l]);
  }
  return x[k] * x[k] + s / x2;
}

inline double brute_G(const Vec& q, const Vec& p, const Vec& b,
                      Eigen::Index k) {
  double s = 0.0;
  for (Eigen::Index l = 0; l < q.size(); ++l) {
    if (l == k) continue;
    const double K = q[k] * p[l] - q[l] * p[k];
    s += K * K / (b[k] - b[l]);
  }
  return p[k] * p[k] + s;
}

// Central finite difference of a scalar function of a packed state.
inline Vec fd_gradient(const std::function<double(const Vec&)>& f,
                       const Vec& pt, double h = 1e-6) {
  Vec g(pt.size());
  Vec probe = pt;
  for (Eigen::Index i = 0; i < pt.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double fp = f(probe);
    probe[i] = saved - h;
    const double fm = f(probe);
    probe[i] = saved;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

// Directional derivative of f along a flow field at a state, by central
// differences of f along RK4 micro-steps.
inline double flow_derivative(const std::function<double(const Vec&)>& f,
                              const nrflow::Field& field, const Vec& state,
                              double h = 1e-5) {
  const Vec fwd = nrflow::rk4_step(field, state, h);
  const Vec bwd = nrflow::rk4_step(field, state, -h);
  return (f(fwd) - f(bwd)) / (2.0 * h);
}

// Velocity-negating time reversal of a packed state.
inline Vec reverse_state(nrflow::SystemTag tag, const Vec& state,
                         Eigen::Index n) {
  Vec out = state;
  if (tag == nrflow::SystemTag::Polar2N)
    out.tail(2 * n) = -state.tail(2 * n);
  else
    out.tail(n) = -state.tail(n);
  return out;
}

}  // namespace oracle
