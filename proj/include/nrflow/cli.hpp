#pragma once

// Configuration parsing, simulation runs, file outputs (CSV + JSON report),
// and the state-mapping front end. Numbers in CSV files are written with 17
// significant digits so 64-bit values round-trip exactly.

#include "nrflow/integrate.hpp"
#include "nrflow/maps.hpp"
#include "nrflow/model.hpp"
#include "nrflow/sampling.hpp"
#include "nrflow/verify.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace nrflow {

using json = nlohmann::json;

struct RunConfig {
  SystemTag system = SystemTag::Neumann;
  SystemParams params;
  std::optional<Vec> initial;           // packed; nullopt = random
  bool initial_gauged = false;          // sphere momentum block is a raw y
  std::optional<std::uint64_t> seed;
  double initial_energy = 0.5;          // kinetic energy of random momenta
  IntegrationConfig integration;
  double admission_tol = kAdmissionTol;

  struct Outputs {
    std::string trajectory_csv;
    std::string invariants_csv;
    std::string report_json;
  } outputs;

  struct Tolerances {
    double constraint = 1e-8;
    double drift = 1e-8;
    double kappa = 1e-8;
  } tolerances;

  VerifyOptions verify;

  struct MapSpec {
    std::string kind;  // gauss | lift_rosochatius | lift_dual | gauge
    double mu = 0.0;
    double lambda = 0.0;
    std::optional<Vec> theta0;
  } map;

  json echo;
};

namespace detail {

inline Vec vec_from_json(const json& j, const std::string& field) {
  if (!j.is_array())
    throw std::invalid_argument("config: \"" + field + "\" must be an array");
  Vec v(j.size());
  Eigen::Index k = 0;
  for (const auto& item : j) {
    if (!item.is_number())
      throw std::invalid_argument("config: \"" + field +
                                  "\" must contain numbers");
    v[k++] = item.get<double>();
  }
  return v;
}

inline json vec_to_json(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

// Packs the "initial" config object into the [pos; vel] layout of the tag.
// A sphere state given as (x, y) keeps the raw gauged momentum; *gauged is
// set so consumers can tangent-project when they need the velocity.
inline Vec parse_initial_state(const json& j, SystemTag tag,
                               const SystemParams& params, bool* gauged) {
  const Eigen::Index n = params.size();
  auto field = [&](const char* name) {
    if (!j.contains(name))
      throw std::invalid_argument(std::string("config: initial state needs \"") +
                                  name + "\"");
    Vec v = vec_from_json(j.at(name), name);
    if (v.size() != n)
      throw std::invalid_argument(std::string("config: initial \"") + name +
                                  "\" must have " + std::to_string(n) +
                                  " entries");
    return v;
  };

  switch (tag) {
    case SystemTag::Neumann:
    case SystemTag::Rosochatius: {
      const Vec x = field("x");
      Vec w;
      if (j.contains("v")) {
        w = field("v");
      } else if (j.contains("y")) {
        w = field("y");
        *gauged = true;
      } else {
        throw std::invalid_argument(
            "config: initial state needs \"v\" (or a gauged \"y\")");
      }
      Vec packed(2 * n);
      packed << x, w;
      return packed;
    }
    case SystemTag::Jacobi:
    case SystemTag::DualRosochatius: {
      Vec packed(2 * n);
      packed << field("q"), field("p");
      return packed;
    }
    case SystemTag::Polar2N: {
      Vec packed(4 * n);
      packed << field("q"), field("theta"), field("qdot"), field("thetadot");
      return packed;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace detail

/// Parses and validates a JSON configuration document. Parameter validation
/// is delegated to validate_params; messages name the offending field.
inline RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") +
                                err.what());
  }

  RunConfig cfg;
  cfg.echo = doc;
  if (!doc.contains("system"))
    throw std::invalid_argument("config: missing \"system\"");
  cfg.system = tag_from_name(doc.at("system").get<std::string>());

  if (!doc.contains("params"))
    throw std::invalid_argument("config: missing \"params\"");
  const json& jp = doc.at("params");
  RawParams raw;
  if (jp.contains("a")) raw.a = detail::vec_from_json(jp.at("a"), "a");
  if (jp.contains("b")) raw.b = detail::vec_from_json(jp.at("b"), "b");
  if (!jp.contains("r"))
    throw std::invalid_argument("config: params missing \"r\"");
  raw.r = jp.at("r").get<double>();
  if (jp.contains("c")) raw.c = detail::vec_from_json(jp.at("c"), "c");
  if (jp.contains("d")) raw.d = detail::vec_from_json(jp.at("d"), "d");
  cfg.params = validate_params(raw);

  if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("initial_energy"))
    cfg.initial_energy = doc.at("initial_energy").get<double>();

  if (doc.contains("initial")) {
    const json& ji = doc.at("initial");
    if (ji.is_string()) {
      if (ji.get<std::string>() != "random")
        throw std::invalid_argument(
            "config: initial must be a state object or \"random\"");
      if (!cfg.seed)
        throw std::invalid_argument(
            "config: random initial state requires \"seed\"");
    } else {
      cfg.initial = detail::parse_initial_state(ji, cfg.system, cfg.params,
                                                &cfg.initial_gauged);
    }
  }

  if (doc.contains("integration")) {
    const json& jc = doc.at("integration");
    if (jc.contains("step")) cfg.integration.step = jc.at("step").get<double>();
    if (jc.contains("t_end"))
      cfg.integration.t_end = jc.at("t_end").get<double>();
    if (jc.contains("projection")) {
      const std::string p = jc.at("projection").get<std::string>();
      if (p == "none")
        cfg.integration.projection = Projection::None;
      else if (p == "renormalize")
        cfg.integration.projection = Projection::Renormalize;
      else
        throw std::invalid_argument("config: projection must be \"none\" or "
                                    "\"renormalize\"");
    }
    if (jc.contains("sample_stride"))
      cfg.integration.sample_stride = jc.at("sample_stride").get<int>();
    if (jc.contains("singular_guard_radius"))
      cfg.integration.singular_guard_radius =
          jc.at("singular_guard_radius").get<double>();
    cfg.integration.validate();
  }

  if (doc.contains("outputs")) {
    const json& jo = doc.at("outputs");
    if (jo.contains("trajectory_csv"))
      cfg.outputs.trajectory_csv = jo.at("trajectory_csv").get<std::string>();
    if (jo.contains("invariants_csv"))
      cfg.outputs.invariants_csv = jo.at("invariants_csv").get<std::string>();
    if (jo.contains("report_json"))
      cfg.outputs.report_json = jo.at("report_json").get<std::string>();
  }

  if (doc.contains("tolerances")) {
    const json& jt = doc.at("tolerances");
    if (jt.contains("constraint"))
      cfg.tolerances.constraint = jt.at("constraint").get<double>();
    if (jt.contains("drift")) cfg.tolerances.drift = jt.at("drift").get<double>();
    if (jt.contains("kappa")) cfg.tolerances.kappa = jt.at("kappa").get<double>();
  }
  if (doc.contains("admission_tol"))
    cfg.admission_tol = doc.at("admission_tol").get<double>();

  if (doc.contains("verify")) {
    const json& jv = doc.at("verify");
    if (jv.contains("points")) cfg.verify.points = jv.at("points").get<int>();
    if (jv.contains("trajectories"))
      cfg.verify.trajectories = jv.at("trajectories").get<int>();
  }
  if (cfg.seed) cfg.verify.seed = *cfg.seed;

  if (doc.contains("map")) {
    const json& jm = doc.at("map");
    if (jm.contains("kind")) cfg.map.kind = jm.at("kind").get<std::string>();
    if (jm.contains("mu")) cfg.map.mu = jm.at("mu").get<double>();
    if (jm.contains("lambda")) cfg.map.lambda = jm.at("lambda").get<double>();
    if (jm.contains("theta0"))
      cfg.map.theta0 = detail::vec_from_json(jm.at("theta0"), "theta0");
  }

  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::vector<std::string> state_labels(SystemTag tag, Eigen::Index n) {
  std::vector<std::string> labels;
  auto block = [&](const char* prefix) {
    for (Eigen::Index k = 1; k <= n; ++k)
      labels.push_back(std::string(prefix) + "_" + std::to_string(k));
  };
  switch (tag) {
    case SystemTag::Neumann:
    case SystemTag::Rosochatius:
      block("x");
      block("v");
      break;
    case SystemTag::Jacobi:
    case SystemTag::DualRosochatius:
      block("q");
      block("p");
      break;
    case SystemTag::Polar2N:
      block("q");
      block("theta");
      block("qdot");
      block("thetadot");
      break;
  }
  return labels;
}

inline const char* invariant_letter(SystemTag tag) {
  switch (tag) {
    case SystemTag::Neumann: return "F";
    case SystemTag::Jacobi: return "G";
    case SystemTag::Rosochatius: return "H";
    case SystemTag::DualRosochatius: return "I";
    case SystemTag::Polar2N: return "L";
  }
  return "?";
}

inline void write_trajectory_csv(const std::string& path, SystemTag tag,
                                 const Trajectory& traj, Eigen::Index n) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (const std::string& label : state_labels(tag, n)) out << "," << label;
  out << "\n";
  for (std::size_t j = 0; j < traj.size(); ++j) {
    out << format_double(traj.times[j]);
    for (Eigen::Index k = 0; k < traj.states[j].size(); ++k)
      out << "," << format_double(traj.states[j][k]);
    out << "\n";
  }
  if (traj.truncated)
    out << "# truncated at t=" << format_double(traj.truncation_time) << ": "
        << traj.truncation_reason << "\n";
}

inline void write_invariants_csv(const std::string& path, SystemTag tag,
                                 const Trajectory& traj, Eigen::Index n) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (Eigen::Index k = 1; k <= n; ++k)
    out << "," << invariant_letter(tag) << "_" << k;
  out << ",hamiltonian\n";
  for (std::size_t j = 0; j < traj.invariant_samples.size(); ++j) {
    out << format_double(traj.times[j]);
    for (Eigen::Index k = 0; k < traj.invariant_samples[j].size(); ++k)
      out << "," << format_double(traj.invariant_samples[j][k]);
    out << "\n";
  }
  if (traj.truncated)
    out << "# truncated at t=" << format_double(traj.truncation_time) << ": "
        << traj.truncation_reason << "\n";
}

inline json metric_json(double value, double tolerance) {
  return json{{"value", value}, {"tolerance", tolerance},
              {"pass", std::abs(value) <= tolerance}};
}

inline std::string resolve(const std::string& out_dir,
                           const std::string& path) {
  if (path.empty() || out_dir.empty()) return path;
  return (std::filesystem::path(out_dir) / path).string();
}

}  // namespace detail

/// Draws the configured (or random) initial state and checks admission.
inline Vec initial_state(const RunConfig& cfg) {
  const Eigen::Index n = cfg.params.size();
  Vec state;
  if (cfg.initial) {
    state = *cfg.initial;
    if (cfg.initial_gauged)
      state.tail(n) = tangent_project(state.head(n), Vec(state.tail(n)));
  } else {
    Rng rng(cfg.seed.value_or(0));
    const double speed = std::sqrt(2.0 * cfg.initial_energy);
    SampleOptions opt;
    opt.speed = speed;
    // keep random barrier starts resolvable
    opt.min_axis_fraction =
        (cfg.params.c.maxCoeff() > 0.0 || cfg.params.d.maxCoeff() > 0.0 ||
         cfg.system == SystemTag::Polar2N)
            ? 0.3
            : 0.0;
    switch (cfg.system) {
      case SystemTag::Neumann:
      case SystemTag::Rosochatius: {
        const SphereState s = random_sphere_state(cfg.params, rng, opt);
        state.resize(2 * n);
        state << s.x, s.w;
        break;
      }
      case SystemTag::Jacobi:
      case SystemTag::DualRosochatius: {
        const EllipsoidState s = random_ellipsoid_state(cfg.params, rng, opt);
        state.resize(2 * n);
        state << s.q, s.p;
        break;
      }
      case SystemTag::Polar2N: {
        const EllipsoidState s = random_ellipsoid_state(cfg.params, rng, opt);
        Vec theta(n), thetadot(n);
        for (Eigen::Index k = 0; k < n; ++k) {
          theta[k] = rng.uniform(0.0, 6.283185307179586);
          thetadot[k] = 0.25 * rng.normal();
        }
        state.resize(4 * n);
        state << s.q, theta, s.p, thetadot;
        break;
      }
    }
  }

  const auto [r1, r2] = constraint_residuals(cfg.system, state, cfg.params);
  if (std::abs(r1) > cfg.admission_tol || std::abs(r2) > cfg.admission_tol)
    throw std::invalid_argument(
        "initial state not admitted: constraint residuals (" +
        detail::format_double(r1) + ", " + detail::format_double(r2) +
        ") exceed " + detail::format_double(cfg.admission_tol));
  return state;
}

/// Runs the configured simulation and writes trajectory CSV, invariants CSV
/// and the JSON report. Returns a process exit status: nonzero on a
/// singular-guard trip or write failure.
inline int run_simulate(const RunConfig& cfg, const std::string& out_dir = "",
                        std::ostream* log = nullptr) {
  const Eigen::Index n = cfg.params.size();
  const Vec start = initial_state(cfg);
  const Trajectory traj =
      integrate_flow(cfg.system, start, cfg.params, cfg.integration);

  const bool ellipsoid_side = cfg.system == SystemTag::Jacobi ||
                              cfg.system == SystemTag::DualRosochatius;

  json report;
  report["system"] = tag_name(cfg.system);
  report["truncated"] = traj.truncated;
  if (traj.truncated) {
    report["truncation_time"] = traj.truncation_time;
    report["truncation_reason"] = traj.truncation_reason;
  }
  json metrics;
  metrics["max_constraint_residual"] = detail::metric_json(
      max_constraint_residual(traj), cfg.tolerances.constraint);
  if (!traj.invariant_samples.empty()) {
    const Vec drift = drift_report(traj);
    json per;
    for (Eigen::Index k = 0; k < n; ++k)
      per[std::string(detail::invariant_letter(cfg.system)) + "_" +
          std::to_string(k + 1)] =
          detail::metric_json(drift[k], cfg.tolerances.drift);
    per["hamiltonian"] = detail::metric_json(drift[n], cfg.tolerances.drift);
    metrics["invariant_drift"] = per;
  }
  if (ellipsoid_side)
    metrics["kappa_drift"] =
        detail::metric_json(kappa_drift(traj), cfg.tolerances.kappa);
  report["metrics"] = metrics;
  report["config_echo"] = cfg.echo;

  try {
    if (!cfg.outputs.trajectory_csv.empty())
      detail::write_trajectory_csv(
          detail::resolve(out_dir, cfg.outputs.trajectory_csv), cfg.system,
          traj, n);
    if (!cfg.outputs.invariants_csv.empty())
      detail::write_invariants_csv(
          detail::resolve(out_dir, cfg.outputs.invariants_csv), cfg.system,
          traj, n);
    if (!cfg.outputs.report_json.empty()) {
      std::ofstream out(detail::resolve(out_dir, cfg.outputs.report_json));
      if (!out)
        throw std::runtime_error("cannot write " + cfg.outputs.report_json);
      out << report.dump(2) << "\n";
    }
  } catch (const std::exception& err) {
    if (log) *log << "error: " << err.what() << "\n";
    return 2;
  }

  if (log) {
    *log << "simulate " << tag_name(cfg.system) << ": " << traj.size()
         << " samples, max constraint residual "
         << detail::format_double(max_constraint_residual(traj)) << "\n";
    if (traj.truncated)
      *log << "truncated at t=" << traj.truncation_time << ": "
           << traj.truncation_reason << "\n";
  }
  return traj.truncated ? 1 : 0;
}

inline json report_to_json(const SuiteReport& report) {
  json checks = json::array();
  for (const Check& c : report.checks)
    checks.push_back(json{{"name", c.name},
                          {"residual", c.residual},
                          {"tolerance", c.tolerance},
                          {"pass", c.pass},
                          {"gating", c.gating}});
  return json{{"suite", report.suite},
              {"checks", checks},
              {"passed", report.passed()}};
}

/// Runs one verification suite against the configured parameters; writes the
/// JSON report when configured. Exit status 0 iff every gating check passed.
inline int run_verify(const std::string& suite, const RunConfig& cfg,
                      const std::string& out_dir = "",
                      std::ostream* log = nullptr) {
  const SuiteReport report = run_suite(suite, cfg.params, cfg.verify);
  json doc = report_to_json(report);
  doc["config_echo"] = cfg.echo;

  if (!cfg.outputs.report_json.empty()) {
    std::ofstream out(detail::resolve(out_dir, cfg.outputs.report_json));
    if (!out) {
      if (log) *log << "error: cannot write " << cfg.outputs.report_json << "\n";
      return 2;
    }
    out << doc.dump(2) << "\n";
  }
  if (log) {
    for (const Check& c : report.checks)
      *log << (c.pass ? "  pass  " : (c.gating ? "  FAIL  " : "  info  "))
           << c.name << "  residual " << detail::format_double(c.residual)
           << "  tolerance " << detail::format_double(c.tolerance) << "\n";
    *log << "suite " << report.suite << ": "
         << (report.passed() ? "passed" : "FAILED") << "\n";
  }
  return report.passed() ? 0 : 1;
}

/// Applies the configured map (Gauss map, one of the two lifts, or a gauge
/// transformation) to the configured initial state and writes the result.
inline int run_map(const RunConfig& cfg, const std::string& out_dir = "",
                   std::ostream* log = nullptr) {
  const Eigen::Index n = cfg.params.size();
  if (!cfg.initial)
    throw std::invalid_argument("map: an explicit initial state is required");
  Vec state = *cfg.initial;

  std::string kind = cfg.map.kind;
  if (kind.empty()) {
    switch (cfg.system) {
      case SystemTag::Jacobi: kind = "gauss"; break;
      case SystemTag::Rosochatius: kind = "lift_rosochatius"; break;
      case SystemTag::DualRosochatius: kind = "lift_dual"; break;
      case SystemTag::Neumann: kind = "gauge"; break;
      default:
        throw std::invalid_argument("map: no default map for system " +
                                    std::string(tag_name(cfg.system)));
    }
  }

  // the lifts need the constrained velocity; the gauge shift needs raw y
  if (cfg.initial_gauged && kind != "gauge")
    state.tail(n) = tangent_project(state.head(n), Vec(state.tail(n)));

  const Vec theta0 = cfg.map.theta0.value_or(Vec::Zero(n));
  json out;
  out["kind"] = kind;
  out["system"] = tag_name(cfg.system);

  if (kind == "gauss") {
    const SphereState mapped =
        gauss_map(state.head(n), state.tail(n), cfg.params, cfg.map.mu);
    out["mu"] = cfg.map.mu;
    out["kappa"] = compute_kappa(state.head(n), state.tail(n), cfg.params);
    out["output"] = {{"x", detail::vec_to_json(mapped.x)},
                     {"y", detail::vec_to_json(mapped.w)},
                     {"v", detail::vec_to_json(tangent_project(mapped.x,
                                                               mapped.w))}};
  } else if (kind == "lift_rosochatius") {
    const LiftedState lift =
        lift_rosochatius(state.head(n), state.tail(n), cfg.params, theta0);
    out["theta0"] = detail::vec_to_json(theta0);
    out["output"] = {{"z", detail::vec_to_json(lift.position)},
                     {"w", detail::vec_to_json(lift.velocity)},
                     {"a_doubled", detail::vec_to_json(lift.params_2n.a)}};
  } else if (kind == "lift_dual") {
    const LiftedState lift =
        lift_dual(state.head(n), state.tail(n), cfg.params, theta0);
    out["theta0"] = detail::vec_to_json(theta0);
    out["output"] = {{"zeta", detail::vec_to_json(lift.position)},
                     {"pi", detail::vec_to_json(lift.velocity)},
                     {"b_doubled", detail::vec_to_json(lift.params_2n.b)}};
  } else if (kind == "gauge") {
    const SphereState shifted = gauge_transform(
        {state.head(n), state.tail(n), true}, cfg.map.lambda);
    out["lambda"] = cfg.map.lambda;
    out["output"] = {{"x", detail::vec_to_json(shifted.x)},
                     {"y", detail::vec_to_json(shifted.w)}};
  } else {
    throw std::invalid_argument("map: unknown kind \"" + kind + "\"");
  }

  const std::string path = cfg.outputs.report_json.empty()
                               ? std::string("mapped.json")
                               : cfg.outputs.report_json;
  std::ofstream file(detail::resolve(out_dir, path));
  if (!file) {
    if (log) *log << "error: cannot write " << path << "\n";
    return 2;
  }
  file << out.dump(2) << "\n";
  if (log) *log << "map " << kind << " -> " << path << "\n";
  return 0;
}

/// Prints the normalized parameter bundle; exit status reflects validity.
inline int params_check(const RunConfig& cfg, std::ostream& out) {
  json doc;
  doc["a"] = detail::vec_to_json(cfg.params.a);
  doc["b"] = detail::vec_to_json(cfg.params.b);
  doc["r"] = cfg.params.r;
  doc["c"] = detail::vec_to_json(cfg.params.c);
  doc["d"] = detail::vec_to_json(cfg.params.d);
  out << doc.dump(2) << "\n";
  return 0;
}

}  // namespace nrflow
