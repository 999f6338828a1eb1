#include "dualact/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>

#include <json.hpp>

#include "dualact/action.hpp"
#include "dualact/classical.hpp"
#include "dualact/csv.hpp"
#include "dualact/errors.hpp"
#include "dualact/references.hpp"
#include "dualact/solver.hpp"

namespace dualact {
namespace {

using nlohmann::json;

class RunTimer {
public:
  RunTimer() : start_(std::chrono::steady_clock::now()) {}

  double elapsed_seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

void write_json(const std::filesystem::path& path, const json& payload) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  if (!out.is_open()) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << payload.dump(2) << "\n";
}

// Timestamp and wall time live in a separate file so report.json stays
// byte-identical across reruns of the same scenario and seed.
void write_meta(const std::filesystem::path& out_dir, const RunTimer& timer,
                const std::string& command) {
  json meta;
  meta["command"] = command;
  meta["elapsed_seconds"] = timer.elapsed_seconds();
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  meta["timestamp_utc"] = stamp;
  write_json(out_dir / "meta.json", meta);
}

json grid_json(const Scenario& scenario) {
  json g;
  g["periods"] = scenario.periods;
  g["resolution"] = scenario.resolution;
  g["scheme"] = scheme_name(scenario.scheme);
  return g;
}

json check_json(const std::string& name, bool passed, double value,
                std::optional<double> tol = std::nullopt) {
  json c;
  c["name"] = name;
  c["passed"] = passed;
  c["value"] = value;
  if (tol) {
    c["tolerance"] = *tol;
  }
  return c;
}

Eigen::VectorXd random_box_vector(std::mt19937_64& rng, int size, double box) {
  std::uniform_real_distribution<double> uniform(-box, box);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) {
    v[i] = uniform(rng);
  }
  return v;
}

Eigen::VectorXd random_time(std::mt19937_64& rng, const std::vector<double>& periods) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(periods.size()));
  for (std::size_t a = 0; a < periods.size(); ++a) {
    std::uniform_real_distribution<double> uniform(0.0, periods[a]);
    t[static_cast<Eigen::Index>(a)] = uniform(rng);
  }
  return t;
}

// Closed-form conjugate for the self-checkable quadratic families.
std::optional<double> closed_form_conjugate(const Scenario& scenario, const Eigen::VectorXd& t,
                                            const Eigen::VectorXd& v) {
  const ScenarioModel& m = scenario.model;
  if (m.kind == ModelKind::Quadratic) {
    const Eigen::VectorXd shifted = v - m.offset;
    return 0.5 * shifted.dot(m.matrix.ldlt().solve(shifted));
  }
  if (m.kind == ModelKind::TimeScaledQuadratic && m.scaling == "one-plus-t1") {
    const double s = 1.0 + t[0];
    return 0.5 / s * v.dot(m.matrix.ldlt().solve(v));
  }
  return std::nullopt;
}

PeriodicField positions_from_phase(const PeriodicField& u, int n) {
  PeriodicField x(u.grid(), n);
  for (std::size_t node = 0; node < u.grid().node_count(); ++node) {
    for (int i = 0; i < n; ++i) {
      x.at(node, i) = u.at(node, x_component(i));
    }
  }
  return x;
}

double fit_log_log_slope(const std::vector<double>& h, const std::vector<double>& r) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double x = std::log(h[i]);
    const double y = std::log(r[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace

int run_solve(const Scenario& scenario, const RunOptions& options) {
  RunTimer timer;
  const MultiTimeGrid grid = scenario.make_grid();
  ActionProblem prob{grid, scenario.make_hamiltonian(), scenario.scheme, {}, options.threads};
  SolveConfig cfg = scenario.make_solve_config();
  if (options.seed) {
    cfg.seed = *options.seed;
  }

  const SolveReport result = solve_periodic(prob, cfg);

  json report;
  report["scenario"] = scenario.name;
  report["command"] = "solve";
  report["grid"] = grid_json(scenario);
  report["seed"] = cfg.seed;
  report["threads"] = options.threads;

  json res;
  res["converged"] = result.converged;
  res["iterations"] = result.iterations;
  res["final_grad_norm"] = result.final_grad_sup;
  res["phi"] = result.history.empty() ? 0.0 : result.history.back().phi;
  res["hamilton_residual_l2"] = result.hamilton_residual_l2;
  res["hamilton_residual_sup"] = result.hamilton_residual_sup;
  res["mean_shift_error"] = result.mean_shift_error;
  res["trivial_solution"] = result.trivial_solution;
  res["c"] = std::vector<double>(result.c.data(), result.c.data() + result.c.size());
  report["result"] = res;

  bool ok = result.converged;
  json checks = json::array();
  checks.push_back(check_json("converged", result.converged, result.final_grad_sup,
                              cfg.grad_tol));
  if (scenario.checks.hamilton_residual) {
    const bool passed = result.hamilton_residual_l2 <= *scenario.checks.hamilton_residual;
    ok = ok && passed;
    checks.push_back(check_json("hamilton_residual", passed, result.hamilton_residual_l2,
                                *scenario.checks.hamilton_residual));
  }
  if (scenario.checks.mean_shift) {
    const bool passed = result.mean_shift_error <= *scenario.checks.mean_shift;
    ok = ok && passed;
    checks.push_back(
        check_json("mean_shift", passed, result.mean_shift_error, *scenario.checks.mean_shift));
  }
  report["checks"] = checks;

  write_json(options.out_dir / "report.json", report);
  write_field_csv(options.out_dir / "field.csv", grid,
                  {{"w", &result.w, prob.hamiltonian.n}, {"v", &result.v, prob.hamiltonian.n}});
  {
    std::ofstream hist(options.out_dir / "history.csv");
    hist << "iter,phi,grad_norm\n";
    for (const HistoryEntry& entry : result.history) {
      hist << entry.iter << "," << format_double(entry.phi) << ","
           << format_double(entry.grad_sup) << "\n";
    }
  }
  write_meta(options.out_dir, timer, "solve");
  return ok ? 0 : 1;
}

int run_conjugate_check(const Scenario& scenario, const RunOptions& options) {
  RunTimer timer;
  const HamiltonianModel model = scenario.make_hamiltonian();
  const ScenarioConjugateCheck cc =
      scenario.conjugate_check.value_or(ScenarioConjugateCheck{});
  std::mt19937_64 rng(options.seed.value_or(cc.seed));
  const int m = model.dim();

  json checks = json::array();
  bool ok = true;

  // Inverse identity grad H*(grad H(u)) = u.
  {
    double worst = 0.0;
    for (int s = 0; s < cc.samples; ++s) {
      const Eigen::VectorXd t = random_time(rng, scenario.periods);
      const Eigen::VectorXd u = random_box_vector(rng, m, cc.box);
      const Eigen::VectorXd v = model.gradient(t, u);
      const Eigen::VectorXd back = grad_conjugate(model, t, v);
      worst = std::max(worst, (back - u).norm());
    }
    const bool passed = worst <= cc.tol_inverse;
    ok = ok && passed;
    checks.push_back(check_json("inverse_identity", passed, worst, cc.tol_inverse));
  }

  // Conjugate values against the closed form, when the family has one.
  {
    double worst = 0.0;
    bool applicable = false;
    for (int s = 0; s < cc.samples; ++s) {
      const Eigen::VectorXd t = random_time(rng, scenario.periods);
      const Eigen::VectorXd v = random_box_vector(rng, m, cc.box);
      const std::optional<double> closed = closed_form_conjugate(scenario, t, v);
      if (!closed) break;
      applicable = true;
      const ConjugateResult res = conjugate(model, t, v);
      worst = std::max(worst, std::abs(res.value - *closed));
    }
    if (applicable) {
      const bool passed = worst <= cc.tol_value;
      ok = ok && passed;
      checks.push_back(check_json("conjugate_value", passed, worst, cc.tol_value));
    }
  }

  // Fenchel-Young inequality on independent pairs.
  {
    double worst = 0.0;  // most negative slack
    for (int s = 0; s < cc.samples; ++s) {
      const Eigen::VectorXd t = random_time(rng, scenario.periods);
      const Eigen::VectorXd u = random_box_vector(rng, m, cc.box);
      const Eigen::VectorXd v = random_box_vector(rng, m, cc.box);
      const ConjugateResult res = conjugate(model, t, v);
      const double slack = model.value(t, u) + res.value - u.dot(v);
      worst = std::min(worst, slack);
    }
    const bool passed = worst >= -1e-9;
    ok = ok && passed;
    checks.push_back(check_json("fenchel_young", passed, worst, -1e-9));
  }

  if (model.growth) {
    std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> samples;
    samples.reserve(static_cast<std::size_t>(cc.samples));
    for (int s = 0; s < cc.samples; ++s) {
      samples.emplace_back(random_time(rng, scenario.periods), random_box_vector(rng, m, cc.box));
    }
    const GrowthReport growth = check_growth_bounds(model, samples);
    ok = ok && growth.passed;
    json g = check_json("growth_bounds", growth.passed,
                        static_cast<double>(growth.violations.size()));
    g["checked"] = growth.checked;
    g["envelope_error"] = growth.envelope_error;
    checks.push_back(g);

    if (scenario.model.growth && (scenario.model.growth->c1 > 0.0 ||
                                  scenario.model.growth->c2 > 0.0)) {
      const GradientBoundReport bound = check_gradient_bound(
          model, samples, scenario.model.growth->c1, scenario.model.growth->c2);
      ok = ok && bound.passed;
      json b = check_json("gradient_bound", bound.passed,
                          static_cast<double>(bound.violations.size()));
      b["c1"] = bound.c1;
      b["c2"] = bound.c2;
      b["fitted_c1"] = bound.fitted_c1;
      b["fitted_c2"] = bound.fitted_c2;
      checks.push_back(b);
    }
  }

  json report;
  report["scenario"] = scenario.name;
  report["command"] = "conjugate-check";
  report["samples"] = cc.samples;
  report["box"] = cc.box;
  report["checks"] = checks;
  report["passed"] = ok;

  write_json(options.out_dir / "report.json", report);
  write_meta(options.out_dir, timer, "conjugate-check");
  return ok ? 0 : 1;
}

int run_verify(const Scenario& scenario, const RunOptions& options,
               const std::filesystem::path& field_csv) {
  RunTimer timer;
  const MultiTimeGrid grid = scenario.make_grid();
  const auto fields = read_field_csv(field_csv, grid);
  if (!fields.count("w")) {
    throw ScenarioError(field_csv.string() + ": no 'w' field columns found");
  }
  ActionProblem prob{grid, scenario.make_hamiltonian(), scenario.scheme, {}, options.threads};
  const int n = prob.hamiltonian.n;
  const PeriodicField& w = fields.at("w");
  if (w.components() != phase_components(n, grid.dims())) {
    throw ScenarioError(field_csv.string() + ": 'w' has the wrong number of components");
  }

  json checks = json::array();
  bool ok = true;

  const HamiltonResidual residual = verify_hamilton(prob, w);
  {
    json c = check_json("hamilton_residual",
                        !scenario.checks.hamilton_residual ||
                            residual.l2 <= *scenario.checks.hamilton_residual,
                        residual.l2, scenario.checks.hamilton_residual);
    c["sup"] = residual.sup;
    ok = ok && c["passed"].get<bool>();
    checks.push_back(c);
  }

  if (fields.count("v")) {
    const double tol = scenario.checks.mean_shift.value_or(1e-6);
    const MeanShiftReport shift = mean_shift_check(fields.at("v"), w, tol);
    ok = ok && shift.passed;
    json c = check_json("mean_shift", shift.passed, shift.max_error, tol);
    c["c"] = std::vector<double>(shift.c.data(), shift.c.data() + shift.c.size());
    checks.push_back(c);
  }

  if (scenario.has_lagrangian()) {
    const LagrangianModel L = scenario.make_lagrangian();
    const PeriodicField traj = positions_from_phase(w, n);
    const PeriodicField el = euler_lagrange_residual(L, traj, scenario.scheme);
    json c;
    c["name"] = "euler_lagrange_residual";
    c["l2"] = grid_l2_norm(el);
    c["sup"] = sup_norm(el);
    checks.push_back(c);
  }

  json report;
  report["scenario"] = scenario.name;
  report["command"] = "verify";
  report["grid"] = grid_json(scenario);
  report["field"] = field_csv.filename().string();
  report["checks"] = checks;
  report["passed"] = ok;

  write_json(options.out_dir / "report.json", report);
  write_meta(options.out_dir, timer, "verify");
  return ok ? 0 : 1;
}

int run_conserve(const Scenario& scenario, const RunOptions& options,
                 const std::optional<std::filesystem::path>& field_csv) {
  RunTimer timer;
  if (!scenario.has_lagrangian()) {
    throw ScenarioError(scenario.name + ": conserve needs a Lagrangian model family");
  }
  const MultiTimeGrid grid = scenario.make_grid();
  const LagrangianModel L = scenario.make_lagrangian();

  PeriodicField traj = [&]() -> PeriodicField {
    if (field_csv) {
      const auto fields = read_field_csv(*field_csv, grid);
      if (fields.count("x")) {
        return fields.at("x");
      }
      if (fields.count("w")) {
        return positions_from_phase(fields.at("w"), L.n);
      }
      throw ScenarioError(field_csv->string() + ": no 'x' or 'w' columns found");
    }
    if (!scenario.reference) {
      throw ScenarioError(scenario.name + ": conserve needs a field file or a reference id");
    }
    auto ref = reference_positions(*scenario.reference, grid);
    if (!ref) {
      throw ScenarioError(scenario.name + ": unknown reference '" + *scenario.reference + "'");
    }
    return *ref;
  }();

  json checks = json::array();
  bool ok = true;

  const DivergenceReport divergence = divergence_check(L, traj, scenario.scheme);
  {
    const bool passed =
        !scenario.checks.divergence || divergence.sup <= *scenario.checks.divergence;
    ok = ok && passed;
    json c = check_json("energy_moment_divergence", passed, divergence.sup,
                        scenario.checks.divergence);
    c["l2"] = divergence.l2;
    checks.push_back(c);
  }

  if (L.p == 1) {
    const FirstIntegralReport drift = first_integral_check(L, traj, scenario.scheme);
    const bool passed =
        !scenario.checks.first_integral || drift.max_drift <= *scenario.checks.first_integral;
    ok = ok && passed;
    json c = check_json("first_integral_drift", passed, drift.max_drift,
                        scenario.checks.first_integral);
    c["h0"] = drift.h0;
    checks.push_back(c);
  }

  json report;
  report["scenario"] = scenario.name;
  report["command"] = "conserve";
  report["grid"] = grid_json(scenario);
  report["checks"] = checks;
  report["passed"] = ok;

  write_json(options.out_dir / "report.json", report);
  write_meta(options.out_dir, timer, "conserve");
  return ok ? 0 : 1;
}

int run_sweep(const Scenario& scenario, const RunOptions& options) {
  RunTimer timer;
  if (!scenario.sweep) {
    throw ScenarioError(scenario.name + ": scenario has no [sweep] table");
  }
  if (!scenario.reference) {
    throw ScenarioError(scenario.name + ": sweep needs a reference id");
  }
  const ScenarioSweep& sweep = *scenario.sweep;
  const int p = static_cast<int>(scenario.periods.size());
  const bool lagrangian = scenario.has_lagrangian();

  std::vector<double> spacings, hamilton_l2, el_l2;
  for (std::size_t res : sweep.resolutions) {
    const MultiTimeGrid grid =
        scenario.make_grid(std::vector<std::size_t>(static_cast<std::size_t>(p), res));
    const auto u = reference_phase_field(*scenario.reference, grid);
    if (!u) {
      throw ScenarioError(scenario.name + ": unknown reference '" + *scenario.reference + "'");
    }
    ActionProblem prob{grid, scenario.make_hamiltonian(), scenario.scheme, {}, options.threads};
    spacings.push_back(grid.spacing(0));
    hamilton_l2.push_back(verify_hamilton(prob, *u).l2);
    if (lagrangian) {
      const LagrangianModel L = scenario.make_lagrangian();
      const auto x = reference_positions(*scenario.reference, grid);
      el_l2.push_back(grid_l2_norm(euler_lagrange_residual(L, *x, scenario.scheme)));
    }
  }

  const double hamilton_order = fit_log_log_slope(spacings, hamilton_l2);
  json checks = json::array();
  bool ok = std::abs(hamilton_order - sweep.expected_order) <= sweep.order_tol;
  checks.push_back(check_json("hamilton_residual_order", ok, hamilton_order,
                              sweep.expected_order));
  if (lagrangian) {
    const double el_order = fit_log_log_slope(spacings, el_l2);
    const bool passed = std::abs(el_order - sweep.expected_order) <= sweep.order_tol;
    ok = ok && passed;
    checks.push_back(check_json("euler_lagrange_residual_order", passed, el_order,
                                sweep.expected_order));
  }

  json report;
  report["scenario"] = scenario.name;
  report["command"] = "sweep";
  report["reference"] = *scenario.reference;
  report["resolutions"] = sweep.resolutions;
  report["expected_order"] = sweep.expected_order;
  report["order_tol"] = sweep.order_tol;
  report["checks"] = checks;
  report["passed"] = ok;

  write_json(options.out_dir / "report.json", report);
  {
    std::ofstream out(options.out_dir / "sweep.csv");
    out << "resolution,h,hamilton_residual_l2";
    if (lagrangian) out << ",euler_lagrange_residual_l2";
    out << "\n";
    for (std::size_t i = 0; i < sweep.resolutions.size(); ++i) {
      out << sweep.resolutions[i] << "," << format_double(spacings[i]) << ","
          << format_double(hamilton_l2[i]);
      if (lagrangian) out << "," << format_double(el_l2[i]);
      out << "\n";
    }
  }
  write_meta(options.out_dir, timer, "sweep");
  return ok ? 0 : 1;
}

}  // namespace dualact
