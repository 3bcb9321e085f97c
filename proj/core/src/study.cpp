#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tfcond/errors.hpp"
#include "tfcond/harness.hpp"
#include "tfcond/manybody.hpp"

namespace tfcond {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::pair<StudyKind, std::string>>& kind_names() {
  static const std::vector<std::pair<StudyKind, std::string>> names = {
      {StudyKind::gap_vs_g, "gap_vs_g"},           {StudyKind::linf_vs_g, "linf_vs_g"},
      {StudyKind::tf_convergence, "tf_convergence"}, {StudyKind::lemma26_vs_N, "lemma26_vs_N"},
      {StudyKind::hgp_rate_vs_N, "hgp_rate_vs_N"},   {StudyKind::manybody_suite, "manybody_suite"},
  };
  return names;
}

bool sweeps_coupling(StudyKind k) {
  return k == StudyKind::gap_vs_g || k == StudyKind::linf_vs_g || k == StudyKind::tf_convergence;
}

double lookup(const Metrics& m, const std::string& key) {
  for (const auto& [k, v] : m)
    if (k == key) return v;
  return nan;
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw std::invalid_argument(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
  }
}

}  // namespace

std::string to_string(StudyKind kind) {
  for (const auto& [k, n] : kind_names())
    if (k == kind) return n;
  return "unknown";
}

StudyKind parse_study_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names())
    if (n == name) return k;
  throw std::invalid_argument("unknown study kind '" + name + "'");
}

int StudySpec::resolved_grid_n() const {
  if (grid_n > 0) return grid_n;
  return dim == 1 ? 4096 : 64;
}

double StudySpec::resolved_half_width(double value) const {
  if (half_width > 0) return half_width;
  if (sweeps_coupling(kind)) return default_half_width(trap, value * interaction.integral(dim), dim);
  if (kind == StudyKind::hgp_rate_vs_N) return 16.0;
  return 8.0;
}

void StudySpec::validate() const {
  if (values.empty()) throw std::invalid_argument("study parameter list is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0) || !std::isfinite(values[i]))
      throw std::invalid_argument("study values must be positive and finite");
    if (i > 0 && !(values[i] > values[i - 1]))
      throw std::invalid_argument("study values must be strictly increasing");
    if (!sweeps_coupling(kind) && values[i] != std::floor(values[i]))
      throw std::invalid_argument("particle numbers must be integers");
  }
  if (kind == StudyKind::manybody_suite && values.front() < 2)
    throw std::invalid_argument("few-body checks need N >= 2");
  if (dim < 1 || dim > 3) throw std::invalid_argument("dim must be 1, 2 or 3");
  if (grid_n < 0 || half_width < 0) throw std::invalid_argument("grid settings must be nonnegative");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (point_budget_s < 0) throw std::invalid_argument("point budget must be nonnegative");
  if (!(g > 0)) throw std::invalid_argument("coupling g must be positive");
  if (kind == StudyKind::hgp_rate_vs_N && !(propagator.t_final > 0))
    throw std::invalid_argument("hgp_rate_vs_N needs propagator.t_final > 0");
  trap.validate();
  interaction.validate();
}

StudySpec parse_study_spec(const std::string& json_text) {
  const std::set<std::string> sections = {"grid",     "flow",  "spectrum",  "propagator",
                                          "manybody", "study", "tolerances"};
  const ModelConfig model = parse_model_config(json_text, sections);
  const json root = json::parse(json_text);
  StudySpec s;
  s.trap = model.trap;
  s.interaction = model.interaction;
  try {
    if (root.contains("regime") && root["regime"].contains("g_N")) s.g = root["regime"]["g_N"];
    if (root.contains("study")) {
      const auto& j = root["study"];
      reject_unknown(j, "study",
                     {"kind", "values", "phi_width", "seed", "workers", "point_budget_s", "output_dir"});
      if (j.contains("kind")) s.kind = parse_study_kind(j["kind"].get<std::string>());
      if (j.contains("values")) s.values = j["values"].get<std::vector<double>>();
      s.phi_width = j.value("phi_width", s.phi_width);
      s.seed = j.value("seed", s.seed);
      s.workers = j.value("workers", s.workers);
      s.point_budget_s = j.value("point_budget_s", s.point_budget_s);
      s.output_dir = j.value("output_dir", s.output_dir);
    }
    if (root.contains("grid")) {
      const auto& j = root["grid"];
      reject_unknown(j, "grid", {"dim", "n", "half_width"});
      s.dim = j.value("dim", s.dim);
      s.grid_n = j.value("n", s.grid_n);
      s.half_width = j.value("half_width", s.half_width);
    }
    if (root.contains("flow")) {
      const auto& j = root["flow"];
      reject_unknown(j, "flow", {"dt", "tol", "max_iter", "boundary_tol"});
      s.flow.dt = j.value("dt", s.flow.dt);
      s.flow.tol = j.value("tol", s.flow.tol);
      s.flow.max_iter = j.value("max_iter", s.flow.max_iter);
      s.flow.boundary_tol = j.value("boundary_tol", s.flow.boundary_tol);
    }
    if (root.contains("spectrum")) {
      const auto& j = root["spectrum"];
      reject_unknown(j, "spectrum", {"tol", "max_iter", "guard", "shift"});
      s.spectrum.tol = j.value("tol", s.spectrum.tol);
      s.spectrum.max_iter = j.value("max_iter", s.spectrum.max_iter);
      s.spectrum.guard = j.value("guard", s.spectrum.guard);
      s.spectrum.shift = j.value("shift", s.spectrum.shift);
    }
    if (root.contains("propagator")) {
      const auto& j = root["propagator"];
      reject_unknown(j, "propagator", {"dt", "t_final", "record_every", "accuracy_guard"});
      s.propagator.dt = j.value("dt", s.propagator.dt);
      s.propagator.t_final = j.value("t_final", s.propagator.t_final);
      s.propagator.record_every = j.value("record_every", s.propagator.record_every);
      s.propagator.accuracy_guard = j.value("accuracy_guard", s.propagator.accuracy_guard);
    }
    if (root.contains("manybody")) {
      const auto& j = root["manybody"];
      reject_unknown(j, "manybody",
                     {"check", "N", "M", "modes", "trials", "g", "lambda", "t_final", "samples"});
      auto& m = s.manybody;
      m.check = j.value("check", m.check);
      m.N = j.value("N", m.N);
      m.M = j.value("M", m.M);
      m.modes = j.value("modes", m.modes);
      m.trials = j.value("trials", m.trials);
      m.g = j.value("g", m.g);
      m.lambda = j.value("lambda", m.lambda);
      m.t_final = j.value("t_final", m.t_final);
      m.samples = j.value("samples", m.samples);
    }
    if (root.contains("tolerances")) {
      const auto& j = root["tolerances"];
      reject_unknown(j, "tolerances",
                     {"min_gap", "gap_spread", "linf_relative", "grad_spread", "slope_margin",
                      "mass_drift", "strang_order", "strang_order_tol", "failure_fraction"});
      auto& t = s.tol;
      t.min_gap = j.value("min_gap", t.min_gap);
      t.gap_spread = j.value("gap_spread", t.gap_spread);
      t.linf_relative = j.value("linf_relative", t.linf_relative);
      t.grad_spread = j.value("grad_spread", t.grad_spread);
      t.slope_margin = j.value("slope_margin", t.slope_margin);
      t.mass_drift = j.value("mass_drift", t.mass_drift);
      t.strang_order = j.value("strang_order", t.strang_order);
      t.strang_order_tol = j.value("strang_order_tol", t.strang_order_tol);
      t.failure_fraction = j.value("failure_fraction", t.failure_fraction);
    }
  } catch (const json::type_error& e) {
    throw std::invalid_argument(std::string("config value has the wrong type: ") + e.what());
  }
  s.manybody.seed = s.seed;
  return s;
}

ManybodyCheckResult run_manybody_check(const ManybodyCheckSpec& spec, const TrapSpec& trap,
                                       const InteractionSpec& interaction) {
  ManybodyCheckResult out;
  if (spec.check == "appendix") {
    const AppendixReport rep = verify_appendix(spec.N, spec.M, spec.trials, spec.seed);
    out.metrics = {{"checks", static_cast<double>(rep.checks)},
                   {"violations", static_cast<double>(rep.violations)},
                   {"max_identity_error", rep.max_identity_error},
                   {"max_inequality_excess", rep.max_inequality_excess}};
    out.ok = rep.violations == 0;
    return out;
  }
  if (spec.check != "gapchain" && spec.check != "gronwall")
    throw std::invalid_argument("unknown check '" + spec.check + "'");
  if (spec.modes != "harmonic" && spec.modes != "planewave")
    throw std::invalid_argument("modes must be harmonic or planewave");
  const bool harmonic = spec.modes == "harmonic";
  const Grid grid = make_grid(1, 64, harmonic ? 8.0 : 4.0);
  const ModeBasis modes = harmonic ? harmonic_modes(grid, spec.M, trap) : planewave_modes(grid, spec.M);
  RegimeParams regime;
  regime.N = spec.N;
  regime.g_N = spec.g;
  regime.beta = interaction.beta;
  const ManyBodyHamiltonian H = build(modes, harmonic, interaction, regime);

  if (spec.check == "gapchain") {
    const ModeGroundState gs = mode_gp_solve(modes, spec.g * interaction.integral(1));
    const GapChainReport rep = verify_gap_chain(H, gs, spec.lambda, spec.trials, spec.seed);
    out.metrics = {{"mu0", rep.mu0},
                   {"mu1", rep.mu1},
                   {"chain_min_eig", rep.chain_min_eig},
                   {"counting_min_eig", rep.counting_min_eig},
                   {"saturation_defect", rep.saturation_defect},
                   {"potential_min_eig", rep.potential_min_eig},
                   {"sandwich_samples", static_cast<double>(rep.sandwich_samples)},
                   {"sandwich_violations", static_cast<double>(rep.sandwich_violations)},
                   {"ground_depletion", rep.ground_depletion},
                   {"ground_energy", rep.ground_energy}};
    out.ok = rep.ok;
    return out;
  }

  // Condensate with decaying amplitudes and seeded phases, all particles in it.
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> angle(0, 2 * M_PI);
  CVec phi0(spec.M);
  for (int a = 0; a < spec.M; ++a) phi0[a] = std::polar(1.0 / (1.0 + a), angle(rng));
  phi0.normalize();
  const CVec psi0 = H.space->product_state(phi0);
  std::vector<double> times;
  const int n = std::max(2, spec.samples);
  for (int i = 0; i < n; ++i) times.push_back(spec.t_final * i / (n - 1));
  TrackConfig cfg;
  cfg.lambda = spec.lambda;
  const TrackReport rep = evolve_and_track(H, psi0, phi0, times, cfg);
  out.metrics = {{"max_identity_error", rep.max_identity_error},
                 {"term_bound_violations", static_cast<double>(rep.term_bound_violations)},
                 {"sandwich_violations", static_cast<double>(rep.sandwich_violations)},
                 {"gronwall_rate", rep.gronwall_rate},
                 {"gronwall_offset", rep.gronwall_offset},
                 {"max_norm_drift", rep.max_norm_drift},
                 {"max_energy_drift", rep.max_energy_drift},
                 {"hartree_energy_drift", rep.hartree_energy_drift},
                 {"galerkin_leakage", rep.leakage},
                 {"final_alpha", rep.points.back().alpha}};
  out.ok = rep.ok;
  return out;
}

namespace {

const std::vector<std::string> manybody_checks = {"appendix", "gapchain", "gronwall"};

struct Task {
  double value = 0;
  int sub = 0;
};

Metrics coupling_point(const StudySpec& s, double g) {
  const double G = g * s.interaction.integral(s.dim);
  const Grid grid = make_grid(s.dim, s.resolved_grid_n(), s.resolved_half_width(g));
  const GroundStateResult gs = gp_minimize(grid, s.trap, G, s.flow);
  Metrics m = {{"E_gp", gs.E_gp},          {"mu_gp", gs.mu_gp},
               {"residual", gs.residual},  {"iterations", static_cast<double>(gs.iterations)},
               {"boundary_mass", gs.boundary_mass}};
  if (s.kind == StudyKind::gap_vs_g) {
    const SpectrumResult sp = hgp_spectrum(grid, s.trap, G, gs.phi, 2, s.spectrum);
    const double gap = sp.eigenvalues[1] - gs.mu_gp;
    m.emplace_back("mu1", sp.eigenvalues[1]);
    m.emplace_back("gap", gap);
    m.emplace_back("gap_scaled", gap * std::pow(g, 2.0 / (s.trap.s + 3)));
  }
  const LinfDiagnostics ld = linf_diagnostics(gs.phi, g, s.trap);
  m.emplace_back("linf", ld.linf);
  m.emplace_back("grad_linf", ld.grad_linf);
  m.emplace_back("linf_scaled", ld.linf_scaled);
  m.emplace_back("grad_scaled", ld.grad_scaled);
  const TFDistance td = tf_profile_distance(gs.phi, g, s.trap, s.interaction);
  m.emplace_back("tf_distance", td.distance);
  m.emplace_back("tf_relative", td.distance / td.rho_tf1_max);
  return m;
}

Metrics lemma26_point(const StudySpec& s, double N) {
  const Grid grid = make_grid(s.dim, s.resolved_grid_n(), s.resolved_half_width(N));
  const double w = s.phi_width;
  Field phi = Field::from_radial(grid, [w](double r) { return std::exp(-0.5 * r * r / (w * w)); });
  normalize(phi);
  const InteractionGap gap = interaction_gap(phi, s.interaction, N);
  return {{"measured", gap.measured},
          {"bound", gap.bound},
          {"ratio", gap.measured / gap.bound},
          {"within_bound", gap.within_bound ? 1.0 : 0.0}};
}

Metrics hgp_point(const StudySpec& s, const Field& phi0, double N) {
  const HartreeGpComparison c = compare_h_vs_gp(phi0, s.interaction, s.g, N, s.propagator);
  return {{"final_distance", c.final_distance},
          {"final_bound", c.curve.empty() ? nan : c.curve.back().bound},
          {"bound_holds", c.bound_holds ? 1.0 : 0.0},
          {"max_mass_drift", std::max(c.gp.max_mass_drift, c.hartree.max_mass_drift)},
          {"max_energy_drift", std::max(c.gp.max_energy_drift, c.hartree.max_energy_drift)}};
}

StudyRow run_task(const StudySpec& s, const Task& t, const Field* phi0) {
  StudyRow row;
  switch (s.kind) {
    case StudyKind::gap_vs_g:
    case StudyKind::linf_vs_g:
    case StudyKind::tf_convergence:
      row.params = {{"g", t.value}, {"dim", double(s.dim)}, {"grid_n", double(s.resolved_grid_n())},
                    {"half_width", s.resolved_half_width(t.value)}, {"trap_s", s.trap.s}};
      break;
    case StudyKind::lemma26_vs_N:
      row.params = {{"N", t.value}, {"beta", s.interaction.beta}, {"dim", double(s.dim)},
                    {"grid_n", double(s.resolved_grid_n())}, {"half_width", s.resolved_half_width(t.value)},
                    {"phi_width", s.phi_width}};
      break;
    case StudyKind::hgp_rate_vs_N:
      row.params = {{"N", t.value}, {"beta", s.interaction.beta}, {"g", s.g}, {"dim", double(s.dim)},
                    {"grid_n", double(s.resolved_grid_n())}, {"half_width", s.resolved_half_width(t.value)},
                    {"t_final", s.propagator.t_final}, {"dt", s.propagator.dt}};
      break;
    case StudyKind::manybody_suite:
      row.params = {{"check", double(t.sub)}, {"N", t.value}, {"M", double(s.manybody.M)},
                    {"g", s.manybody.g}, {"lambda", s.manybody.lambda}};
      break;
  }
  const auto start = std::chrono::steady_clock::now();
  try {
    switch (s.kind) {
      case StudyKind::gap_vs_g:
      case StudyKind::linf_vs_g:
      case StudyKind::tf_convergence:
        row.metrics = coupling_point(s, t.value);
        break;
      case StudyKind::lemma26_vs_N:
        row.metrics = lemma26_point(s, t.value);
        break;
      case StudyKind::hgp_rate_vs_N:
        if (!phi0) throw SolverError("initial state unavailable");
        row.metrics = hgp_point(s, *phi0, t.value);
        break;
      case StudyKind::manybody_suite: {
        ManybodyCheckSpec m = s.manybody;
        m.check = manybody_checks[t.sub];
        m.N = static_cast<int>(t.value);
        const ManybodyCheckResult r = run_manybody_check(m, s.trap, s.interaction);
        row.metrics = r.metrics;
        if (!r.ok) {
          row.ok = false;
          row.error = "check reported violations";
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (row.ok && s.point_budget_s > 0 && secs > s.point_budget_s) {
    row.ok = false;
    row.error = "point exceeded the wall-clock budget";
  }
  return row;
}

std::vector<const StudyRow*> ok_rows(const StudyResult& r) {
  std::vector<const StudyRow*> out;
  for (const auto& row : r.rows)
    if (row.ok) out.push_back(&row);
  return out;
}

// Fits metric against the swept parameter over the successful rows.
bool add_fit(StudyResult& r, const std::string& name, const std::string& xkey, const std::string& ykey) {
  std::vector<double> x, y;
  for (const StudyRow* row : ok_rows(r)) {
    const double xv = lookup(row->params, xkey), yv = lookup(row->metrics, ykey);
    if (xv > 0 && yv > 0) {
      x.push_back(xv);
      y.push_back(yv);
    }
  }
  if (x.size() < 3) return false;
  r.fits.emplace_back(name, fit_loglog(x, y));
  return true;
}

const FitResult* find_fit(const StudyResult& r, const std::string& name) {
  for (const auto& [n, f] : r.fits)
    if (n == name) return &f;
  return nullptr;
}

std::vector<double> column(const StudyResult& r, const std::string& key) {
  std::vector<double> out;
  for (const StudyRow* row : ok_rows(r)) out.push_back(lookup(row->metrics, key));
  return out;
}

void rule(StudyResult& r, std::string name, std::string checks, double value, double threshold, bool pass) {
  r.rules.push_back({std::move(name), std::move(checks), value, threshold, pass && std::isfinite(value)});
}

double spread(const std::vector<double>& v) {
  if (v.empty()) return nan;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0 ? *hi / *lo : nan;
}

// Largest ratio of consecutive values; below 1 means strictly decreasing.
double max_step_ratio(const std::vector<double>& v) {
  if (v.size() < 2) return nan;
  double m = 0;
  for (std::size_t i = 1; i < v.size(); ++i) m = std::max(m, v[i] / v[i - 1]);
  return m;
}

}  // namespace

void evaluate_study(StudyResult& r, const StudySpec& s) {
  r.fits.clear();
  r.rules.clear();
  const Tolerances& tol = s.tol;
  const int total = static_cast<int>(r.rows.size());
  r.failed_points = 0;
  for (const auto& row : r.rows) r.failed_points += row.ok ? 0 : 1;

  switch (r.kind) {
    case StudyKind::gap_vs_g: {
      const auto gap = column(r, "gap");
      const auto scaled = column(r, "gap_scaled");
      const double min_gap = gap.empty() ? nan : *std::min_element(gap.begin(), gap.end());
      const double min_scaled = scaled.empty() ? nan : *std::min_element(scaled.begin(), scaled.end());
      rule(r, "gap_positive", "mu_1 - mu_GP exceeds the minimum gap at every point", min_gap, tol.min_gap,
           min_gap > tol.min_gap);
      rule(r, "gap_scaled_positive", "min over the sweep of (mu_1 - mu_GP) g^{2/(s+3)} is positive",
           min_scaled, 0.0, min_scaled > 0);
      const double sp = spread(scaled);
      rule(r, "gap_scaled_spread", "max / min of (mu_1 - mu_GP) g^{2/(s+3)} across the sweep", sp,
           tol.gap_spread, sp < tol.gap_spread);
      if (!scaled.empty())
        r.summary.emplace_back("gap_scaled_max", *std::max_element(scaled.begin(), scaled.end()));
      add_fit(r, "gap", "g", "gap");
      break;
    }
    case StudyKind::linf_vs_g: {
      const double G1 = s.interaction.integral(s.dim);
      const double target = std::sqrt(tf_minimize(s.trap, G1, s.dim).mu_tf / G1);
      r.summary.emplace_back("linf_target", target);
      const auto rows = ok_rows(r);
      double rel = nan;
      if (!rows.empty() && rows.back() == &r.rows.back())
        rel = std::abs(lookup(rows.back()->metrics, "linf_scaled") - target) / target;
      rule(r, "linf_scaled_at_largest_g",
           "|phi|_inf g^{3/(2(s+3))} matches sqrt(mu_TF(1) / int v) at the largest g", rel,
           tol.linf_relative, rel < tol.linf_relative);
      const auto grad = column(r, "grad_scaled");
      const double sp = spread(grad);
      rule(r, "grad_scaled_spread", "max / min of |grad phi|_inf g^{-(2s-3)/(2(s+3))} across the sweep",
           sp, tol.grad_spread, sp < tol.grad_spread);
      // Growth relative to the smallest g: at most 1 when the upper bound is far from sharp.
      if (!grad.empty())
        r.summary.emplace_back("grad_scaled_max_over_first", *std::max_element(grad.begin(), grad.end()) / grad.front());
      add_fit(r, "linf", "g", "linf");
      add_fit(r, "grad_linf", "g", "grad_linf");
      break;
    }
    case StudyKind::tf_convergence: {
      const auto d = column(r, "tf_distance");
      const double ratio = d.size() == r.rows.size() ? max_step_ratio(d) : nan;
      rule(r, "tf_distance_decreasing",
           "rescaled sup distance of |phi|^2 to the unit-coupling TF profile strictly decreases in g",
           ratio, 1.0, ratio < 1.0);
      add_fit(r, "tf_distance", "g", "tf_distance");
      break;
    }
    case StudyKind::lemma26_vs_N: {
      double violations = 0;
      for (const StudyRow* row : ok_rows(r)) violations += lookup(row->metrics, "within_bound") > 0 ? 0 : 1;
      rule(r, "gap_within_bound",
           "sup |v_N * |phi|^2 - (int v) |phi|^2| stays below 2 (int |x||v|) N^{-beta} |phi|_inf "
           "|grad phi|_inf",
           violations, 0.0, violations == 0);
      const bool fitted = add_fit(r, "measured", "N", "measured");
      const double slope = fitted ? find_fit(r, "measured")->slope : nan;
      const double limit = -s.interaction.beta + tol.slope_margin;
      rule(r, "rate_in_N", "fitted log-log slope of the interaction gap is at most -beta + margin", slope,
           limit, slope <= limit);
      break;
    }
    case StudyKind::hgp_rate_vs_N: {
      const auto d = column(r, "final_distance");
      const double ratio = d.size() == r.rows.size() ? max_step_ratio(d) : nan;
      rule(r, "distance_monotone", "|phi_H(t) - phi_GP(t)|_2 at t_final does not increase with N", ratio,
           1.0, ratio <= 1.0);
      const bool fitted = add_fit(r, "final_distance", "N", "final_distance");
      const double slope = fitted ? find_fit(r, "final_distance")->slope : nan;
      const double limit = -0.5 * s.interaction.beta + tol.slope_margin;
      rule(r, "rate_in_N", "fitted log-log slope of the Hartree to GP distance is at most -beta/2 + margin",
           slope, limit, slope <= limit);
      const auto drift = column(r, "max_mass_drift");
      const double md = drift.empty() ? nan : *std::max_element(drift.begin(), drift.end());
      rule(r, "mass_conservation", "largest mass drift of either propagation", md, tol.mass_drift,
           md < tol.mass_drift);
      const double order = lookup(r.summary, "splitting_order");
      rule(r, "splitting_order", "self-convergence order of the Strang splitting", order, tol.strang_order,
           std::abs(order - tol.strang_order) <= tol.strang_order_tol);
      break;
    }
    case StudyKind::manybody_suite: {
      rule(r, "all_checks_pass",
           "finite-N identities and inequalities of the counting functional, gap chain and Gronwall "
           "derivative",
           r.failed_points, 0.0, r.failed_points == 0);
      break;
    }
  }
  const double frac = total > 0 ? static_cast<double>(r.failed_points) / total : 1.0;
  rule(r, "failure_fraction", "share of points whose solve failed", frac, tol.failure_fraction,
       frac <= tol.failure_fraction);
  r.passed = std::all_of(r.rules.begin(), r.rules.end(), [](const RuleResult& x) { return x.pass; });
}

StudyResult run_study(const StudySpec& spec) {
  spec.validate();
  StudyResult result;
  result.kind = spec.kind;

  std::vector<Task> tasks;
  for (double v : spec.values) {
    if (spec.kind == StudyKind::manybody_suite)
      for (int c = 0; c < static_cast<int>(manybody_checks.size()); ++c) tasks.push_back({v, c});
    else
      tasks.push_back({v, 0});
  }

  std::optional<Field> phi0;
  std::optional<Grid> dyn_grid;
  std::string phi0_error;
  if (spec.kind == StudyKind::hgp_rate_vs_N) {
    // Trapped GP ground state at the same effective coupling, then released.
    try {
      dyn_grid = make_grid(spec.dim, spec.resolved_grid_n(), spec.resolved_half_width(0));
      const double G = spec.g * spec.interaction.integral(spec.dim);
      phi0 = gp_minimize(*dyn_grid, spec.trap, G, spec.flow).phi;
    } catch (const std::exception& e) {
      phi0_error = e.what();
    }
  }

  result.rows.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++)
      result.rows[i] = run_task(spec, tasks[i], phi0 ? &*phi0 : nullptr);
  };
  const int nthreads = std::min<int>(spec.workers, static_cast<int>(tasks.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!phi0_error.empty())
    for (auto& row : result.rows) row.error = "initial state: " + phi0_error;

  std::sort(result.rows.begin(), result.rows.end(), [](const StudyRow& a, const StudyRow& b) {
    for (std::size_t i = 0; i < std::min(a.params.size(), b.params.size()); ++i)
      if (a.params[i].second != b.params[i].second) return a.params[i].second < b.params[i].second;
    return a.params.size() < b.params.size();
  });

  if (spec.kind == StudyKind::hgp_rate_vs_N && phi0) {
    try {
      const double N = spec.values.back();
      const Nonlinearity nl = Nonlinearity::hartree(*dyn_grid, spec.interaction, spec.g, N);
      const SplittingOrder so = splitting_order(*phi0, nl, spec.propagator);
      result.summary.emplace_back("splitting_order", so.order);
      result.summary.emplace_back("splitting_order_N", N);
    } catch (const std::exception&) {
      result.summary.emplace_back("splitting_order", nan);
    }
  }
  evaluate_study(result, spec);
  return result;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

ordered number(double v) { return std::isfinite(v) ? ordered(v) : ordered(nullptr); }

}  // namespace

std::string study_csv(const StudyResult& result) {
  std::vector<std::string> pcols, mcols;
  auto collect = [](std::vector<std::string>& cols, const Metrics& m) {
    for (const auto& [k, v] : m)
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  };
  for (const auto& row : result.rows) {
    collect(pcols, row.params);
    collect(mcols, row.metrics);
  }
  const bool manybody = result.kind == StudyKind::manybody_suite;
  std::ostringstream out;
  std::string sep;
  for (const auto& c : pcols) {
    out << sep << c;
    sep = ",";
  }
  if (manybody) out << sep << "check_name";
  for (const auto& c : mcols) out << "," << c;
  out << ",ok,error\n";
  for (const auto& row : result.rows) {
    sep.clear();
    for (const auto& c : pcols) {
      out << sep << fmt(lookup(row.params, c));
      sep = ",";
    }
    if (manybody) out << sep << manybody_checks.at(static_cast<std::size_t>(lookup(row.params, "check")));
    for (const auto& c : mcols) {
      const bool present = std::any_of(row.metrics.begin(), row.metrics.end(),
                                       [&](const auto& kv) { return kv.first == c; });
      out << "," << (present ? fmt(lookup(row.metrics, c)) : "");
    }
    out << "," << (row.ok ? 1 : 0) << "," << csv_quote(row.error) << "\n";
  }
  return out.str();
}

std::string study_summary_json(const StudyResult& result, const StudySpec& spec) {
  ordered j;
  j["kind"] = to_string(result.kind);
  j["passed"] = result.passed;
  j["points"] = result.rows.size();
  j["failed_points"] = result.failed_points;
  ordered sp;
  sp["values"] = spec.values;
  sp["dim"] = spec.dim;
  sp["grid_n"] = spec.resolved_grid_n();
  sp["trap"] = {{"strength", spec.trap.strength}, {"s", spec.trap.s}};
  sp["interaction"] = {{"profile", spec.interaction.profile}, {"beta", spec.interaction.beta}};
  sp["seed"] = spec.seed;
  j["spec"] = sp;
  ordered rules = ordered::array();
  ordered checks = ordered::object();
  for (const auto& r : result.rules) {
    ordered x;
    x["name"] = r.name;
    x["value"] = number(r.value);
    x["threshold"] = r.threshold;
    x["pass"] = r.pass;
    rules.push_back(x);
    checks[r.name] = r.checks;
  }
  j["rules"] = rules;
  j["checks"] = checks;
  ordered fits = ordered::object();
  for (const auto& [name, f] : result.fits) {
    ordered x;
    x["slope"] = f.slope;
    x["intercept"] = f.intercept;
    x["residual"] = f.residual;
    ordered pts = ordered::array();
    for (const auto& p : f.points)
      pts.push_back({{"x", p.x}, {"y", p.y}, {"fitted", p.fitted}, {"log_residual", p.log_residual}});
    x["points"] = pts;
    fits[name] = x;
  }
  j["fits"] = fits;
  ordered summary = ordered::object();
  for (const auto& [k, v] : result.summary) summary[k] = number(v);
  j["summary"] = summary;
  return j.dump(2) + "\n";
}

void write_study(const StudyResult& result, const StudySpec& spec, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const std::string base = (fs::path(dir) / to_string(result.kind)).string();
  std::ofstream csv(base + ".csv", std::ios::binary);
  csv << study_csv(result);
  std::ofstream js(base + "_summary.json", std::ios::binary);
  js << study_summary_json(result, spec);
  if (!csv || !js) throw std::runtime_error("could not write study output to " + dir);
}

}  // namespace tfcond
