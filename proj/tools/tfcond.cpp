#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfcond/dynamics.hpp"
#include "tfcond/errors.hpp"
#include "tfcond/groundstate.hpp"
#include "tfcond/harness.hpp"
#include "tfcond/model.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace tfcond;

namespace {

struct Common {
  std::string config;
  std::string out;
  std::uint64_t seed = 1;
  int workers = 1;
};

std::string read_file(const std::string& path) {
  if (path.empty()) return "{}";
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json metrics_json(const Metrics& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[k] = num(v);
  return j;
}

// Prints the summary and mirrors it into <out>/<name>.json.
int finish(const Common& c, const std::string& name, json summary, bool pass) {
  summary["pass"] = pass;
  const std::string text = summary.dump(2) + "\n";
  std::cout << text;
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    std::ofstream(fs::path(c.out) / (name + ".json")) << text;
  }
  return pass ? 0 : 1;
}

struct GridFlags {
  int n = 0;
  double box = 0;
  double tol = 0;
};

// Ground state for the groundstate and gap subcommands.
struct Solved {
  StudySpec spec;
  Grid grid;
  double g;
  double G;
  GroundStateResult gs;
};

Solved solve_ground_state(const Common& c, const GridFlags& f) {
  StudySpec spec = parse_study_spec(read_file(c.config));
  if (f.n > 0) spec.grid_n = f.n;
  if (f.box > 0) spec.half_width = f.box;
  if (f.tol > 0) spec.flow.tol = f.tol;
  spec.kind = StudyKind::gap_vs_g;
  const double g = spec.g;
  const double G = g * spec.interaction.integral(spec.dim);
  Grid grid = make_grid(spec.dim, spec.resolved_grid_n(), spec.resolved_half_width(g));
  GroundStateResult gs = gp_minimize(grid, spec.trap, G, spec.flow);
  return {spec, grid, g, G, std::move(gs)};
}

json ground_state_json(const Solved& s) {
  const Norms nm = norms(s.gs.phi);
  json j;
  j["g"] = s.g;
  j["G"] = s.G;
  j["grid"] = {{"dim", s.spec.dim}, {"n", s.grid.n()}, {"half_width", s.grid.half_width()}};
  j["E_gp"] = s.gs.E_gp;
  j["mu_gp"] = s.gs.mu_gp;
  j["norms"] = {{"l2", nm.l2}, {"l4", nm.l4}, {"linf", nm.linf}, {"h1", nm.h1},
                {"grad_linf", gradient_linf(s.gs.phi)}};
  j["residuals"] = {{"flow", s.gs.residual}, {"boundary_mass", s.gs.boundary_mass}};
  j["iterations"] = s.gs.iterations;
  return j;
}

void dump_field(const Common& c, const Field& phi) {
  if (c.out.empty()) return;
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / "phi.bin", std::ios::binary);
  write_field_binary(phi, f);
}

int cmd_groundstate(const Common& c, const GridFlags& f, bool dump) {
  const Solved s = solve_ground_state(c, f);
  if (dump) dump_field(c, s.gs.phi);
  json j = ground_state_json(s);
  j["gap"] = nullptr;
  const bool pass = s.gs.residual <= 10 * s.spec.flow.tol;
  return finish(c, "groundstate", j, pass);
}

int cmd_gap(const Common& c, const GridFlags& f, int k, bool dump) {
  const Solved s = solve_ground_state(c, f);
  if (dump) dump_field(c, s.gs.phi);
  const SpectrumResult sp = hgp_spectrum(s.grid, s.spec.trap, s.G, s.gs.phi, std::max(2, k), s.spec.spectrum);
  json j = ground_state_json(s);
  const double gap = sp.eigenvalues[1] - s.gs.mu_gp;
  j["gap"] = gap;
  j["gap_scaled"] = gap * std::pow(s.g, 2.0 / (s.spec.trap.s + 3));
  j["eigenvalues"] = sp.eigenvalues;
  j["residuals"]["eigen"] = sp.residuals;
  j["eigen_iterations"] = sp.iterations;
  double worst = 0;
  for (double r : sp.residuals) worst = std::max(worst, r);
  const bool pass = gap > s.spec.tol.min_gap && worst <= s.spec.spectrum.tol;
  return finish(c, "gap", j, pass);
}

struct DynFlags {
  std::string equation = "both";
  double t_final = 0;
  double dt = 0;
  int record_every = 0;
};

int cmd_dynamics(const Common& c, const GridFlags& gf, const DynFlags& f) {
  const std::string text = read_file(c.config);
  StudySpec spec = parse_study_spec(text);
  const ModelConfig model = parse_model_config(
      text, {"grid", "flow", "spectrum", "propagator", "manybody", "study", "tolerances"});
  if (gf.n > 0) spec.grid_n = gf.n;
  if (gf.box > 0) spec.half_width = gf.box;
  spec.kind = StudyKind::hgp_rate_vs_N;
  PropagatorConfig cfg = spec.propagator;
  if (f.t_final > 0) cfg.t_final = f.t_final;
  if (f.dt > 0) cfg.dt = f.dt;
  if (f.record_every > 0) cfg.record_every = f.record_every;
  const double g = spec.g;
  const double N = static_cast<double>(model.regime.N);
  const double G = g * spec.interaction.integral(spec.dim);
  const Grid grid = make_grid(spec.dim, spec.resolved_grid_n(), spec.resolved_half_width(0));
  const Field phi0 = gp_minimize(grid, spec.trap, G, spec.flow).phi;

  std::vector<std::pair<std::string, const PropagationTrace*>> traces;
  std::optional<HartreeGpComparison> cmp;
  std::optional<PropagationTrace> single;
  if (f.equation == "both") {
    cmp = compare_h_vs_gp(phi0, spec.interaction, g, N, cfg);
    traces = {{"gp", &cmp->gp}, {"hartree", &cmp->hartree}};
  } else if (f.equation == "gp") {
    single = propagate(phi0, Nonlinearity::cubic(G), cfg);
    traces = {{"gp", &*single}};
  } else if (f.equation == "hartree") {
    single = propagate(phi0, Nonlinearity::hartree(grid, spec.interaction, g, N), cfg);
    traces = {{"hartree", &*single}};
  } else {
    throw std::invalid_argument("--equation must be gp, hartree or both");
  }

  double mass_drift = 0, energy_drift = 0;
  std::ostringstream csv;
  csv.precision(17);
  csv << "equation,t,mass,E_free,H1,H2,Linf,distance,bound\n";
  for (const auto& [name, tr] : traces) {
    mass_drift = std::max(mass_drift, tr->max_mass_drift);
    energy_drift = std::max(energy_drift, tr->max_energy_drift);
    for (std::size_t i = 0; i < tr->records.size(); ++i) {
      const TraceRecord& r = tr->records[i];
      csv << name << "," << r.t << "," << r.mass << "," << r.energy << "," << r.h1 << "," << r.h2 << ","
          << r.linf << ",";
      if (cmp && i < cmp->curve.size())
        csv << cmp->curve[i].distance << "," << cmp->curve[i].bound;
      else
        csv << ",";
      csv << "\n";
    }
  }
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    std::ofstream(fs::path(c.out) / "trace.csv") << csv.str();
  }
  json j;
  j["equation"] = f.equation;
  j["g"] = g;
  j["N"] = N;
  j["t_final"] = cfg.t_final;
  j["dt"] = cfg.dt;
  j["max_mass_drift"] = mass_drift;
  j["max_energy_drift"] = energy_drift;
  bool pass = mass_drift < spec.tol.mass_drift;
  if (cmp) {
    j["final_distance"] = cmp->final_distance;
    j["bound_holds"] = cmp->bound_holds;
    pass = pass && cmp->bound_holds;
  }
  return finish(c, "dynamics", j, pass);
}

int cmd_manybody(const Common& c, ManybodyCheckSpec m, bool n_set, bool m_set, bool t_set) {
  const std::string text = read_file(c.config);
  const StudySpec spec = parse_study_spec(text);
  ManybodyCheckSpec base = spec.manybody;
  if (n_set) base.N = m.N;
  if (m_set) base.M = m.M;
  if (t_set) base.trials = m.trials;
  base.check = m.check;
  base.modes = m.modes;
  base.seed = c.seed;
  const ManybodyCheckResult r = run_manybody_check(base, spec.trap, spec.interaction);
  json j;
  j["check"] = base.check;
  j["N"] = base.N;
  j["M"] = base.M;
  j["modes"] = base.modes;
  j["trials"] = base.trials;
  j["metrics"] = metrics_json(r.metrics);
  return finish(c, "manybody_" + base.check, j, r.ok);
}

int cmd_study(const Common& c, bool seed_set, bool workers_set) {
  StudySpec spec = parse_study_spec(read_file(c.config));
  if (seed_set) spec.seed = spec.manybody.seed = c.seed;
  if (workers_set) spec.workers = c.workers;
  const std::string dir = !c.out.empty() ? c.out : spec.output_dir;
  const StudyResult r = run_study(spec);
  if (!dir.empty()) write_study(r, spec, dir);
  std::cout << study_summary_json(r, spec);
  return r.passed ? 0 : 1;
}

int cmd_scattering(const Common& c, const std::vector<double>& kappas, double r_max, int mesh) {
  const ModelConfig model = parse_model_config(read_file(c.config));
  json rows = json::array();
  bool pass = true;
  for (double kappa : kappas) {
    const ScatteringResult s = scattering_length(model.interaction, kappa, r_max, mesh);
    const double ratio = s.a_born > 0 ? s.a / s.a_born : std::nan("");
    const double refine = std::abs(s.a - s.a_refined) / std::max(std::abs(s.a), 1e-300);
    json x;
    x["kappa"] = kappa;
    x["a"] = s.a;
    x["a_born"] = s.a_born;
    x["born_ratio"] = num(ratio);
    x["a_refined"] = s.a_refined;
    x["refinement"] = refine;
    rows.push_back(x);
    pass = pass && refine < 1e-6;
    if (kappa <= 1e-3) pass = pass && ratio >= 0.99 && ratio <= 1.01;
  }
  json j;
  j["profile"] = model.interaction.profile;
  j["results"] = rows;
  return finish(c, "scattering", j, pass);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gross-Pitaevskii ground states, dynamics and few-body checks"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--workers", common.workers, "concurrent parameter points")->check(CLI::PositiveNumber);
  };
  GridFlags grid;
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid-n", grid.n, "grid points per dimension");
    sub->add_option("--box", grid.box, "box half-width");
    sub->add_option("--tol", grid.tol, "flow residual tolerance");
  };
  bool dump = false;

  auto* gs = app.add_subcommand("groundstate", "minimize the GP functional");
  add_common(gs);
  add_grid(gs);
  gs->add_flag("--dump", dump, "write phi.bin into --out");

  int k = 2;
  auto* gap = app.add_subcommand("gap", "ground state and lowest eigenvalues of h^GP");
  add_common(gap);
  add_grid(gap);
  gap->add_option("--k", k, "number of eigenvalues")->check(CLI::Range(2, 16));
  gap->add_flag("--dump", dump, "write phi.bin into --out");

  DynFlags dyn;
  auto* dy = app.add_subcommand("dynamics", "GP and Hartree propagation from the trapped ground state");
  add_common(dy);
  add_grid(dy);
  dy->add_option("--equation", dyn.equation, "gp, hartree or both")
      ->check(CLI::IsMember({"gp", "hartree", "both"}));
  dy->add_option("--t-final", dyn.t_final, "final time");
  dy->add_option("--dt", dyn.dt, "time step");
  dy->add_option("--record-every", dyn.record_every, "steps between trace records");

  ManybodyCheckSpec mb;
  auto* many = app.add_subcommand("manybody", "few-body identities and inequalities");
  add_common(many);
  auto* n_opt = many->add_option("--N", mb.N, "particles")->check(CLI::Range(2, 64));
  auto* m_opt = many->add_option("--M", mb.M, "modes")->check(CLI::Range(1, 64));
  many->add_option("--modes", mb.modes, "harmonic or planewave")
      ->check(CLI::IsMember({"harmonic", "planewave"}));
  many->add_option("--check", mb.check, "appendix, gapchain or gronwall")
      ->check(CLI::IsMember({"appendix", "gapchain", "gronwall"}));
  auto* t_opt = many->add_option("--trials", mb.trials, "random trials or samples")->check(CLI::PositiveNumber);

  auto* st = app.add_subcommand("study", "parameter sweep with fitted exponents and rules");
  add_common(st);

  std::vector<double> kappas{1e-3};
  double r_max = 10;
  int mesh = 4000;
  auto* sc = app.add_subcommand("scattering", "zero-energy scattering length");
  add_common(sc);
  sc->add_option("--kappa", kappas, "couplings");
  sc->add_option("--r-max", r_max, "outer radius");
  sc->add_option("--mesh", mesh, "radial intervals");

  CLI11_PARSE(app, argc, argv);
  try {
    if (gs->parsed()) return cmd_groundstate(common, grid, dump);
    if (gap->parsed()) return cmd_gap(common, grid, k, dump);
    if (dy->parsed()) return cmd_dynamics(common, grid, dyn);
    if (many->parsed()) return cmd_manybody(common, mb, n_opt->count() > 0, m_opt->count() > 0, t_opt->count() > 0);
    if (st->parsed()) {
      return cmd_study(common, st->get_option("--seed")->count() > 0, st->get_option("--workers")->count() > 0);
    }
    if (sc->parsed()) return cmd_scattering(common, kappas, r_max, mesh);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
