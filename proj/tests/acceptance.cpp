// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "tfcond/dynamics.hpp"
#include "tfcond/groundstate.hpp"
#include "tfcond/harness.hpp"
#include "tfcond/manybody.hpp"

using namespace tfcond;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string read_config(const std::string& name) {
  const std::string path = std::string(TFCOND_CONFIG_DIR) + "/" + name;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

StudySpec load(const std::string& name) { return parse_study_spec(read_config(name)); }

const RuleResult& rule(const StudyResult& r, const std::string& name) {
  for (const auto& x : r.rules)
    if (x.name == name) return x;
  throw std::runtime_error("missing rule " + name);
}

double metric(const Metrics& m, const std::string& key) {
  for (const auto& [k, v] : m)
    if (k == key) return v;
  throw std::runtime_error("missing metric " + key);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

bool study_ok(const StudyResult& r, std::initializer_list<const char*> names) {
  bool ok = r.failed_points == 0;
  for (const char* n : names) ok = ok && rule(r, n).pass;
  return ok;
}

// Shared between criteria 3 and 4.
StudyResult gap_sweep;
StudySpec gap_spec;

Outcome harmonic_exactness() {
  const Grid grid = make_grid(3, 64, 8.0);
  const TrapSpec trap;
  const GroundStateResult gs = gp_minimize(grid, trap, 0.0);
  const SpectrumResult sp = hgp_spectrum(grid, trap, 0.0, gs.phi, 4);
  const double expect[4] = {3, 5, 5, 5};
  double err = std::abs(gs.E_gp - 3);
  for (int i = 0; i < 4; ++i) err = std::max(err, std::abs(sp.eigenvalues[i] - expect[i]));
  return {err < 1e-6, fmt("E=%.12g spectrum=(%.10g, %.10g, %.10g", gs.E_gp, sp.eigenvalues[0], sp.eigenvalues[1],
                          sp.eigenvalues[2]) +
                          fmt(", %.10g) max_err=%.3g", sp.eigenvalues[3], err)};
}

Outcome tf_closed_form() {
  const TFProfile p = tf_minimize(TrapSpec{}, 8 * std::numbers::pi / 15);
  const double e1 = std::abs(p.mu_tf - 1), e2 = std::abs(p.mass() - 1);
  return {e1 < 1e-10 && e2 < 1e-10, fmt("mu_TF=%.15g mass=%.15g", p.mu_tf, p.mass())};
}

Outcome gap_scaling() {
  gap_spec = load("gap_vs_g.json");
  gap_sweep = run_study(gap_spec);
  const double lo = rule(gap_sweep, "gap_scaled_positive").value;
  const double sp = rule(gap_sweep, "gap_scaled_spread").value;
  const bool ok = gap_sweep.failed_points == 0 && lo > 0 && sp < 3;
  return {ok, fmt("min gap*g^0.4=%.6g spread=%.4g failed_points=%g", lo, sp, gap_sweep.failed_points)};
}

Outcome linf_scaling() {
  StudyResult r = gap_sweep;
  StudySpec s = gap_spec;
  r.kind = s.kind = StudyKind::linf_vs_g;
  r.summary.clear();
  evaluate_study(r, s);
  const double target = metric(r.summary, "linf_target");
  const double rel = rule(r, "linf_scaled_at_largest_g").value;
  const double sp = rule(r, "grad_scaled_spread").value;
  const bool ok = r.failed_points == 0 && rel < 0.10 && sp < 3;
  double slope = NAN;
  for (const auto& [name, f] : r.fits)
    if (name == "grad_linf") slope = f.slope;
  return {ok, fmt("linf*g^0.3 at g=1000 off target %.6g by %.4g; grad spread=%.4g", target, rel, sp) +
                  fmt(" (grad*g^-0.1 max/first=%.4g, grad_linf slope in g=%.4g)",
                      metric(r.summary, "grad_scaled_max_over_first"), slope)};
}

Outcome tf_convergence() {
  const StudyResult r = run_study(load("tf_convergence.json"));
  std::string d;
  for (const auto& row : r.rows) d += fmt(" %.6g", metric(row.metrics, "tf_distance"));
  return {study_ok(r, {"tf_distance_decreasing"}), "distances:" + d};
}

Outcome lemma26() {
  const StudyResult a = run_study(load("lemma26_1d.json"));
  const StudyResult b = run_study(load("lemma26_3d.json"));
  const bool ok = study_ok(a, {"gap_within_bound", "rate_in_N"}) && study_ok(b, {"gap_within_bound", "rate_in_N"});
  return {ok, fmt("1D slope=%.4g out_of_bound=%g; 3D slope=%.4g out_of_bound=%g", rule(a, "rate_in_N").value,
                  rule(a, "gap_within_bound").value, rule(b, "rate_in_N").value,
                  rule(b, "gap_within_bound").value)};
}

Outcome hgp_rate() {
  const StudyResult r = run_study(load("hgp_rate.json"));
  const bool ok = study_ok(r, {"distance_monotone", "rate_in_N", "mass_conservation", "splitting_order"});
  return {ok, fmt("slope=%.4g max_ratio=%.4g mass_drift=%.3g order=%.6g", rule(r, "rate_in_N").value,
                  rule(r, "distance_monotone").value, rule(r, "mass_conservation").value,
                  rule(r, "splitting_order").value)};
}

Outcome appendix() {
  const AppendixReport a = verify_appendix(4, 3, 200, 1, 1e-10);
  const AppendixReport b = verify_appendix(6, 2, 200, 1, 1e-10);
  return {a.violations == 0 && b.violations == 0,
          fmt("(4,3): %g checks %g violations; (6,2): %g checks %g violations", a.checks, a.violations, b.checks,
              b.violations)};
}

Outcome gronwall() {
  ManybodyCheckSpec m;
  m.check = "gronwall";
  m.N = 4;
  m.M = 4;
  m.modes = "planewave";
  m.g = 0.1;
  m.t_final = 1.0;
  m.samples = 11;
  const ManybodyCheckResult r = run_manybody_check(m, TrapSpec{}, InteractionSpec{});
  const double err = metric(r.metrics, "max_identity_error");
  const double tv = metric(r.metrics, "term_bound_violations");
  const double sv = metric(r.metrics, "sandwich_violations");
  return {err < 1e-6 && tv == 0 && sv == 0,
          fmt("max|dalpha/dt - Gamma|=%.3g term_violations=%g sandwich_violations=%g", err, tv, sv)};
}

Outcome gap_chain() {
  ManybodyCheckSpec m;
  m.check = "gapchain";
  m.N = 3;
  m.M = 3;
  const ManybodyCheckResult r = run_manybody_check(m, TrapSpec{}, InteractionSpec{});
  const double e = metric(r.metrics, "chain_min_eig");
  return {e >= -1e-10, fmt("chain min eigenvalue=%.3g mu0=%.8g mu1=%.8g", e, metric(r.metrics, "mu0"),
                           metric(r.metrics, "mu1"))};
}

Outcome strichartz() {
  const StrichartzReport r = strichartz_check(100, 1.0, 1, make_grid(3, 16, 4.0), 32);
  return {r.samples.size() == 100 && r.violations == 0,
          fmt("samples=%g violations=%g max_ratio=%.4g", r.samples.size(), r.violations, r.max_ratio)};
}

Outcome scattering() {
  const ScatteringResult s = scattering_length(InteractionSpec{}, 1e-3);
  const double ratio = s.a / s.a_born;
  const double refine = std::abs(s.a - s.a_refined) / s.a;
  return {ratio >= 0.99 && ratio <= 1.01 && refine < 1e-6, fmt("a/a_born=%.8g refinement=%.3g", ratio, refine)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"harmonic exactness", harmonic_exactness},
      {"TF closed form", tf_closed_form},
      {"gap lower-bound scaling", gap_scaling},
      {"L-infinity scaling", linf_scaling},
      {"TF convergence", tf_convergence},
      {"interaction gap rate", lemma26},
      {"Hartree to GP rate", hgp_rate},
      {"operator identities", appendix},
      {"Gronwall identity", gronwall},
      {"gap chain", gap_chain},
      {"Strichartz", strichartz},
      {"scattering Born limit", scattering},
  };
  int failures = 0;
  int k = 0;
  for (const auto& [name, run] : criteria) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += o.pass ? 0 : 1;
    std::printf("CRITERION %d %s %s: %s (%.1f s)\n", k, o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", k - failures, k);
  return failures == 0 ? 0 : 1;
}
