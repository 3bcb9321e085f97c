#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tfcond/dynamics.hpp"
#include "tfcond/groundstate.hpp"
#include "tfcond/model.hpp"

namespace tfcond {

struct FitPoint {
  double x = 0;
  double y = 0;
  double fitted = 0;
  double log_residual = 0;  // log y - (intercept + slope log x)
};

// Least squares of log y against log x.
struct FitResult {
  double slope = 0;
  double intercept = 0;
  double residual = 0;  // rms of the log residuals
  std::vector<FitPoint> points;
};

FitResult fit_loglog(std::span<const double> x, std::span<const double> y);

using Metrics = std::vector<std::pair<std::string, double>>;

// Few-body checks shared by the study runner and the command line.
struct ManybodyCheckSpec {
  std::string check = "appendix";  // appendix | gapchain | gronwall
  int N = 4;
  int M = 3;
  std::string modes = "harmonic";  // harmonic | planewave
  int trials = 200;
  double g = 0.5;
  double lambda = 0.5;
  double t_final = 2.0;
  int samples = 21;
  std::uint64_t seed = 1;
};

struct ManybodyCheckResult {
  Metrics metrics;
  bool ok = false;
};

ManybodyCheckResult run_manybody_check(const ManybodyCheckSpec& spec, const TrapSpec& trap,
                                       const InteractionSpec& interaction);

enum class StudyKind { gap_vs_g, linf_vs_g, tf_convergence, lemma26_vs_N, hgp_rate_vs_N, manybody_suite };

std::string to_string(StudyKind kind);
StudyKind parse_study_kind(const std::string& name);

// Every acceptance threshold used by the study rules.
struct Tolerances {
  double min_gap = 1e-8;
  double gap_spread = 3.0;        // max / min of gap g^{2/(s+3)}
  double linf_relative = 0.10;    // at the largest g
  double grad_spread = 3.0;
  double slope_margin = 0.05;
  double mass_drift = 1e-12;
  double strang_order = 2.0;
  double strang_order_tol = 0.1;
  double failure_fraction = 0.2;
};

struct StudySpec {
  StudyKind kind = StudyKind::gap_vs_g;
  std::vector<double> values;  // g for ground-state studies, N for the others
  TrapSpec trap;
  InteractionSpec interaction;
  int dim = 3;
  int grid_n = 0;          // 0: 64 in 3D, 4096 in 1D
  double half_width = 0;   // 0: default box (ground states), 8 (lemma26), 16 (dynamics)
  FlowConfig flow;
  SpectrumConfig spectrum;
  PropagatorConfig propagator = [] {
    PropagatorConfig p;
    p.t_final = 0.5;
    p.record_every = 50;
    return p;
  }();
  double g = 4.0;          // coupling held fixed in the N sweeps
  double phi_width = 1.0;  // gaussian test state for lemma26_vs_N
  ManybodyCheckSpec manybody;  // N is taken from values
  std::uint64_t seed = 1;
  int workers = 1;
  double point_budget_s = 0;  // 0: unlimited
  std::string output_dir;
  Tolerances tol;

  int resolved_grid_n() const;
  double resolved_half_width(double value) const;
  void validate() const;
};

StudySpec parse_study_spec(const std::string& json_text);

struct StudyRow {
  Metrics params;
  Metrics metrics;
  bool ok = true;
  std::string error;
};

struct RuleResult {
  std::string name;
  std::string checks;  // the statement the rule tests
  double value = 0;
  double threshold = 0;
  bool pass = false;
};

struct StudyResult {
  StudyKind kind = StudyKind::gap_vs_g;
  std::vector<StudyRow> rows;  // sorted by parameter tuple
  std::vector<std::pair<std::string, FitResult>> fits;
  std::vector<RuleResult> rules;
  Metrics summary;
  int failed_points = 0;
  bool passed = false;
};

StudyResult run_study(const StudySpec& spec);
// Recomputes fits, rules and the pass flag from result.rows under result.kind.
void evaluate_study(StudyResult& result, const StudySpec& spec);

std::string study_csv(const StudyResult& result);
std::string study_summary_json(const StudyResult& result, const StudySpec& spec);
// Writes <kind>.csv and <kind>_summary.json into dir.
void write_study(const StudyResult& result, const StudySpec& spec, const std::string& dir);

}  // namespace tfcond
