#pragma once

#include <set>
#include <string>
#include <vector>

#include "tfcond/grid.hpp"

namespace tfcond {

// V(x) = strength * |x|^s
struct TrapSpec {
  double strength = 1.0;
  double s = 2.0;

  double at_radius(double r) const;
  Field sample(const Grid& grid) const;
  void validate() const;
};

// Radial pair potential v(r) with the scaled family v_N(x) = N^{d beta} v(N^beta x).
// Profiles: "gaussian" e^{-r^2}, "mexican_hat" (1 - r^2) e^{-r^2}, "zero".
struct InteractionSpec {
  std::string profile = "gaussian";
  double beta = 0.2;

  double operator()(double r) const;
  double integral(int dim) const;       // int v
  double first_moment(int dim) const;   // int |x| |v(x)| dx
  double l1_norm(int dim) const;
  double l2_norm(int dim) const;
  double range(double N) const;         // N^{-beta}

  Field sample(const Grid& grid) const;
  Field sample_scaled(const Grid& grid, double N) const;
  void validate() const;
};

struct RegimeParams {
  long long N = 1;
  double beta = 0.2;
  double g_N = 1.0;
  double lambda_weight = 0.5;

  // G = g_N * int v
  double effective_coupling(const InteractionSpec& v, int dim = 3) const;
  void validate() const;
};

struct DerivedScales {
  double G = 0;
  double epsilon = 0;
  double tf_radius = 0;
  double healing_length = 0;
  double range = 0;
  double gn_exponent_a = 0;  // (1 - 3 beta)(s + 3)/(s + 5)
  double gn_exponent_b = 0;  // (s + 3) beta / (2 (s + 1))
};

// Three-dimensional scaling relations.
DerivedScales derived_scales(const TrapSpec& trap, const InteractionSpec& interaction,
                             const RegimeParams& regime);

struct Assumption1Report {
  double min_fourier = 0;     // min over the discrete spectrum of the sampled kernel
  double max_fourier = 0;
  double integral = 0;        // quadrature of int v
  double first_moment = 0;    // quadrature of int |x| |v|
  double l2 = 0;              // quadrature of ||v||_2
  double symmetry_defect = 0; // max |v(x) - v(Rx)| over axis reflections and swaps
  bool positive_type = false;
  bool nonzero = false;
  bool symmetric = false;
  bool moment_finite = false;
  bool square_integrable = false;
  bool positive_integral = false;
  bool passed() const {
    return positive_type && nonzero && symmetric && moment_finite && square_integrable &&
           positive_integral;
  }
};

Assumption1Report check_assumption1(const InteractionSpec& interaction, const Grid& grid);

struct Admissibility {
  bool thm1_ok = false;
  bool thm2_ok = false;
  double thm1_margin_a = 0;  // g_N / N^{gn_exponent_a}
  double thm1_margin_b = 0;  // g_N / N^{gn_exponent_b}
  double thm1_margin = 0;    // max of the two
  double lambda_low = 0;     // 3 beta
  double lambda_high = 0;    // 1 - 3 beta
  double thm2_time_margin = 0;  // g_N / N^{beta (s + 3)/(2 s + 3)}
};

Admissibility admissibility(const TrapSpec& trap, const RegimeParams& regime);

struct ScatteringResult {
  double kappa = 0;
  double a = 0;
  double a_born = 0;
  double a_refined = 0;  // same problem on a mesh twice as fine
  std::vector<double> r;
  std::vector<double> f;  // u(r) / r normalized so that f -> 1
};

// Zero-energy radial scattering problem u'' = kappa/2 v(r) u, u(0) = 0, in 3D.
ScatteringResult scattering_length(const InteractionSpec& interaction, double kappa,
                                   double r_max = 10.0, int mesh = 4000,
                                   double refine_tol = 1e-6);

struct ModelConfig {
  TrapSpec trap;
  InteractionSpec interaction;
  RegimeParams regime;
};

// Parses {trap: {strength, s}, interaction: {profile, beta}, regime: {N, g_N,
// lambda_weight}}. Unknown keys are rejected unless their top-level name is in
// allowed_sections.
ModelConfig parse_model_config(const std::string& json_text,
                               const std::set<std::string>& allowed_sections = {});

}  // namespace tfcond
