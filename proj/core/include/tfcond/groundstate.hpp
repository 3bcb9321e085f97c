#pragma once

#include <span>
#include <vector>

#include "tfcond/grid.hpp"
#include "tfcond/model.hpp"

namespace tfcond {

// Minimizer of int V rho + (G/2) int rho^2 over unit-mass densities.
struct TFProfile {
  TrapSpec trap;
  double G = 0;
  int dim = 3;
  double mu_tf = 0;
  double R_tf = 0;

  double density(double r) const;
  Field sample(const Grid& grid) const;
  // Radial quadratures of the profile.
  double mass() const;
  double energy() const;
  double interaction_integral() const;  // int rho^2
};

TFProfile tf_minimize(const TrapSpec& trap, double G, int dim = 3);

// Default box half-width max(2 R_tf, 8).
double default_half_width(const TrapSpec& trap, double G, int dim = 3);

struct FlowConfig {
  double dt = 0;        // 0 selects an unbounded step (pure preconditioned descent)
  double tol = 1e-9;
  int max_iter = 50000;
  double boundary_tol = 1e-8;
  bool check_box = true;
  bool keep_history = false;
};

struct GroundStateResult {
  Field phi;
  double E_gp = 0;
  double mu_gp = 0;
  double residual = 0;
  int iterations = 0;
  int rejected_steps = 0;
  double boundary_mass = 0;
  std::vector<double> energy_history;
};

// E(u) = <u, (-Lap + V) u> + (G/2) int |u|^4
double gp_energy(const Field& u, const Field& V, double G);
// h^GP u = (-Lap + V + G |phi|^2) u
Field apply_hgp(const Field& u, const Field& V, double G, const Field& phi);

GroundStateResult gp_minimize(const Grid& grid, const TrapSpec& trap, double G,
                              const FlowConfig& flow = {});
GroundStateResult gp_minimize_from(const Field& initial, const TrapSpec& trap, double G,
                                   const FlowConfig& flow = {});

struct SpectrumConfig {
  double tol = 1e-8;
  int max_iter = 3000;
  int guard = 2;         // extra block vectors beyond k
  double shift = 1.0;    // preconditioner (shift - Lap)^{-1}
};

struct SpectrumResult {
  std::vector<double> eigenvalues;
  std::vector<Field> eigenfields;
  std::vector<double> residuals;
  double gap = 0;
  int iterations = 0;
};

SpectrumResult hgp_spectrum(const Grid& grid, const TrapSpec& trap, double G, const Field& phi,
                            int k, const SpectrumConfig& cfg = {});

// psi(y) = a^{-d/2} phi(y / a) with a = G^{-1/(s+d)}, epsilon = a^{(s+2)/2}; in
// three dimensions epsilon = G^{-(s+2)/(2(s+3))}.
struct SemiclassicalMap {
  Grid original;
  Grid rescaled;
  double epsilon = 1;
  double length_scale = 1;
  double s = 2;

  Field forward(const Field& phi) const;
  Field backward(const Field& psi) const;
};

SemiclassicalMap make_semiclassical_map(const Grid& grid, const TrapSpec& trap, double G);

struct SemiclassicalCheck {
  SemiclassicalMap map;
  Field psi;
  double lhs = 0;   // <u, h^GP u>
  double rhs = 0;   // epsilon^{-2s/(s+2)} <psi, h_eps psi>
  double norm_original = 0;
  double norm_rescaled = 0;
  std::vector<double> rescaled_eigenvalues;
};

SemiclassicalCheck semiclassical_roundtrip(const Field& u, const Field& phi_gp,
                                           const TrapSpec& trap, double G,
                                           std::span<const double> eigenvalues = {});

struct LinfDiagnostics {
  double linf = 0;
  double grad_linf = 0;
  double linf_scaled = 0;   // ||phi||_inf g^{3/(2(s+3))}
  double grad_scaled = 0;   // ||grad phi||_inf g^{-(2s-3)/(2(s+3))}
};

LinfDiagnostics linf_diagnostics(const Field& phi, double g, const TrapSpec& trap);

struct TFDistance {
  double distance = 0;
  double rho_tf1_max = 0;
};

// sup_x | g^{d/(s+d)} |phi(g^{1/(s+d)} y)|^2 - rho^TF_1(y) | evaluated at grid points.
TFDistance tf_profile_distance(const Field& phi, double g, const TrapSpec& trap,
                               const InteractionSpec& interaction);

struct InteractionGap {
  double N = 0;
  double measured = 0;
  double bound = 0;
  bool within_bound = false;
};

InteractionGap interaction_gap(const Field& phi, const InteractionSpec& interaction, double N);
// Same with an explicit sampled kernel standing in for v_N.
double interaction_gap_with_kernel(const Field& phi, const Field& kernel, double integral_v);

struct DecayDiagnostics {
  std::vector<double> radius;
  std::vector<double> log_abs;
  std::vector<double> reference;  // -A(x)/eps^2
  double epsilon = 1;
  double slope = 0;
  double intercept = 0;
  bool positive = false;
};

double agmon_distance(const TrapSpec& trap, double r);

// Fits log|phi| = c - slope * A(x)/eps^2 over r_min <= |x| <= r_max.
DecayDiagnostics agmon_tail(const Field& phi, const TrapSpec& trap, double r_min, double r_max,
                            double epsilon = 1.0);

}  // namespace tfcond
