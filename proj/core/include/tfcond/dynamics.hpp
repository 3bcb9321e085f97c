#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tfcond/grid.hpp"
#include "tfcond/model.hpp"

namespace tfcond {

enum class Equation { gp, hartree };

// Mean-field potential W[u]: G |u|^2 for GP, g (v_N * |u|^2) for Hartree.
struct Nonlinearity {
  Equation equation = Equation::gp;
  double G = 0;                    // cubic coefficient (GP)
  double g = 0;                    // coupling in front of the convolution (Hartree)
  std::vector<double> multiplier;  // frequency multiplier of v_N (Hartree)

  static Nonlinearity cubic(double G);
  static Nonlinearity hartree(const Grid& grid, const InteractionSpec& interaction, double g,
                              double N);
  static Nonlinearity hartree_kernel(const Field& kernel, double g);

  Field potential(const Field& u) const;
  // ||grad u||^2 + (1/2) int W[u] |u|^2
  double free_energy(const Field& u) const;
};

struct PropagatorConfig {
  double dt = 1e-3;
  double t_final = 0;
  int record_every = 10;
  bool backward = false;          // evolve towards negative times
  bool keep_snapshots = false;
  double accuracy_guard = 1e-3;   // refuse if the one-step splitting error exceeds this
  std::optional<TrapSpec> trap;   // exploratory only; the flows studied are trap-free
};

struct TraceRecord {
  double t = 0;
  double mass = 0;
  double energy = 0;
  double h1 = 0;
  double h2 = 0;
  double linf = 0;
};

struct PropagationTrace {
  std::vector<TraceRecord> records;
  std::vector<Field> snapshots;
  Field final_state;
  double max_mass_drift = 0;
  double max_energy_drift = 0;
};

PropagationTrace propagate(const Field& phi0, const Nonlinearity& nl, const PropagatorConfig& cfg);

// Self-convergence of the splitting at t_final: errors ||u_dt - u_{dt/2}|| for
// dt = 4, 2, 1 times cfg.dt and the log-log slope through them.
struct SplittingOrder {
  std::vector<double> dts;
  std::vector<double> errors;
  double order = 0;
};

SplittingOrder splitting_order(const Field& phi0, const Nonlinearity& nl, const PropagatorConfig& cfg);

// Integrates e^{-i t (-Lap)} exactly in frequency space.
Field free_evolution(const Field& phi, double t);

struct BoundEvaluator {
  double g = 0;
  double N = 1;
  double beta = 0.2;
  double lambda = 0.5;
  double energy0 = 0;   // free GP energy of phi0
  double linf0 = 0;     // ||phi0||_inf
  double h2_0 = 0;      // ||phi0||_{H^2}
  double C = 1;         // prefactor constant
  double C_inner = 1;   // constant in the exponent of C_N
  double C_v = 1;

  static BoundEvaluator from_initial(const Field& phi0, double G, double g, double N, double beta);

  double c_n(double t) const;
  // C sqrt(g) (1 + E + g N^{-beta} ||phi0||_inf^2) N^{-beta/2} exp(C_v C_N^2 g |t|)
  double hartree_to_gp(double t) const;
  // sqrt(2)(N^{(1-lambda)/2} ||gamma_0 - P_0||^{1/2} + N^{(3 beta - lambda)/2}) e^{C_v C_N g |t|}
  // plus the Hartree-to-GP branch.
  double condensation_rhs(double t, double initial_rdm_distance) const;
};

struct ComparisonPoint {
  double t = 0;
  double distance = 0;
  double bound = 0;
};

struct HartreeGpComparison {
  std::vector<ComparisonPoint> curve;
  PropagationTrace gp;
  PropagationTrace hartree;
  BoundEvaluator bound;
  bool bound_holds = false;
  double final_distance = 0;
};

// Runs GP (G = g int v) and Hartree (g, v_N) from the same phi0 and records
// ||phi_GP - phi_H||_2. The prefactor C is calibrated so the bound equals the
// distance at the first positive record time.
HartreeGpComparison compare_h_vs_gp(const Field& phi0, const InteractionSpec& interaction,
                                    double g, double N, const PropagatorConfig& cfg);
HartreeGpComparison compare_h_vs_gp(const Field& phi0, const Nonlinearity& gp,
                                    const Nonlinearity& hartree, double g, double N, double beta,
                                    const PropagatorConfig& cfg);

struct SobolevReport {
  double energy_bound = 0;     // sqrt(1 + E_free(phi0)), from energy conservation
  double sup_h1 = 0;
  double h1_constant = 0;      // sup_t H1 / energy_bound
  bool h1_ok = false;
  double h2_rate = 0;          // fitted c in log H2(t) <= log(1.05 H2(0)) + c g^2 E^2 |t|
  bool h2_ok = false;
};

SobolevReport sobolev_monitor(const PropagationTrace& trace, const Field& phi0,
                              const Nonlinearity& nl, double h1_slack = 1.05);

struct StrichartzSample {
  double lhs = 0;
  double rhs = 0;
  double ratio = 0;
};

struct StrichartzReport {
  std::vector<StrichartzSample> samples;
  int violations = 0;
  double max_ratio = 0;
};

// Source term f(t, x) on a grid, sampled at nt + 1 equally spaced times.
using SpaceTimeField = std::vector<Field>;

StrichartzSample strichartz_sample(const SpaceTimeField& f, double T);
StrichartzReport strichartz_check(int samples, double T, std::uint64_t seed,
                                  const Grid& grid, int time_steps = 64);

}  // namespace tfcond
