#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tfcond/grid.hpp"
#include "tfcond/model.hpp"

namespace tfcond {

using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Occupation = std::vector<int>;

inline constexpr std::size_t default_sector_cap = 20000;
inline constexpr std::size_t dense_limit = 4000;

// Symmetric sector of N bosons over M modes in the occupation-number basis.
// States are ordered lexicographically with n_0 descending; index() is the
// inverse of state() computed by combinatorial ranking.
class FockSpace {
 public:
  FockSpace(int N, int M, std::size_t cap = default_sector_cap);

  int particles() const { return N_; }
  int modes() const { return M_; }
  std::size_t dim() const { return states_.size(); }
  const Occupation& state(std::size_t i) const { return states_[i]; }
  std::size_t index(const Occupation& n) const;

  // a_c psi for every c, as columns over the (N-1)-particle sector.
  CMat annihilate_all(const CVec& psi) const;
  // a_d a_c psi for every pair, column c*M + d, over the (N-2)-particle sector.
  CMat annihilate_pairs(const CVec& psi) const;

  // dGamma(A) psi = sum A_ab a_a^* a_b psi
  CVec apply_one_body(const CMat& A, const CVec& psi) const;
  // sum O_{ab,cd} a_a^* a_b^* a_d a_c psi (pair indices a*M + b)
  CVec apply_two_body(const CMat& O, const CVec& psi) const;
  CMat one_body_matrix(const CMat& A) const;

  // gamma_ab = <psi, a_b^* a_a psi> / N
  CMat one_rdm(const CVec& psi) const;
  // T_{ab,cd} = <chi, a_a^* a_b^* a_d a_c psi>
  CMat transition_two_rdm(const CVec& chi, const CVec& psi) const;
  // <chi, O_12 psi> for symmetric chi, psi and a two-particle operator O.
  cplx two_body_element(const CVec& chi, const CMat& O, const CVec& psi) const;

  // a^*(chi) psi for psi on the (N-1)-particle sector.
  CVec create(const CVec& chi, const CVec& psi_lower) const;
  // phi^{tensor N} written in the occupation basis.
  CVec product_state(const CVec& phi) const;

  // Sector with one or two fewer particles.
  const FockSpace& lower(int removed) const;

 private:
  FockSpace(int N, int M, std::size_t cap, int depth);

  int N_, M_;
  std::vector<Occupation> states_;
  std::vector<std::vector<double>> count_;  // count_[r][m]: r bosons in m modes
  std::shared_ptr<const FockSpace> lower_;
};

// One-body modes: orthonormal functions on a small 1D grid, or abstract labels.
struct ModeBasis {
  int M = 0;
  std::optional<Grid> grid;
  std::vector<Field> functions;
  CMat kinetic;  // <e_a, -Lap e_b>
  CMat trap;     // <e_a, V e_b>, zero when no trap was given

  Field synthesize(const CVec& coeffs) const;
  CVec project(const Field& f) const;
  CMat gram() const;
  // Matrix of the multiplication operator by w.
  CMat multiplication(const Field& w) const;
  // W_{ab,cd} = int int conj(e_a(x) e_b(y)) kernel(x - y) e_c(x) e_d(y)
  CMat pair_tensor(const Field& kernel) const;
};

// Lowest eigenmodes of -Lap + V on a 1D grid.
ModeBasis harmonic_modes(const Grid& grid, int M, const TrapSpec& trap);
// e^{i k x} / sqrt(2L) with k ordered 0, +1, -1, +2, ... in units of pi / L.
ModeBasis planewave_modes(const Grid& grid, int M);
ModeBasis abstract_modes(const CMat& one_body);

// H = dGamma(h) + (g/N) sum_{j<k} W_{jk} on the symmetric sector.
struct ManyBodyHamiltonian {
  std::shared_ptr<const FockSpace> space;
  std::shared_ptr<const ModeBasis> modes;  // null for abstract input
  CMat h;
  CMat W;  // pair tensor of v_N
  double g = 0;
  int dim = 1;
  std::optional<InteractionSpec> interaction;
  double beta = 0;
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> matrix;

  int N() const { return space->particles(); }
  int M() const { return space->modes(); }
  CVec apply(const CVec& psi) const { return matrix * psi; }
  double energy(const CVec& psi) const;
  double hermiticity_defect() const;
  // Mean-field matrix (V_phi)_{ac} = sum W_{ab,cd} conj(phi_b) phi_d.
  CMat mean_field(const CVec& phi) const;
  // U_12 = (N-1) W - N (V_phi x 1 + 1 x V_phi)
  CMat pair_fluctuation(const CVec& phi) const;
};

ManyBodyHamiltonian build(const ModeBasis& modes, bool with_trap,
                          const InteractionSpec& interaction, const RegimeParams& regime,
                          std::size_t cap = default_sector_cap, int workers = 0);
ManyBodyHamiltonian build_from_matrices(const CMat& h, const CMat& W, double g, int N,
                                        std::size_t cap = default_sector_cap, int workers = 0);

struct GroundState {
  double energy = 0;
  CVec psi;
  int iterations = 0;  // 0 for dense solves
};

GroundState ground_state(const ManyBodyHamiltonian& H, double tol = 1e-12, int max_iter = 2000);

CMat reduced_density(const FockSpace& space, const CVec& psi);

// Definition of the weights: mu(k) = k / N^lambda for k <= N^lambda, else 1.
double weight_mu(int k, int N, double lambda);
double weight_nu(int k, int N);

// p, q, P_k and the hat functions f^ for a reference state phi given in mode
// coefficients. P_k is the spectral projector of N_+ = dGamma(q) to eigenvalue k.
class ProjectorContext {
 public:
  ProjectorContext(std::shared_ptr<const FockSpace> space, const CVec& phi);

  const CVec& phi() const { return phi_; }
  const CMat& p() const { return p_; }
  const CMat& q() const { return q_; }
  const FockSpace& space() const { return *space_; }

  CVec sector(int k, const CVec& psi) const;
  std::vector<double> sector_weights(const CVec& psi) const;
  // sum_k f(k + shift) P_k psi, with f vanishing outside 0..N
  CVec hat(const std::function<double(int)>& f, const CVec& psi, int shift = 0) const;
  CMat counting_operator() const;  // N_+
  double max_integrality_defect() const { return integrality_; }

 private:
  std::shared_ptr<const FockSpace> space_;
  CVec phi_;
  CMat p_, q_;
  CMat vecs_;
  std::vector<int> labels_;
  double integrality_ = 0;
};

struct CountingReport {
  double alpha = 0;
  double n_plus = 0;
  double depletion = 0;
  CMat gamma;
  double Gamma = 0;
  std::array<double, 3> gamma_terms{};  // g-free Im parts of the three terms
};

double alpha(const ProjectorContext& ctx, const CVec& psi, double lambda);
CountingReport counting_report(const ManyBodyHamiltonian& H, const CVec& psi, const CVec& phi,
                               double lambda);

// Operator-norm distance and trace-class quantities between gamma and |phi><phi|.
double projector_distance(const CMat& gamma, const CVec& phi);

// Literal first-quantized tensor space (C^M)^{tensor N}, used as an
// independent cross-check of the occupation-basis calculus.
class TensorSpace {
 public:
  TensorSpace(int N, int M, std::size_t cap = 4096);
  std::size_t dim() const { return dim_; }
  CMat on_particle(const CMat& A, int j) const;
  CMat on_pair(const CMat& O) const;  // acts on particles 1 and 2
  CVec embed(const FockSpace& space, const CVec& psi) const;
  // sum over a in {0,1}^N with |a| = k of prod_l p^{1-a_l} q^{a_l}
  CMat sector_projector(const CMat& p, int k) const;
  CMat hat(const CMat& p, const std::function<double(int)>& f, int shift = 0) const;

 private:
  int N_, M_;
  std::size_t dim_;
  CMat kron_chain(const std::vector<const CMat*>& factors) const;
};

struct AppendixReport {
  int N = 0, M = 0, trials = 0;
  long checks = 0;
  long violations = 0;
  double tolerance = 1e-10;
  double max_identity_error = 0;
  double max_inequality_excess = 0;  // > 0 means violated
  std::vector<std::pair<std::string, double>> worst;  // per check family
  std::vector<std::string> failures;
};

AppendixReport verify_appendix(int N, int M, int trials, std::uint64_t seed = 1,
                               double tolerance = 1e-10);

// Self-consistent GP ground state restricted to the mode span, with the two
// lowest eigenvalues of the restricted h^GP.
struct ModeGroundState {
  CVec phi;
  double mu0 = 0, mu1 = 0;
  CMat hgp;
  int iterations = 0;
};

ModeGroundState mode_gp_solve(const ModeBasis& modes, double G, double tol = 1e-13,
                              int max_iter = 2000);

struct GapChainReport {
  double mu0 = 0, mu1 = 0;
  double chain_min_eig = 0;      // of sum (h^GP - mu0) - (mu1 - mu0) N_+
  double counting_min_eig = 0;   // of (mu1 - mu0) N_+
  double saturation_defect = 0;  // on the first one-excitation state
  double potential_min_eig = 0;  // lower bound on the pair interaction, minus the bound
  int sandwich_samples = 0;
  int sandwich_violations = 0;
  double ground_depletion = 0;
  double ground_energy = 0;
  bool ok = false;
};

GapChainReport verify_gap_chain(const ManyBodyHamiltonian& H, const ModeGroundState& gs,
                                double lambda, int samples = 100, std::uint64_t seed = 1);

struct TrackPoint {
  double t = 0;
  double alpha = 0;
  double Gamma = 0;
  double dalpha_fd = 0;
  std::array<double, 3> terms{};
  std::array<double, 3> bounds{};
  double distance = 0;  // operator norm of gamma - |phi><phi|
  double norm = 0;
  double energy = 0;
};

struct TrackConfig {
  double lambda = 0.5;
  double fd_step = 1e-4;
  double fd_tol = 1e-6;
  double rk_step = 1e-3;
  double leakage_limit = 0.5;  // share of the mean-field force outside the mode span
};

struct TrackReport {
  std::vector<TrackPoint> points;
  double max_identity_error = 0;
  int term_bound_violations = 0;
  int sandwich_violations = 0;
  double gronwall_rate = 0;
  double gronwall_offset = 0;  // N^{d beta - lambda}
  double max_norm_drift = 0;
  double max_energy_drift = 0;
  double hartree_energy_drift = 0;
  double leakage = 0;
  bool galerkin_consistent = true;
  bool ok = false;
};

// Exact propagator e^{-iHt} psi: full diagonalization up to dense_limit, Krylov beyond.
class ExactPropagator {
 public:
  explicit ExactPropagator(const ManyBodyHamiltonian& H);
  CVec operator()(const CVec& psi, double t) const;

 private:
  const ManyBodyHamiltonian* H_;
  bool dense_ = false;
  CMat vecs_;
  Eigen::VectorXd vals_;
};

// i c' = (h + g V_c) c on the mode span, RK4.
CVec hartree_modes_step(const ManyBodyHamiltonian& H, const CVec& c, double t, double rk_step);

TrackReport evolve_and_track(const ManyBodyHamiltonian& H, const CVec& psi0, const CVec& phi0,
                             const std::vector<double>& times, const TrackConfig& cfg = {});

}  // namespace tfcond
