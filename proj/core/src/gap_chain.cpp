#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "tfcond/errors.hpp"
#include "tfcond/manybody.hpp"

namespace tfcond {

namespace {

double min_eig(const CMat& A) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("diagonalization failed");
  return es.eigenvalues()[0];
}

void align_phase(CVec& v, const CVec& ref) {
  const cplx z = ref.dot(v);
  if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
}

}  // namespace

ModeGroundState mode_gp_solve(const ModeBasis& modes, double G, double tol, int max_iter) {
  if (!modes.grid) throw std::invalid_argument("the local nonlinearity needs grid modes");
  const CMat h = modes.kinetic + modes.trap;
  auto hgp_of = [&](const CVec& c) {
    const Field rho = abs_squared(modes.synthesize(c));
    return CMat(h + G * modes.multiplication(rho));
  };
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  CVec phi = es.eigenvectors().col(0);
  ModeGroundState out;
  int it = 0;
  for (; it < max_iter; ++it) {
    const CMat H = hgp_of(phi);
    Eigen::SelfAdjointEigenSolver<CMat> e(0.5 * (H + H.adjoint()));
    CVec next = e.eigenvectors().col(0);
    align_phase(next, phi);
    const double res = (H * phi - phi.dot(H * phi) * phi).norm();
    if (res < tol) break;
    phi = (0.5 * phi + 0.5 * next).normalized();
  }
  if (it >= max_iter) throw SolverError("mode-space GP iteration did not converge");
  // Freeze h^GP and take its exact ground state as the condensate.
  out.hgp = hgp_of(phi);
  out.hgp = 0.5 * (out.hgp + out.hgp.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<CMat> fin(out.hgp);
  out.phi = fin.eigenvectors().col(0);
  align_phase(out.phi, phi);
  out.mu0 = fin.eigenvalues()[0];
  out.mu1 = modes.M > 1 ? fin.eigenvalues()[1] : out.mu0;
  out.iterations = it;
  return out;
}

GapChainReport verify_gap_chain(const ManyBodyHamiltonian& H, const ModeGroundState& gs,
                                double lambda, int samples, std::uint64_t seed) {
  const int M = H.M();
  const int N = H.N();
  if (gs.hgp.rows() != M || gs.phi.size() != M)
    throw std::invalid_argument("one-body solve and many-body Hamiltonian use different mode sets");
  if (H.space->dim() > dense_limit) throw std::invalid_argument("sector too large for dense checks");
  GapChainReport rep;
  rep.mu0 = gs.mu0;
  rep.mu1 = gs.mu1;
  const FockSpace& space = *H.space;
  const ProjectorContext ctx(H.space, gs.phi);
  const CMat Id = CMat::Identity(M, M);

  const CMat lhs = space.one_body_matrix(gs.hgp - gs.mu0 * Id);
  const CMat Np = space.one_body_matrix(ctx.q());
  rep.chain_min_eig = min_eig(lhs - (gs.mu1 - gs.mu0) * Np);
  rep.counting_min_eig = min_eig((gs.mu1 - gs.mu0) * Np);

  // One particle in the first excited eigenvector of h^GP, the rest condensed.
  Eigen::SelfAdjointEigenSolver<CMat> es(gs.hgp);
  const CVec phi1 = es.eigenvectors().col(1);
  const FockSpace& lower = space.lower(1);
  CVec one = space.create(phi1, lower.product_state(gs.phi));
  one.normalize();
  rep.saturation_defect = std::abs(one.dot((lhs - (gs.mu1 - gs.mu0) * Np) * one).real());

  // Pair interaction against its mean-field lower bound around phi.
  if (H.interaction && N >= 2) {
    const CMat V = H.mean_field(gs.phi);
    const double self = gs.phi.dot(V * gs.phi).real();
    const CMat Hint = CMat(H.matrix) - space.one_body_matrix(H.h);
    const double vN0 = std::pow(static_cast<double>(N), H.dim * H.beta) * (*H.interaction)(0.0);
    const CMat rest = Hint - H.g * space.one_body_matrix(V) +
                      (0.5 * H.g * N * self + H.g * vN0) * CMat::Identity(space.dim(), space.dim());
    rep.potential_min_eig = min_eig(rest);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  for (int s = 0; s < samples; ++s) {
    CVec psi(space.dim());
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi[i] = cplx(N01(rng), N01(rng));
    psi.normalize();
    const double a = alpha(ctx, psi, lambda);
    const double dist = projector_distance(space.one_rdm(psi), gs.phi);
    const bool low = dist * dist <= 2 * a * (1 + 1e-12) + 1e-14;
    const bool high = a <= std::pow(static_cast<double>(N), 1 - lambda) * dist * (1 + 1e-12) + 1e-14;
    ++rep.sandwich_samples;
    if (!low || !high) ++rep.sandwich_violations;
  }

  const GroundState g0 = ground_state(H);
  rep.ground_energy = g0.energy;
  rep.ground_depletion = 1.0 - gs.phi.dot(space.one_rdm(g0.psi) * gs.phi).real();

  const double tol = 1e-10;
  rep.ok = rep.chain_min_eig >= -tol && rep.counting_min_eig >= -tol &&
           rep.potential_min_eig >= -tol && rep.sandwich_violations == 0;
  return rep;
}

}  // namespace tfcond
