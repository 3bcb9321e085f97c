#include <cmath>
#include <random>

#include "doctest.h"
#include "tfcond/manybody.hpp"

using namespace tfcond;

namespace {

std::mt19937_64 rng(20);

CVec random_vec(Eigen::Index n) {
  std::normal_distribution<double> nd;
  CVec v(n);
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  return v.normalized();
}

CMat random_hermitian(int n) {
  std::normal_distribution<double> nd;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(nd(rng), nd(rng));
  return 0.5 * (a + a.adjoint());
}

// Hermitian pair tensor symmetric under exchange of the two particles.
CMat random_pair_tensor(int M) {
  const CMat X = random_hermitian(M * M);
  CMat P = CMat::Zero(M * M, M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) P(a * M + b, b * M + a) = 1;
  return 0.5 * (X + P * X * P);
}

// Orthonormal chi against phi.
CVec orthogonal_to(const CVec& phi) {
  CVec chi = random_vec(phi.size());
  chi -= phi * phi.dot(chi);
  return chi.normalized();
}

ManyBodyHamiltonian harmonic_hamiltonian(int N, int M, double g) {
  static const Grid grid = make_grid(1, 64, 8.0);
  const ModeBasis modes = harmonic_modes(grid, M, TrapSpec{});
  RegimeParams r;
  r.N = N;
  r.g_N = g;
  return build(modes, true, InteractionSpec{}, r);
}

double binomial(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

}  // namespace

TEST_CASE("Fock space ranking") {
  for (int N : {1, 3, 5})
    for (int M : {1, 2, 4}) {
      const FockSpace fs(N, M);
      CHECK(static_cast<double>(fs.dim()) == binomial(N + M - 1, N));
      for (std::size_t i = 0; i < fs.dim(); ++i) {
        CHECK(fs.index(fs.state(i)) == i);
        int total = 0;
        for (int n : fs.state(i)) total += n;
        CHECK(total == N);
      }
    }
  CHECK_THROWS_AS(FockSpace(30, 30, 1000), std::invalid_argument);
}

TEST_CASE("two bosons over two levels") {
  CMat h = CMat::Zero(2, 2);
  h(0, 0) = 1;
  h(1, 1) = 2;
  const ManyBodyHamiltonian H = build_from_matrices(h, CMat::Zero(4, 4), 0.0, 2);
  const CMat dense = CMat(H.matrix);
  Eigen::SelfAdjointEigenSolver<CMat> es(dense);
  REQUIRE(es.eigenvalues().size() == 3);
  CHECK(es.eigenvalues()[0] == doctest::Approx(2.0));
  CHECK(es.eigenvalues()[1] == doctest::Approx(3.0));
  CHECK(es.eigenvalues()[2] == doctest::Approx(4.0));
}

TEST_CASE("Hamiltonian structure") {
  const int N = 4, M = 3;
  const CMat h = random_hermitian(M);
  const CMat W = random_pair_tensor(M);
  const double g = 0.7;
  const ManyBodyHamiltonian H = build_from_matrices(h, W, g, N);
  CHECK(H.hermiticity_defect() < 1e-12);

  // Product state energy: N <phi, h phi> + g (N - 1)/2 <phi phi, W phi phi>.
  const CVec phi = random_vec(M);
  CVec pp(M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) pp[a * M + b] = phi[a] * phi[b];
  const double expected = N * phi.dot(h * phi).real() + g * (N - 1) / 2.0 * pp.dot(W * pp).real();
  const CVec psi = H.space->product_state(phi);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(H.energy(psi) == doctest::Approx(expected).epsilon(1e-12));

  // Ground energy against a dense diagonalization.
  Eigen::SelfAdjointEigenSolver<CMat> es{CMat(H.matrix)};
  CHECK(ground_state(H).energy == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-10));

  // Without interaction the ground energy is N times the lowest one-body level.
  const ManyBodyHamiltonian H0 = build_from_matrices(h, W, 0.0, N);
  Eigen::SelfAdjointEigenSolver<CMat> eh(h);
  CHECK(ground_state(H0).energy == doctest::Approx(N * eh.eigenvalues()[0]).epsilon(1e-10));
}

TEST_CASE("occupation basis agrees with the tensor space") {
  const int N = 3, M = 3;
  const FockSpace fs(N, M);
  const TensorSpace ts(N, M);
  const CMat A = random_hermitian(M);
  const CVec psi = random_vec(static_cast<Eigen::Index>(fs.dim()));
  CMat sum = CMat::Zero(ts.dim(), ts.dim());
  for (int j = 0; j < N; ++j) sum += ts.on_particle(A, j);
  const CVec lhs = ts.embed(fs, fs.apply_one_body(A, psi));
  const CVec rhs = sum * ts.embed(fs, psi);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("reduced densities") {
  const int N = 5, M = 3;
  auto space = std::make_shared<const FockSpace>(N, M);
  const CVec phi = random_vec(M);
  const CVec prod = space->product_state(phi);
  CHECK((space->one_rdm(prod) - phi * phi.adjoint()).norm() < 1e-12);

  const CVec chi = orthogonal_to(phi);
  CVec one = space->create(chi, space->lower(1).product_state(phi));
  one.normalize();
  const CMat expected = (N - 1.0) / N * phi * phi.adjoint() + 1.0 / N * chi * chi.adjoint();
  const CMat gamma = space->one_rdm(one);
  CHECK((gamma - expected).norm() < 1e-12);
  CHECK(gamma.trace().real() == doctest::Approx(1.0));

  const ProjectorContext ctx(space, phi);
  CHECK(alpha(ctx, prod, 0.5) == doctest::Approx(0.0).scale(1.0));
  CHECK(alpha(ctx, one, 0.5) == doctest::Approx(std::pow(N, -0.5)).epsilon(1e-10));
  CHECK(projector_distance(space->one_rdm(prod), phi) < 1e-12);
}

TEST_CASE("weights") {
  CHECK(weight_mu(0, 100, 0.5) == 0.0);
  CHECK(weight_mu(5, 100, 0.5) == doctest::Approx(0.5));
  CHECK(weight_mu(10, 100, 0.5) == doctest::Approx(1.0));
  CHECK(weight_mu(25, 100, 0.5) == 1.0);
  for (int k = 0; k < 100; ++k) CHECK(weight_mu(k, 100, 0.5) <= weight_mu(k + 1, 100, 0.5));
}

TEST_CASE("counting operator") {
  const int N = 4, M = 3;
  auto space = std::make_shared<const FockSpace>(N, M);
  const CVec phi = random_vec(M);
  const ProjectorContext ctx(space, phi);
  CHECK(ctx.max_integrality_defect() < 1e-10);
  Eigen::SelfAdjointEigenSolver<CMat> es(ctx.counting_operator());
  for (auto e : es.eigenvalues()) CHECK(std::abs(e - std::round(e)) < 1e-10);
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.0).scale(1.0));
  CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(N));

  const CVec psi = random_vec(static_cast<Eigen::Index>(space->dim()));
  double total = 0;
  for (double w : ctx.sector_weights(psi)) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  // Gauge invariance of alpha in both arguments.
  const cplx ph = std::polar(1.0, 1.1);
  const ProjectorContext rotated(space, ph * phi);
  CHECK(alpha(rotated, psi, 0.5) == doctest::Approx(alpha(ctx, psi, 0.5)).epsilon(1e-12));
  CHECK(alpha(ctx, ph * psi, 0.5) == doctest::Approx(alpha(ctx, psi, 0.5)).epsilon(1e-12));
}

TEST_CASE("distance sandwich on random states") {
  const int N = 4, M = 3;
  const double lambda = 0.5;
  auto space = std::make_shared<const FockSpace>(N, M);
  int violations = 0;
  for (int s = 0; s < 1000; ++s) {
    const CVec phi = random_vec(M);
    const CVec psi = random_vec(static_cast<Eigen::Index>(space->dim()));
    const ProjectorContext ctx(space, phi);
    const double a = alpha(ctx, psi, lambda);
    const double d = projector_distance(space->one_rdm(psi), phi);
    if (d * d > 2 * a * (1 + 1e-12) + 1e-14) ++violations;
    if (a > std::pow(N, 1 - lambda) * d * (1 + 1e-12) + 1e-14) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("product states stay product states without interaction") {
  static const Grid grid = make_grid(1, 64, 8.0);
  const ModeBasis modes = harmonic_modes(grid, 3, TrapSpec{});
  const int M = 3;
  const ManyBodyHamiltonian H = build_from_matrices(modes.kinetic + modes.trap, CMat::Zero(M * M, M * M), 0.0, 3);
  CHECK(H.hermiticity_defect() < 1e-12);
  CVec phi0(3);
  phi0 << 0.8, cplx(0.0, 0.5), 0.3;
  phi0.normalize();
  const CVec psi0 = H.space->product_state(phi0);
  const TrackReport rep = evolve_and_track(H, psi0, phi0, {0.0, 0.5, 1.0});
  for (const auto& p : rep.points) CHECK(p.alpha < 1e-10);
  CHECK(rep.max_norm_drift < 1e-12);
}

TEST_CASE("interacting evolution tracks the counting identity") {
  const ManyBodyHamiltonian H = harmonic_hamiltonian(3, 3, 0.5);
  CVec phi0(3);
  phi0 << 1.0, 0.5, cplx(0.0, 1.0 / 3);
  phi0.normalize();
  const CVec psi0 = H.space->product_state(phi0);
  const TrackReport rep = evolve_and_track(H, psi0, phi0, {0.0, 0.5, 1.0});
  CHECK(rep.max_identity_error < 1e-6);
  CHECK(rep.sandwich_violations == 0);
  CHECK(rep.max_energy_drift < 1e-10);
}

TEST_CASE("operator identities at small size") {
  const AppendixReport rep = verify_appendix(3, 2, 20, 5);
  CHECK(rep.checks > 0);
  CHECK(rep.violations == 0);
  CHECK(rep.max_identity_error < 1e-10);
}
