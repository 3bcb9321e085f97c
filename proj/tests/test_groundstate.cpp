#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tfcond/errors.hpp"
#include "tfcond/groundstate.hpp"

using namespace tfcond;
using std::numbers::pi;

namespace {

const Grid& small_grid() {
  static const Grid g = make_grid(3, 32, 6.0);
  return g;
}

const GroundStateResult& free_state() {
  static const GroundStateResult r = gp_minimize(small_grid(), TrapSpec{}, 0.0);
  return r;
}

const GroundStateResult& interacting_state() {
  static const GroundStateResult r = [] {
    FlowConfig f;
    f.keep_history = true;
    return gp_minimize(small_grid(), TrapSpec{}, 10.0, f);
  }();
  return r;
}

}  // namespace

TEST_CASE("TF closed form") {
  const TrapSpec trap;
  const TFProfile p = tf_minimize(trap, 8 * pi / 15);
  CHECK(p.mu_tf == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.R_tf == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.mass() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(p.density(0) == doctest::Approx(15 / (8 * pi)).epsilon(1e-12));
  CHECK(p.density(1.5) == 0.0);
  // Harmonic trap in 3D: E = (5/7) mu.
  CHECK(p.energy() == doctest::Approx(5.0 / 7.0).epsilon(1e-8));

  const TFProfile q = tf_minimize(trap, 16 * pi / 15);
  CHECK(q.mu_tf == doctest::Approx(std::pow(2.0, 0.4)).epsilon(1e-12));
  CHECK(q.mass() == doctest::Approx(1.0).epsilon(1e-8));

  for (int d : {1, 2, 3}) {
    for (double s : {2.0, 3.0, 4.0}) {
      TrapSpec t;
      t.s = s;
      const TFProfile r = tf_minimize(t, 7.0, d);
      CHECK(r.mass() == doctest::Approx(1.0).epsilon(1e-6));
      // mu = E + (G/2) int rho^2
      CHECK(r.mu_tf == doctest::Approx(r.energy() + 3.5 * r.interaction_integral()).epsilon(1e-6));
    }
  }
  CHECK_THROWS_AS(tf_minimize(trap, 0.0), std::invalid_argument);
  TrapSpec soft;
  soft.s = 1;
  CHECK_THROWS_AS(tf_minimize(soft, 1.0), std::invalid_argument);
}

TEST_CASE("free harmonic ground state") {
  const GroundStateResult& r = free_state();
  CHECK(r.E_gp == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(r.mu_gp == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(l2_norm(r.phi) == doctest::Approx(1.0).epsilon(1e-12));
  const LinfDiagnostics l = linf_diagnostics(r.phi, 1.0, TrapSpec{});
  CHECK(l.linf == doctest::Approx(std::pow(pi, -0.75)).epsilon(1e-6));
}

TEST_CASE("chemical potential identity and energy monotonicity") {
  const GroundStateResult& r = interacting_state();
  const Field V = TrapSpec{}.sample(small_grid());
  const double l4 = lp_norm(r.phi, 4.0);
  CHECK(r.E_gp == doctest::Approx(gp_energy(r.phi, V, 10.0)).epsilon(1e-12));
  CHECK(r.mu_gp == doctest::Approx(r.E_gp + 5.0 * std::pow(l4, 4)).epsilon(1e-9));
  REQUIRE(r.energy_history.size() >= 2);
  for (std::size_t i = 1; i < r.energy_history.size(); ++i)
    CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-12);
  CHECK(r.residual < 1e-9);
}

TEST_CASE("ground state is a local minimum") {
  const GroundStateResult& r = interacting_state();
  const Field V = TrapSpec{}.sample(small_grid());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 10; ++trial) {
    const double sigma = 0.5 + 0.25 * trial;
    const double cx = nd(rng) * 0.5;
    Field p = Field::from_function(small_grid(), [&](const std::array<double, 3>& x) {
      const double r2 = (x[0] - cx) * (x[0] - cx) + x[1] * x[1] + x[2] * x[2];
      return cplx(std::exp(-r2 / (2 * sigma * sigma)), 0);
    });
    normalize(p);
    for (double eps : {1e-2, 1e-3}) {
      Field u = r.phi + cplx(eps, 0) * p;
      normalize(u);
      CHECK(gp_energy(u, V, 10.0) >= r.E_gp - 1e-12);
    }
  }
}

TEST_CASE("lowest eigenvalue of h^GP is the chemical potential") {
  const GroundStateResult& r = interacting_state();
  const SpectrumResult s = hgp_spectrum(small_grid(), TrapSpec{}, 10.0, r.phi, 4);
  CHECK(s.eigenvalues[0] == doctest::Approx(r.mu_gp).epsilon(1e-7));
  CHECK(s.gap > 0);
  for (std::size_t i = 1; i < s.eigenvalues.size(); ++i) CHECK(s.eigenvalues[i] >= s.eigenvalues[i - 1]);
  CHECK(std::abs(std::abs(inner(s.eigenfields[0], r.phi)) - 1.0) < 1e-6);
}

TEST_CASE("semiclassical rescaling") {
  const GroundStateResult& r = interacting_state();
  Field u = Field::from_function(small_grid(), [](const std::array<double, 3>& x) {
    return cplx(x[0] * std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])), 0.3 * x[1]);
  });
  for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(-0.5 * small_grid().radius(i));
  normalize(u);
  const SemiclassicalCheck c = semiclassical_roundtrip(u, r.phi, TrapSpec{}, 10.0);
  CHECK(c.lhs == doctest::Approx(c.rhs).epsilon(1e-10));
  CHECK(c.norm_rescaled == doctest::Approx(c.norm_original).epsilon(1e-12));
  CHECK(max_abs_difference(c.map.backward(c.psi), u) < 1e-14);
  CHECK(c.map.epsilon == doctest::Approx(std::pow(10.0, -0.4)).epsilon(1e-12));
  CHECK_THROWS_AS(make_semiclassical_map(small_grid(), TrapSpec{}, 0.0), std::invalid_argument);
}

TEST_CASE("Agmon decay of the free ground state") {
  const DecayDiagnostics d = agmon_tail(free_state().phi, TrapSpec{}, 1.5, 4.0);
  CHECK(d.positive);
  CHECK(d.slope == doctest::Approx(1.0).epsilon(0.05));
  CHECK(d.intercept == doctest::Approx(std::log(std::pow(pi, -0.75))).epsilon(0.05));

  const Field zero(small_grid());
  CHECK_THROWS_AS(agmon_tail(zero, TrapSpec{}, 1.5, 4.0), std::runtime_error);
}

TEST_CASE("TF distance vanishes on the TF profile itself") {
  const InteractionSpec v;
  const TFProfile tf1 = tf_minimize(TrapSpec{}, v.integral(3));
  Field phi = tf1.sample(small_grid());
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = std::sqrt(phi[i].real());
  const TFDistance d = tf_profile_distance(phi, 1.0, TrapSpec{}, v);
  CHECK(d.distance < 1e-14);
  CHECK(d.rho_tf1_max == doctest::Approx(tf1.density(0)));
}

TEST_CASE("box and coupling validation") {
  CHECK_THROWS_AS(gp_minimize(make_grid(3, 16, 1.0), TrapSpec{}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gp_minimize(small_grid(), TrapSpec{}, -1.0), std::invalid_argument);
  CHECK(default_half_width(TrapSpec{}, 8 * pi / 15) == doctest::Approx(8.0));
}

TEST_CASE("interaction gap shrinks with N") {
  const Grid g = make_grid(1, 4096, 8.0);
  const Field phi = Field::from_function(g, [](const std::array<double, 3>& x) {
    return cplx(std::pow(pi, -0.25) * std::exp(-0.5 * x[0] * x[0]), 0);
  });
  InteractionSpec v;
  double prev = INFINITY;
  for (double N : {64.0, 1024.0}) {
    const InteractionGap r = interaction_gap(phi, v, N);
    CHECK(r.within_bound);
    CHECK(r.measured < prev);
    prev = r.measured;
  }
  CHECK_THROWS_AS(interaction_gap(phi, v, 1e12), std::invalid_argument);
}
