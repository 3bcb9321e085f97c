#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tfcond/dynamics.hpp"
#include "tfcond/errors.hpp"

using namespace tfcond;
using std::numbers::pi;

namespace {

const Grid& line() {
  static const Grid g = make_grid(1, 1024, 20.0);
  return g;
}

Field gaussian(const Grid& g, double shift = 0, double kick = 0) {
  Field f = Field::from_function(g, [&](const std::array<double, 3>& x) {
    return std::exp(-0.5 * (x[0] - shift) * (x[0] - shift)) * std::polar(1.0, kick * x[0]);
  });
  normalize(f);
  return f;
}

PropagatorConfig config(double t_final, double dt = 1e-3) {
  PropagatorConfig c;
  c.dt = dt;
  c.t_final = t_final;
  c.record_every = 100;
  return c;
}

}  // namespace

TEST_CASE("free gaussian spreading") {
  // i u_t = -u'' spreads |u|^2 to width sigma^2 = 1 + 4 t^2.
  const Field phi0 = gaussian(line());
  const PropagationTrace tr = propagate(phi0, Nonlinearity::cubic(0), config(1.0));
  for (const auto& r : tr.records) {
    const double sigma2 = 1 + 4 * r.t * r.t;
    CHECK(r.linf * r.linf == doctest::Approx(1 / std::sqrt(pi * sigma2)).epsilon(1e-9));
  }
  CHECK(max_abs_difference(tr.final_state, free_evolution(phi0, 1.0)) < 1e-12);
}

TEST_CASE("constant density rotates in phase") {
  const double G = 3.0;
  const double c = 1 / std::sqrt(2 * line().half_width());
  Field u(line());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = c;
  const PropagationTrace tr = propagate(u, Nonlinearity::cubic(G), config(0.5));
  const cplx expected = c * std::polar(1.0, -G * c * c * 0.5);
  for (std::size_t i = 0; i < u.size(); i += 97) CHECK(std::abs(tr.final_state[i] - expected) < 1e-12);
}

TEST_CASE("mass and energy conservation") {
  const PropagationTrace tr = propagate(gaussian(line(), 1.0, 0.5), Nonlinearity::cubic(4.0), config(1.0));
  CHECK(tr.max_mass_drift < 1e-12);
  CHECK(tr.max_energy_drift < 1e-5);
  CHECK(tr.records.front().t == 0.0);
  CHECK(tr.records.back().t == doctest::Approx(1.0));
}

TEST_CASE("time reversal") {
  const Field phi0 = gaussian(line(), 0.5, 1.0);
  const Nonlinearity nl = Nonlinearity::cubic(4.0);
  const PropagationTrace fwd = propagate(phi0, nl, config(0.5));
  PropagatorConfig back = config(0.5);
  back.backward = true;
  const PropagationTrace rev = propagate(fwd.final_state, nl, back);
  CHECK(max_abs_difference(rev.final_state, phi0) < 1e-10);
}

TEST_CASE("gauge invariance") {
  const Field phi0 = gaussian(line(), 0.5, 1.0);
  const cplx phase = std::polar(1.0, 0.7);
  const Nonlinearity nl = Nonlinearity::cubic(4.0);
  const Field a = propagate(phi0, nl, config(0.3)).final_state;
  const Field b = propagate(phase * phi0, nl, config(0.3)).final_state;
  CHECK(max_abs_difference(phase * a, b) < 1e-12);
}

TEST_CASE("Strang splitting is second order") {
  const SplittingOrder so = splitting_order(gaussian(line(), 0.5, 1.0), Nonlinearity::cubic(4.0), config(0.5));
  CHECK(so.order == doctest::Approx(2.0).epsilon(0.05));
  CHECK(so.errors.size() == 3);
  // The free flow is integrated exactly, so only roundoff remains.
  for (double e : splitting_order(gaussian(line()), Nonlinearity::cubic(0), config(0.5)).errors) CHECK(e < 1e-12);
}

TEST_CASE("Hartree and GP start together") {
  const InteractionSpec v;
  const HartreeGpComparison c = compare_h_vs_gp(gaussian(line()), v, 4.0, 256.0, config(0.2));
  REQUIRE(!c.curve.empty());
  CHECK(c.curve.front().t == 0.0);
  CHECK(c.curve.front().distance == 0.0);
  CHECK(c.final_distance > 0);
  CHECK(c.gp.max_mass_drift < 1e-12);
  CHECK(c.hartree.max_mass_drift < 1e-12);
}

TEST_CASE("Sobolev monitor on the free flow") {
  const Field phi0 = gaussian(line(), 0.0, 1.0);
  const Nonlinearity nl = Nonlinearity::cubic(0);
  const PropagationTrace tr = propagate(phi0, nl, config(1.0));
  const SobolevReport s = sobolev_monitor(tr, phi0, nl);
  CHECK(s.h1_ok);
  CHECK(s.h2_ok);
  CHECK(s.sup_h1 <= s.energy_bound * 1.05);
}

TEST_CASE("Strichartz estimate") {
  const Grid g = make_grid(3, 16, 4.0);
  SpaceTimeField zero(9, Field(g));
  const StrichartzSample s = strichartz_sample(zero, 1.0);
  CHECK(s.lhs == 0.0);
  CHECK_THROWS_AS(strichartz_sample(SpaceTimeField(1, Field(g)), 1.0), std::invalid_argument);

  const StrichartzReport r = strichartz_check(5, 1.0, 11, g, 16);
  CHECK(r.samples.size() == 5);
  CHECK(r.violations == 0);
  CHECK(r.max_ratio <= 1.0);
}

TEST_CASE("propagator input validation") {
  const Field phi0 = gaussian(line());
  CHECK_THROWS_AS(propagate(phi0, Nonlinearity::cubic(1), config(0.5, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(propagate(phi0, Nonlinearity::cubic(1), config(0.5, 0.3)), std::invalid_argument);
  CHECK_THROWS_AS(propagate(2.0 * phi0, Nonlinearity::cubic(1), config(0.5)), std::invalid_argument);
}
