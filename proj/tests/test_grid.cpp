#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "tfcond/grid.hpp"
#include "tfcond/model.hpp"

using namespace tfcond;
using std::numbers::pi;

namespace {

Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N01;
  Field f(g);
  for (auto& v : f.values()) v = cplx(N01(rng), N01(rng));
  return f;
}

}  // namespace

TEST_CASE("make_grid spacing and wavenumber ordering") {
  const Grid g = make_grid(1, 8, 1.0);
  CHECK(g.spacing() == doctest::Approx(0.25));
  const double expect[] = {0, 1, 2, 3, -4, -3, -2, -1};
  for (int i = 0; i < 8; ++i) CHECK(g.wavenumbers()[i] == doctest::Approx(expect[i] * pi));
  CHECK(g.spacing() * g.n() == 2 * g.half_width());

  const Grid g3 = make_grid(3, 64, 12.0);
  CHECK(g3.size() == 64u * 64u * 64u);
  CHECK(g3.spacing() == doctest::Approx(0.375));
}

TEST_CASE("make_grid rejects bad sizes") {
  CHECK_THROWS_AS(make_grid(2, 7, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 4, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 8, -1.0), std::invalid_argument);
}

TEST_CASE("transform of a constant and of a plane wave") {
  const Grid g = make_grid(1, 8, 1.0);
  Field c(g);
  for (auto& v : c.values()) v = 1.0;
  const Field C = to_frequency(c);
  for (std::size_t i = 1; i < C.size(); ++i) CHECK(std::abs(C[i]) < 1e-14);
  CHECK(std::abs(C[0]) > 1);

  const Field w = Field::from_function(g, [](const std::array<double, 3>& x) { return std::polar(1.0, pi * x[0]); });
  const Field W = to_frequency(w);
  int nonzero = 0;
  for (std::size_t i = 0; i < W.size(); ++i) nonzero += std::abs(W[i]) > 1e-12;
  CHECK(nonzero == 1);
  CHECK(std::abs(W[1]) > 1);
}

TEST_CASE("round trip and Parseval on random fields") {
  std::mt19937_64 rng(3);
  for (int d = 1; d <= 3; ++d) {
    const Grid g = make_grid(d, d == 3 ? 8 : 32, 2.0);
    for (int t = 0; t < (d == 1 ? 1000 : 50); ++t) {
      const Field f = random_field(g, rng);
      const Field F = to_frequency(f);
      const Field back = to_position(F);
      CHECK(max_abs_difference(f, back) < 1e-12);
      // Frequency fields carry the same Riemann-sum normalization.
      double sp = 0, sf = 0;
      for (std::size_t i = 0; i < f.size(); ++i) {
        sp += std::norm(f[i]);
        sf += std::norm(F[i]);
      }
      CHECK(std::abs(sp - sf) / sp < 1e-12);
    }
  }
}

TEST_CASE("norms of a gaussian, a plane wave and zero") {
  const Grid g = make_grid(1, 256, 12.0);
  const Field gauss = Field::from_radial(g, [](double r) { return std::exp(-0.5 * r * r) / std::pow(pi, 0.25); });
  CHECK(l2_norm(gauss) == doctest::Approx(1.0).epsilon(1e-10));

  const Grid u = make_grid(1, 16, 1.0);
  const Field w = Field::from_function(u, [](const std::array<double, 3>& x) { return std::polar(1.0, pi * x[0]); });
  const Norms nm = norms(w);
  const double m2 = nm.l2 * nm.l2;
  CHECK(nm.h1 * nm.h1 == doctest::Approx(m2 * (1 + pi * pi)).epsilon(1e-10));

  const Norms z = norms(Field(u));
  CHECK(z.l2 == 0);
  CHECK(z.l4 == 0);
  CHECK(z.linf == 0);
  CHECK(z.h1 == 0);
  CHECK(z.h2 == 0);
}

TEST_CASE("spectral laplacian is exact on grid modes") {
  const Grid g = make_grid(2, 16, 1.5);
  const double kx = 3 * pi / 1.5, ky = -2 * pi / 1.5;
  const Field w = Field::from_function(g, [&](const std::array<double, 3>& x) { return std::polar(1.0, kx * x[0] + ky * x[1]); });
  const Field L = laplacian(w);
  Field expect = w;
  expect *= -(kx * kx + ky * ky);
  CHECK(max_abs_difference(L, expect) < 1e-10);
}

TEST_CASE("convolution with a discrete delta, two gaussians and symmetry") {
  std::mt19937_64 rng(5);
  const Grid g = make_grid(1, 128, 10.0);
  Field delta(g);
  const std::size_t origin = g.n() / 2;  // x = 0
  delta[origin] = 1.0 / g.spacing();
  const Field f = random_field(g, rng);
  CHECK(max_abs_difference(convolve(delta, f), f) < 1e-12);

  // N(0, a) * N(0, b) = N(0, a + b), checked at the center.
  const double a = 0.5, b = 1.2;
  auto gauss = [](double var) {
    return [var](double r) { return std::exp(-r * r / (2 * var)) / std::sqrt(2 * pi * var); };
  };
  const Field ka = Field::from_radial(g, gauss(a));
  const Field kb = Field::from_radial(g, gauss(b));
  const Field c = convolve(ka, kb);
  CHECK(c[origin].real() == doctest::Approx(gauss(a + b)(0.0)).epsilon(1e-6));

  // Even kernels commute with even fields under convolution.
  CHECK(max_abs_difference(convolve(ka, kb), convolve(kb, ka)) < 1e-12);
}

TEST_CASE("positive-type kernel gives a nonnegative quadratic form") {
  std::mt19937_64 rng(9);
  InteractionSpec v;
  for (int d = 1; d <= 3; ++d) {
    const Grid g = make_grid(d, d == 3 ? 16 : 64, 6.0);
    const Field k = v.sample(g);
    const auto mult = kernel_multiplier(k);
    CHECK(*std::min_element(mult.begin(), mult.end()) >= -1e-12);
    for (int t = 0; t < 10; ++t) {
      const Field f = abs_squared(random_field(g, rng));
      CHECK(inner(f, convolve(k, f)).real() >= 0);
    }
  }
}

TEST_CASE("binary field serialization round trips") {
  std::mt19937_64 rng(1);
  const Grid g = make_grid(2, 8, 1.0);
  const Field f = random_field(g, rng);
  std::stringstream ss;
  write_field_binary(f, ss);
  const Field r = read_field_binary(ss);
  CHECK(r.grid() == g);
  CHECK(max_abs_difference(f, r) == 0);
}
