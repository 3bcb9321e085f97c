#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tfcond/model.hpp"

using namespace tfcond;
using std::numbers::pi;

TEST_CASE("derived scales") {
  TrapSpec trap;
  InteractionSpec v;
  RegimeParams r;
  r.N = 10000;
  r.g_N = 1.0 / v.integral(3);  // g int v = 1
  CHECK(derived_scales(trap, v, r).epsilon == doctest::Approx(1.0));

  r.g_N = 100;
  const DerivedScales s = derived_scales(trap, v, r);
  CHECK(s.gn_exponent_a == doctest::Approx(2.0 / 7.0));
  CHECK(s.gn_exponent_b == doctest::Approx(1.0 / 6.0));
  CHECK(s.healing_length == doctest::Approx(1e-2 * std::pow(100.0, -0.3)).epsilon(1e-12));
  CHECK(s.healing_length == doctest::Approx(2.512e-3).epsilon(1e-3));

  // Pure function: bit-identical on repeat.
  const DerivedScales t = derived_scales(trap, v, r);
  CHECK(t.G == s.G);
  CHECK(t.epsilon == s.epsilon);
  CHECK(t.healing_length == s.healing_length);
}

TEST_CASE("gn exponents positive on the admissible range") {
  TrapSpec trap;
  InteractionSpec v;
  RegimeParams r;
  for (double s : {2.0, 3.0, 6.0}) {
    trap.s = s;
    for (double b : {0.01, 0.1, 0.2, 0.33}) {
      r.beta = b;
      v.beta = b;
      const DerivedScales d = derived_scales(trap, v, r);
      CHECK(d.gn_exponent_a > 0);
      CHECK(d.gn_exponent_b > 0);
    }
  }
}

TEST_CASE("assumption checks") {
  const Grid g = make_grid(3, 32, 6.0);
  InteractionSpec v;
  const Assumption1Report ok = check_assumption1(v, g);
  CHECK(ok.passed());
  CHECK(ok.min_fourier >= -1e-12);

  InteractionSpec hat;
  hat.profile = "mexican_hat";
  const Assumption1Report bad = check_assumption1(hat, g);
  CHECK_FALSE(bad.positive_type);
  CHECK_FALSE(bad.passed());

  InteractionSpec zero;
  zero.profile = "zero";
  CHECK_FALSE(check_assumption1(zero, g).passed());
}

TEST_CASE("admissibility") {
  TrapSpec trap;
  RegimeParams r;
  r.N = 1000000;
  r.g_N = 5;
  r.beta = 0.4;
  r.lambda_weight = 0.5;
  CHECK_FALSE(admissibility(trap, r).thm1_ok);

  r.beta = 0.1;
  const Admissibility a = admissibility(trap, r);
  CHECK(a.lambda_low == doctest::Approx(0.3));
  CHECK(a.lambda_high == doctest::Approx(0.7));
  CHECK(r.lambda_weight > a.lambda_low);
  CHECK(r.lambda_weight < a.lambda_high);

  // s = 2, beta = 0.2: exponents 2/7 and 1/6, both integral powers of 2 at N = 2^42.
  r.beta = 0.2;
  r.N = 1LL << 42;
  r.g_N = 64;
  const Admissibility b = admissibility(trap, r);
  CHECK(b.thm1_margin_a == doctest::Approx(64.0 / 4096).epsilon(1e-12));
  CHECK(b.thm1_margin == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(b.thm1_ok);
}

TEST_CASE("scattering length") {
  InteractionSpec v;
  CHECK(scattering_length(v, 0.0).a == 0.0);

  const ScatteringResult born = scattering_length(v, 1e-3);
  CHECK(born.a == doctest::Approx(1e-3 * std::sqrt(pi) / 8).epsilon(0.01));
  CHECK(born.a_born == doctest::Approx(1e-3 * v.integral(3) / (8 * pi)));

  const ScatteringResult mid = scattering_length(v, 1.0);
  CHECK(mid.a < mid.a_born);
  CHECK(std::abs(mid.a - mid.a_refined) <= 1e-6 * mid.a);
}

TEST_CASE("scattering length is small against the interaction range") {
  // a_N / R_N equals a(kappa = g N^{beta - 1}) after rescaling y = N^beta x.
  InteractionSpec v;
  const double g = 10;
  double prev = INFINITY;
  for (double N : {1e2, 1e4, 1e6}) {
    const double ratio = scattering_length(v, g * std::pow(N, v.beta - 1)).a;
    CHECK(ratio < prev);
    prev = ratio;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("config parsing") {
  const ModelConfig c = parse_model_config(
      R"({"trap": {"strength": 2, "s": 4}, "interaction": {"profile": "gaussian", "beta": 0.1},
          "regime": {"N": 50, "g_N": 3, "lambda_weight": 0.4}})");
  CHECK(c.trap.strength == 2);
  CHECK(c.trap.s == 4);
  CHECK(c.interaction.beta == 0.1);
  CHECK(c.regime.N == 50);
  CHECK(c.regime.g_N == 3);
  CHECK_THROWS_AS(parse_model_config(R"({"trap": {"strenght": 1}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_model_config(R"({"extra": {}})"), std::invalid_argument);
  CHECK_NOTHROW(parse_model_config(R"({"extra": {}})", {"extra"}));
  CHECK_THROWS_AS(parse_model_config("{"), std::invalid_argument);
}
