#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "tfcond/harness.hpp"

using namespace tfcond;

TEST_CASE("log-log fit") {
  const std::vector<double> x{1, 2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * v * v);
  const FitResult f = fit_loglog(x, y);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.residual < 1e-12);
  CHECK(f.points.size() == 5);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd(0, 0.01);
  std::vector<double> xs, ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(std::pow(10.0, 1 + 0.1 * i));
    ys.push_back(std::pow(xs.back(), -0.4) * std::exp(nd(rng)));
  }
  CHECK(fit_loglog(xs, ys).slope == doctest::Approx(-0.4).epsilon(0.05));

  const std::vector<double> two{1, 2};
  CHECK_THROWS_AS(fit_loglog(two, two), std::invalid_argument);
  const std::vector<double> bad{1, -2, 3};
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(fit_loglog(three, bad), std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog(x, three), std::invalid_argument);
  const std::vector<double> same{2, 2, 2};
  CHECK_THROWS_AS(fit_loglog(same, bad), std::invalid_argument);
}

TEST_CASE("study kinds round trip") {
  for (StudyKind k : {StudyKind::gap_vs_g, StudyKind::linf_vs_g, StudyKind::tf_convergence,
                      StudyKind::lemma26_vs_N, StudyKind::hgp_rate_vs_N, StudyKind::manybody_suite})
    CHECK(parse_study_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_study_kind("nope"), std::invalid_argument);
}

TEST_CASE("study spec validation") {
  StudySpec s;
  s.kind = StudyKind::gap_vs_g;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.values = {10, 5};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.values = {-1, 5};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.values = {5, 10};
  CHECK_NOTHROW(s.validate());
  s.kind = StudyKind::lemma26_vs_N;
  s.values = {64.5, 128};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  CHECK_THROWS_AS(run_study(parse_study_spec(R"({"study": {"kind": "gap_vs_g", "values": []}})")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_study_spec(R"({"study": {"kind": "gap_vs_g", "values": [1, 2], "bogus": 1}})"),
                  std::invalid_argument);
  const StudySpec p = parse_study_spec(
      R"({"study": {"kind": "lemma26_vs_N", "values": [64, 256]}, "grid": {"dim": 1, "n": 1024, "half_width": 8}})");
  CHECK(p.kind == StudyKind::lemma26_vs_N);
  CHECK(p.dim == 1);
  CHECK(p.resolved_grid_n() == 1024);
}

TEST_CASE("study output is deterministic and complete") {
  StudySpec s;
  s.kind = StudyKind::lemma26_vs_N;
  s.values = {64, 256, 1024};
  s.dim = 1;
  s.grid_n = 4096;
  s.half_width = 8;
  const StudyResult a = run_study(s);
  const StudyResult b = run_study(s);
  CHECK(study_csv(a) == study_csv(b));
  CHECK(study_summary_json(a, s) == study_summary_json(b, s));
  CHECK(a.passed);
  REQUIRE(a.rows.size() == 3);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const StudyRow& r = a.rows[i];
    CHECK(r.ok);
    CHECK(r.params.size() == a.rows.front().params.size());
    CHECK(r.params.front().second == s.values[i]);
  }

  // Header has one column per parameter and metric.
  const std::string csv = study_csv(a);
  const std::string header = csv.substr(0, csv.find('\n'));
  const auto cols = std::count(header.begin(), header.end(), ',') + 1;
  const auto& r0 = a.rows.front();
  CHECK(static_cast<std::size_t>(cols) >= r0.params.size() + r0.metrics.size());
}
