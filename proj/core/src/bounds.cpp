#include <algorithm>
#include <cmath>
#include <limits>

#include "tfcond/dynamics.hpp"

namespace tfcond {

BoundEvaluator BoundEvaluator::from_initial(const Field& phi0, double G, double g, double N,
                                            double beta) {
  BoundEvaluator b;
  b.g = g;
  b.N = N;
  b.beta = beta;
  b.energy0 = Nonlinearity::cubic(G).free_energy(phi0);
  const Norms nm = norms(phi0);
  b.linf0 = nm.linf;
  b.h2_0 = nm.h2;
  return b;
}

double BoundEvaluator::c_n(double t) const {
  const double rate = C_inner * g * g *
                      (energy0 * energy0 + g * g * std::pow(N, -2 * beta) * std::pow(linf0, 4));
  return h2_0 * std::exp(rate * std::abs(t));
}

double BoundEvaluator::hartree_to_gp(double t) const {
  // Assembled in logs; the double exponential overflows quickly for large g.
  const double pre = C * std::sqrt(g) * (1 + energy0 + g * std::pow(N, -beta) * linf0 * linf0) *
                     std::pow(N, -0.5 * beta);
  if (pre <= 0) return 0;
  const double cn = c_n(t);
  const double expo = C_v * cn * cn * g * std::abs(t);
  const double log_b = std::log(pre) + expo;
  return log_b > 700 ? std::numeric_limits<double>::infinity() : std::exp(log_b);
}

double BoundEvaluator::condensation_rhs(double t, double initial_rdm_distance) const {
  const double first = std::sqrt(2.0) *
                       (std::pow(N, 0.5 * (1 - lambda)) * std::sqrt(initial_rdm_distance) +
                        std::pow(N, 0.5 * (3 * beta - lambda))) *
                       std::exp(std::min(700.0, C_v * c_n(t) * g * std::abs(t)));
  return first + hartree_to_gp(t);
}

SobolevReport sobolev_monitor(const PropagationTrace& trace, const Field& phi0,
                              const Nonlinearity& nl, double h1_slack) {
  SobolevReport rep;
  const double E = nl.free_energy(phi0);
  rep.energy_bound = std::sqrt(1 + E);
  for (const auto& r : trace.records) rep.sup_h1 = std::max(rep.sup_h1, r.h1);
  rep.h1_constant = rep.sup_h1 / rep.energy_bound;
  rep.h1_ok = rep.h1_constant <= h1_slack;

  const auto& recs = trace.records;
  if (recs.empty()) {
    rep.h2_ok = true;
    return rep;
  }
  const double coupling = nl.equation == Equation::gp ? nl.G : nl.g;
  const double scale = coupling * coupling * E * E;
  const double base = std::log(1.05 * recs.front().h2);
  const std::size_t half = recs.size() / 2;
  if (scale <= 0) {
    rep.h2_ok = std::all_of(recs.begin(), recs.end(),
                            [&](const TraceRecord& r) { return std::log(r.h2) <= base; });
    return rep;
  }
  double c = 0;
  for (std::size_t i = 1; i <= half && i < recs.size(); ++i) {
    const double t = std::abs(recs[i].t);
    if (t > 0) c = std::max(c, (std::log(recs[i].h2) - base) / (scale * t));
  }
  rep.h2_rate = c;
  rep.h2_ok = true;
  for (std::size_t i = half; i < recs.size(); ++i) {
    const double env = base + c * scale * std::abs(recs[i].t);
    if (std::log(recs[i].h2) > env + 1e-12) rep.h2_ok = false;
  }
  return rep;
}

}  // namespace tfcond
