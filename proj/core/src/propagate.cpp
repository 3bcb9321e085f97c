#include <cmath>
#include <future>
#include <string>

#include "tfcond/dynamics.hpp"
#include "tfcond/errors.hpp"

namespace tfcond {

Nonlinearity Nonlinearity::cubic(double G) {
  Nonlinearity nl;
  nl.equation = Equation::gp;
  nl.G = G;
  return nl;
}

Nonlinearity Nonlinearity::hartree(const Grid& grid, const InteractionSpec& interaction, double g,
                                   double N) {
  return hartree_kernel(interaction.sample_scaled(grid, N), g);
}

Nonlinearity Nonlinearity::hartree_kernel(const Field& kernel, double g) {
  Nonlinearity nl;
  nl.equation = Equation::hartree;
  nl.g = g;
  nl.multiplier = kernel_multiplier(kernel);
  return nl;
}

Field Nonlinearity::potential(const Field& u) const {
  Field rho = abs_squared(u);
  if (equation == Equation::gp) {
    rho *= G;
    return rho;
  }
  Field conv = convolve_with_multiplier(multiplier, rho);
  for (auto& v : conv.values()) v = g * v.real();
  return conv;
}

double Nonlinearity::free_energy(const Field& u) const {
  const Field W = potential(u);
  double s = 0;
  for (std::size_t i = 0; i < u.size(); ++i) s += W[i].real() * std::norm(u[i]);
  return kinetic_energy(u) + 0.5 * s * u.grid().cell_volume();
}

Field free_evolution(const Field& phi, double t) {
  Field F = to_frequency(phi);
  const auto k2 = phi.grid().k_squared();
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= std::polar(1.0, -t * k2[i]);
  return transform(F);
}

namespace {

class Stepper {
 public:
  Stepper(const Grid& grid, const Nonlinearity& nl, const std::optional<TrapSpec>& trap, double dt)
      : nl_(nl), dt_(dt), phase_(grid.size()) {
    const auto k2 = grid.k_squared();
    for (std::size_t i = 0; i < k2.size(); ++i) phase_[i] = std::polar(1.0, -dt * k2[i]);
    if (trap) trap_field_ = trap->sample(grid);
  }

  void half_potential(Field& u) const {
    Field W = nl_.potential(u);
    if (trap_field_.size()) W += trap_field_;
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::polar(1.0, -0.5 * dt_ * W[i].real());
  }

  void step(Field& u) const {
    half_potential(u);
    Field F = transform(u);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= phase_[i];
    u = transform(F);
    half_potential(u);
  }

  double energy(const Field& u) const {
    double e = nl_.free_energy(u);
    if (trap_field_.size()) {
      double s = 0;
      for (std::size_t i = 0; i < u.size(); ++i) s += trap_field_[i].real() * std::norm(u[i]);
      e += s * u.grid().cell_volume();
    }
    return e;
  }

 private:
  const Nonlinearity& nl_;
  double dt_;
  std::vector<cplx> phase_;
  Field trap_field_;
};

}  // namespace

PropagationTrace propagate(const Field& phi0, const Nonlinearity& nl, const PropagatorConfig& cfg) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("time step must be positive");
  if (!(cfg.t_final >= 0)) throw std::invalid_argument("final time must be nonnegative");
  if (cfg.record_every < 1) throw std::invalid_argument("record_every must be >= 1");
  if (std::abs(l2_norm(phi0) - 1) > 1e-8) throw std::invalid_argument("initial state must be normalized");
  const double steps_real = cfg.t_final / cfg.dt;
  const long long steps = std::llround(steps_real);
  if (std::abs(steps_real - steps) > 1e-6)
    throw std::invalid_argument("final time must be a multiple of the time step");

  const Grid& grid = phi0.grid();
  const double sign = cfg.backward ? -1.0 : 1.0;
  const double dt = sign * cfg.dt;
  const Stepper stepper(grid, nl, cfg.trap, dt);

  if (cfg.accuracy_guard > 0 && steps > 0) {
    Field one = phi0;
    stepper.step(one);
    const Stepper half(grid, nl, cfg.trap, 0.5 * dt);
    Field two = phi0;
    half.step(two);
    half.step(two);
    const double err = l2_norm(one - two);
    if (!(err <= cfg.accuracy_guard))
      throw SolverError("time step too large: one-step splitting error " + std::to_string(err));
  }

  PropagationTrace trace;
  Field u = phi0;
  auto record = [&](long long k) {
    const Norms nm = norms(u);
    TraceRecord r;
    r.t = k * dt;
    r.mass = nm.l2 * nm.l2;
    r.energy = stepper.energy(u);
    r.h1 = nm.h1;
    r.h2 = nm.h2;
    r.linf = nm.linf;
    if (!std::isfinite(r.energy) || !std::isfinite(r.mass)) throw SolverError("NaN in propagation");
    if (!trace.records.empty()) {
      trace.max_mass_drift = std::max(trace.max_mass_drift, std::abs(r.mass - trace.records[0].mass));
      trace.max_energy_drift =
          std::max(trace.max_energy_drift, std::abs(r.energy - trace.records[0].energy));
    }
    trace.records.push_back(r);
    if (cfg.keep_snapshots) trace.snapshots.push_back(u);
  };
  record(0);
  for (long long k = 1; k <= steps; ++k) {
    stepper.step(u);
    if (k % cfg.record_every == 0 || k == steps) record(k);
  }
  trace.final_state = std::move(u);
  return trace;
}

HartreeGpComparison compare_h_vs_gp(const Field& phi0, const Nonlinearity& gp,
                                    const Nonlinearity& hartree, double g, double N, double beta,
                                    const PropagatorConfig& cfg) {
  PropagatorConfig c = cfg;
  c.keep_snapshots = true;
  auto fut = std::async(std::launch::async, [&] { return propagate(phi0, gp, c); });
  HartreeGpComparison out;
  out.hartree = propagate(phi0, hartree, c);
  out.gp = fut.get();

  out.bound = BoundEvaluator::from_initial(phi0, gp.G, g, N, beta);
  const std::size_t n = out.gp.records.size();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) dist[i] = l2_norm(out.gp.snapshots[i] - out.hartree.snapshots[i]);
  // Calibrate the prefactor at the first positive record time.
  out.bound.C = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = out.gp.records[i].t;
    if (t != 0) {
      const double b = out.bound.hartree_to_gp(t);
      out.bound.C = (b > 0 && std::isfinite(b)) ? dist[i] / b : 1.0;
      break;
    }
  }
  out.bound_holds = true;
  for (std::size_t i = 0; i < n; ++i) {
    ComparisonPoint p;
    p.t = out.gp.records[i].t;
    p.distance = dist[i];
    p.bound = out.bound.hartree_to_gp(p.t);
    if (p.distance > p.bound * (1 + 1e-9) + 1e-14) out.bound_holds = false;
    out.curve.push_back(p);
  }
  out.final_distance = dist.empty() ? 0 : dist.back();
  if (!cfg.keep_snapshots) {
    out.gp.snapshots.clear();
    out.hartree.snapshots.clear();
  }
  return out;
}

HartreeGpComparison compare_h_vs_gp(const Field& phi0, const InteractionSpec& interaction,
                                    double g, double N, const PropagatorConfig& cfg) {
  const int d = phi0.grid().dim();
  const auto gp = Nonlinearity::cubic(g * interaction.integral(d));
  const auto h = Nonlinearity::hartree(phi0.grid(), interaction, g, N);
  return compare_h_vs_gp(phi0, gp, h, g, N, interaction.beta, cfg);
}

SplittingOrder splitting_order(const Field& phi0, const Nonlinearity& nl, const PropagatorConfig& cfg) {
  if (!(cfg.t_final > 0)) throw std::invalid_argument("splitting order needs t_final > 0");
  SplittingOrder out;
  auto run = [&](double dt) {
    PropagatorConfig c = cfg;
    c.dt = dt;
    c.record_every = 1 << 30;
    c.keep_snapshots = false;
    return propagate(phi0, nl, c).final_state;
  };
  Field prev = run(4 * cfg.dt);
  for (int k = 2; k >= 0; --k) {
    const double dt = cfg.dt * (1 << k);
    Field next = run(0.5 * dt);
    out.dts.push_back(dt);
    out.errors.push_back(l2_norm(prev - next));
    prev = std::move(next);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < out.dts.size(); ++i) {
    if (!(out.errors[i] > 0)) throw SolverError("splitting errors vanish; the order is undefined");
    const double x = std::log(out.dts[i]), y = std::log(out.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(out.dts.size());
  out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

}  // namespace tfcond
