#include <algorithm>
#include <cmath>
#include <string>

#include "tfcond/errors.hpp"
#include "tfcond/groundstate.hpp"

namespace tfcond {

namespace {

struct FlowState {
  Field phi;
  Field hphi;
  double E = 0;
  double mu = 0;
  double residual = 0;
  double max_rho = 0;
};

FlowState evaluate(Field phi, const Field& V, double G) {
  const Grid& g = phi.grid();
  const auto k2 = g.k_squared();
  const double w = g.cell_volume();
  Field F = transform(phi);
  double kin = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    kin += k2[i] * std::norm(F[i]);
    F[i] *= k2[i];
  }
  kin *= w;
  Field hphi = transform(F);  // -Lap phi
  double pot = 0, quart = 0, max_rho = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double rho = std::norm(phi[i]);
    pot += V[i].real() * rho;
    quart += rho * rho;
    max_rho = std::max(max_rho, rho);
    hphi[i] += (V[i].real() + G * rho) * phi[i];
  }
  pot *= w;
  quart *= w;
  FlowState st;
  st.E = kin + pot + 0.5 * G * quart;
  st.mu = st.E + 0.5 * G * quart;
  double r2 = 0;
  for (std::size_t i = 0; i < phi.size(); ++i) r2 += std::norm(hphi[i] - st.mu * phi[i]);
  st.residual = std::sqrt(r2 * w);
  st.max_rho = max_rho;
  st.phi = std::move(phi);
  st.hphi = std::move(hphi);
  return st;
}

void fix_phase(Field& phi) {
  cplx sum = 0;
  for (const auto& v : phi.values()) sum += v;
  const cplx rot = std::abs(sum) > 0 ? std::conj(sum) / std::abs(sum) : cplx(1, 0);
  for (auto& v : phi.values()) v = (rot * v).real();
  normalize(phi);
}

}  // namespace

double gp_energy(const Field& u, const Field& V, double G) {
  const double w = u.grid().cell_volume();
  double pot = 0, quart = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double rho = std::norm(u[i]);
    pot += V[i].real() * rho;
    quart += rho * rho;
  }
  return kinetic_energy(u) + pot * w + 0.5 * G * quart * w;
}

Field apply_hgp(const Field& u, const Field& V, double G, const Field& phi) {
  Field out = laplacian(u);
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = -out[i] + (V[i].real() + G * std::norm(phi[i])) * u[i];
  return out;
}

GroundStateResult gp_minimize_from(const Field& initial, const TrapSpec& trap, double G,
                                   const FlowConfig& flow) {
  trap.validate();
  if (G < 0) throw std::invalid_argument("coupling G must be nonnegative");
  if (flow.dt < 0) throw std::invalid_argument("flow dt must be positive (or 0 for unbounded)");
  const Grid& grid = initial.grid();
  const int d = grid.dim();
  if (flow.check_box) {
    const double harmonic_width = std::pow(trap.strength, -1.0 / (trap.s + 2));
    const double tf_radius = G > 0 ? tf_minimize(trap, G, d).R_tf : 0.0;
    if (grid.half_width() < 2 * std::max(harmonic_width, tf_radius) * (1 - 1e-12))
      throw std::invalid_argument("box half-width must be at least twice max(TF radius, harmonic width)");
  }

  const Field V = trap.sample(grid);
  const auto k2 = grid.k_squared();
  const double inv_dt = flow.dt > 0 ? 1.0 / flow.dt : 0.0;

  Field phi = initial;
  normalize(phi);
  FlowState st = evaluate(std::move(phi), V, G);
  GroundStateResult res;
  if (flow.keep_history) res.energy_history.push_back(st.E);

  double damp = 0;
  int it = 0;
  bool converged = false;
  double last_change = 1;
  for (; it < flow.max_iter; ++it) {
    if (!std::isfinite(st.E)) throw SolverError("NaN encountered in gradient flow");
    if (last_change < flow.tol && st.residual < flow.tol) {
      converged = true;
      break;
    }
    // step = D^{1/2} (1/dt + alpha - Lap)^{-1} D^{1/2} alpha (h phi - mu phi) with
    // D = 1 / (1 + max(0, V + G rho - mu) / alpha). alpha tracks the bulk curvature;
    // D damps the classically forbidden region where V exceeds mu.
    const double alpha = 0.5 * (std::max(st.mu, 0.0) + G * st.max_rho) + 1.0;
    Field R(grid);
    std::vector<double> sqrtD(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
      const double excess = std::max(0.0, V[i].real() + G * std::norm(st.phi[i]) - st.mu);
      sqrtD[i] = 1.0 / std::sqrt(1.0 + excess / alpha);
      R[i] = sqrtD[i] * (st.hphi[i] - st.mu * st.phi[i]);
    }
    Field F = transform(R);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] /= (inv_dt + damp + alpha + k2[i]);
    Field step = transform(F);
    for (std::size_t i = 0; i < step.size(); ++i) step[i] *= sqrtD[i];
    Field trial = st.phi;
    trial -= step;
    normalize(trial);
    FlowState next = evaluate(std::move(trial), V, G);
    if (!std::isfinite(next.E)) throw SolverError("NaN encountered in gradient flow");
    // Renormalization alone moves E by a few ulps of E, so the slack scales with |E|.
    if (next.E > st.E + 1e-13 * std::max(10.0, std::abs(st.E))) {
      ++res.rejected_steps;
      damp = 2 * damp + alpha;
      if (res.rejected_steps > flow.max_iter / 2 + 50)
        throw SolverError("gradient flow cannot decrease the energy");
      continue;
    }
    last_change = std::abs(st.E - next.E) / std::max(std::abs(next.E), 1e-300);
    st = std::move(next);
    damp *= 0.5;
    if (flow.keep_history) res.energy_history.push_back(st.E);
  }
  if (!converged) {
    if (last_change < flow.tol && st.residual < flow.tol)
      converged = true;
    else
      throw SolverError("gradient flow did not converge in " + std::to_string(flow.max_iter) +
                        " iterations (residual " + std::to_string(st.residual) + ")");
  }

  fix_phase(st.phi);
  st = evaluate(std::move(st.phi), V, G);
  res.phi = std::move(st.phi);
  res.E_gp = st.E;
  res.mu_gp = st.mu;
  res.residual = st.residual;
  res.iterations = it;
  res.boundary_mass = boundary_mass(res.phi);
  if (flow.check_box && res.boundary_mass > flow.boundary_tol)
    throw BoxTooSmallError("boundary-shell mass " + std::to_string(res.boundary_mass) +
                           " exceeds tolerance; enlarge the box");
  return res;
}

GroundStateResult gp_minimize(const Grid& grid, const TrapSpec& trap, double G,
                              const FlowConfig& flow) {
  trap.validate();
  const int d = grid.dim();
  const double harmonic_width = std::pow(trap.strength, -1.0 / (trap.s + 2));
  Field init(grid);
  const double h = grid.spacing();
  if (G > 0 && tf_minimize(trap, G, d).R_tf > 1.5 * harmonic_width) {
    const TFProfile tf = tf_minimize(trap, G, d);
    for (std::size_t i = 0; i < init.size(); ++i)
      init[i] = std::sqrt(tf.density(grid.radius(i)));
    // Heat-kernel smoothing of the kink at the TF radius.
    Field F = transform(init);
    const auto k2 = grid.k_squared();
    const double tau = std::max(h * h, 0.25 * std::pow(tf.mu_tf, -1.0 / 3.0) * h);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= std::exp(-tau * k2[i]);
    init = transform(F);
    for (auto& v : init.values()) v = std::abs(v.real());
  } else {
    const double a = std::sqrt(trap.strength);
    init = Field::from_radial(grid, [a](double r) { return std::exp(-0.5 * a * r * r); });
  }
  normalize(init);
  return gp_minimize_from(init, trap, G, flow);
}

}  // namespace tfcond
