#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tfcond/groundstate.hpp"

namespace tfcond {

SemiclassicalMap make_semiclassical_map(const Grid& grid, const TrapSpec& trap, double G) {
  if (!(G > 0)) throw std::invalid_argument("semiclassical rescaling needs G > 0");
  const int d = grid.dim();
  SemiclassicalMap m;
  m.original = grid;
  m.s = trap.s;
  m.length_scale = std::pow(G, -1.0 / (trap.s + d));
  m.epsilon = std::pow(m.length_scale, 0.5 * (trap.s + 2));
  m.rescaled = make_grid(d, grid.n(), grid.half_width() * m.length_scale);
  return m;
}

Field SemiclassicalMap::forward(const Field& phi) const {
  if (!(phi.grid() == original)) throw std::invalid_argument("field is not on the original grid");
  const double amp = std::pow(length_scale, -0.5 * original.dim());
  Samples v(phi.values().begin(), phi.values().end());
  for (auto& x : v) x *= amp;
  return Field(rescaled, std::move(v));
}

Field SemiclassicalMap::backward(const Field& psi) const {
  if (!(psi.grid() == rescaled)) throw std::invalid_argument("field is not on the rescaled grid");
  const double amp = std::pow(length_scale, 0.5 * original.dim());
  Samples v(psi.values().begin(), psi.values().end());
  for (auto& x : v) x *= amp;
  return Field(original, std::move(v));
}

SemiclassicalCheck semiclassical_roundtrip(const Field& u, const Field& phi_gp,
                                           const TrapSpec& trap, double G,
                                           std::span<const double> eigenvalues) {
  if (!(u.grid() == phi_gp.grid())) throw std::invalid_argument("grid mismatch");
  SemiclassicalCheck out;
  out.map = make_semiclassical_map(u.grid(), trap, G);
  const auto& m = out.map;

  const Field V = trap.sample(u.grid());
  out.lhs = inner(u, apply_hgp(u, V, G, phi_gp)).real();

  out.psi = m.forward(u);
  const Field psi0 = m.forward(phi_gp);
  const Field Vr = trap.sample(m.rescaled);
  Field h = laplacian(out.psi);
  const double eps2 = m.epsilon * m.epsilon;
  for (std::size_t i = 0; i < h.size(); ++i)
    h[i] = -eps2 * h[i] + (Vr[i].real() + std::norm(psi0[i])) * out.psi[i];
  out.rhs = std::pow(m.epsilon, -2 * trap.s / (trap.s + 2)) * inner(out.psi, h).real();
  out.norm_original = l2_norm(u);
  out.norm_rescaled = l2_norm(out.psi);
  for (double mu : eigenvalues)
    out.rescaled_eigenvalues.push_back(std::pow(m.epsilon, 2 * trap.s / (trap.s + 2)) * mu);
  return out;
}

LinfDiagnostics linf_diagnostics(const Field& phi, double g, const TrapSpec& trap) {
  const double s = trap.s;
  LinfDiagnostics out;
  out.linf = linf_norm(phi);
  out.grad_linf = gradient_linf(phi);
  out.linf_scaled = out.linf * std::pow(g, 3 / (2 * (s + 3)));
  out.grad_scaled = out.grad_linf * std::pow(g, -(2 * s - 3) / (2 * (s + 3)));
  return out;
}

TFDistance tf_profile_distance(const Field& phi, double g, const TrapSpec& trap,
                               const InteractionSpec& interaction) {
  const Grid& grid = phi.grid();
  const int d = grid.dim();
  const double s = trap.s;
  const TFProfile tf1 = tf_minimize(trap, interaction.integral(d), d);
  const double len = std::pow(g, 1 / (s + d));
  const double amp = std::pow(g, d / (s + d));
  TFDistance out;
  out.rho_tf1_max = tf1.density(0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double y = grid.radius(i) / len;
    out.distance = std::max(out.distance, std::abs(amp * std::norm(phi[i]) - tf1.density(y)));
  }
  return out;
}

double interaction_gap_with_kernel(const Field& phi, const Field& kernel, double integral_v) {
  const Field rho = abs_squared(phi);
  const Field conv = convolve(kernel, rho);
  double m = 0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    m = std::max(m, std::abs(conv[i].real() - integral_v * rho[i].real()));
  return m;
}

InteractionGap interaction_gap(const Field& phi, const InteractionSpec& interaction, double N) {
  const Grid& grid = phi.grid();
  const int d = grid.dim();
  if (grid.spacing() > interaction.range(N) / 4 * (1 + 1e-12))
    throw std::invalid_argument("grid does not resolve the interaction range N^-beta");
  InteractionGap out;
  out.N = N;
  out.measured = interaction_gap_with_kernel(phi, interaction.sample_scaled(grid, N),
                                             interaction.integral(d));
  out.bound = 2 * interaction.first_moment(d) / std::pow(N, interaction.beta) * linf_norm(phi) *
              gradient_linf(phi);
  out.within_bound = out.measured <= out.bound;
  return out;
}

double agmon_distance(const TrapSpec& trap, double r) {
  const double p = 1 + 0.5 * trap.s;
  return std::sqrt(trap.strength) * std::pow(r, p) / p;
}

DecayDiagnostics agmon_tail(const Field& phi, const TrapSpec& trap, double r_min, double r_max,
                            double epsilon) {
  DecayDiagnostics out;
  out.epsilon = epsilon;
  const Grid& grid = phi.grid();
  const double e2 = epsilon * epsilon;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double r = grid.radius(i);
    if (r < r_min || r > r_max) continue;
    const double a = std::abs(phi[i]);
    if (a < 1e-140) continue;
    out.radius.push_back(r);
    out.log_abs.push_back(std::log(a));
    out.reference.push_back(-agmon_distance(trap, r) / e2);
  }
  const std::size_t n = out.radius.size();
  if (n < 3) throw std::runtime_error("decay window is empty after underflow filtering");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -out.reference[i];
    sx += x;
    sy += out.log_abs[i];
    sxx += x * x;
    sxy += x * out.log_abs[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0)) throw std::runtime_error("decay window has no radial spread");
  const double b = (n * sxy - sx * sy) / den;
  out.slope = -b;
  out.intercept = (sy - b * sx) / n;
  out.positive = out.slope > 0;
  return out;
}

}  // namespace tfcond
