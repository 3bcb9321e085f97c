#include <cmath>
#include <numbers>
#include <stdexcept>

#include "tfcond/errors.hpp"
#include "tfcond/model.hpp"

namespace tfcond {

namespace {

struct RadialSolution {
  std::vector<double> r;
  std::vector<double> u;
  double slope = 0;
  double intercept = 0;
};

RadialSolution integrate_radial(const InteractionSpec& v, double kappa, double r_max, int mesh) {
  RadialSolution sol;
  const double h = r_max / mesh;
  sol.r.resize(mesh + 1);
  sol.u.resize(mesh + 1);
  double u = 0, p = 1;
  auto acc = [&](double r, double uu) { return 0.5 * kappa * v(r) * uu; };
  sol.r[0] = 0;
  sol.u[0] = 0;
  for (int i = 0; i < mesh; ++i) {
    const double r = i * h;
    const double k1u = p, k1p = acc(r, u);
    const double k2u = p + 0.5 * h * k1p, k2p = acc(r + 0.5 * h, u + 0.5 * h * k1u);
    const double k3u = p + 0.5 * h * k2p, k3p = acc(r + 0.5 * h, u + 0.5 * h * k2u);
    const double k4u = p + h * k3p, k4p = acc(r + h, u + h * k3u);
    u += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    sol.r[i + 1] = (i + 1) * h;
    sol.u[i + 1] = u;
  }
  // Least-squares line through the last 10% of the mesh.
  const int first = mesh - std::max(2, mesh / 10);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = first; i <= mesh; ++i) {
    sx += sol.r[i];
    sy += sol.u[i];
    sxx += sol.r[i] * sol.r[i];
    sxy += sol.r[i] * sol.u[i];
    ++cnt;
  }
  sol.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  sol.intercept = (sy - sol.slope * sx) / cnt;
  return sol;
}

}  // namespace

ScatteringResult scattering_length(const InteractionSpec& interaction, double kappa,
                                   double r_max, int mesh, double refine_tol) {
  if (!(kappa >= 0)) throw std::invalid_argument("coupling must be nonnegative");
  if (!(r_max > 0) || mesh < 20) throw std::invalid_argument("bad radial mesh");
  const double tail = std::abs(interaction(r_max)) * std::pow(r_max, 3);
  if (tail > 1e-10) throw std::invalid_argument("interaction does not decay inside r_max");

  ScatteringResult res;
  res.kappa = kappa;
  res.a_born = kappa * interaction.integral(3) / (8 * std::numbers::pi);

  const auto coarse = integrate_radial(interaction, kappa, r_max, mesh);
  const auto fine = integrate_radial(interaction, kappa, r_max, 2 * mesh);
  res.a = -coarse.intercept / coarse.slope;
  res.a_refined = -fine.intercept / fine.slope;
  if (kappa == 0) {
    res.a = 0;
    res.a_refined = 0;
  }
  if (std::abs(res.a - res.a_refined) > refine_tol)
    throw SolverError("scattering mesh too coarse: refinement changes a by " +
                      std::to_string(std::abs(res.a - res.a_refined)));

  res.r = coarse.r;
  res.f.resize(coarse.r.size());
  res.f[0] = coarse.slope != 0 ? 1.0 / coarse.slope : 1.0;
  for (std::size_t i = 1; i < coarse.r.size(); ++i)
    res.f[i] = coarse.u[i] / (coarse.slope * coarse.r[i]);
  return res;
}

}  // namespace tfcond
