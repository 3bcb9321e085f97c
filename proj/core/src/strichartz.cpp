#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "tfcond/dynamics.hpp"

namespace tfcond {

StrichartzSample strichartz_sample(const SpaceTimeField& f, double T) {
  if (f.size() < 2) throw std::invalid_argument("need at least two time samples");
  if (!(T > 0)) throw std::invalid_argument("T must be positive");
  const Grid& grid = f.front().grid();
  const auto k2 = grid.k_squared();
  const double dt = T / static_cast<double>(f.size() - 1);
  // Exact exponential integrator for f linear on each time cell:
  // u_{m+1} = e^{z dt} u_m + A f_m + B f_{m+1}, z = -i k^2.
  std::vector<cplx> E(k2.size()), A(k2.size()), B(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const cplx z(0, -k2[i]);
    const cplx zd = z * dt;
    E[i] = std::exp(zd);
    if (std::abs(zd) < 1e-4) {
      A[i] = dt / 2 + z * dt * dt / 3.0;
      B[i] = dt / 2 + z * dt * dt / 6.0;
    } else {
      A[i] = (E[i] * (zd - 1.0) + 1.0) / (z * z * dt);
      B[i] = (E[i] - 1.0) / z - A[i];
    }
  }
  StrichartzSample out;
  Field U(grid, Basis::frequency);
  Field Fprev = to_frequency(f[0]);
  double sup_f = lp_norm(f[0], 6.0 / 5.0);
  for (std::size_t m = 1; m < f.size(); ++m) {
    const Field Fnext = to_frequency(f[m]);
    for (std::size_t i = 0; i < U.size(); ++i) U[i] = E[i] * U[i] + A[i] * Fprev[i] + B[i] * Fnext[i];
    out.lhs = std::max(out.lhs, l2_norm(U));
    sup_f = std::max(sup_f, lp_norm(f[m], 6.0 / 5.0));
    Fprev = Fnext;
  }
  out.rhs = std::sqrt(T) * sup_f;
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
  return out;
}

StrichartzReport strichartz_check(int samples, double T, std::uint64_t seed, const Grid& grid,
                                  int time_steps) {
  if (samples < 0 || time_steps < 1) throw std::invalid_argument("bad sample counts");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int d = grid.dim();
  const double L = grid.half_width();
  StrichartzReport rep;
  for (int s = 0; s < samples; ++s) {
    // A few Gaussian wave packets with smooth, band-limited time modulation.
    const int packets = 1 + static_cast<int>(U(rng) * 3);
    struct Packet {
      std::array<double, 3> c, k;
      double width;
      cplx amp;
      std::array<double, 3> tc, tphase;
    };
    std::vector<Packet> ps(packets);
    for (auto& p : ps) {
      for (int a = 0; a < 3; ++a) {
        p.c[a] = a < d ? (U(rng) - 0.5) * 0.6 * L : 0.0;
        p.k[a] = a < d ? (U(rng) - 0.5) * 4.0 : 0.0;
        p.tc[a] = U(rng) * 2 - 1;
        p.tphase[a] = U(rng) * 2 * std::numbers::pi;
      }
      p.width = 0.5 + U(rng);
      p.amp = std::polar(0.2 + U(rng), U(rng) * 2 * std::numbers::pi);
    }
    SpaceTimeField f;
    for (int m = 0; m <= time_steps; ++m) {
      const double t = T * m / time_steps;
      f.push_back(Field::from_function(grid, [&](const std::array<double, 3>& x) {
        cplx v = 0;
        for (const auto& p : ps) {
          double r2 = 0, kx = 0;
          for (int a = 0; a < d; ++a) {
            r2 += (x[a] - p.c[a]) * (x[a] - p.c[a]);
            kx += p.k[a] * x[a];
          }
          double mod = 0;
          for (int q = 0; q < 3; ++q)
            mod += p.tc[q] * std::cos(2 * std::numbers::pi * q * t / T + p.tphase[q]);
          v += p.amp * mod * std::exp(-r2 / (2 * p.width * p.width)) * std::polar(1.0, kx);
        }
        return v;
      }));
    }
    const auto smp = strichartz_sample(f, T);
    if (smp.lhs > smp.rhs * (1 + 1e-12)) ++rep.violations;
    rep.max_ratio = std::max(rep.max_ratio, smp.ratio);
    rep.samples.push_back(smp);
  }
  return rep;
}

}  // namespace tfcond
