#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"
#include "tfcond/groundstate.hpp"

namespace tfcond {

TFProfile tf_minimize(const TrapSpec& trap, double G, int dim) {
  trap.validate();
  if (!(G > 0)) throw std::invalid_argument("TF minimizer needs G > 0");
  if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  const double s = trap.s;
  // int [mu - V]_+ = |S^{d-1}| s / (d (s + d)) lambda^{-d/s} mu^{(s+d)/s}
  const double c = detail::sphere_area(dim) * s / (dim * (s + dim)) * std::pow(trap.strength, -dim / s);
  TFProfile p;
  p.trap = trap;
  p.G = G;
  p.dim = dim;
  p.mu_tf = std::pow(G / c, s / (s + dim));
  p.R_tf = std::pow(p.mu_tf / trap.strength, 1.0 / s);
  return p;
}

double TFProfile::density(double r) const { return std::max(0.0, mu_tf - trap.at_radius(r)) / G; }

Field TFProfile::sample(const Grid& grid) const {
  return Field::from_radial(grid, [this](double r) { return density(r); });
}

double TFProfile::mass() const {
  return detail::radial_integral([this](double r) { return density(r); }, dim, R_tf);
}

double TFProfile::interaction_integral() const {
  return detail::radial_integral(
      [this](double r) {
        const double d = density(r);
        return d * d;
      },
      dim, R_tf);
}

double TFProfile::energy() const {
  const double pot =
      detail::radial_integral([this](double r) { return trap.at_radius(r) * density(r); }, dim, R_tf);
  return pot + 0.5 * G * interaction_integral();
}

double default_half_width(const TrapSpec& trap, double G, int dim) {
  if (G <= 0) return 8.0;
  return std::max(2.0 * tf_minimize(trap, G, dim).R_tf, 8.0);
}

}  // namespace tfcond
