#include "tfcond/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "quadrature.hpp"

namespace tfcond {

double TrapSpec::at_radius(double r) const { return strength * std::pow(r, s); }

Field TrapSpec::sample(const Grid& grid) const {
  return Field::from_radial(grid, [this](double r) { return at_radius(r); });
}

void TrapSpec::validate() const {
  if (!(strength > 0)) throw std::invalid_argument("trap strength must be positive");
  if (!(s >= 2)) throw std::invalid_argument("trap order s must be >= 2");
}

double InteractionSpec::operator()(double r) const {
  if (profile == "gaussian") return std::exp(-r * r);
  if (profile == "mexican_hat") return (1.0 - r * r) * std::exp(-r * r);
  if (profile == "zero") return 0.0;
  throw std::invalid_argument("unknown interaction profile '" + profile + "'");
}

double InteractionSpec::integral(int dim) const {
  const double g = std::pow(std::numbers::pi, 0.5 * dim);
  if (profile == "gaussian") return g;
  if (profile == "mexican_hat") return g * (1.0 - 0.5 * dim);
  if (profile == "zero") return 0.0;
  return detail::radial_integral([this](double r) { return (*this)(r); }, dim, 12.0);
}

double InteractionSpec::first_moment(int dim) const {
  if (profile == "gaussian") return 0.5 * detail::sphere_area(dim) * std::tgamma(0.5 * (dim + 1));
  return detail::radial_integral([this](double r) { return r * std::abs((*this)(r)); }, dim, 12.0);
}

double InteractionSpec::l1_norm(int dim) const {
  if (profile == "gaussian") return integral(dim);
  return detail::radial_integral([this](double r) { return std::abs((*this)(r)); }, dim, 12.0);
}

double InteractionSpec::l2_norm(int dim) const {
  if (profile == "gaussian") return std::pow(0.5 * std::numbers::pi, 0.25 * dim);
  return std::sqrt(detail::radial_integral(
      [this](double r) {
        const double v = (*this)(r);
        return v * v;
      },
      dim, 12.0));
}

double InteractionSpec::range(double N) const { return std::pow(N, -beta); }

Field InteractionSpec::sample(const Grid& grid) const {
  return Field::from_radial(grid, [this](double r) { return (*this)(r); });
}

Field InteractionSpec::sample_scaled(const Grid& grid, double N) const {
  const double a = std::pow(N, beta);
  const double amp = std::pow(a, grid.dim());
  return Field::from_radial(grid, [&](double r) { return amp * (*this)(a * r); });
}

void InteractionSpec::validate() const {
  (void)(*this)(0.0);
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
}

double RegimeParams::effective_coupling(const InteractionSpec& v, int dim) const {
  return g_N * v.integral(dim);
}

void RegimeParams::validate() const {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(beta > 0)) throw std::invalid_argument("beta must be positive");
  if (!(g_N > 0)) throw std::invalid_argument("g_N must be positive");
  if (!(lambda_weight > 0 && lambda_weight < 1))
    throw std::invalid_argument("lambda_weight must lie in (0, 1)");
}

DerivedScales derived_scales(const TrapSpec& trap, const InteractionSpec& interaction,
                             const RegimeParams& regime) {
  const double s = trap.s;
  const double b = regime.beta;
  const double g = regime.g_N;
  const double N = static_cast<double>(regime.N);
  DerivedScales out;
  out.G = regime.effective_coupling(interaction, 3);
  out.epsilon = std::pow(out.G, -(s + 2) / (2 * (s + 3)));
  out.tf_radius = std::pow(g, 1 / (s + 3));
  out.healing_length = std::pow(N, -0.5) * std::pow(g, -3 / (2 * (s + 3)));
  out.range = std::pow(N, -b);
  out.gn_exponent_a = (1 - 3 * b) * (s + 3) / (s + 5);
  out.gn_exponent_b = (s + 3) * b / (2 * (s + 1));
  return out;
}

Assumption1Report check_assumption1(const InteractionSpec& interaction, const Grid& grid) {
  Assumption1Report rep;
  const Field v = interaction.sample(grid);
  const auto m = kernel_multiplier(v);
  rep.min_fourier = *std::min_element(m.begin(), m.end());
  rep.max_fourier = *std::max_element(m.begin(), m.end());

  const double w = grid.cell_volume();
  const double tail_cut = 0.8 * grid.half_width();
  double integral = 0, moment = 0, l2 = 0, tail_moment = 0, tail_l2 = 0, vmax = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = grid.radius(i);
    const double val = v[i].real();
    integral += val;
    moment += r * std::abs(val);
    l2 += val * val;
    vmax = std::max(vmax, std::abs(val));
    if (r > tail_cut) {
      tail_moment += r * std::abs(val);
      tail_l2 += val * val;
    }
  }
  rep.integral = integral * w;
  rep.first_moment = moment * w;
  rep.l2 = std::sqrt(l2 * w);

  // Reflections x_a -> -x_a map index j to (n - j) mod n; swaps exchange axes.
  const int n = grid.n();
  const int d = grid.dim();
  double defect = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto idx = grid.unravel(i);
    auto flat = [&](std::array<int, 3> id) {
      std::size_t k = 0;
      for (int a = 0; a < d; ++a) k = k * n + static_cast<std::size_t>(id[a]);
      return k;
    };
    for (int a = 0; a < d; ++a) {
      auto r = idx;
      r[a] = (n - r[a]) % n;
      defect = std::max(defect, std::abs(v[i] - v[flat(r)]));
      for (int b = a + 1; b < d; ++b) {
        auto sw = idx;
        std::swap(sw[a], sw[b]);
        defect = std::max(defect, std::abs(v[i] - v[flat(sw)]));
      }
    }
  }
  rep.symmetry_defect = defect;

  const double scale = std::max(std::abs(rep.max_fourier), 1e-300);
  rep.positive_type = rep.min_fourier >= -1e-12 * std::max(1.0, scale);
  rep.nonzero = vmax > 0;
  rep.symmetric = defect <= 1e-12 * std::max(1.0, vmax);
  rep.moment_finite = std::isfinite(rep.first_moment) && tail_moment <= 1e-8 * std::max(moment, 1e-300);
  rep.square_integrable = std::isfinite(rep.l2) && tail_l2 <= 1e-8 * std::max(l2, 1e-300);
  rep.positive_integral = rep.integral > 0;
  return rep;
}

Admissibility admissibility(const TrapSpec& trap, const RegimeParams& regime) {
  const double s = trap.s;
  const double b = regime.beta;
  const double N = static_cast<double>(regime.N);
  Admissibility out;
  const double ea = (1 - 3 * b) * (s + 3) / (s + 5);
  const double eb = (s + 3) * b / (2 * (s + 1));
  out.thm1_margin_a = regime.g_N / std::pow(N, ea);
  out.thm1_margin_b = regime.g_N / std::pow(N, eb);
  out.thm1_margin = std::max(out.thm1_margin_a, out.thm1_margin_b);
  out.thm1_ok = b > 0 && b < 1.0 / 3.0 && out.thm1_margin < 1.0;
  out.lambda_low = 3 * b;
  out.lambda_high = 1 - 3 * b;
  out.thm2_time_margin = regime.g_N / std::pow(N, b * (s + 3) / (2 * s + 3));
  out.thm2_ok = b > 0 && b < 1.0 / 6.0 && regime.lambda_weight > out.lambda_low &&
                regime.lambda_weight < out.lambda_high;
  return out;
}

}  // namespace tfcond
