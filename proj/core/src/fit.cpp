#include <cmath>
#include <stdexcept>

#include "tfcond/harness.hpp"

namespace tfcond {

FitResult fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: x and y differ in length");
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("fit_loglog needs at least three points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0) || !(y[i] > 0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::invalid_argument("fit_loglog needs strictly positive finite values");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 1e-300)) throw std::invalid_argument("fit_loglog needs distinct x values");
  FitResult out;
  out.slope = (n * sxy - sx * sy) / den;
  out.intercept = (sy - out.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    FitPoint p;
    p.x = x[i];
    p.y = y[i];
    const double model = out.intercept + out.slope * std::log(x[i]);
    p.fitted = std::exp(model);
    p.log_residual = std::log(y[i]) - model;
    ss += p.log_residual * p.log_residual;
    out.points.push_back(p);
  }
  out.residual = std::sqrt(ss / n);
  return out;
}

}  // namespace tfcond
