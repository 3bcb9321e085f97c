#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace tfcond::detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 8> kGLNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGLWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int panels = 256) {
  const double w = (b - a) / panels;
  double s = 0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * w;
    for (int q = 0; q < 8; ++q) s += kGLWeights[q] * f(mid + 0.5 * w * kGLNodes[q]);
  }
  return 0.5 * w * s;
}

inline double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

// int_{R^d} f(|x|) dx for a radial integrand supported in [0, r_max].
inline double radial_integral(const std::function<double(double)>& f, int dim, double r_max,
                              int panels = 256) {
  return sphere_area(dim) *
         integrate([&](double r) { return f(r) * std::pow(r, dim - 1); }, 0.0, r_max, panels);
}

}  // namespace tfcond::detail
