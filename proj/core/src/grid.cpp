#include "tfcond/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tfcond {

namespace {

// The FFTW planner is not re-entrant; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

struct Grid::Impl {
  int dim = 0;
  int n = 0;
  double L = 0;
  double h = 0;
  std::size_t size = 0;
  std::vector<double> x;
  std::vector<double> k;
  std::vector<double> k2;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Grid make_grid(int dim, int n_per_dim, double half_width) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
  if (n_per_dim < 8 || !is_power_of_two(n_per_dim))
    throw std::invalid_argument("points per axis must be a power of two >= 8, got " +
                                std::to_string(n_per_dim));
  if (!(half_width > 0) || !std::isfinite(half_width))
    throw std::invalid_argument("grid half-width must be positive");
  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) {
    if (total > std::numeric_limits<std::size_t>::max() / sizeof(cplx) / n_per_dim)
      throw std::invalid_argument("grid too large for this platform");
    total *= static_cast<std::size_t>(n_per_dim);
  }

  auto impl = std::make_shared<Grid::Impl>();
  impl->dim = dim;
  impl->n = n_per_dim;
  impl->L = half_width;
  impl->h = 2.0 * half_width / n_per_dim;
  impl->size = total;
  impl->x.resize(n_per_dim);
  impl->k.resize(n_per_dim);
  const double dk = std::numbers::pi / half_width;
  for (int j = 0; j < n_per_dim; ++j) {
    impl->x[j] = -half_width + j * impl->h;
    const int m = j < n_per_dim / 2 ? j : j - n_per_dim;
    impl->k[j] = m * dk;
  }
  impl->k2.assign(total, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    double s = 0;
    for (int a = dim - 1; a >= 0; --a) {
      const double ka = impl->k[rest % n_per_dim];
      s += ka * ka;
      rest /= n_per_dim;
    }
    impl->k2[i] = s;
  }

  int dims[3] = {n_per_dim, n_per_dim, n_per_dim};
  Samples a(total), b(total);
  {
    std::lock_guard lock(planner_mutex());
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    impl->fwd = fftw_plan_dft(dim, dims, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE);
    impl->bwd = fftw_plan_dft(dim, dims, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (!impl->fwd || !impl->bwd) throw std::runtime_error("FFTW planning failed");

  Grid g;
  g.impl_ = std::move(impl);
  return g;
}

int Grid::dim() const { return impl_->dim; }
int Grid::n() const { return impl_->n; }
double Grid::half_width() const { return impl_->L; }
double Grid::spacing() const { return impl_->h; }
double Grid::cell_volume() const { return std::pow(impl_->h, impl_->dim); }
std::size_t Grid::size() const { return impl_->size; }
std::span<const double> Grid::coordinates() const { return impl_->x; }
std::span<const double> Grid::wavenumbers() const { return impl_->k; }
std::span<const double> Grid::k_squared() const { return impl_->k2; }

std::array<int, 3> Grid::unravel(std::size_t index) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = impl_->dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(index % impl_->n);
    index /= impl_->n;
  }
  return idx;
}

std::array<double, 3> Grid::point(std::size_t index) const {
  const auto idx = unravel(index);
  std::array<double, 3> p{0, 0, 0};
  for (int a = 0; a < impl_->dim; ++a) p[a] = impl_->x[idx[a]];
  return p;
}

double Grid::radius(std::size_t index) const {
  const auto p = point(index);
  return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
}

void Grid::forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(impl_->fwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double s = 1.0 / std::sqrt(static_cast<double>(impl_->size));
  for (std::size_t i = 0; i < impl_->size; ++i) out[i] *= s;
}

void Grid::backward(const cplx* in, cplx* out) const {
  fftw_execute_dft(impl_->bwd, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double s = 1.0 / std::sqrt(static_cast<double>(impl_->size));
  for (std::size_t i = 0; i < impl_->size; ++i) out[i] *= s;
}

bool Grid::operator==(const Grid& other) const {
  if (impl_ == other.impl_) return true;
  if (!impl_ || !other.impl_) return false;
  return impl_->dim == other.impl_->dim && impl_->n == other.impl_->n &&
         impl_->L == other.impl_->L;
}

// ---------------------------------------------------------------------------

Field::Field(Grid grid, Basis basis)
    : grid_(std::move(grid)), basis_(basis), values_(grid_.size(), cplx{0, 0}) {}

Field::Field(Grid grid, Samples values, Basis basis)
    : grid_(std::move(grid)), basis_(basis), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field length does not match grid point count");
}

Field Field::from_function(const Grid& grid,
                           const std::function<cplx(const std::array<double, 3>&)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.point(i));
  return out;
}

Field Field::from_radial(const Grid& grid, const std::function<double(double)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.radius(i));
  return out;
}

static void require_same(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
  if (a.basis() != b.basis()) throw std::invalid_argument("fields have different basis tags");
}

Field& Field::operator+=(const Field& other) {
  require_same(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(cplx factor) {
  for (auto& v : values_) v *= factor;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(cplx factor, Field a) { return a *= factor; }

Field transform(const Field& f) {
  Field out(f.grid(), f.basis() == Basis::position ? Basis::frequency : Basis::position);
  if (f.basis() == Basis::position)
    f.grid().forward(f.data(), out.data());
  else
    f.grid().backward(f.data(), out.data());
  return out;
}

Field to_frequency(const Field& f) {
  if (f.basis() != Basis::position) throw std::invalid_argument("expected a position-space field");
  return transform(f);
}

Field to_position(const Field& f) {
  if (f.basis() != Basis::frequency) throw std::invalid_argument("expected a frequency-space field");
  return transform(f);
}

static void require_position(const Field& f) {
  if (f.basis() != Basis::position) throw std::invalid_argument("expected a position-space field");
}

double l2_norm(const Field& f) {
  double s = 0;
  for (const auto& v : f.values()) s += std::norm(v);
  if (f.basis() == Basis::frequency) return std::sqrt(s * f.grid().cell_volume());
  return std::sqrt(s * f.grid().cell_volume());
}

double lp_norm(const Field& f, double p) {
  require_position(f);
  double s = 0;
  for (const auto& v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

double linf_norm(const Field& f) {
  double m = 0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

cplx inner(const Field& a, const Field& b) {
  require_same(a, b);
  cplx s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * a.grid().cell_volume();
}

double kinetic_energy(const Field& f) {
  require_position(f);
  const Field F = transform(f);
  const auto k2 = f.grid().k_squared();
  double s = 0;
  for (std::size_t i = 0; i < F.size(); ++i) s += k2[i] * std::norm(F[i]);
  return s * f.grid().cell_volume();
}

Norms norms(const Field& f) {
  require_position(f);
  Norms out;
  const double w = f.grid().cell_volume();
  double s2 = 0, s4 = 0, m = 0;
  for (const auto& v : f.values()) {
    const double a2 = std::norm(v);
    s2 += a2;
    s4 += a2 * a2;
    m = std::max(m, a2);
  }
  out.l2 = std::sqrt(s2 * w);
  out.l4 = std::pow(s4 * w, 0.25);
  out.linf = std::sqrt(m);
  const Field F = transform(f);
  const auto k2 = f.grid().k_squared();
  double g2 = 0, l2 = 0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double a2 = std::norm(F[i]);
    g2 += k2[i] * a2;
    l2 += k2[i] * k2[i] * a2;
  }
  out.h1 = std::sqrt(s2 * w + g2 * w);
  out.h2 = std::sqrt(s2 * w + g2 * w + l2 * w);
  return out;
}

Field laplacian(const Field& f) {
  require_position(f);
  Field F = transform(f);
  const auto k2 = f.grid().k_squared();
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= -k2[i];
  return transform(F);
}

std::array<Field, 3> gradient(const Field& f) {
  require_position(f);
  const Grid& g = f.grid();
  const Field F = transform(f);
  const auto k = g.wavenumbers();
  std::array<Field, 3> out;
  for (int a = 0; a < g.dim(); ++a) {
    Field D(g, Basis::frequency);
    for (std::size_t i = 0; i < F.size(); ++i) {
      const auto idx = g.unravel(i);
      // Drop the unpaired Nyquist mode so real fields have real derivatives.
      const double ka = idx[a] == g.n() / 2 ? 0.0 : k[idx[a]];
      D[i] = cplx(0, ka) * F[i];
    }
    out[a] = transform(D);
  }
  return out;
}

double gradient_linf(const Field& f) {
  const auto grad = gradient(f);
  const int d = f.grid().dim();
  double m = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double s = 0;
    for (int a = 0; a < d; ++a) s += std::norm(grad[a][i]);
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

Field abs_squared(const Field& f) {
  Field out(f.grid(), f.basis());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(f[i]);
  return out;
}

void normalize(Field& f) {
  const double n = l2_norm(f);
  if (!(n > 0)) throw std::invalid_argument("cannot normalize a zero field");
  f *= 1.0 / n;
}

std::vector<double> kernel_multiplier(const Field& kernel) {
  require_position(kernel);
  const Grid& g = kernel.grid();
  const Field K = transform(kernel);
  // The kernel origin sits at index n/2 on every axis; shifting it to index 0
  // multiplies frequency m by (-1)^m per axis.
  const double scale = g.cell_volume() * std::sqrt(static_cast<double>(g.size()));
  std::vector<double> m(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unravel(i);
    int parity = 0;
    for (int a = 0; a < g.dim(); ++a) parity += idx[a];
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    m[i] = sign * K[i].real() * scale;
  }
  return m;
}

Field convolve_with_multiplier(std::span<const double> multiplier, const Field& f) {
  require_position(f);
  if (multiplier.size() != f.size()) throw std::invalid_argument("multiplier size mismatch");
  Field F = transform(f);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= multiplier[i];
  return transform(F);
}

Field convolve(const Field& kernel, const Field& f) {
  if (!(kernel.grid() == f.grid())) throw std::invalid_argument("kernel and field grids differ");
  const auto m = kernel_multiplier(kernel);
  return convolve_with_multiplier(m, f);
}

double boundary_mass(const Field& f, double shell) {
  require_position(f);
  const Grid& g = f.grid();
  const double cut = (1.0 - shell) * g.half_width();
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto p = g.point(i);
    double m = 0;
    for (int a = 0; a < g.dim(); ++a) m = std::max(m, std::abs(p[a]));
    if (m >= cut) s += std::norm(f[i]);
  }
  return s * g.cell_volume();
}

double max_abs_difference(const Field& a, const Field& b) {
  require_same(a, b);
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace tfcond
