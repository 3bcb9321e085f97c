#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace tfcond {

using cplx = std::complex<double>;

template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t alignment = 64;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{alignment}));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, std::align_val_t{alignment});
  }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using Samples = std::vector<cplx, AlignedAllocator<cplx>>;

enum class Basis { position, frequency };

// Uniform periodic grid on [-L, L)^d with n points per axis.
class Grid {
 public:
  Grid() = default;

  int dim() const;
  int n() const;
  double half_width() const;
  double spacing() const;
  double cell_volume() const;
  std::size_t size() const;

  // Per-axis tables, identical for every axis.
  std::span<const double> coordinates() const;
  std::span<const double> wavenumbers() const;
  // |k|^2 for every frequency-space index.
  std::span<const double> k_squared() const;

  std::array<int, 3> unravel(std::size_t index) const;
  std::array<double, 3> point(std::size_t index) const;
  double radius(std::size_t index) const;

  // Raw unitary DFTs. in and out must not alias.
  void forward(const cplx* in, cplx* out) const;
  void backward(const cplx* in, cplx* out) const;

  bool operator==(const Grid& other) const;
  bool valid() const { return impl_ != nullptr; }

  struct Impl;

 private:
  friend Grid make_grid(int, int, double);
  std::shared_ptr<const Impl> impl_;
};

Grid make_grid(int dim, int n_per_dim, double half_width);

class Field {
 public:
  Field() = default;
  explicit Field(Grid grid, Basis basis = Basis::position);
  Field(Grid grid, Samples values, Basis basis = Basis::position);

  static Field from_function(const Grid& grid,
                             const std::function<cplx(const std::array<double, 3>&)>& f);
  static Field from_radial(const Grid& grid, const std::function<double(double)>& f);

  const Grid& grid() const { return grid_; }
  Basis basis() const { return basis_; }
  std::size_t size() const { return values_.size(); }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx* data() { return values_.data(); }
  const cplx* data() const { return values_.data(); }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(cplx factor);

 private:
  Grid grid_;
  Basis basis_ = Basis::position;
  Samples values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(cplx factor, Field a);

// Flips the basis tag: position -> frequency is the forward transform.
Field transform(const Field& f);
Field to_frequency(const Field& f);
Field to_position(const Field& f);

struct Norms {
  double l2 = 0;
  double l4 = 0;
  double linf = 0;
  double h1 = 0;
  double h2 = 0;
};

Norms norms(const Field& f);
double l2_norm(const Field& f);
double lp_norm(const Field& f, double p);
double linf_norm(const Field& f);
// Riemann-sum inner product h^d sum conj(a) b.
cplx inner(const Field& a, const Field& b);
// max over grid points of the Euclidean length of the spectral gradient.
double gradient_linf(const Field& f);
double kinetic_energy(const Field& f);  // ||grad f||_2^2

Field laplacian(const Field& f);
std::array<Field, 3> gradient(const Field& f);
Field abs_squared(const Field& f);
void normalize(Field& f);

// Periodic convolution approximating int kernel(x - y) f(y) dy. The kernel is
// sampled with its origin at the grid point x = 0.
Field convolve(const Field& kernel, const Field& f);
// Multiplier m(k) such that convolve(kernel, f) = to_position(m * to_frequency(f)).
std::vector<double> kernel_multiplier(const Field& kernel);
Field convolve_with_multiplier(std::span<const double> multiplier, const Field& f);

// Mass of |f|^2 in the outer shell max_i |x_i| >= (1 - shell) L.
double boundary_mass(const Field& f, double shell = 0.1);

double max_abs_difference(const Field& a, const Field& b);

void write_field_binary(const Field& f, std::ostream& out);
Field read_field_binary(std::istream& in);
void write_field_csv(const Field& f, std::ostream& out);

}  // namespace tfcond
