#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "tfcond/manybody.hpp"

namespace tfcond {

TensorSpace::TensorSpace(int N, int M, std::size_t cap) : N_(N), M_(M), dim_(1) {
  if (N < 2 || M < 1) throw std::invalid_argument("tensor space needs N >= 2 and M >= 1");
  for (int i = 0; i < N; ++i) {
    dim_ *= static_cast<std::size_t>(M);
    if (dim_ > cap) throw std::invalid_argument("tensor space exceeds cap");
  }
}

// Particle 1 is the most significant tensor factor.
CMat TensorSpace::kron_chain(const std::vector<const CMat*>& factors) const {
  CMat out = CMat::Identity(1, 1);
  for (const CMat* f : factors) {
    CMat next(out.rows() * f->rows(), out.cols() * f->cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(i * f->rows(), j * f->cols(), f->rows(), f->cols()) = out(i, j) * (*f);
    out = std::move(next);
  }
  return out;
}

CMat TensorSpace::on_particle(const CMat& A, int j) const {
  const CMat I = CMat::Identity(M_, M_);
  std::vector<const CMat*> f(N_, &I);
  f.at(j) = &A;
  return kron_chain(f);
}

CMat TensorSpace::on_pair(const CMat& O) const {
  const CMat I = CMat::Identity(dim_ / (M_ * M_), dim_ / (M_ * M_));
  return kron_chain({&O, &I});
}

CVec TensorSpace::embed(const FockSpace& space, const CVec& psi) const {
  if (space.particles() != N_ || space.modes() != M_) throw std::invalid_argument("space mismatch");
  CVec out(dim_);
  Occupation n(M_);
  const double lnf = std::lgamma(N_ + 1.0);
  for (std::size_t w = 0; w < dim_; ++w) {
    std::fill(n.begin(), n.end(), 0);
    std::size_t r = w;
    for (int l = 0; l < N_; ++l) {
      ++n[r % M_];
      r /= M_;
    }
    double lw = -lnf;
    for (int a = 0; a < M_; ++a) lw += std::lgamma(n[a] + 1.0);
    out[w] = std::exp(0.5 * lw) * psi[space.index(n)];
  }
  return out;
}

CMat TensorSpace::sector_projector(const CMat& p, int k) const {
  const CMat q = CMat::Identity(M_, M_) - p;
  CMat out = CMat::Zero(dim_, dim_);
  for (unsigned mask = 0; mask < (1u << N_); ++mask) {
    if (std::popcount(mask) != k) continue;
    std::vector<const CMat*> f(N_);
    for (int l = 0; l < N_; ++l) f[l] = (mask >> l) & 1u ? &q : &p;
    out += kron_chain(f);
  }
  return out;
}

CMat TensorSpace::hat(const CMat& p, const std::function<double(int)>& f, int shift) const {
  CMat out = CMat::Zero(dim_, dim_);
  for (int k = 0; k <= N_; ++k) {
    const int j = k + shift;
    if (j < 0 || j > N_) continue;
    const double c = f(j);
    if (c != 0) out += c * sector_projector(p, k);
  }
  return out;
}

}  // namespace tfcond
