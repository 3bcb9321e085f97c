#include <cmath>
#include <stdexcept>
#include <string>

#include "tfcond/manybody.hpp"

namespace tfcond {

namespace {

void enumerate(int mode, int remaining, int M, Occupation& cur, std::vector<Occupation>& out) {
  if (mode == M - 1) {
    cur[mode] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[mode] = v;
    enumerate(mode + 1, remaining - v, M, cur, out);
  }
}

}  // namespace

FockSpace::FockSpace(int N, int M, std::size_t cap) : FockSpace(N, M, cap, 2) {}

FockSpace::FockSpace(int N, int M, std::size_t cap, int depth) : N_(N), M_(M) {
  if (N < 0 || M < 1) throw std::invalid_argument("need N >= 0 bosons and M >= 1 modes");
  count_.assign(N + 1, std::vector<double>(M + 1, 0.0));
  for (int r = 0; r <= N; ++r) {
    count_[r][0] = r == 0 ? 1 : 0;
    for (int m = 1; m <= M; ++m) count_[r][m] = std::round(std::exp(
        std::lgamma(r + m) - std::lgamma(r + 1) - std::lgamma(m)));
  }
  const double D = count_[N][M];
  if (D > static_cast<double>(cap))
    throw std::invalid_argument("sector dimension " + std::to_string(static_cast<long long>(D)) +
                                " exceeds cap " + std::to_string(cap));
  states_.reserve(static_cast<std::size_t>(D));
  Occupation cur(M, 0);
  enumerate(0, N, M, cur, states_);
  if (depth > 0 && N >= 1)
    lower_ = std::shared_ptr<const FockSpace>(new FockSpace(N - 1, M, cap, depth - 1));
}

std::size_t FockSpace::index(const Occupation& n) const {
  std::size_t idx = 0;
  int R = N_;
  for (int i = 0; i + 1 < M_; ++i) {
    for (int v = R; v > n[i]; --v) idx += static_cast<std::size_t>(count_[R - v][M_ - i - 1]);
    R -= n[i];
  }
  return idx;
}

const FockSpace& FockSpace::lower(int removed) const {
  if (removed == 0) return *this;
  if (!lower_) throw std::logic_error("no lower sector available");
  return lower_->lower(removed - 1);
}

CMat FockSpace::annihilate_all(const CVec& psi) const {
  const FockSpace& lo = lower(1);
  CMat out = CMat::Zero(lo.dim(), M_);
  Occupation n;
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    n = lo.state(i);
    for (int c = 0; c < M_; ++c) {
      ++n[c];
      out(i, c) = std::sqrt(static_cast<double>(n[c])) * psi[index(n)];
      --n[c];
    }
  }
  return out;
}

CMat FockSpace::annihilate_pairs(const CVec& psi) const {
  if (N_ < 2) return CMat::Zero(0, M_ * M_);
  const FockSpace& lo = lower(2);
  CMat out = CMat::Zero(lo.dim(), M_ * M_);
  Occupation n;
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    n = lo.state(i);
    for (int c = 0; c < M_; ++c) {
      ++n[c];
      for (int d = c; d < M_; ++d) {
        ++n[d];
        const double amp = d == c ? std::sqrt(static_cast<double>(n[c]) * (n[c] - 1))
                                  : std::sqrt(static_cast<double>(n[c]) * n[d]);
        const cplx v = amp * psi[index(n)];
        out(i, c * M_ + d) = v;
        out(i, d * M_ + c) = v;
        --n[d];
      }
      --n[c];
    }
  }
  return out;
}

CVec FockSpace::apply_one_body(const CMat& A, const CVec& psi) const {
  if (N_ == 0) return CVec::Zero(dim());
  const FockSpace& lo = lower(1);
  const CMat Y = annihilate_all(psi) * A.transpose();
  CVec out = CVec::Zero(dim());
  Occupation m;
  for (std::size_t i = 0; i < dim(); ++i) {
    m = states_[i];
    cplx s = 0;
    for (int a = 0; a < M_; ++a) {
      if (m[a] == 0) continue;
      const double amp = std::sqrt(static_cast<double>(m[a]));
      --m[a];
      s += amp * Y(lo.index(m), a);
      ++m[a];
    }
    out[i] = s;
  }
  return out;
}

CVec FockSpace::apply_two_body(const CMat& O, const CVec& psi) const {
  if (N_ < 2) return CVec::Zero(dim());
  const FockSpace& lo = lower(2);
  const CMat Y = annihilate_pairs(psi) * O.transpose();
  CVec out = CVec::Zero(dim());
  Occupation m;
  for (std::size_t i = 0; i < dim(); ++i) {
    m = states_[i];
    cplx s = 0;
    for (int a = 0; a < M_; ++a) {
      if (m[a] == 0) continue;
      const double na = m[a];
      --m[a];
      for (int b = 0; b < M_; ++b) {
        if (m[b] == 0) continue;
        const double nb = m[b];
        --m[b];
        s += std::sqrt(na * nb) * Y(lo.index(m), a * M_ + b);
        ++m[b];
      }
      ++m[a];
    }
    out[i] = s;
  }
  return out;
}

CMat FockSpace::one_body_matrix(const CMat& A) const {
  const std::size_t D = dim();
  CMat out = CMat::Zero(D, D);
  Occupation n;
  for (std::size_t j = 0; j < D; ++j) {
    n = states_[j];
    for (int b = 0; b < M_; ++b) {
      if (n[b] == 0) continue;
      const double nb = n[b];
      --n[b];
      for (int a = 0; a < M_; ++a) {
        if (A(a, b) == cplx(0)) continue;
        ++n[a];
        out(index(n), j) += A(a, b) * std::sqrt(nb * n[a]);
        --n[a];
      }
      ++n[b];
    }
  }
  return out;
}

CMat FockSpace::one_rdm(const CVec& psi) const {
  if (N_ == 0) return CMat::Zero(M_, M_);
  const CMat X = annihilate_all(psi);
  return (X.transpose() * X.conjugate()) / static_cast<double>(N_);
}

CMat FockSpace::transition_two_rdm(const CVec& chi, const CVec& psi) const {
  if (N_ < 2) return CMat::Zero(M_ * M_, M_ * M_);
  return annihilate_pairs(chi).adjoint() * annihilate_pairs(psi);
}

cplx FockSpace::two_body_element(const CVec& chi, const CMat& O, const CVec& psi) const {
  if (N_ < 2) return 0;
  const CMat T = transition_two_rdm(chi, psi);
  return O.cwiseProduct(T).sum() / (static_cast<double>(N_) * (N_ - 1));
}

CVec FockSpace::create(const CVec& chi, const CVec& psi_lower) const {
  const FockSpace& lo = lower(1);
  if (static_cast<std::size_t>(psi_lower.size()) != lo.dim())
    throw std::invalid_argument("state does not live on the lower sector");
  CVec out = CVec::Zero(dim());
  Occupation m;
  for (std::size_t i = 0; i < dim(); ++i) {
    m = states_[i];
    cplx s = 0;
    for (int a = 0; a < M_; ++a) {
      if (m[a] == 0) continue;
      const double amp = std::sqrt(static_cast<double>(m[a]));
      --m[a];
      s += chi[a] * amp * psi_lower[lo.index(m)];
      ++m[a];
    }
    out[i] = s;
  }
  return out;
}

CVec FockSpace::product_state(const CVec& phi) const {
  if (phi.size() != M_) throw std::invalid_argument("mode count mismatch");
  CVec out(dim());
  const double lnf = std::lgamma(N_ + 1.0);
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto& n = states_[i];
    double lw = lnf;
    cplx prod = 1;
    for (int a = 0; a < M_; ++a) {
      lw -= std::lgamma(n[a] + 1.0);
      if (n[a]) prod *= std::pow(phi[a], n[a]);
    }
    out[i] = std::exp(0.5 * lw) * prod;
  }
  return out;
}

}  // namespace tfcond
