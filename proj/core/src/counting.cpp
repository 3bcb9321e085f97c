#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "tfcond/errors.hpp"
#include "tfcond/manybody.hpp"

namespace tfcond {

double weight_mu(int k, int N, double lambda) {
  if (k < 0 || k > N) return 0.0;
  const double nl = std::pow(static_cast<double>(N), lambda);
  return k <= nl ? k / nl : 1.0;
}

double weight_nu(int k, int N) {
  if (k < 0 || k > N) return 0.0;
  return std::sqrt(static_cast<double>(k) / N);
}

namespace {

// Product form of the Lagrange basis on the nodes 0..N, applied matrix-free.
// Only used past the dense limit, where it stays accurate for small N.
CVec lagrange_sector(const FockSpace& space, const CMat& q, int k, const CVec& psi) {
  const int N = space.particles();
  CVec v = psi;
  for (int j = 0; j <= N; ++j) {
    if (j == k) continue;
    v = (space.apply_one_body(q, v) - static_cast<double>(j) * v) / static_cast<double>(k - j);
  }
  return v;
}

}  // namespace

ProjectorContext::ProjectorContext(std::shared_ptr<const FockSpace> space, const CVec& phi)
    : space_(std::move(space)), phi_(phi) {
  const int M = space_->modes();
  if (phi.size() != M) throw std::invalid_argument("reference state has the wrong mode count");
  if (std::abs(phi.norm() - 1) > 1e-10) throw std::invalid_argument("reference state must be normalized");
  p_ = phi_ * phi_.adjoint();
  q_ = CMat::Identity(M, M) - p_;
  if (space_->dim() <= dense_limit) {
    const CMat Np = space_->one_body_matrix(q_);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Np + Np.adjoint()));
    if (es.info() != Eigen::Success) throw SolverError("counting operator diagonalization failed");
    vecs_ = es.eigenvectors();
    labels_.resize(vecs_.cols());
    for (Eigen::Index i = 0; i < vecs_.cols(); ++i) {
      const double e = es.eigenvalues()[i];
      labels_[i] = static_cast<int>(std::lround(e));
      integrality_ = std::max(integrality_, std::abs(e - labels_[i]));
    }
    if (integrality_ > 1e-8) throw SolverError("counting operator spectrum is not integral");
  } else if (space_->particles() > 16) {
    throw std::invalid_argument("sector too large for the polynomial projector");
  }
}

CVec ProjectorContext::hat(const std::function<double(int)>& f, const CVec& psi, int shift) const {
  const int N = space_->particles();
  auto fv = [&](int k) { return (k + shift >= 0 && k + shift <= N) ? f(k + shift) : 0.0; };
  if (!labels_.empty()) {
    CVec y = vecs_.adjoint() * psi;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= fv(labels_[i]);
    return vecs_ * y;
  }
  CVec out = CVec::Zero(psi.size());
  for (int k = 0; k <= N; ++k) {
    const double c = fv(k);
    if (c != 0) out += c * lagrange_sector(*space_, q_, k, psi);
  }
  return out;
}

CVec ProjectorContext::sector(int k, const CVec& psi) const {
  return hat([k](int j) { return j == k ? 1.0 : 0.0; }, psi);
}

std::vector<double> ProjectorContext::sector_weights(const CVec& psi) const {
  const int N = space_->particles();
  std::vector<double> w(N + 1, 0.0);
  if (!labels_.empty()) {
    const CVec y = vecs_.adjoint() * psi;
    for (Eigen::Index i = 0; i < y.size(); ++i) w[labels_[i]] += std::norm(y[i]);
    return w;
  }
  for (int k = 0; k <= N; ++k) w[k] = sector(k, psi).squaredNorm();
  return w;
}

CMat ProjectorContext::counting_operator() const { return space_->one_body_matrix(q_); }

double alpha(const ProjectorContext& ctx, const CVec& psi, double lambda) {
  const int N = ctx.space().particles();
  const auto w = ctx.sector_weights(psi);
  double a = 0;
  for (int k = 0; k <= N; ++k) a += weight_mu(k, N, lambda) * w[k];
  return a;
}

namespace {

CMat kron(const CMat& A, const CMat& B) {
  CMat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

}  // namespace

CountingReport counting_report(const ManyBodyHamiltonian& H, const CVec& psi, const CVec& phi,
                               double lambda) {
  if (!(lambda > 0 && lambda < 1)) throw std::invalid_argument("lambda must lie in (0, 1)");
  if (std::abs(psi.norm() - 1) > 1e-10) throw std::invalid_argument("state must be normalized");
  const ProjectorContext ctx(H.space, phi);
  const int N = H.N();
  const auto w = ctx.sector_weights(psi);
  CountingReport rep;
  for (int k = 0; k <= N; ++k) {
    rep.alpha += weight_mu(k, N, lambda) * w[k];
    rep.n_plus += k * w[k];
  }
  rep.gamma = H.space->one_rdm(psi);
  rep.depletion = 1.0 - phi.dot(rep.gamma * phi).real();

  if (N >= 2) {
    auto mu = [&](int k) { return weight_mu(k, N, lambda); };
    const CVec mpsi = ctx.hat(mu, psi);
    const CVec chi1 = mpsi - ctx.hat(mu, psi, 1);
    const CVec chi2 = mpsi - ctx.hat(mu, psi, 2);
    const CMat U = H.pair_fluctuation(phi);
    const CMat& p = ctx.p();
    const CMat& q = ctx.q();
    const CMat pp = kron(p, p), pq = kron(p, q), qq = kron(q, q);
    rep.gamma_terms[0] = H.space->two_body_element(chi1, pp * U * pq, psi).imag();
    rep.gamma_terms[1] = H.space->two_body_element(chi2, pp * U * qq, psi).imag();
    rep.gamma_terms[2] = H.space->two_body_element(chi1, pq * U * qq, psi).imag();
    rep.Gamma = H.g * (2 * rep.gamma_terms[0] + rep.gamma_terms[1] + 2 * rep.gamma_terms[2]);
  }
  return rep;
}

double projector_distance(const CMat& gamma, const CVec& phi) {
  const CMat D = gamma - phi * phi.adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (D + D.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace tfcond
