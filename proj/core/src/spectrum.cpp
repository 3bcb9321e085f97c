#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "tfcond/errors.hpp"
#include "tfcond/groundstate.hpp"

// Block locally optimal preconditioned CG (LOBPCG) for the lowest eigenpairs of
// the real symmetric operator -Lap + W on the grid.

namespace tfcond {

namespace {

using Mat = Eigen::MatrixXd;

class RealOperator {
 public:
  RealOperator(const Grid& g, std::vector<double> W, double shift)
      : grid_(g), W_(std::move(W)), shift_(shift), buf_(g) {}

  void apply(const double* in, double* out) {
    for (std::size_t i = 0; i < buf_.size(); ++i) buf_[i] = in[i];
    Field F = transform(buf_);
    const auto k2 = grid_.k_squared();
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= k2[i];
    const Field lap = transform(F);
    for (std::size_t i = 0; i < buf_.size(); ++i) out[i] = lap[i].real() + W_[i] * in[i];
  }

  void precondition(const double* in, double* out) {
    for (std::size_t i = 0; i < buf_.size(); ++i) buf_[i] = in[i];
    Field F = transform(buf_);
    const auto k2 = grid_.k_squared();
    for (std::size_t i = 0; i < F.size(); ++i) F[i] /= (shift_ + k2[i]);
    const Field back = transform(F);
    for (std::size_t i = 0; i < buf_.size(); ++i) out[i] = back[i].real();
  }

  Mat apply(const Mat& X) {
    Mat Y(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) apply(X.col(j).data(), Y.col(j).data());
    return Y;
  }

  Mat precondition(const Mat& X) {
    Mat Y(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) precondition(X.col(j).data(), Y.col(j).data());
    return Y;
  }

 private:
  Grid grid_;
  std::vector<double> W_;
  double shift_;
  Field buf_;
};

// Returns B with (S B)^T (S B) = I, dropping near-dependent directions.
Mat svqb(const Mat& gram, double drop = 1e-13) {
  Eigen::SelfAdjointEigenSolver<Mat> es(gram);
  const auto& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  int keep = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > drop * top) ++keep;
  Mat B(gram.rows(), keep);
  int c = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > drop * top) B.col(c++) = es.eigenvectors().col(i) / std::sqrt(ev[i]);
  return B;
}

std::vector<std::array<int, 3>> monomials(int dim, int count) {
  std::vector<std::array<int, 3>> out;
  for (int deg = 0; static_cast<int>(out.size()) < count; ++deg)
    for (int a = deg; a >= 0; --a)
      for (int b = deg - a; b >= 0; --b) {
        const int c = deg - a - b;
        if ((dim < 2 && b) || (dim < 3 && c)) continue;
        out.push_back({a, b, c});
      }
  out.resize(count);
  return out;
}

}  // namespace

SpectrumResult hgp_spectrum(const Grid& grid, const TrapSpec& trap, double G, const Field& phi,
                            int k, const SpectrumConfig& cfg) {
  if (k < 2) throw std::invalid_argument("need at least two eigenpairs");
  if (!(phi.grid() == grid)) throw std::invalid_argument("phi lives on a different grid");
  const std::size_t n = grid.size();
  const double w = grid.cell_volume();
  const Field V = trap.sample(grid);
  std::vector<double> W(n);
  for (std::size_t i = 0; i < n; ++i) W[i] = V[i].real() + G * std::norm(phi[i]);
  RealOperator op(grid, std::move(W), cfg.shift);

  const int m = k + std::max(cfg.guard, 0);
  Mat X(n, m);
  const auto mons = monomials(grid.dim(), m);
  for (int j = 0; j < m; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = grid.point(i);
      X(i, j) = std::abs(phi[i]) * std::pow(p[0], mons[j][0]) * std::pow(p[1], mons[j][1]) *
                std::pow(p[2], mons[j][2]);
    }

  auto orthonormalize = [&](Mat& Y) {
    const Mat B = svqb(Y.transpose() * Y);
    Y = Y * B;
  };
  orthonormalize(X);
  Mat AX = op.apply(X);
  Eigen::SelfAdjointEigenSolver<Mat> es0(X.transpose() * AX);
  X = X * es0.eigenvectors();
  AX = AX * es0.eigenvectors();
  Eigen::VectorXd lam = es0.eigenvalues();
  Mat P, AP;

  SpectrumResult res;
  std::vector<double> resid(m);
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    Mat R = AX - X * lam.asDiagonal();
    bool done = true;
    for (int j = 0; j < m; ++j) {
      resid[j] = R.col(j).norm() * std::sqrt(w) / std::max(X.col(j).norm() * std::sqrt(w), 1e-300);
      if (j < k && resid[j] > cfg.tol) done = false;
    }
    if (done) break;

    Mat Wb = op.precondition(R);
    const Eigen::Index np = P.cols();
    Mat S(n, m + m + np);
    S << X, Wb, P;
    Mat AW = op.apply(Wb);
    Mat AS(n, S.cols());
    AS << AX, AW, AP;
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      const double nrm = S.col(j).norm();
      if (nrm > 0) {
        S.col(j) /= nrm;
        AS.col(j) /= nrm;
      }
    }
    const Mat B = svqb(S.transpose() * S);
    Mat Ared = B.transpose() * (S.transpose() * AS) * B;
    Ared = 0.5 * (Ared + Ared.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(Ared);
    if (es.info() != Eigen::Success) throw SolverError("Rayleigh-Ritz step failed");
    const Mat Y = B * es.eigenvectors().leftCols(m);
    lam = es.eigenvalues().head(m);
    const Mat Ywp = Y.bottomRows(S.cols() - m);
    P = S.rightCols(S.cols() - m) * Ywp;
    AP = AS.rightCols(S.cols() - m) * Ywp;
    X = S * Y;
    AX = AS * Y;
    if ((it + 1) % 25 == 0) {
      orthonormalize(X);
      AX = op.apply(X);
      Eigen::SelfAdjointEigenSolver<Mat> esr(X.transpose() * AX);
      X = X * esr.eigenvectors();
      AX = AX * esr.eigenvectors();
      lam = esr.eigenvalues();
    }
  }
  if (it >= cfg.max_iter)
    throw SolverError("eigensolver did not converge in " + std::to_string(cfg.max_iter) +
                      " iterations");

  // Final clean Rayleigh-Ritz with freshly applied operator.
  orthonormalize(X);
  AX = op.apply(X);
  Eigen::SelfAdjointEigenSolver<Mat> esf(X.transpose() * AX);
  X = X * esf.eigenvectors();
  AX = AX * esf.eigenvectors();
  lam = esf.eigenvalues();

  res.iterations = it;
  for (int j = 0; j < k; ++j) {
    Field f(grid);
    const double scale = 1.0 / (X.col(j).norm() * std::sqrt(w));
    for (std::size_t i = 0; i < n; ++i) f[i] = X(i, j) * scale;
    res.eigenvalues.push_back(lam[j]);
    res.residuals.push_back((AX.col(j) - lam[j] * X.col(j)).norm() * scale * std::sqrt(w));
    res.eigenfields.push_back(std::move(f));
  }
  res.gap = res.eigenvalues[1] - res.eigenvalues[0];
  if (!(res.gap > 1e-8)) throw SolverError("degenerate lowest eigenvalue of h^GP");
  return res;
}

}  // namespace tfcond
