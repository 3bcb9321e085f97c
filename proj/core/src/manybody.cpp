#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "tfcond/errors.hpp"
#include "tfcond/manybody.hpp"

namespace tfcond {

namespace {

void require_grid(const ModeBasis& m) {
  if (!m.grid) throw std::invalid_argument("mode basis has no grid functions");
}

ModeBasis finish(const Grid& grid, std::vector<Field> fns, const std::optional<TrapSpec>& trap) {
  ModeBasis mb;
  mb.M = static_cast<int>(fns.size());
  mb.grid = grid;
  mb.functions = std::move(fns);
  mb.kinetic = CMat(mb.M, mb.M);
  for (int b = 0; b < mb.M; ++b) {
    Field lap = laplacian(mb.functions[b]);
    lap *= -1.0;
    for (int a = 0; a < mb.M; ++a) mb.kinetic(a, b) = inner(mb.functions[a], lap);
  }
  mb.kinetic = 0.5 * (mb.kinetic + mb.kinetic.adjoint()).eval();
  mb.trap = trap ? mb.multiplication(trap->sample(grid)) : CMat::Zero(mb.M, mb.M);
  return mb;
}

}  // namespace

Field ModeBasis::synthesize(const CVec& coeffs) const {
  require_grid(*this);
  if (coeffs.size() != M) throw std::invalid_argument("coefficient count mismatch");
  Field out(*grid);
  for (int a = 0; a < M; ++a)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeffs[a] * functions[a][i];
  return out;
}

CVec ModeBasis::project(const Field& f) const {
  require_grid(*this);
  CVec c(M);
  for (int a = 0; a < M; ++a) c[a] = inner(functions[a], f);
  return c;
}

CMat ModeBasis::gram() const {
  if (!grid) return CMat::Identity(M, M);
  CMat G(M, M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b) G(a, b) = inner(functions[a], functions[b]);
  return G;
}

CMat ModeBasis::multiplication(const Field& w) const {
  require_grid(*this);
  CMat out(M, M);
  for (int b = 0; b < M; ++b) {
    Field wb = functions[b];
    for (std::size_t i = 0; i < wb.size(); ++i) wb[i] *= w[i];
    for (int a = 0; a < M; ++a) out(a, b) = inner(functions[a], wb);
  }
  return out;
}

CMat ModeBasis::pair_tensor(const Field& kernel) const {
  require_grid(*this);
  const auto mult = kernel_multiplier(kernel);
  const double w = grid->cell_volume();
  CMat W(M * M, M * M);
  std::vector<Field> conv(M * M);
  for (int b = 0; b < M; ++b)
    for (int d = 0; d < M; ++d) {
      Field rho(*grid);
      for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = std::conj(functions[b][i]) * functions[d][i];
      conv[b * M + d] = convolve_with_multiplier(mult, rho);
    }
  for (int a = 0; a < M; ++a)
    for (int c = 0; c < M; ++c) {
      std::vector<cplx> rac(grid->size());
      for (std::size_t i = 0; i < rac.size(); ++i)
        rac[i] = std::conj(functions[a][i]) * functions[c][i];
      for (int b = 0; b < M; ++b)
        for (int d = 0; d < M; ++d) {
          const Field& cv = conv[b * M + d];
          cplx s = 0;
          for (std::size_t i = 0; i < rac.size(); ++i) s += rac[i] * cv[i];
          W(a * M + b, c * M + d) = s * w;
        }
    }
  return W;
}

ModeBasis harmonic_modes(const Grid& grid, int M, const TrapSpec& trap) {
  if (grid.dim() != 1) throw std::invalid_argument("mode sets live on a 1D grid");
  const int n = grid.n();
  if (M < 1 || M > n) throw std::invalid_argument("bad mode count");
  trap.validate();
  const Field V = trap.sample(grid);
  Eigen::MatrixXd Hm(n, n);
  for (int j = 0; j < n; ++j) {
    Field e(grid);
    e[j] = 1.0;
    const Field lap = laplacian(e);
    for (int i = 0; i < n; ++i) Hm(i, j) = -lap[i].real();
    Hm(j, j) += V[j].real();
  }
  Hm = 0.5 * (Hm + Hm.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
  if (es.info() != Eigen::Success) throw SolverError("grid diagonalization failed");
  const double scale = 1.0 / std::sqrt(grid.cell_volume());
  std::vector<Field> fns;
  for (int a = 0; a < M; ++a) {
    Eigen::VectorXd v = es.eigenvectors().col(a);
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) v = -v;
    Field f(grid);
    for (int i = 0; i < n; ++i) f[i] = v[i] * scale;
    fns.push_back(std::move(f));
  }
  return finish(grid, std::move(fns), trap);
}

ModeBasis planewave_modes(const Grid& grid, int M) {
  if (grid.dim() != 1) throw std::invalid_argument("mode sets live on a 1D grid");
  if (M < 1 || M >= grid.n()) throw std::invalid_argument("bad mode count");
  const double L = grid.half_width();
  std::vector<Field> fns;
  for (int a = 0; a < M; ++a) {
    const int m = (a + 1) / 2 * (a % 2 == 1 ? 1 : -1);
    const double k = std::numbers::pi * m / L;
    fns.push_back(Field::from_function(grid, [&](const std::array<double, 3>& x) {
      return std::polar(1.0 / std::sqrt(2 * L), k * x[0]);
    }));
  }
  return finish(grid, std::move(fns), std::nullopt);
}

ModeBasis abstract_modes(const CMat& one_body) {
  if (one_body.rows() != one_body.cols() || one_body.rows() < 1)
    throw std::invalid_argument("one-body matrix must be square");
  ModeBasis mb;
  mb.M = static_cast<int>(one_body.rows());
  mb.kinetic = one_body;
  mb.trap = CMat::Zero(mb.M, mb.M);
  return mb;
}

namespace {

Eigen::SparseMatrix<cplx, Eigen::RowMajor> assemble(const FockSpace& space, const CMat& h,
                                                    const CMat& W, double g, int workers) {
  const int M = space.modes();
  const int N = space.particles();
  const std::size_t D = space.dim();
  const double pair = N > 0 ? g / (2.0 * N) : 0.0;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(std::min<std::size_t>(workers, std::max<std::size_t>(1, D / 64)));

  // Each worker fills the rows H(n', n) for a contiguous block of columns n.
  std::vector<std::vector<Eigen::Triplet<cplx>>> parts(workers);
  auto work = [&](int w) {
    auto& trip = parts[w];
    const std::size_t lo = D * w / workers, hi = D * (w + 1) / workers;
    Occupation n;
    for (std::size_t j = lo; j < hi; ++j) {
      n = space.state(j);
      for (int b = 0; b < M; ++b) {
        if (n[b] == 0) continue;
        const double nb = n[b];
        --n[b];
        for (int a = 0; a < M; ++a) {
          if (h(a, b) == cplx(0)) continue;
          ++n[a];
          trip.emplace_back(space.index(n), j, h(a, b) * std::sqrt(nb * n[a]));
          --n[a];
        }
        ++n[b];
      }
      if (pair == 0 || N < 2) continue;
      for (int c = 0; c < M; ++c) {
        if (n[c] == 0) continue;
        const double nc = n[c];
        --n[c];
        for (int d = 0; d < M; ++d) {
          if (n[d] == 0) continue;
          const double nd = n[d];
          --n[d];
          const double down = std::sqrt(nc * nd);
          for (int a = 0; a < M; ++a) {
            ++n[a];
            const double ua = n[a];
            for (int b = 0; b < M; ++b) {
              const cplx w_ = W(a * M + b, c * M + d);
              if (w_ == cplx(0)) continue;
              ++n[b];
              trip.emplace_back(space.index(n), j, pair * w_ * down * std::sqrt(ua * n[b]));
              --n[b];
            }
            --n[a];
          }
          ++n[d];
        }
        ++n[c];
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();

  std::vector<Eigen::Triplet<cplx>> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> H(D, D);
  H.setFromTriplets(all.begin(), all.end());
  H.makeCompressed();
  return H;
}

}  // namespace

ManyBodyHamiltonian build_from_matrices(const CMat& h, const CMat& W, double g, int N,
                                        std::size_t cap, int workers) {
  const int M = static_cast<int>(h.rows());
  if (h.cols() != M) throw std::invalid_argument("one-body matrix must be square");
  if (W.rows() != M * M || W.cols() != M * M)
    throw std::invalid_argument("pair tensor must be M^2 x M^2");
  if (N < 1) throw std::invalid_argument("need at least one particle");
  ManyBodyHamiltonian H;
  H.space = std::make_shared<const FockSpace>(N, M, cap);
  H.h = h;
  H.W = W;
  H.g = g;
  H.matrix = assemble(*H.space, h, W, g, workers);
  return H;
}

ManyBodyHamiltonian build(const ModeBasis& modes, bool with_trap,
                          const InteractionSpec& interaction, const RegimeParams& regime,
                          std::size_t cap, int workers) {
  interaction.validate();
  regime.validate();
  require_grid(modes);
  const CMat gram = modes.gram();
  const double defect = (gram - CMat::Identity(modes.M, modes.M)).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw std::invalid_argument("modes are not orthonormal");
  if (regime.N > 1000000) throw std::invalid_argument("particle number out of range");
  const int N = static_cast<int>(regime.N);
  CMat h = modes.kinetic;
  if (with_trap) h += modes.trap;
  const Field kernel = interaction.sample_scaled(*modes.grid, static_cast<double>(N));
  const CMat W = modes.pair_tensor(kernel);
  ManyBodyHamiltonian H = build_from_matrices(h, W, regime.g_N, N, cap, workers);
  H.modes = std::make_shared<const ModeBasis>(modes);
  H.dim = modes.grid->dim();
  H.interaction = interaction;
  H.beta = interaction.beta;
  return H;
}

double ManyBodyHamiltonian::energy(const CVec& psi) const {
  return psi.dot(apply(psi)).real() / psi.squaredNorm();
}

double ManyBodyHamiltonian::hermiticity_defect() const {
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> adj = matrix.adjoint();
  Eigen::SparseMatrix<cplx, Eigen::RowMajor> diff = matrix - adj;
  double m = 0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx, Eigen::RowMajor>::InnerIterator it(diff, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

CMat ManyBodyHamiltonian::mean_field(const CVec& phi) const {
  const int m = M();
  CMat V = CMat::Zero(m, m);
  for (int a = 0; a < m; ++a)
    for (int c = 0; c < m; ++c) {
      cplx s = 0;
      for (int b = 0; b < m; ++b)
        for (int d = 0; d < m; ++d) s += W(a * m + b, c * m + d) * std::conj(phi[b]) * phi[d];
      V(a, c) = s;
    }
  return V;
}

CMat ManyBodyHamiltonian::pair_fluctuation(const CVec& phi) const {
  const int m = M();
  const double n = N();
  const CMat V = mean_field(phi);
  CMat U = (n - 1) * W;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < m; ++d) {
          cplx mf = 0;
          if (b == d) mf += V(a, c);
          if (a == c) mf += V(b, d);
          U(a * m + b, c * m + d) -= n * mf;
        }
  return U;
}

namespace {

void fix_phase(CVec& v) {
  Eigen::Index imax;
  v.cwiseAbs().maxCoeff(&imax);
  const cplx z = v[imax];
  if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
}

// Lanczos with full reorthogonalization and explicit restarts on the Ritz vector.
GroundState lanczos(const ManyBodyHamiltonian& H, double tol, int max_iter) {
  const std::size_t D = H.space->dim();
  const int m = static_cast<int>(std::min<std::size_t>(D, 120));
  CVec x = CVec::Ones(D) / std::sqrt(static_cast<double>(D));
  // A deterministic, generic start vector.
  for (std::size_t i = 0; i < D; ++i) x[i] *= 1.0 + 0.1 * std::sin(1.0 + 7.0 * i);
  x.normalize();
  GroundState gs;
  int total = 0;
  while (total < max_iter) {
    CMat Q(D, m);
    std::vector<double> alpha, beta;
    Q.col(0) = x;
    int k = 0;
    for (; k < m; ++k) {
      CVec w = H.apply(Q.col(k));
      ++total;
      const double a = Q.col(k).dot(w).real();
      alpha.push_back(a);
      for (int r = 0; r < 2; ++r) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).adjoint() * w);
      const double b = w.norm();
      if (k + 1 == m || b < 1e-14) {
        ++k;
        break;
      }
      beta.push_back(b);
      Q.col(k + 1) = w / b;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    x = Q.leftCols(k) * es.eigenvectors().col(0).cast<cplx>();
    x.normalize();
    const double e = es.eigenvalues()[0];
    const double res = (H.apply(x) - e * x).norm();
    gs.energy = e;
    if (res < tol * std::max(1.0, std::abs(e))) {
      gs.psi = x;
      gs.iterations = total;
      fix_phase(gs.psi);
      return gs;
    }
  }
  throw SolverError("Lanczos did not converge");
}

}  // namespace

GroundState ground_state(const ManyBodyHamiltonian& H, double tol, int max_iter) {
  const std::size_t D = H.space->dim();
  if (D <= dense_limit) {
    const CMat Hd = CMat(H.matrix);
    Eigen::SelfAdjointEigenSolver<CMat> es(Hd);
    if (es.info() != Eigen::Success) throw SolverError("dense diagonalization failed");
    GroundState gs;
    gs.energy = es.eigenvalues()[0];
    gs.psi = es.eigenvectors().col(0);
    fix_phase(gs.psi);
    return gs;
  }
  return lanczos(H, tol, max_iter);
}

CMat reduced_density(const FockSpace& space, const CVec& psi) { return space.one_rdm(psi); }

}  // namespace tfcond
