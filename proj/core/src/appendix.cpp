#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "tfcond/manybody.hpp"

namespace tfcond {

namespace {

class Tally {
 public:
  explicit Tally(AppendixReport& rep) : rep_(rep) {}

  // Exact identity: |err| <= tol.
  void identity(const std::string& name, double err) {
    ++rep_.checks;
    rep_.max_identity_error = std::max(rep_.max_identity_error, err);
    bump(name, err);
    if (!(err <= rep_.tolerance)) fail(name);
  }

  // Inequality lhs <= rhs, relative slack tol.
  void inequality(const std::string& name, double lhs, double rhs) {
    ++rep_.checks;
    const double excess = lhs - rhs;
    rep_.max_inequality_excess = std::max(rep_.max_inequality_excess, excess);
    bump(name, excess);
    if (!(excess <= rep_.tolerance * std::max(1.0, std::abs(rhs)))) fail(name);
  }

  void finish() {
    for (auto& [k, v] : worst_) rep_.worst.emplace_back(k, v);
  }

 private:
  void bump(const std::string& name, double v) {
    auto it = worst_.find(name);
    if (it == worst_.end())
      worst_.emplace(name, v);
    else
      it->second = std::max(it->second, v);
  }
  void fail(const std::string& name) {
    ++rep_.violations;
    if (rep_.failures.size() < 20) rep_.failures.push_back(name);
  }

  AppendixReport& rep_;
  std::map<std::string, double> worst_;
};

CVec random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> N01;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(N01(rng), N01(rng));
  return v.normalized();
}

CMat random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> N01;
  CMat A(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = cplx(N01(rng), N01(rng));
  return 0.5 * (A + A.adjoint());
}

double lp(const Eigen::VectorXd& absval, double p, double h) {
  if (std::isinf(p)) return absval.maxCoeff();
  double s = 0;
  for (Eigen::Index i = 0; i < absval.size(); ++i) s += std::pow(absval[i], p);
  return std::pow(s * h, 1.0 / p);
}

// Multiplication by u(x1 - x2) composed with p1, p1 u p1 and u p1 p2 on the
// two-particle space of a periodic 1D grid, compared with the Hoelder and
// Young type bounds. States are n x n matrices in the orthonormal point basis.
void operator_bounds(std::mt19937_64& rng, Tally& tally, bool dense) {
  const int n = 16;
  const double L = 3.0;
  const double h = 2 * L / n;
  std::normal_distribution<double> N01;
  CVec phi(n);
  for (int i = 0; i < n; ++i) phi[i] = cplx(N01(rng), N01(rng));
  phi /= phi.norm() * std::sqrt(h);  // L^2 normalized function values
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = N01(rng);
  const CVec Phi = phi * std::sqrt(h);
  CMat Umat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Umat(i, j) = u[((i - j) % n + n + n / 2) % n];
  const Eigen::VectorXd aphi = phi.cwiseAbs(), au = u.cwiseAbs();
  const double inf = std::numeric_limits<double>::infinity();

  auto p1 = [&](const CMat& X) -> CMat { return Phi * (Phi.adjoint() * X); };
  auto p2 = [&](const CMat& X) -> CMat { return (X * Phi.conjugate()) * Phi.transpose(); };
  auto mul = [&](const CMat& X) -> CMat { return Umat.cwiseProduct(X); };
  const std::vector<std::pair<std::string, std::function<CMat(const CMat&)>>> ops = {
      {"onep", [&](const CMat& X) { return mul(p1(X)); }},
      {"twops", [&](const CMat& X) { return p1(mul(p1(X))); }},
      {"fourps", [&](const CMat& X) { return mul(p1(p2(X))); }},
  };
  const std::vector<std::pair<double, double>> exps = {{1, inf}, {2, 2}, {inf, 1}};
  for (const auto& [name, op] : ops) {
    for (const auto& [a, ap] : exps) {
      if (name == "fourps" && a > 2) continue;
      double bound;
      if (name == "onep")
        bound = lp(aphi, 2 * a, h) * lp(au, 2 * ap, h);
      else
        bound = std::pow(lp(aphi, 2 * a, h), 2) * lp(au, ap, h);
      const std::string tag = name + " a=" + (std::isinf(a) ? std::string("inf") : std::to_string(int(a)));
      for (int r = 0; r < 8; ++r) {
        CMat X(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) X(i, j) = cplx(N01(rng), N01(rng));
        X /= X.norm();
        tally.inequality(tag, op(X).norm(), bound);
      }
      if (dense) {
        CMat A(n * n, n * n);
        for (int c = 0; c < n * n; ++c) {
          CMat E = CMat::Zero(n, n);
          E(c / n, c % n) = 1.0;
          const CMat Y = op(E);
          for (int r = 0; r < n * n; ++r) A(r, c) = Y(r / n, r % n);
        }
        Eigen::BDCSVD<CMat> svd(A);
        tally.inequality(tag + " (operator norm)", svd.singularValues()[0], bound);
      }
    }
  }
}

}  // namespace

AppendixReport verify_appendix(int N, int M, int trials, std::uint64_t seed, double tolerance) {
  if (N < 2 || M < 2 || trials < 1) throw std::invalid_argument("need N >= 2, M >= 2, trials >= 1");
  AppendixReport rep;
  rep.N = N;
  rep.M = M;
  rep.trials = trials;
  rep.tolerance = tolerance;
  Tally tally(rep);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1, 1);

  auto space = std::make_shared<const FockSpace>(N, M);
  const TensorSpace ts(N, M);
  const Eigen::Index D = static_cast<Eigen::Index>(ts.dim());
  const CMat I = CMat::Identity(D, D);
  auto nu = [N](int k) { return weight_nu(k, N); };
  auto nu2 = [N](int k) { return static_cast<double>(k) / N; };

  for (int t = 0; t < trials; ++t) {
    const CVec phi = random_vector(rng, M);
    const CVec psi = random_vector(rng, static_cast<Eigen::Index>(space->dim()));
    std::vector<double> fvals(N + 1);
    for (auto& v : fvals) v = U(rng);
    auto f = [&](int k) { return fvals[k]; };

    const ProjectorContext ctx(space, phi);
    const CMat& p = ctx.p();
    const CMat& q = ctx.q();
    const CVec Psi = ts.embed(*space, psi);
    tally.identity("embedding isometry", std::abs(Psi.norm() - 1));
    tally.identity("p q = 0", (p * q).cwiseAbs().maxCoeff());
    tally.identity("counting spectrum integral", ctx.max_integrality_defect());

    std::vector<CMat> P(N + 1);
    CMat sum = CMat::Zero(D, D);
    for (int k = 0; k <= N; ++k) {
      P[k] = ts.sector_projector(p, k);
      sum += P[k];
      const CVec occ = ts.embed(*space, ctx.sector(k, psi));
      tally.identity("sector projector, occupation vs tensor", (occ - P[k] * Psi).norm());
    }
    tally.identity("resolution of identity", (sum - I).cwiseAbs().maxCoeff());

    // (nu^)^2 = (1/N) sum_j q_j
    CMat qsum = CMat::Zero(D, D);
    for (int j = 0; j < N; ++j) qsum += ts.on_particle(q, j);
    tally.identity("nu squared", (ts.hat(p, nu2) - qsum / N).cwiseAbs().maxCoeff());

    const CMat fh = ts.hat(p, f);
    const CMat nuh = ts.hat(p, nu);
    const CMat q1 = ts.on_particle(q, 0), q2 = ts.on_particle(q, 1);
    const double lhs1 = (fh * q1 * Psi).norm();
    tally.identity("f q1 = f nu", std::abs(lhs1 - (fh * nuh * Psi).norm()));
    const CVec chi = ctx.hat(f, psi);
    const double occ1 = space->apply_one_body(q, chi).dot(chi).real() / N;
    tally.identity("f q1 via occupation basis", std::abs(lhs1 * lhs1 - occ1));
    tally.inequality("f q1 q2 <= sqrt(N/(N-1)) f nu^2", (fh * q1 * q2 * Psi).norm(),
                     std::sqrt(static_cast<double>(N) / (N - 1)) * (fh * nuh * nuh * Psi).norm());

    // f^ Q_j v Q_k = Q_j v Q_k f^_{j-k}
    const CMat v = ts.on_pair(random_hermitian(rng, M * M));
    const CMat p1 = ts.on_particle(p, 0), p2 = ts.on_particle(p, 1);
    const CMat Q[3] = {p1 * p2, p1 * q2, q1 * q2};
    double comm = 0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const CMat lhs = fh * Q[j] * v * Q[k];
        const CMat rhs = Q[j] * v * Q[k] * ts.hat(p, f, j - k);
        comm = std::max(comm, (lhs - rhs).cwiseAbs().maxCoeff());
      }
    tally.identity("commuting hats", comm);

    auto one = [](int) { return 1.0; };
    tally.identity("f = 1 gives identity", std::max((ts.hat(p, one) - I).cwiseAbs().maxCoeff(),
                                                    (ctx.hat(one, psi) - psi).norm()));

    operator_bounds(rng, tally, t == 0);
  }
  tally.finish();
  return rep;
}

}  // namespace tfcond
