#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "tfcond/errors.hpp"
#include "tfcond/manybody.hpp"

namespace tfcond {

ExactPropagator::ExactPropagator(const ManyBodyHamiltonian& H) : H_(&H) {
  if (H.space->dim() <= dense_limit) {
    dense_ = true;
    const CMat Hd = CMat(H.matrix);
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (Hd + Hd.adjoint()));
    if (es.info() != Eigen::Success) throw SolverError("dense diagonalization failed");
    vecs_ = es.eigenvectors();
    vals_ = es.eigenvalues();
  }
}

namespace {

// One Krylov step of e^{-i tau H} v with full reorthogonalization. Returns the
// a posteriori error estimate.
double krylov_step(const ManyBodyHamiltonian& H, CVec& v, double tau, int m) {
  const Eigen::Index D = v.size();
  const double nv = v.norm();
  CMat Q(D, m + 1);
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  Q.col(0) = v / nv;
  int k = 0;
  double last_beta = 0;
  for (; k < m; ++k) {
    CVec w = H.apply(Q.col(k));
    T(k, k) = Q.col(k).dot(w).real();
    for (int r = 0; r < 2; ++r) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).adjoint() * w);
    const double b = w.norm();
    last_beta = b;
    if (k + 1 < m) {
      if (b < 1e-14) {
        ++k;
        last_beta = 0;
        break;
      }
      T(k, k + 1) = T(k + 1, k) = b;
      Q.col(k + 1) = w / b;
    }
  }
  const int kk = std::min(k, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.topLeftCorner(kk, kk));
  Eigen::VectorXcd c(kk);
  for (int i = 0; i < kk; ++i) c[i] = std::polar(1.0, -tau * es.eigenvalues()[i]) * es.eigenvectors()(0, i);
  const Eigen::VectorXcd y = es.eigenvectors().cast<cplx>() * c;
  v = nv * (Q.leftCols(kk) * y);
  return last_beta * std::abs(y[kk - 1]) * nv;
}

}  // namespace

CVec ExactPropagator::operator()(const CVec& psi, double t) const {
  if (dense_) {
    CVec y = vecs_.adjoint() * psi;
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] *= std::polar(1.0, -t * vals_[i]);
    return vecs_ * y;
  }
  CVec v = psi;
  double remaining = t;
  double step = t;
  const double tol = 1e-13;
  while (std::abs(remaining) > 0) {
    if (std::abs(step) > std::abs(remaining)) step = remaining;
    CVec trial = v;
    const double err = krylov_step(*H_, trial, step, 40);
    if (err > tol && std::abs(step) > 1e-12) {
      step *= 0.5;
      continue;
    }
    v = trial;
    remaining -= step;
    if (err < 0.1 * tol) step *= 1.5;
  }
  return v;
}

CVec hartree_modes_step(const ManyBodyHamiltonian& H, const CVec& c, double t, double rk_step) {
  if (t == 0) return c;
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / rk_step)));
  const double dt = t / steps;
  auto rhs = [&](const CVec& x) -> CVec {
    return cplx(0, -1) * ((H.h + H.g * H.mean_field(x)) * x);
  };
  CVec x = c;
  for (int s = 0; s < steps; ++s) {
    const CVec k1 = rhs(x);
    const CVec k2 = rhs(x + 0.5 * dt * k1);
    const CVec k3 = rhs(x + 0.5 * dt * k2);
    const CVec k4 = rhs(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

namespace {

double hartree_energy(const ManyBodyHamiltonian& H, const CVec& c) {
  return c.dot(H.h * c).real() + 0.5 * H.g * c.dot(H.mean_field(c) * c).real();
}

double galerkin_leakage(const ManyBodyHamiltonian& H, const CVec& c) {
  if (!H.modes || !H.modes->grid || !H.interaction) return 0;
  const ModeBasis& mb = *H.modes;
  const Field u = mb.synthesize(c);
  const Field kernel = H.interaction->sample_scaled(*mb.grid, H.N());
  Field r = convolve(kernel, abs_squared(u));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = H.g * r[i].real() * u[i];
  const double total = l2_norm(r);
  if (total == 0) return 0;
  const Field inside = mb.synthesize(mb.project(r));
  return l2_norm(r - inside) / total;
}

}  // namespace

TrackReport evolve_and_track(const ManyBodyHamiltonian& H, const CVec& psi0, const CVec& phi0,
                             const std::vector<double>& times, const TrackConfig& cfg) {
  if (std::abs(psi0.norm() - 1) > 1e-10 || std::abs(phi0.norm() - 1) > 1e-10)
    throw std::invalid_argument("initial states must be normalized");
  if (times.empty() || !std::is_sorted(times.begin(), times.end()) || times.front() < 0)
    throw std::invalid_argument("times must be nonnegative and ascending");
  if (!(cfg.fd_step > 0) || !(cfg.rk_step > 0)) throw std::invalid_argument("bad step sizes");
  const int N = H.N();
  const double lambda = cfg.lambda;
  const double Nd = static_cast<double>(N);
  const ExactPropagator U(H);

  const bool with_norms = H.modes && H.modes->grid && H.interaction;
  double v1 = 0, vmax = 0;
  if (with_norms) {
    v1 = H.interaction->l1_norm(H.dim);
    vmax = std::max(v1, H.interaction->l2_norm(H.dim));
  }
  const double dbeta = H.dim * H.beta;

  TrackReport rep;
  rep.gronwall_offset = std::pow(Nd, dbeta - lambda);
  const double E0 = H.energy(psi0);
  const double EH0 = hartree_energy(H, phi0);
  rep.leakage = galerkin_leakage(H, phi0);

  CVec phi = phi0;
  double t_prev = 0;
  for (double t : times) {
    phi = hartree_modes_step(H, phi, t - t_prev, cfg.rk_step);
    t_prev = t;
    const CVec psi = U(psi0, t);
    TrackPoint pt;
    pt.t = t;
    pt.norm = psi.norm();
    pt.energy = H.energy(psi);
    rep.max_norm_drift = std::max(rep.max_norm_drift, std::abs(pt.norm - 1));
    rep.max_energy_drift = std::max(rep.max_energy_drift, std::abs(pt.energy - E0));
    rep.hartree_energy_drift = std::max(rep.hartree_energy_drift, std::abs(hartree_energy(H, phi) - EH0));

    const CVec psin = psi / pt.norm;
    const CVec phin = phi / phi.norm();
    const CountingReport cr = counting_report(H, psin, phin, lambda);
    pt.alpha = cr.alpha;
    pt.Gamma = cr.Gamma;
    pt.terms = cr.gamma_terms;

    const double h = cfg.fd_step;
    auto alpha_at = [&](double dt) {
      const CVec ps = U(psi0, t + dt);
      CVec ph = hartree_modes_step(H, phi, dt, h / 8);
      ph.normalize();
      return alpha(ProjectorContext(H.space, ph), ps / ps.norm(), lambda);
    };
    pt.dalpha_fd = (alpha_at(h) - alpha_at(-h)) / (2 * h);
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(pt.dalpha_fd - pt.Gamma));

    pt.distance = projector_distance(cr.gamma, phin);
    const bool low = pt.distance * pt.distance <= 2 * pt.alpha * (1 + 1e-12) + 1e-14;
    const bool high = pt.alpha <= std::pow(Nd, 1 - lambda) * pt.distance * (1 + 1e-12) + 1e-14;
    if (!low || !high) ++rep.sandwich_violations;

    if (with_norms) {
      const Field u = H.modes->synthesize(phin);
      const double linf = linf_norm(u);
      const double l4 = lp_norm(u, 4.0);
      const double a = pt.alpha;
      pt.bounds[0] = v1 / std::pow(Nd, 0.5 * (1 + lambda)) * linf * linf * std::sqrt(a);
      pt.bounds[1] = 2 * vmax * std::pow(std::max(l4, linf), 2) * (a + 0.5 * std::pow(Nd, dbeta - lambda));
      pt.bounds[2] = 2 * vmax / std::pow(Nd, 0.5 * (1 - lambda)) * linf *
                     (std::pow(Nd, 0.5 * dbeta) + linf) * a;
      for (int i = 0; i < 3; ++i)
        if (std::abs(pt.terms[i]) > pt.bounds[i] * (1 + 1e-9) + 1e-13) ++rep.term_bound_violations;
    } else {
      pt.bounds.fill(std::numeric_limits<double>::quiet_NaN());
    }
    rep.points.push_back(pt);
  }
  rep.leakage = std::max(rep.leakage, galerkin_leakage(H, phi));
  rep.galerkin_consistent = rep.leakage <= cfg.leakage_limit;

  const double base = rep.points.front().alpha + rep.gronwall_offset;
  for (const auto& p : rep.points)
    if (p.t > 0 && p.alpha > 0) rep.gronwall_rate = std::max(rep.gronwall_rate, std::log(p.alpha / base) / p.t);

  rep.ok = rep.max_identity_error < cfg.fd_tol && rep.term_bound_violations == 0 &&
           rep.sandwich_violations == 0 && rep.max_norm_drift < 1e-12 && rep.max_energy_drift < 1e-10;
  return rep;
}

}  // namespace tfcond
