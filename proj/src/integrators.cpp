#include "mhd/integrators.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace mhd {

namespace {

void validate(const QuantizedLaplacian& lap, const CMat& w,
              const StepperConfig& cfg) {
  if (w.rows() != lap.n || w.cols() != lap.n)
    throw std::invalid_argument("stepper: matrix size does not match operator");
  if (!std::isfinite(cfg.eps))
    throw std::invalid_argument("stepper: eps must be finite");
  if (cfg.nu < 0.0) throw std::invalid_argument("stepper: nu must be >= 0");
  if (!(cfg.fp_tol > 0.0))
    throw std::invalid_argument("stepper: fp_tol must be > 0");
  if (cfg.fp_maxit < 1)
    throw std::invalid_argument("stepper: fp_maxit must be >= 1");
}

// Cayley factor C = (I + a p)(I - a p)^{-1}; unitary for skew-Hermitian p.
// The two factors commute, so this equals B^{-1} B^* with B = I - a p.
CMat cayley(const CMat& p, double a) {
  CMat b = CMat::Identity(p.rows(), p.cols()) - a * p;
  return b.partialPivLu().solve(b.adjoint());
}

CMat conjugate_update(const CMat& p_mid, double eps, const CMat& w_n) {
  CMat c = cayley(p_mid, 0.5 * eps);
  CMat w = c * w_n * c.adjoint();
  skew_project(w);
  trace_project(w);
  return w;
}

}  // namespace

CMat euler_zeitlin_rhs(const QuantizedLaplacian& lap, const CMat& w) {
  CMat p = laplacian_solve(lap, w);
  return (p * w - w * p) / hbar(lap.n);
}

StageResult isomp_stage_solve(const QuantizedLaplacian& lap, const CMat& w_n,
                              const StepperConfig& cfg) {
  validate(lap, w_n, cfg);
  const double a = 0.5 * cfg.eps;
  const double scale = std::max(1.0, w_n.norm());

  StageResult sr;
  CMat wt = w_n;
  for (int it = 1; it <= cfg.fp_maxit; ++it) {
    CMat p = laplacian_solve(lap, wt);
    // For skew wt, p: [wt, p] = prod - prod^*, p wt p = prod^* p.
    CMat prod = wt * p;
    CMat next =
        w_n - a * (prod - prod.adjoint()) + (a * a) * (prod.adjoint() * p);
    skew_project(next);
    trace_project(next);
    sr.residual = (next - wt).norm() / scale;
    wt.swap(next);
    if (sr.residual <= cfg.fp_tol) {
      sr.iters = it;
      sr.w_mid = std::move(wt);
      sr.p_mid = laplacian_solve(lap, sr.w_mid);
      return sr;
    }
  }
  std::ostringstream msg;
  msg << "isomp_stage_solve: no convergence after " << cfg.fp_maxit
      << " sweeps, residual " << sr.residual << " (tol " << cfg.fp_tol << ")";
  throw std::runtime_error(msg.str());
}

CMat isomp_step(const QuantizedLaplacian& lap, const CMat& w_n,
                const StepperConfig& cfg, StepInfo* info) {
  StageResult sr = isomp_stage_solve(lap, w_n, cfg);
  if (info) *info = {sr.iters, sr.residual, false};
  return conjugate_update(sr.p_mid, cfg.eps, w_n);
}

CMat hyperviscous_step(const QuantizedLaplacian& lap, const CMat& w_n,
                       const StepperConfig& cfg, StepInfo* info) {
  StageResult sr = isomp_stage_solve(lap, w_n, cfg);
  if (info) *info = {sr.iters, sr.residual, false};
  CMat w = conjugate_update(sr.p_mid, cfg.eps, w_n);
  if (cfg.nu != 0.0) {
    const double k = cfg.eps * cfg.nu / hbar(lap.n);
    CMat b1 = sr.p_mid * w;
    CMat c1 = b1 - b1.adjoint();  // [p_mid, w]
    CMat b2 = sr.p_mid * c1;
    w += k * (b2 - b2.adjoint());  // + k [p_mid, [p_mid, w]]
    skew_project(w);
    trace_project(w);
  }
  return w;
}

CMat transport_step(const QuantizedLaplacian& lap, const CMat& frame,
                    const RVec& lambdas, const StepperConfig& cfg,
                    StepInfo* info) {
  const int n = lap.n;
  if (frame.rows() != n || frame.cols() != n)
    throw std::invalid_argument("transport_step: frame size mismatch");
  if (lambdas.size() != n)
    throw std::invalid_argument("transport_step: eigenvalue count mismatch");

  CMat f = frame;
  bool reset = false;
  if ((f.adjoint() * f - CMat::Identity(n, n)).norm() > 1e-10) {
    // Drifted frame: restore unitarity before advecting (phase-fixed QR so
    // the result stays close to the input).
    Eigen::HouseholderQR<CMat> qr(f);
    CMat q = qr.householderQ() * CMat::Identity(n, n);
    CMat r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
      double m = std::abs(r(j, j));
      if (m > 0.0) q.col(j) *= r(j, j) / m;
    }
    f = q;
    reset = true;
  }

  CVec d = cplx(0.0, -1.0) * lambdas.cast<cplx>();
  CMat w = f * d.asDiagonal() * f.adjoint();
  skew_project(w);

  StageResult sr = isomp_stage_solve(lap, w, cfg);
  if (info) *info = {sr.iters, sr.residual, reset};

  return cayley(sr.p_mid, 0.5 * cfg.eps) * f;
}

CMat evolve(const QuantizedLaplacian& lap, CMat w, const StepperConfig& cfg,
            long n_steps, const EvolveObserver& observer, long observe_every,
            double t0) {
  if (n_steps < 0) throw std::invalid_argument("evolve: n_steps must be >= 0");
  if (observe_every < 1)
    throw std::invalid_argument("evolve: observe_every must be >= 1");

  const double dt = cfg.eps * hbar(lap.n);
  StepInfo info;
  for (long k = 1; k <= n_steps; ++k) {
    try {
      w = hyperviscous_step(lap, w, cfg, &info);
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "evolve: step " << k << " failed: " << e.what();
      throw std::runtime_error(msg.str());
    }
    if (observer && k % observe_every == 0)
      observer(k, t0 + double(k) * dt, w, info);
  }
  return w;
}

}  // namespace mhd
