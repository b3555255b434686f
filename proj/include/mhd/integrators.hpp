#pragma once

#include <functional>

#include "mhd/laplacian.hpp"

namespace mhd {

// ---- time stepping for the Euler-Zeitlin flow ----
//
// The vorticity W(t) in su(N) evolves by Wdot = -(1/hbar)[W, P] where the
// stream matrix P solves -Delta_N P = W.  Steps are parameterized by the
// dimensionless ratio eps = dt/hbar; flipping the sign of eps integrates the
// time-reversed flow (equivalently P -> -P).

struct StepperConfig {
  double eps = 0.2;       // step ratio dt/hbar; sign selects flow direction
  double nu = 0.0;        // hyperviscosity coefficient, >= 0
  double fp_tol = 1e-12;  // relative tolerance of the stage fixed point
  int fp_maxit = 50;
};

struct StepInfo {
  int fp_iters = 0;
  double fp_residual = 0.0;
  bool reorthonormalized = false;  // transport frame needed a QR reset
};

// Midpoint stage of one isospectral step.
struct StageResult {
  CMat w_mid;  // stage vorticity, skew-Hermitian traceless
  CMat p_mid;  // stream matrix of w_mid
  int iters = 0;
  double residual = 0.0;
};

// -(1/hbar)[w, p] with p = laplacian_solve(w).
CMat euler_zeitlin_rhs(const QuantizedLaplacian& lap, const CMat& w);

// Solves the stage equation w_n = (I - a*p_mid) w_mid (I + a*p_mid) with
// a = eps/2 by warm-started fixed-point sweeps, projecting each iterate back
// onto su(n).  Throws std::runtime_error when fp_maxit sweeps do not reach
// fp_tol.
StageResult isomp_stage_solve(const QuantizedLaplacian& lap, const CMat& w_n,
                              const StepperConfig& cfg);

// Isospectral midpoint step: w -> C w C^* with the unitary Cayley factor
// C = (I + a*p_mid)(I - a*p_mid)^{-1}, algebraically w - eps*[w_mid, p_mid].
CMat isomp_step(const QuantizedLaplacian& lap, const CMat& w_n,
                const StepperConfig& cfg, StepInfo* info = nullptr);

// Conservative step followed, for nu > 0, by the explicit dissipative substep
// w += (eps*nu/hbar) [p_mid, [p_mid, w]] with the stage stream matrix frozen.
// Bit-identical to isomp_step when nu == 0.
CMat hyperviscous_step(const QuantizedLaplacian& lap, const CMat& w_n,
                       const StepperConfig& cfg, StepInfo* info = nullptr);

// Advects an eigenframe: w is reconstructed from frame and lambdas as
// sum_k -i lambda_k e_k e_k^*, the usual stage is solved, and the frame is
// premultiplied by the same Cayley factor as isomp_step.  The eigenvalues are
// untouched.  Unitarity loss beyond 1e-10 triggers a re-orthonormalization,
// reported through info.
CMat transport_step(const QuantizedLaplacian& lap, const CMat& frame,
                    const RVec& lambdas, const StepperConfig& cfg,
                    StepInfo* info = nullptr);

using EvolveObserver =
    std::function<void(long step, double time, const CMat& w, const StepInfo&)>;

// Applies hyperviscous_step n_steps times; the observer runs after every
// observe_every-th step with (step index, t0 + step*dt, state, info).
CMat evolve(const QuantizedLaplacian& lap, CMat w, const StepperConfig& cfg,
            long n_steps, const EvolveObserver& observer = {},
            long observe_every = 1, double t0 = 0.0);

}  // namespace mhd
