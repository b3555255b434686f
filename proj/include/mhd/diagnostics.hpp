#pragma once

#include <functional>

#include <Eigen/Core>

#include "mhd/basis.hpp"
#include "mhd/laplacian.hpp"

namespace mhd {

// ---- conserved quantities and spectral diagnostics ----

struct DiagnosticsRecord {
  double time = 0.0;
  double energy = 0.0;     // H = (2pi/n) tr(W* P)
  double enstrophy = 0.0;  // C2 = (4pi/n) tr((iW)^2)
  double casimir3 = 0.0;
  double casimir4 = 0.0;
  Eigen::Vector3d momentum = Eigen::Vector3d::Zero();  // (w_{1,-1}, w_{1,0}, w_{1,1})
  int fp_iters = 0;
};

struct SpectrumReport {
  RVec per_ell;               // (omega_ell)^2, indexed by ell, entry 0 unused
  int ell_star = 0;           // split wavenumber of the tail sum
  double tail_enstrophy = 0;  // a = sum_{ell >= ell_star} per_ell
  double noise_level = 0;     // eps^2 = a / (n^2 - ell_star^2)
};

// Kinetic energy (2pi/n) tr(W* P) with P = laplacian_solve(W); equals
// (1/2) sum omega^2 / (ell (ell+1)).
double energy(const QuantizedLaplacian& lap, const CMat& w);

// Casimirs C_f = (4pi/n) sum_k f(lambda_k) over the eigenvalues of iW.
double casimir_power(const CMat& w, int k);
double casimir_poly(const CMat& w, const RVec& coeffs);  // sum_j coeffs[j] x^j
double casimir_fn(const CMat& w, const std::function<double(double)>& f);

// Per-ell enstrophy components (omega_ell)^2 = sum_m omega_{ell,m}^2.
SpectrumReport enstrophy_spectrum(const QuantBasis& basis, const CMat& w);

// Fills the tail fields of the report for the given split wavenumber and
// returns eps^2 = a / (n^2 - ell_star^2), the mean enstrophy per mode above
// ell_star.
double noise_level(SpectrumReport& report, int ell_star, int n);

// The three ell = 1 coefficients (w_{1,-1}, w_{1,0}, w_{1,1}).
Eigen::Vector3d angular_momentum(const QuantBasis& basis, const CMat& w);

// Partial eigen-reconstruction: sum of -i lambda e e* over eigenpairs of iW
// with lambda >= sigma.
CMat levelset_reconstruct(const CMat& w, double sigma);

// Evaluates sum_{ij} |Y_ij|^2 (w_j - w_i)(w'_j - w'_i) in a common eigenbasis
// of the commuting pair (w, wp), which equals tr([X,W]* [X,W']).  Test oracle
// for the enstrophy-decay mechanism; throws if the pair does not commute.
double lemma_bracket_trace(const CMat& x, const CMat& w, const CMat& wp);

// Bundles the per-step observables; one Hermitian eigen-decomposition total.
DiagnosticsRecord compute_diagnostics(const QuantizedLaplacian& lap,
                                      const QuantBasis& basis, const CMat& w,
                                      double time, int fp_iters);

}  // namespace mhd
