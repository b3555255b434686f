#pragma once

// Shared aliases and small helpers for the matrix hydrodynamics library.
//
// Conventions used throughout:
//  * vorticity and stream matrices live in su(N): skew-Hermitian, traceless;
//  * the matrix inner product is <A,B>_N = (4*pi/N) tr(A^dag B);
//  * hbar(N) = 2/sqrt(N^2-1) is the quantization scale.

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace mhd {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

// Quantization scale hbar = 2/sqrt(n^2 - 1); needs n >= 2.
inline double hbar(int n) {
  if (n < 2) throw std::invalid_argument("hbar: n must be >= 2");
  return 2.0 / std::sqrt(double(n) * double(n) - 1.0);
}

// Inner product <A,B>_N = (4*pi/N) tr(A^dag B), real part.
inline double inner_n(const CMat& a, const CMat& b) {
  return 4.0 * pi / double(a.rows()) * (a.adjoint() * b).trace().real();
}

inline double frob(const CMat& a) { return a.norm(); }

// Largest deviation from skew-Hermitian symmetry, relative to the norm.
inline double skew_defect(const CMat& a) {
  double na = a.norm();
  return (a + a.adjoint()).norm() / (na > 0 ? na : 1.0);
}

// Project onto skew-Hermitian matrices: a <- (a - a^dag)/2.
inline void skew_project(CMat& a) { a = 0.5 * (a - a.adjoint()).eval(); }

// Project out the trace (identity) component.
inline void trace_project(CMat& a) {
  cplx t = a.trace() / double(a.rows());
  a.diagonal().array() -= t;
}

}  // namespace mhd
