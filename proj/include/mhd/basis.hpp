#pragma once

// Orthonormal eigenbasis T^{l,m} of the quantized Laplacian and the
// transforms between coefficient vectors and matrices.
//
// For each band m the symmetric tridiagonal of -Delta_N is diagonalized;
// eigenvalues come out as l(l+1), l = m..n-1 ascending, and each unit
// eigenvector v is normalized so its first nonzero component is positive.
// With E the matrix carrying v on the m-th upper diagonal the basis is
//
//   T^{l,0}  = -i sqrt(n/(4 pi)) diag(v)
//   T^{l,m}  =  i sqrt(n/(8 pi)) (E + E^T)   (cos-type, m > 0)
//   T^{l,-m} =    sqrt(n/(8 pi)) (E - E^T)   (sin-type, m < 0)
//
// which is orthonormal under <A,B>_N = (4 pi/n) tr(A^dag B), matches the
// real spherical harmonics with Condon-Shortley phase (T^{0,0} = -iI/sqrt(4pi),
// T^{1,0} = s3/sqrt(pi) at n = 2), and satisfies
// Delta_N T^{l,m} = -l(l+1) T^{l,m}.
//
// Coefficient vectors are indexed k = l^2 + l + m.

#include <utility>
#include <vector>

#include "mhd/laplacian.hpp"

namespace mhd {

inline int coeff_index(int ell, int m) { return ell * ell + ell + m; }

inline std::pair<int, int> coeff_ell_m(int k) {
  int ell = int(std::sqrt(double(k)));
  while ((ell + 1) * (ell + 1) <= k) ++ell;
  while (ell * ell > k) --ell;
  return {ell, k - ell * ell - ell};
}

struct BasisBand {
  RVec eigs;  // l(l+1), ascending; l = m + column index
  RMat vecs;  // (n-m) x (n-m); columns are the band eigenvectors
};

struct QuantBasis {
  int n = 0;
  std::vector<BasisBand> bands;  // m = 0 .. n-1

  // Assembles the dense basis element T^{l,m}; intended for tests and
  // small-scale work (transforms below do not materialize elements).
  CMat element(int ell, int m) const;
};

// Diagonalizes every band.  O(n^4) time, O(n^3) memory.
QuantBasis build_basis(const QuantizedLaplacian& lap);

// W = sum_k coeffs[k] T^k.  Accepts any length <= n^2; missing entries are
// zero.  The k = 0 (trace) entry must be zero unless allow_trace is set.
CMat shr2mat(const QuantBasis& basis, const RVec& coeffs, bool allow_trace = false);

// Coefficients <T^k, W>_N for k = 0..n^2-1.  Only the skew-Hermitian part
// of w contributes.
RVec mat2shr(const QuantBasis& basis, const CMat& w);

}  // namespace mhd
