#pragma once

// Quantized Laplacian on u(n): Delta_N P = sum_a [S_a, [S_a, P]].
//
// The operator preserves matrix diagonals ("bands"): entries along the m-th
// diagonal transform under a real symmetric tridiagonal operator of size
// n - |m|, identical for +m and -m.  Bands are assembled by applying the
// double commutator to canonical single-entry matrices, reading coefficients
// from the constructed spin matrices.  The spectrum on u(n) is
// {-l(l+1) : l = 0..n-1} with multiplicity 2l+1; the null space is the
// identity direction.
//
// Internally each band stores the tridiagonal of -Delta_N (positive
// semidefinite; strictly positive definite for m >= 1) together with its
// LDL^T factorization.  For m = 0 the leading (n-1)-block is factored and
// the solution is pinned to zero trace.

#include <vector>

#include "mhd/common.hpp"
#include "mhd/spin.hpp"

namespace mhd {

// Tridiagonal of -Delta_N restricted to diagonal offset m, with factors.
struct LaplacianBand {
  RVec diag;   // size k = n - m
  RVec sub;    // size k - 1
  RVec fac_d;  // LDL^T pivots (size k, or k-1 for the m = 0 band)
  RVec fac_l;  // LDL^T subdiagonal multipliers
};

struct QuantizedLaplacian {
  int n = 0;
  SpinOperators spin;
  std::vector<LaplacianBand> bands;  // m = 0 .. n-1
};

// Assembles all bands and factorizations; n >= 2.  O(n^2) time and memory.
QuantizedLaplacian build_quantized_laplacian(int n);

// Applies Delta_N to a general complex n x n matrix, band by band.
// Band support is preserved exactly.  O(n^2).
CMat laplacian_apply(const QuantizedLaplacian& lap, const CMat& p);

// Solves -Delta_N P = W for the unique traceless P.
//
// Only the skew-Hermitian part of w is read (upper diagonals plus the
// imaginary part of the main diagonal), so the result is exactly
// skew-Hermitian.  A non-traceless input is rejected unless project_trace
// is set, in which case the trace component is removed first.  O(n^2).
CMat laplacian_solve(const QuantizedLaplacian& lap, const CMat& w,
                     bool project_trace = false);

}  // namespace mhd
