#include "mhd/laplacian.hpp"

namespace mhd {

namespace {

// (s_a^2)_{jj} summed over a, from the stored generators (bandwidth 1).
double casimir_diag(const SpinOperators& sp, int j) {
  const int n = sp.n;
  cplx acc = 0.0;
  for (const CMat* s : {&sp.s1, &sp.s2, &sp.s3}) {
    for (int k = std::max(0, j - 1); k <= std::min(n - 1, j + 1); ++k)
      acc += (*s)(j, k) * (*s)(k, j);
  }
  return acc.real();
}

// LDL^T of a symmetric positive definite tridiagonal (diag d, subdiag e).
void factor_tridiag(const RVec& d, const RVec& e, int k, RVec& fd, RVec& fl) {
  fd.resize(k);
  fl.resize(k > 0 ? k - 1 : 0);
  if (k == 0) return;
  fd[0] = d[0];
  for (int i = 0; i + 1 < k; ++i) {
    fl[i] = e[i] / fd[i];
    fd[i + 1] = d[i + 1] - fl[i] * fl[i] * fd[i];
  }
}

// Solves L D L^T x = b in place for the leading k unknowns.
template <typename Vec>
void solve_tridiag(const RVec& fd, const RVec& fl, int k, Vec& b) {
  for (int i = 1; i < k; ++i) b[i] -= fl[i - 1] * b[i - 1];
  for (int i = 0; i < k; ++i) b[i] /= fd[i];
  for (int i = k - 2; i >= 0; --i) b[i] -= fl[i] * b[i + 1];
}

}  // namespace

QuantizedLaplacian build_quantized_laplacian(int n) {
  if (n < 2) throw std::invalid_argument("build_quantized_laplacian: n must be >= 2");

  QuantizedLaplacian lap;
  lap.n = n;
  lap.spin = build_spin_operators(n);
  const SpinOperators& sp = lap.spin;

  std::vector<double> cas(n);
  for (int j = 0; j < n; ++j) cas[j] = casimir_diag(sp, j);

  lap.bands.resize(n);
  for (int m = 0; m < n; ++m) {
    const int k = n - m;
    LaplacianBand& band = lap.bands[m];
    band.diag.resize(k);
    band.sub.resize(k > 0 ? k - 1 : 0);
    // Delta_N E_{j,j+m} read off at band positions j-1, j, j+1:
    //   diag:  (s^2)_{jj} + (s^2)_{j+m,j+m} - 2 sum_a (s_a)_{jj} (s_a)_{j+m,j+m}
    //   sub:   -2 sum_a (s_a)_{j+1,j} (s_a)_{j+m,j+1+m}
    // stored negated (tridiagonal of -Delta_N).
    for (int j = 0; j < k; ++j) {
      cplx diag = cas[j] + cas[j + m];
      for (const CMat* s : {&sp.s1, &sp.s2, &sp.s3})
        diag -= 2.0 * (*s)(j, j) * (*s)(j + m, j + m);
      band.diag[j] = -diag.real();
    }
    for (int j = 0; j + 1 < k; ++j) {
      cplx sub = 0.0;
      for (const CMat* s : {&sp.s1, &sp.s2, &sp.s3})
        sub -= 2.0 * (*s)(j + 1, j) * (*s)(j + m, j + 1 + m);
      band.sub[j] = -sub.real();
    }
    // m = 0 is singular (null vector = constants): factor the leading block.
    factor_tridiag(band.diag, band.sub, m == 0 ? k - 1 : k, band.fac_d, band.fac_l);
  }
  return lap;
}

CMat laplacian_apply(const QuantizedLaplacian& lap, const CMat& p) {
  const int n = lap.n;
  if (p.rows() != n || p.cols() != n)
    throw std::invalid_argument("laplacian_apply: matrix size mismatch");

  CMat out(n, n);
  for (int m = -(n - 1); m <= n - 1; ++m) {
    const LaplacianBand& band = lap.bands[std::abs(m)];
    const int k = n - std::abs(m);
    auto src = p.diagonal(m);
    auto dst = out.diagonal(m);
    for (int i = 0; i < k; ++i) {
      cplx acc = -band.diag[i] * src[i];
      if (i > 0) acc -= band.sub[i - 1] * src[i - 1];
      if (i + 1 < k) acc -= band.sub[i] * src[i + 1];
      dst[i] = acc;
    }
  }
  return out;
}

CMat laplacian_solve(const QuantizedLaplacian& lap, const CMat& w,
                     bool project_trace) {
  const int n = lap.n;
  if (w.rows() != n || w.cols() != n)
    throw std::invalid_argument("laplacian_solve: matrix size mismatch");

  cplx tr = w.trace();
  if (std::abs(tr) > 1e-12 * (1.0 + w.norm())) {
    if (!project_trace)
      throw std::invalid_argument("laplacian_solve: input has nonzero trace");
  }

  CMat p = CMat::Zero(n, n);

  // m = 0: solve for the imaginary diagonal with the trace pinned.
  {
    const LaplacianBand& band = lap.bands[0];
    RVec d(n);
    for (int i = 0; i < n; ++i) d[i] = w(i, i).imag();
    d.array() -= d.mean();  // remove any trace component
    solve_tridiag(band.fac_d, band.fac_l, n - 1, d);
    d[n - 1] = 0.0;
    d.array() -= d.mean();
    for (int i = 0; i < n; ++i) p(i, i) = cplx(0.0, d[i]);
  }

  for (int m = 1; m < n; ++m) {
    const LaplacianBand& band = lap.bands[m];
    const int k = n - m;
    CVec u = w.diagonal(m);
    solve_tridiag(band.fac_d, band.fac_l, k, u);
    p.diagonal(m) = u;
    p.diagonal(-m) = -u.conjugate();
  }
  return p;
}

}  // namespace mhd
