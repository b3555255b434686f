#include "mhd/basis.hpp"

#include <Eigen/Eigenvalues>

namespace mhd {

QuantBasis build_basis(const QuantizedLaplacian& lap) {
  const int n = lap.n;
  QuantBasis basis;
  basis.n = n;
  basis.bands.resize(n);

  Eigen::SelfAdjointEigenSolver<RMat> es;
  for (int m = 0; m < n; ++m) {
    const int k = n - m;
    BasisBand& bb = basis.bands[m];
    if (k == 1) {
      bb.eigs = RVec::Constant(1, lap.bands[m].diag[0]);
      bb.vecs = RMat::Constant(1, 1, 1.0);
      continue;
    }
    es.computeFromTridiagonal(lap.bands[m].diag, lap.bands[m].sub);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("build_basis: tridiagonal eigensolver failed");
    bb.eigs = es.eigenvalues();
    bb.vecs = es.eigenvectors();
    for (int c = 0; c < k; ++c) {
      for (int r = 0; r < k; ++r) {
        if (bb.vecs(r, c) != 0.0) {
          if (bb.vecs(r, c) < 0.0) bb.vecs.col(c) = -bb.vecs.col(c);
          break;
        }
      }
    }
  }
  return basis;
}

CMat QuantBasis::element(int ell, int m) const {
  const int am = std::abs(m);
  if (ell < 0 || ell >= n || am > ell)
    throw std::invalid_argument("QuantBasis::element: (l,m) out of range");

  const RMat& v = bands[am].vecs;
  const int col = ell - am;
  CMat t = CMat::Zero(n, n);
  if (m == 0) {
    const double c = std::sqrt(n / (4.0 * pi));
    for (int i = 0; i < n; ++i) t(i, i) = cplx(0.0, -c * v(i, col));
  } else if (m > 0) {
    const double c = std::sqrt(n / (8.0 * pi));
    for (int i = 0; i + am < n; ++i) {
      t(i, i + am) = cplx(0.0, c * v(i, col));
      t(i + am, i) = cplx(0.0, c * v(i, col));
    }
  } else {
    const double c = std::sqrt(n / (8.0 * pi));
    for (int i = 0; i + am < n; ++i) {
      t(i, i + am) = cplx(c * v(i, col), 0.0);
      t(i + am, i) = cplx(-c * v(i, col), 0.0);
    }
  }
  return t;
}

CMat shr2mat(const QuantBasis& basis, const RVec& coeffs, bool allow_trace) {
  const int n = basis.n;
  if (coeffs.size() > n * n)
    throw std::invalid_argument("shr2mat: coefficient vector longer than n^2");
  if (!allow_trace && coeffs.size() > 0 &&
      std::abs(coeffs[0]) > 1e-12 * (1.0 + coeffs.norm()))
    throw std::invalid_argument("shr2mat: nonzero trace coefficient (k = 0)");

  auto coeff = [&](int k) -> double { return k < coeffs.size() ? coeffs[k] : 0.0; };

  CMat w = CMat::Zero(n, n);
  {
    const RMat& v = basis.bands[0].vecs;
    RVec c0(n);
    for (int ell = 0; ell < n; ++ell) c0[ell] = coeff(coeff_index(ell, 0));
    if (!allow_trace) c0[0] = 0.0;
    RVec d = v * c0;
    const double scale = std::sqrt(n / (4.0 * pi));
    for (int i = 0; i < n; ++i) w(i, i) = cplx(0.0, -scale * d[i]);
  }
  const double scale = std::sqrt(n / (8.0 * pi));
  for (int m = 1; m < n; ++m) {
    const int k = n - m;
    const RMat& v = basis.bands[m].vecs;
    RVec ccos(k), csin(k);
    for (int j = 0; j < k; ++j) {
      ccos[j] = coeff(coeff_index(m + j, m));
      csin[j] = coeff(coeff_index(m + j, -m));
    }
    RVec ucos = v * ccos, usin = v * csin;
    for (int i = 0; i < k; ++i) {
      cplx u(scale * usin[i], scale * ucos[i]);
      w(i, i + m) = u;
      w(i + m, i) = -std::conj(u);
    }
  }
  return w;
}

RVec mat2shr(const QuantBasis& basis, const CMat& w) {
  const int n = basis.n;
  if (w.rows() != n || w.cols() != n)
    throw std::invalid_argument("mat2shr: matrix size mismatch");

  RVec coeffs = RVec::Zero(n * n);
  {
    const RMat& v = basis.bands[0].vecs;
    RVec d(n);
    for (int i = 0; i < n; ++i) d[i] = w(i, i).imag();
    RVec c0 = -std::sqrt(4.0 * pi / n) * (v.transpose() * d);
    for (int ell = 0; ell < n; ++ell) coeffs[coeff_index(ell, 0)] = c0[ell];
  }
  const double scale = 2.0 * std::sqrt(2.0 * pi / n);
  for (int m = 1; m < n; ++m) {
    const int k = n - m;
    const RMat& v = basis.bands[m].vecs;
    RVec ure(k), uim(k);
    for (int i = 0; i < k; ++i) {
      // skew part of the (+m, -m) diagonal pair
      cplx u = 0.5 * (w(i, i + m) - std::conj(w(i + m, i)));
      ure[i] = u.real();
      uim[i] = u.imag();
    }
    RVec ccos = scale * (v.transpose() * uim);
    RVec csin = scale * (v.transpose() * ure);
    for (int j = 0; j < k; ++j) {
      coeffs[coeff_index(m + j, m)] = ccos[j];
      coeffs[coeff_index(m + j, -m)] = csin[j];
    }
  }
  return coeffs;
}

}  // namespace mhd
