#include "mhd/diagnostics.hpp"

#include <Eigen/Eigenvalues>

namespace mhd {

namespace {

RVec hermitian_eigenvalues(const CMat& w) {
  CMat h = cplx(0.0, 1.0) * w;
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("diagnostics: eigen-decomposition failed");
  return es.eigenvalues();
}

// Rotates degenerate eigenvector clusters of vecs so that other_h becomes
// diagonal on them as well (valid when the underlying matrices commute).
void refine_clusters(const RVec& vals, CMat& vecs, const CMat& other_h) {
  const int n = int(vals.size());
  const double gap = 1e-8 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  int i = 0;
  while (i < n) {
    int j = i + 1;
    while (j < n && vals[j] - vals[j - 1] <= gap) ++j;
    if (j - i > 1) {
      auto block = vecs.middleCols(i, j - i);
      CMat g = block.adjoint() * other_h * block;
      Eigen::SelfAdjointEigenSolver<CMat> es(CMat(0.5 * (g + g.adjoint())));
      if (es.info() != Eigen::Success)
        throw std::runtime_error("diagnostics: cluster refinement failed");
      vecs.middleCols(i, j - i) = block * es.eigenvectors();
    }
    i = j;
  }
}

}  // namespace

double energy(const QuantizedLaplacian& lap, const CMat& w) {
  CMat p = laplacian_solve(lap, w);
  return 2.0 * pi / lap.n * (w.adjoint() * p).trace().real();
}

double casimir_fn(const CMat& w, const std::function<double(double)>& f) {
  RVec vals = hermitian_eigenvalues(w);
  double sum = 0.0;
  for (double v : vals) sum += f(v);
  return 4.0 * pi / double(w.rows()) * sum;
}

double casimir_power(const CMat& w, int k) {
  if (k < 0) throw std::invalid_argument("casimir_power: negative exponent");
  RVec vals = hermitian_eigenvalues(w);
  double sum = 0.0;
  for (double v : vals) sum += std::pow(v, k);
  return 4.0 * pi / double(w.rows()) * sum;
}

double casimir_poly(const CMat& w, const RVec& coeffs) {
  RVec vals = hermitian_eigenvalues(w);
  double sum = 0.0;
  for (double v : vals) {
    double acc = 0.0;
    for (int j = int(coeffs.size()) - 1; j >= 0; --j) acc = acc * v + coeffs[j];
    sum += acc;
  }
  return 4.0 * pi / double(w.rows()) * sum;
}

SpectrumReport enstrophy_spectrum(const QuantBasis& basis, const CMat& w) {
  const int n = basis.n;
  if (w.rows() != n || w.cols() != n)
    throw std::invalid_argument("enstrophy_spectrum: matrix size mismatch");
  RVec coeffs = mat2shr(basis, w);
  SpectrumReport report;
  report.per_ell = RVec::Zero(n);
  for (int ell = 1; ell < n; ++ell) {
    double s = 0.0;
    for (int m = -ell; m <= ell; ++m) {
      double c = coeffs[coeff_index(ell, m)];
      s += c * c;
    }
    report.per_ell[ell] = s;
  }
  return report;
}

double noise_level(SpectrumReport& report, int ell_star, int n) {
  if (ell_star < 1 || ell_star > n - 1)
    throw std::invalid_argument("noise_level: ell_star out of range");
  if (report.per_ell.size() != n)
    throw std::invalid_argument("noise_level: report size mismatch");
  double a = report.per_ell.segment(ell_star, n - ell_star).sum();
  report.ell_star = ell_star;
  report.tail_enstrophy = a;
  // sum_{ell = ell_star}^{n-1} (2 ell + 1) = n^2 - ell_star^2
  report.noise_level = a / (double(n) * n - double(ell_star) * ell_star);
  return report.noise_level;
}

Eigen::Vector3d angular_momentum(const QuantBasis& basis, const CMat& w) {
  const int n = basis.n;
  if (w.rows() != n || w.cols() != n)
    throw std::invalid_argument("angular_momentum: matrix size mismatch");
  if (n < 2) return Eigen::Vector3d::Zero();

  double w10 = 0.0;
  for (int i = 0; i < n; ++i)
    w10 += basis.bands[0].vecs(i, 1) * w(i, i).imag();
  w10 *= -std::sqrt(4.0 * pi / n);

  double re = 0.0, im = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    cplx u = 0.5 * (w(i, i + 1) - std::conj(w(i + 1, i)));
    re += basis.bands[1].vecs(i, 0) * u.real();
    im += basis.bands[1].vecs(i, 0) * u.imag();
  }
  const double scale = 2.0 * std::sqrt(2.0 * pi / n);
  return {scale * re, w10, scale * im};
}

CMat levelset_reconstruct(const CMat& w, double sigma) {
  const int n = int(w.rows());
  CMat h = cplx(0.0, 1.0) * w;
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("levelset_reconstruct: eigen-decomposition failed");
  CMat out = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double lam = es.eigenvalues()[k];
    if (lam >= sigma)
      out += cplx(0.0, -lam) *
             (es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint());
  }
  return out;
}

double lemma_bracket_trace(const CMat& x, const CMat& w, const CMat& wp) {
  const int n = int(w.rows());
  if (x.rows() != n || x.cols() != n || wp.rows() != n || wp.cols() != n ||
      w.cols() != n)
    throw std::invalid_argument("lemma_bracket_trace: size mismatch");
  const double scale = std::max(1.0, w.norm() * wp.norm());
  if ((w * wp - wp * w).norm() > 1e-12 * scale)
    throw std::invalid_argument("lemma_bracket_trace: inputs do not commute");

  CMat hw = cplx(0.0, 1.0) * w;
  Eigen::SelfAdjointEigenSolver<CMat> es(hw);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("lemma_bracket_trace: eigen-decomposition failed");
  RVec vals = es.eigenvalues();
  CMat vecs = es.eigenvectors();

  CMat hwp = cplx(0.0, 1.0) * wp;
  refine_clusters(vals, vecs, hwp);
  RVec wpd = (vecs.adjoint() * hwp * vecs).diagonal().real();

  CMat y = vecs.adjoint() * x * vecs;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sum += std::norm(y(i, j)) * (vals[j] - vals[i]) * (wpd[j] - wpd[i]);
  return sum;
}

DiagnosticsRecord compute_diagnostics(const QuantizedLaplacian& lap,
                                      const QuantBasis& basis, const CMat& w,
                                      double time, int fp_iters) {
  DiagnosticsRecord rec;
  rec.time = time;
  rec.fp_iters = fp_iters;
  rec.energy = energy(lap, w);
  RVec vals = hermitian_eigenvalues(w);
  const double scale = 4.0 * pi / lap.n;
  rec.enstrophy = scale * vals.squaredNorm();
  rec.casimir3 = scale * vals.array().cube().sum();
  rec.casimir4 = scale * vals.array().pow(4).sum();
  rec.momentum = angular_momentum(basis, w);
  return rec;
}

}  // namespace mhd
