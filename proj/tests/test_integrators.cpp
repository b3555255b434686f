#include "doctest.h"

#include <Eigen/Eigenvalues>

#include "mhd/basis.hpp"
#include "mhd/integrators.hpp"
#include "oracles.hpp"

using namespace mhd;

namespace {

struct Setup {
  QuantizedLaplacian lap;
  QuantBasis basis;
  explicit Setup(int n) : lap(build_quantized_laplacian(n)), basis(build_basis(lap)) {}
};

// Deterministic band-limited state with modes l <= elmax.
CMat smooth_state(const Setup& s, int elmax, double phase) {
  RVec c = RVec::Zero(s.lap.n * s.lap.n);
  for (int k = 1; k < (elmax + 1) * (elmax + 1); ++k)
    c[k] = std::sin(1.7 * k + phase);
  return shr2mat(s.basis, c);
}

double energy(const QuantizedLaplacian& lap, const CMat& w) {
  CMat p = laplacian_solve(lap, w);
  return 2.0 * pi / lap.n * (w.adjoint() * p).trace().real();
}

double casimir(const QuantizedLaplacian& lap, const CMat& w, int k) {
  CMat iw = cplx(0.0, 1.0) * w;
  CMat acc = iw;
  for (int j = 1; j < k; ++j) acc = acc * iw;
  return 4.0 * pi / lap.n * acc.trace().real();
}

RVec sorted_spectrum(const CMat& w) {
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(cplx(0.0, 1.0) * w),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("integrators: argument validation") {
  Setup s(4);
  CMat w = smooth_state(s, 2, 0.4);

  StepperConfig bad;
  bad.eps = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(isomp_step(s.lap, w, bad), std::invalid_argument);
  bad = {};
  bad.nu = -1.0;
  CHECK_THROWS_AS(hyperviscous_step(s.lap, w, bad), std::invalid_argument);
  bad = {};
  bad.fp_tol = 0.0;
  CHECK_THROWS_AS(isomp_step(s.lap, w, bad), std::invalid_argument);
  bad = {};
  bad.fp_maxit = 0;
  CHECK_THROWS_AS(isomp_step(s.lap, w, bad), std::invalid_argument);

  StepperConfig cfg;
  CHECK_THROWS_AS(isomp_step(s.lap, CMat::Zero(3, 3), cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evolve(s.lap, w, cfg, -1), std::invalid_argument);
  CHECK_THROWS_AS(evolve(s.lap, w, cfg, 1, {}, 0), std::invalid_argument);
}

TEST_CASE("integrators: right-hand side structure") {
  Setup s(16);

  // Diagonal states are steady: P stays diagonal and commutes with W.
  CMat zonal = CMat::Zero(16, 16);
  {
    RVec c = RVec::Zero(16 * 16);
    for (int ell = 1; ell <= 5; ++ell) c[coeff_index(ell, 0)] = 1.0 / ell;
    zonal = shr2mat(s.basis, c);
  }
  CHECK(euler_zeitlin_rhs(s.lap, zonal).norm() <= 1e-12 * zonal.norm());

  CMat mode = 0.7 * s.basis.element(3, 2);
  CHECK(euler_zeitlin_rhs(s.lap, mode).norm() <= 1e-12 * mode.norm());

  CMat w = smooth_state(s, 4, 0.9);
  CMat r = euler_zeitlin_rhs(s.lap, w);
  CHECK(std::abs(r.trace()) <= 1e-13 * r.norm());
  CHECK(skew_defect(r) <= 1e-14 * r.norm());
}

TEST_CASE("integrators: stage solve") {
  Setup s(16);
  StepperConfig cfg;
  cfg.eps = 0.1;

  SUBCASE("eps = 0 converges immediately") {
    CMat w = smooth_state(s, 4, 0.2);
    StepperConfig zero = cfg;
    zero.eps = 0.0;
    StageResult sr = isomp_stage_solve(s.lap, w, zero);
    CHECK(sr.iters == 1);
    CHECK((sr.w_mid - w).norm() <= 1e-14 * w.norm());
  }

  SUBCASE("single mode is steady") {
    Setup s8(8);
    CMat w = 0.8 * s8.basis.element(1, 0);
    StageResult sr = isomp_stage_solve(s8.lap, w, cfg);
    CHECK(sr.residual <= cfg.fp_tol);
    CMat next = isomp_step(s8.lap, w, cfg);
    CHECK((next - w).norm() <= 1e-12 * w.norm());
  }

  SUBCASE("random state at desk scale") {
    CMat w = smooth_state(s, 5, 1.3);
    StageResult sr = isomp_stage_solve(s.lap, w, cfg);
    CHECK(sr.iters <= 30);
    CHECK(sr.residual <= 1e-12);
    CHECK(skew_defect(sr.w_mid) == 0.0);
    CHECK(std::abs(sr.w_mid.trace()) <= 1e-13 * sr.w_mid.norm());
    // p_mid solves the stream equation of the converged stage.
    CHECK((laplacian_apply(s.lap, sr.p_mid) + sr.w_mid).norm() <=
          1e-11 * sr.w_mid.norm());
    // The stage equation holds on su(n) up to the fixed-point tolerance.
    const double a = 0.5 * cfg.eps;
    CMat res = sr.w_mid + a * (sr.w_mid * sr.p_mid - sr.p_mid * sr.w_mid) -
               a * a * (sr.p_mid * sr.w_mid * sr.p_mid) - w;
    trace_project(res);
    CHECK(res.norm() <= 20.0 * cfg.fp_tol * std::max(1.0, w.norm()));
  }

  SUBCASE("non-convergence is reported") {
    CMat w = smooth_state(s, 5, 2.1);
    StepperConfig tight;
    tight.eps = 0.2;
    tight.fp_maxit = 1;
    CHECK_THROWS_AS(isomp_stage_solve(s.lap, w, tight), std::runtime_error);
  }
}

TEST_CASE("integrators: step consistency with the flow") {
  Setup s(16);
  CMat w = smooth_state(s, 4, 0.6);
  CMat rhs = euler_zeitlin_rhs(s.lap, w);
  const double h = hbar(16);

  double prev = std::numeric_limits<double>::infinity();
  std::vector<double> defect;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    StepperConfig cfg;
    cfg.eps = eps;
    CMat next = isomp_step(s.lap, w, cfg);
    double d = ((next - w) / (eps * h) - rhs).norm();
    defect.push_back(d);
    CHECK(d < prev);
    prev = d;
  }
  // First-order defect in eps, and the right flow direction.
  CHECK(defect[0] / defect[1] >= 6.0);
  CHECK(defect[0] / defect[1] <= 14.0);
  CHECK(defect[1] / defect[2] >= 6.0);
  CHECK(defect[1] / defect[2] <= 14.0);
  CHECK(defect[0] <= 0.5 * rhs.norm());
}

TEST_CASE("integrators: exact conservation along trajectories") {
  Setup s(16);
  CMat w0 = smooth_state(s, 5, 0.8);
  RVec spec0 = sorted_spectrum(w0);
  double c2 = casimir(s.lap, w0, 2);
  double c3 = casimir(s.lap, w0, 3);
  double c4 = casimir(s.lap, w0, 4);

  StepperConfig cfg;
  cfg.eps = 0.1;
  CMat w = w0;
  for (int k = 0; k < 1000; ++k) w = isomp_step(s.lap, w, cfg);

  double scale = spec0.cwiseAbs().maxCoeff();
  CHECK((sorted_spectrum(w) - spec0).cwiseAbs().maxCoeff() <= 1e-10 * scale);
  CHECK(std::abs(casimir(s.lap, w, 2) - c2) <= 1e-10 * std::abs(c2));
  CHECK(std::abs(casimir(s.lap, w, 3) - c3) <= 1e-10 * std::abs(c3));
  CHECK(std::abs(casimir(s.lap, w, 4) - c4) <= 1e-10 * std::abs(c4));
}

TEST_CASE("integrators: second order accuracy") {
  Setup s(16);
  CMat w0 = smooth_state(s, 4, 0.5);
  const double tau = 8.0;  // total integration span in units of hbar

  auto run = [&](double eps, long steps) {
    StepperConfig cfg;
    cfg.eps = eps;
    return evolve(s.lap, w0, cfg, steps);
  };
  CMat ref = run(0.05 / 64.0, 10240);

  double e1 = (run(0.2, 40) - ref).norm();
  double e2 = (run(0.1, 80) - ref).norm();
  double e3 = (run(0.05, 160) - ref).norm();
  CHECK(e1 / e2 >= 3.2);
  CHECK(e1 / e2 <= 4.8);
  CHECK(e2 / e3 >= 3.2);
  CHECK(e2 / e3 <= 4.8);
  (void)tau;
}

TEST_CASE("integrators: reversibility") {
  Setup s(16);
  CMat w0 = smooth_state(s, 4, 1.9);

  StepperConfig fwd;
  fwd.eps = 0.1;
  StepperConfig bwd;
  bwd.eps = -0.1;
  CMat w = w0;
  for (int k = 0; k < 100; ++k) w = isomp_step(s.lap, w, fwd);
  for (int k = 0; k < 100; ++k) w = isomp_step(s.lap, w, bwd);
  CHECK((w - w0).norm() <= 1e-9 * std::max(1.0, w0.norm()));
}

TEST_CASE("integrators: hyperviscous variant") {
  Setup s(16);
  CMat w0 = smooth_state(s, 5, 0.35);

  SUBCASE("nu = 0 is bit-identical to the conservative step") {
    StepperConfig cfg;
    cfg.eps = 0.15;
    CMat a = isomp_step(s.lap, w0, cfg);
    CMat b = hyperviscous_step(s.lap, w0, cfg);
    CHECK((a.array() == b.array()).all());
  }

  SUBCASE("dissipative term carries no energy") {
    oracle::Rand r(77);
    CMat p = oracle::random_skew_traceless(12, 5);
    CMat w = oracle::random_skew_traceless(12, 6);
    p /= p.norm();
    w /= w.norm();
    CMat inner = p * w - w * p;
    CMat outer = p * inner - inner * p;
    CHECK(std::abs((p * outer).trace()) <= 1e-13);
  }

  SUBCASE("enstrophy decays monotonically") {
    StepperConfig cfg;
    cfg.eps = 0.1;
    cfg.nu = 1e-3;
    CMat w = w0;
    double c2 = casimir(s.lap, w, 2);
    for (int k = 0; k < 300; ++k) {
      w = hyperviscous_step(s.lap, w, cfg);
      double next = casimir(s.lap, w, 2);
      CHECK(next <= c2);
      c2 = next;
    }
  }

  SUBCASE("per-step energy change is third order in the step") {
    std::vector<double> d;
    for (double eps : {0.2, 0.1, 0.05}) {
      StepperConfig cfg;
      cfg.eps = eps;
      cfg.nu = 1e-4;
      CMat w1 = hyperviscous_step(s.lap, w0, cfg);
      d.push_back(std::abs(energy(s.lap, w1) - energy(s.lap, w0)));
    }
    double s1 = std::log2(d[0] / d[1]);
    double s2 = std::log2(d[1] / d[2]);
    CAPTURE(s1);
    CAPTURE(s2);
    CHECK(s1 >= 2.5);
    CHECK(s1 <= 3.6);
    CHECK(s2 >= 2.5);
    CHECK(s2 <= 3.6);
  }
}

TEST_CASE("integrators: transport formulation") {
  Setup s(8);
  CMat w0 = smooth_state(s, 3, 0.7);
  Eigen::SelfAdjointEigenSolver<CMat> es(CMat(cplx(0.0, 1.0) * w0));
  RVec lambdas = es.eigenvalues();
  CMat frame = es.eigenvectors();

  StepperConfig cfg;
  cfg.eps = 0.1;

  SUBCASE("eps = 0 leaves the frame in place") {
    StepperConfig zero = cfg;
    zero.eps = 0.0;
    CMat f = transport_step(s.lap, frame, lambdas, zero);
    CHECK((f - frame).norm() <= 1e-14);
  }

  SUBCASE("reconstruction tracks the matrix step") {
    CMat f = transport_step(s.lap, frame, lambdas, cfg);
    CVec d = cplx(0.0, -1.0) * lambdas.cast<cplx>();
    CMat w_rec = f * d.asDiagonal() * f.adjoint();
    CMat w_ref = isomp_step(s.lap, w0, cfg);
    CHECK((w_rec - w_ref).norm() <= 1e-12 * std::max(1.0, w_ref.norm()));
  }

  SUBCASE("unitarity holds over many steps") {
    CMat f = frame;
    StepInfo info;
    bool any_reset = false;
    for (int k = 0; k < 100; ++k) {
      f = transport_step(s.lap, f, lambdas, cfg, &info);
      any_reset = any_reset || info.reorthonormalized;
    }
    CHECK((f.adjoint() * f - CMat::Identity(8, 8)).norm() <= 1e-12);
    CHECK_FALSE(any_reset);
  }

  SUBCASE("degraded frames are re-orthonormalized") {
    CMat bad = frame;
    bad(0, 0) += cplx(3e-8, -2e-8);
    StepInfo info;
    CMat f = transport_step(s.lap, bad, lambdas, cfg, &info);
    CHECK(info.reorthonormalized);
    CHECK((f.adjoint() * f - CMat::Identity(8, 8)).norm() <= 1e-13);
  }

  CHECK_THROWS_AS(transport_step(s.lap, CMat::Identity(7, 7), lambdas, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(transport_step(s.lap, frame, RVec::Zero(3), cfg),
                  std::invalid_argument);
}

TEST_CASE("integrators: evolve loop") {
  Setup s(16);
  CMat w0 = smooth_state(s, 4, 1.5);
  StepperConfig cfg;
  cfg.eps = 0.2;

  SUBCASE("zero steps returns the input") {
    CMat w = evolve(s.lap, w0, cfg, 0);
    CHECK((w.array() == w0.array()).all());
  }

  SUBCASE("composition is bit-exact") {
    CMat whole = evolve(s.lap, w0, cfg, 100);
    CMat split = evolve(s.lap, evolve(s.lap, w0, cfg, 50), cfg, 50);
    CHECK((whole.array() == split.array()).all());
  }

  SUBCASE("observer cadence and payload") {
    std::vector<long> steps;
    std::vector<double> times;
    CMat last;
    CMat out = evolve(
        s.lap, w0, cfg, 10,
        [&](long k, double t, const CMat& w, const StepInfo& info) {
          steps.push_back(k);
          times.push_back(t);
          last = w;
          CHECK(info.fp_iters >= 1);
          CHECK(info.fp_residual <= cfg.fp_tol);
        },
        3, 2.5);
    CHECK(steps == std::vector<long>{3, 6, 9});
    const double dt = cfg.eps * hbar(16);
    for (size_t i = 0; i < steps.size(); ++i)
      CHECK(times[i] == doctest::Approx(2.5 + double(steps[i]) * dt).epsilon(1e-15));
    CMat resumed = evolve(s.lap, last, cfg, 1);
    CHECK((resumed.array() == out.array()).all());
  }

  SUBCASE("energy stays near its initial value") {
    double h0 = energy(s.lap, w0);
    CMat w = evolve(s.lap, w0, cfg, 2000);
    CHECK(std::abs(energy(s.lap, w) - h0) <= 1e-3 * std::abs(h0));
  }
}
