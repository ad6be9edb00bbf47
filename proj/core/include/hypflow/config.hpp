#pragma once

namespace hypflow {

// Numerical tolerances shared by every module. Defaults are the contract
// values; callers may tighten or loosen them per run.
struct Tolerances {
  double symmetry_rel = 1e-12;        // SpdForm symmetry check
  double lyapunov_residual = 1e-10;   // |A^T P + P A + I| <= tol * |P|
  double power_iteration_rel = 1e-10; // sup_operator_norm convergence
  int power_iteration_cap = 20000;
  double deflation_rel = 1e-13;       // QR deflation, relative to |A|
  int qr_iterations_per_n2 = 100;     // total QR sweeps <= 100 n^2
  int exp_max_squarings = 60;
  double invertibility_rel = 1e-12;   // |det g| > tol * scale
  double crossing_residual = 1e-10;   // |p_norm(e^{At}v) - 1|
  int crossing_doublings = 60;
  int crossing_iterations = 200;
  double span_residual = 1e-8;        // projection onto a realized algebra
  double jacobi_residual = 1e-12;
  double realization_residual = 1e-10;
  double semisimple_rel = 1e-9;
  double fd_step = 1e-5;              // centered differences in adjoint checks
};

const Tolerances& default_tolerances();

}  // namespace hypflow
