#pragma once

#include <Eigen/Core>

#include "proxnewton/transforms.hpp"

namespace proxnewton {

enum class SmoothKind { LeastSquares, Logistic, StudentT };

/// Separable smooth loss psi applied to the fitted residual u = Ax - b.
/// All three kinds are twice continuously differentiable on all of R^m with
/// a diagonal Hessian, so the smallest Hessian eigenvalue is exact and cheap.
struct SmoothModel {
  SmoothKind kind = SmoothKind::LeastSquares;
  int sample_count = 1;    // logistic: m in the 1/m scaling
  double t_scale = 1.0;    // student-t: nu in log(1 + u^2/nu)

  static SmoothModel least_squares() { return {SmoothKind::LeastSquares}; }
  static SmoothModel logistic(int m) {
    return {SmoothKind::Logistic, m};
  }
  static SmoothModel student_t(double nu) {
    return {SmoothKind::StudentT, 1, nu};
  }
};

double psi_value(const SmoothModel& model, const Vector& u);
void psi_grad(const SmoothModel& model, const Vector& u, Vector& g);
void psi_hess_diag(const SmoothModel& model, const Vector& u, Vector& h);

/// Exact lambda_min of the (diagonal) Hessian of psi at u. Positive for
/// least-squares and logistic, possibly negative for Student's-t.
double psi_hess_min_eig(const SmoothModel& model, const Vector& u);

/// psi(u) - psi(v), accumulated per coordinate with compensated summation.
/// Near a minimizer this is far more accurate than subtracting two totals.
double psi_value_diff(const SmoothModel& model, const Vector& u,
                      const Vector& v);

}  // namespace proxnewton
