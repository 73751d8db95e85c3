#pragma once

#include <functional>
#include <vector>

#include "proxnewton/prox.hpp"

namespace proxnewton {

using SymProduct = std::function<void(const Vector&, Vector&)>;

/// Everything the inner solver needs about the outer iterate x_k. The
/// regularized matrix G_k = H_k + mu_k I enters only through apply_G; the
/// context is read-only during a solve, so distinct subproblems may run
/// concurrently.
struct SubproblemContext {
  Vector x_k;
  Vector grad_k;           // grad f(x_k)
  SymProduct apply_G;      // v -> (H_k + mu_k I) v, positive definite
  SymProduct apply_hess_f; // v -> hess f(x_k) v; optional, used by q_value
  double mu_k = 0.0;       // strong convexity constant of G_k
  double gnorm_est = 0.0;  // power-iteration estimate of ||G_k||
  Regularizer reg;
  double F_k = 0.0;        // F(x_k)
  double r_k_norm = 0.0;   // ||r(x_k)||
};

enum class SubStatus { Accepted, MaxIters };

struct SubproblemResult {
  Vector x_hat;
  int inner_iters = 0;
  double Rk_norm = 0.0;       // ||R_k(x_hat)||
  double decrease = 0.0;      // F(x_k) - qhat_k(x_hat)
  double qhat_value = 0.0;    // qhat_k(x_hat)
  bool decrease_ok = false;   // decrease >= (alpha mu_k / 2) ||d||^2
  SubStatus status = SubStatus::MaxIters;
  std::vector<double> restart_decreases;  // decrease at each restart boundary
};

struct SubsolverOptions {
  double theta = 0.9999;
  double tau = 0.45;
  double alpha = 0.99;
  int max_iters = 10000;
};

/// F(x_k) - [f(x_k) + g^T d + 1/2 d^T M d + phi(x)] with d = x - x_k, for any
/// symmetric model matrix M given as a product. Computed entirely in
/// d-scaled quantities (phi differenced term by term), so it stays accurate
/// when the decrease is many orders below F. With M = G_k this is the
/// decrease of the regularized model; with M = hess f(x_k) it is pred_k.
double quadratic_model_decrease(const Regularizer& reg, const Vector& x_k,
                                const Vector& grad_k, const SymProduct& apply_M,
                                const Vector& x);

/// qhat_k(x) = F(x_k) - quadratic_model_decrease(..., apply_G, x).
double qhat_value(const SubproblemContext& ctx, const Vector& x);

/// q_k(x): same model built on the raw Hessian of f instead of G_k (this is
/// what the predicted reduction uses). Requires ctx.apply_hess_f.
double q_value(const SubproblemContext& ctx, const Vector& x);

/// R_k(x) = x - prox_phi(x - grad_k - G_k (x - x_k)).
Vector subproblem_residual(const SubproblemContext& ctx, const Vector& x);

/// Accelerated proximal gradient on qhat_k, warm-started at x_k, with fixed
/// step 1/(gnorm_est * 1.01), strong-convexity momentum from mu_k, and a
/// monotone restart whenever the model value would increase. Stops at the
/// first iterate passing both halves of the acceptance test
///   ||R_k|| <= theta * min(||r||, ||r||^{1+tau})   and
///   F(x_k) - qhat_k >= (alpha mu_k / 2) ||d||^2,
/// or returns the best iterate found with status MaxIters.
SubproblemResult solve_subproblem(const SubproblemContext& ctx,
                                  const SubsolverOptions& opts);

}  // namespace proxnewton
