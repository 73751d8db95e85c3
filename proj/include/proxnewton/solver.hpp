#pragma once

#include <limits>
#include <string>
#include <vector>

#include "proxnewton/problem.hpp"
#include "proxnewton/subsolver.hpp"

namespace proxnewton {

/// Every named constant of the outer method. Ranges are validated on every
/// run; validate() names the violated constraint.
struct AlgoParams {
  double c1 = 1e-4;        // in (0,1)
  double c2 = 0.9;         // in (c1,1)
  double sigma1 = 0.5;     // in (0,1)
  double sigma2 = 4.0;     // > 1
  double eta = 0.9999;     // in (0,1)
  double theta = 0.9999;   // in (0,1)
  double alpha = 0.99;     // in (0,1)
  double a = 1.0;          // >= 1
  double nu_min = 1e-8;    // 0 < nu_min <= nu0 <= nu_bar
  double nu0 = std::numeric_limits<double>::quiet_NaN();  // NaN: auto rule
  double nu_bar = 100.0;
  double delta = 0.45;     // in (0,1]
  double tau = 0.45;       // >= delta
  double p_min = 1e-8;     // in (0,1/2)
  double kappa = 2.0;      // > 1 + delta
  double tol = 1e-5;       // stopping threshold on ||r||
  int max_outer = 200;
  int max_inner = 10000;
  int max_fista = 200000;
  int gnorm_power_iters = 20;

  // Armijo acceptance used by the line-search and hybrid variants.
  double ls_shrink = 0.5;
  double ls_rho = 1e-4;
  int ls_max_backtracks = 50;

  bool check_invariants = false;  // per-iteration assertion monitor
  bool trace_timing = false;      // measured wall_ms in the trace CSV

  /// Resolves the automatic nu0 rule min(1e-2 / max(1, r0), 1e-4), clamped
  /// into [nu_min, nu_bar].
  double resolve_nu0(double r0_norm) const;

  void validate() const;
};

enum class IterClass { Unsuccessful, Successful, HighlySuccessful };

const char* to_string(IterClass c);

/// One outer-iteration trace row. F and r_norm describe the iterate at the
/// END of the iteration; nu and mu are the values the iteration ran with, so
/// consecutive rows expose the update laws directly.
struct IterationRecord {
  int k = 0;
  IterClass classification = IterClass::Unsuccessful;
  double F = 0.0;
  double r_norm = 0.0;
  double pred = 0.0;
  double ared = 0.0;
  double rho = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  double d_norm = 0.0;
  int inner_iters = 0;
  bool entered_K = false;
  double step_t = 1.0;  // line-search variants; FISTA stores its step size
  double wall_ms = 0.0;
};

enum class TermReason { ResidualTol, MaxIterations, StepUnderflow };

const char* to_string(TermReason r);

struct RunResult {
  Vector x;
  std::vector<IterationRecord> trace;
  TermReason reason = TermReason::MaxIterations;
  std::string solver;
  double final_F = 0.0;
  double final_r_norm = 0.0;
  int outer_iters = 0;
  long long total_inner = 0;
  double wall_ms = 0.0;
  std::vector<std::string> invariant_violations;
  std::string diagnostic;
};

/// H_k = hess f(x_k) + Lambda_k A^T A together with the mu-shifted product
/// and the power-iteration estimate of ||G_k||.
struct GkHandle {
  double Lambda = 0.0;
  double mu = 0.0;
  SymProduct apply_H;
  SymProduct apply_G;
  double gnorm_est = 0.0;
};

/// Builds H_k/G_k products at the cached point. Lambda_k is computed exactly
/// from the separable model; a dense reduced Hessian is assembled when the
/// operator is dense and small enough that explicit n x n products win.
/// `warm` carries the power-iteration start vector between outer iterations.
GkHandle build_gk(const CompositeProblem& p, const PointEval& e, double mu,
                  double a, int power_iters, Vector& warm);

/// Regularization-controlled inexact proximal Newton method: the subproblem
/// step is accepted or rejected on the pred/ared ratio, and nu (hence
/// mu = nu * rbar^delta) is inflated, capped or shrunk accordingly.
RunResult run_irpnm_reg(const CompositeProblem& p, const AlgoParams& params,
                        const Vector& x0);

/// Line-search variant: every subproblem step is subjected to Armijo
/// backtracking F(x + t d) <= F(x) - ls_rho * t * mu * ||d||^2, nu stays at
/// nu0 unless a step fails entirely.
RunResult run_irpnm_ls(const CompositeProblem& p, const AlgoParams& params,
                       const Vector& x0);

/// Hybrid: runs like run_irpnm_reg but tries the Armijo acceptance before
/// discarding an unsuccessful step.
RunResult run_irpnm_reg_ls(const CompositeProblem& p, const AlgoParams& params,
                           const Vector& x0);

/// Monotone FISTA baseline: proximal gradient with Nesterov momentum,
/// backtracking step size and function-value restart, stopped on the same
/// ||r(x)|| <= tol rule.
RunResult run_fista(const CompositeProblem& p, const AlgoParams& params,
                    const Vector& x0);

/// CSV serialization, header
/// k,class,F,r_norm,pred,ared,rho,nu,mu,d_norm,inner_iters,in_K,wall_ms.
/// Unless include_timing is set the wall column is written as 0 so that
/// repeated runs produce byte-identical files.
std::string trace_csv(const std::vector<IterationRecord>& trace,
                      bool include_timing = false);

}  // namespace proxnewton
