#include "proxnewton/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>

namespace proxnewton {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(std::string("AlgoParams: ") + msg);
}

}  // namespace

double AlgoParams::resolve_nu0(double r0_norm) const {
  if (!std::isnan(nu0)) return nu0;
  const double auto_nu0 = std::min(1e-2 / std::max(1.0, r0_norm), 1e-4);
  return std::min(std::max(auto_nu0, nu_min), nu_bar);
}

void AlgoParams::validate() const {
  require(c1 > 0.0 && c1 < 1.0, "require c1 in (0,1)");
  require(c2 > c1 && c2 < 1.0, "require c2 in (c1,1)");
  require(sigma1 > 0.0 && sigma1 < 1.0, "require sigma1 in (0,1)");
  require(sigma2 > 1.0, "require sigma2 > 1");
  require(eta > 0.0 && eta < 1.0, "require eta in (0,1)");
  require(theta > 0.0 && theta < 1.0, "require theta in (0,1)");
  require(alpha > 0.0 && alpha < 1.0, "require alpha in (0,1)");
  require(a >= 1.0, "require a >= 1");
  require(nu_min > 0.0, "require nu_min > 0");
  if (!std::isnan(nu0))
    require(nu_min <= nu0 && nu0 <= nu_bar,
            "require nu_min <= nu0 <= nu_bar");
  require(nu_bar >= nu_min, "require nu_bar >= nu_min");
  require(delta > 0.0 && delta <= 1.0, "require delta in (0,1]");
  require(tau >= delta, "require tau >= delta");
  require(p_min > 0.0 && p_min < 0.5, "require p_min in (0,1/2)");
  require(kappa > 1.0 + delta, "require kappa > 1 + delta");
  require(tol > 0.0, "require tol > 0");
  require(max_outer > 0, "require max_outer > 0");
  require(max_inner > 0, "require max_inner > 0");
  require(ls_shrink > 0.0 && ls_shrink < 1.0, "require ls_shrink in (0,1)");
  require(ls_rho > 0.0 && ls_rho < 1.0, "require ls_rho in (0,1)");
}

const char* to_string(IterClass c) {
  switch (c) {
    case IterClass::Unsuccessful: return "unsuccessful";
    case IterClass::Successful: return "successful";
    case IterClass::HighlySuccessful: return "highly-successful";
  }
  return "?";
}

const char* to_string(TermReason r) {
  switch (r) {
    case TermReason::ResidualTol: return "residual-tol";
    case TermReason::MaxIterations: return "max-iterations";
    case TermReason::StepUnderflow: return "step-underflow";
  }
  return "?";
}

namespace {

// Dense reduced Hessians pay off only while m * n^2 assembly stays cheap.
constexpr Eigen::Index kDenseHessianMaxCols = 600;

}  // namespace

GkHandle build_gk(const CompositeProblem& p, const PointEval& e, double mu,
                  double a, int power_iters, Vector& warm) {
  GkHandle h;
  h.mu = mu;
  Vector d;
  psi_hess_diag(p.smooth, e.u, d);
  const double lam_min = d.minCoeff();
  h.Lambda = a * std::max(0.0, -lam_min);
  auto weights = std::make_shared<Vector>(d.array() + h.Lambda);

  const Matrix* dense = p.op->dense();
  if (dense != nullptr && p.dim() <= kDenseHessianMaxCols) {
    auto hk = std::make_shared<Matrix>(dense->transpose() *
                                       weights->asDiagonal() * *dense);
    h.apply_H = [hk](const Vector& v, Vector& out) {
      out.noalias() = *hk * v;
    };
  } else {
    auto op = p.op;
    auto buf = std::make_shared<Vector>();
    h.apply_H = [op, weights, buf](const Vector& v, Vector& out) {
      op->apply(v, *buf);
      buf->array() *= weights->array();
      op->apply_adjoint(*buf, out);
    };
  }
  auto apply_h = h.apply_H;
  h.apply_G = [apply_h, mu](const Vector& v, Vector& out) {
    apply_h(v, out);
    out += mu * v;
  };

  SpectralNormEstimate est =
      symmetric_power_norm(h.apply_G, p.dim(), 1e-10, power_iters, warm);
  warm = est.eigvec;
  h.gnorm_est = std::max(est.value, mu);
  return h;
}

namespace {

enum class Mode { Reg, LineSearch, Hybrid };

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Reg: return "irpnm-reg";
    case Mode::LineSearch: return "irpnm-ls";
    case Mode::Hybrid: return "irpnm-reg-ls";
  }
  return "?";
}

/// Collects violations of the per-iteration laws instead of aborting, so an
/// acceptance run can report every failure at once. Comparisons carry a tiny
/// relative slack: the laws are exact in real arithmetic, not in floats.
struct InvariantMonitor {
  const AlgoParams& params;
  std::vector<std::string>& out;
  double min_r_seen;
  double last_K_rbar;
  static constexpr double kRelSlack = 1e-9;

  InvariantMonitor(const AlgoParams& p, std::vector<std::string>& sink,
                   double r0)
      : params(p), out(sink), min_r_seen(r0), last_K_rbar(r0) {}

  void violation(int k, const std::string& what) {
    out.push_back("k=" + std::to_string(k) + ": " + what);
  }

  void check_residual_law(int k, double r_norm, double rbar) {
    if (!(r_norm > params.eta * rbar * (1.0 - 1e-12)))
      violation(k, "||r|| > eta*rbar violated");
    if (!(rbar >= min_r_seen * (1.0 - 1e-12)))
      violation(k, "rbar >= min_j ||r(x^j)|| violated");
  }

  void check_step(int k, Mode mode, bool accepted_criterion, double pred,
                  double d_norm, double mu, double r_norm, double gnorm_est,
                  IterClass cls, bool moved_by_linesearch) {
    if (mode != Mode::Reg && mode != Mode::Hybrid) return;
    if (!accepted_criterion) return;  // subproblem hit its cap: laws need (10)
    const double quad = 0.5 * mu * d_norm * d_norm;
    if (!(pred >= quad * (1.0 - kRelSlack) - 1e-300))
      violation(k, "pred >= (mu/2)||d||^2 violated");
    // Residual sandwich, with 10% slack on the power-iteration norm.
    const double g_hi = 1.1 * gnorm_est;
    const double lo = mu * d_norm / ((1.0 + g_hi) * (1.0 + params.theta));
    const double hi = (1.0 + g_hi) * d_norm / (1.0 - params.theta);
    if (!(lo <= r_norm * (1.0 + kRelSlack)))
      violation(k, "residual sandwich lower bound violated");
    if (!(r_norm <= hi * (1.0 + kRelSlack)))
      violation(k, "residual sandwich upper bound violated");
    (void)cls;
    (void)moved_by_linesearch;
  }

  void check_mu_law(int k, Mode mode, IterClass cls, bool moved, double mu,
                    double mu_next, double sigma2) {
    if (mode != Mode::Reg) return;  // ls/hybrid may move x on a rejected step
    if (cls == IterClass::Unsuccessful) {
      if (std::abs(mu_next - sigma2 * mu) > 1e-12 * std::max(mu_next, 1e-300))
        violation(k, "unsuccessful step must set mu_{k+1} = sigma2*mu_k");
    } else {
      if (!(mu_next <= mu * (1.0 + 1e-12)))
        violation(k, "successful step must not increase mu");
    }
    (void)moved;
  }

  void check_rbar_update(int k, bool entered_K, double rbar_prev,
                         double rbar_next, double eta) {
    if (!(rbar_next <= rbar_prev * (1.0 + 1e-12)))
      violation(k, "rbar must be monotone non-increasing");
    if (entered_K) {
      if (!(rbar_next <= eta * last_K_rbar * (1.0 + 1e-12)))
        violation(k, "geometric decay over consecutive K members violated");
      last_K_rbar = rbar_next;
    }
  }

  void observe_r(double r_norm) { min_r_seen = std::min(min_r_seen, r_norm); }
};

struct Iterate {
  Vector x;
  PointEval eval;
  Vector grad;
  Vector r;
  double r_norm = 0.0;
  double F = 0.0;
};

Iterate make_iterate(const CompositeProblem& p, const Vector& x) {
  Iterate it;
  it.x = x;
  it.eval = evaluate(p, x);
  it.grad = f_grad(p, it.eval);
  it.r = residual_from_gradient(p.reg, x, it.grad);
  it.r_norm = it.r.norm();
  it.F = F_value(p, it.eval);
  return it;
}

void refresh_after_move(const CompositeProblem& p, Iterate& it, Vector x,
                        PointEval eval, double ared) {
  it.x = std::move(x);
  it.eval = std::move(eval);
  it.grad = f_grad(p, it.eval);
  it.r = residual_from_gradient(p.reg, it.x, it.grad);
  it.r_norm = it.r.norm();
  it.F -= ared;
}

RunResult finalize(const CompositeProblem& p, Iterate& s, RunResult out,
                   TermReason reason, Clock::time_point t0) {
  out.reason = reason;
  out.x = s.x;
  out.final_F = F_value(p, s.eval);
  out.final_r_norm = s.r_norm;
  out.outer_iters = static_cast<int>(out.trace.size());
  for (const auto& rec : out.trace) out.total_inner += rec.inner_iters;
  out.wall_ms = ms_since(t0);
  return out;
}

RunResult run_newton_engine(const CompositeProblem& p, const AlgoParams& params,
                            const Vector& x0, Mode mode) {
  params.validate();
  const auto t0 = Clock::now();
  RunResult out;
  out.solver = mode_name(mode);

  Iterate s = make_iterate(p, x0);
  if (!std::isfinite(s.F))
    throw std::invalid_argument("run: F(x0) is not finite");
  if (s.r_norm <= params.tol) return finalize(p, s, std::move(out),
                                              TermReason::ResidualTol, t0);

  double nu = params.resolve_nu0(s.r_norm);
  double rbar = s.r_norm;
  double mu = nu * std::pow(rbar, params.delta);

  InvariantMonitor monitor(params, out.invariant_violations, s.r_norm);
  const bool check = params.check_invariants;

  SubsolverOptions subopts;
  subopts.theta = params.theta;
  subopts.tau = params.tau;
  subopts.alpha = params.alpha;
  subopts.max_iters = params.max_inner;

  Vector gnorm_warm;

  // Armijo backtracking used by the ls and hybrid paths. Returns the accepted
  // step t, or 0 when no step passed within the backtrack budget. On success
  // fills the accepted point/eval/ared.
  auto try_linesearch = [&](const Vector& d, double d_sq,
                            const PointEval& eval_full, double ared_full,
                            Vector& x_acc, PointEval& eval_acc,
                            double& ared_acc) -> double {
    double t = 1.0;
    for (int back = 0; back <= params.ls_max_backtracks; ++back) {
      if (back == 0) {
        if (ared_full >= params.ls_rho * t * mu * d_sq) {
          x_acc = s.x + d;
          eval_acc = eval_full;
          ared_acc = ared_full;
          return t;
        }
      } else {
        Vector xt = s.x + t * d;
        PointEval et = evaluate(p, xt);
        const double ared_t = psi_value_diff(p.smooth, s.eval.u, et.u) +
                              phi_diff(p.reg, s.x, xt);
        if (ared_t >= params.ls_rho * t * mu * d_sq) {
          x_acc = std::move(xt);
          eval_acc = std::move(et);
          ared_acc = ared_t;
          return t;
        }
      }
      t *= params.ls_shrink;
    }
    return 0.0;
  };

  TermReason reason = TermReason::MaxIterations;
  for (int k = 0; k < params.max_outer; ++k) {
    const auto iter_t0 = Clock::now();
    if (check) monitor.check_residual_law(k, s.r_norm, rbar);

    GkHandle gk = build_gk(p, s.eval, mu, params.a, params.gnorm_power_iters,
                           gnorm_warm);

    SubproblemContext ctx;
    ctx.x_k = s.x;
    ctx.grad_k = s.grad;
    ctx.apply_G = gk.apply_G;
    ctx.apply_hess_f = [&p, &s](const Vector& v, Vector& out) {
      out = f_hessvec(p, s.eval, v);
    };
    ctx.mu_k = mu;
    ctx.gnorm_est = gk.gnorm_est;
    ctx.reg = p.reg;
    ctx.F_k = s.F;
    ctx.r_k_norm = s.r_norm;

    SubproblemResult sub = solve_subproblem(ctx, subopts);
    const bool criterion_ok = sub.status == SubStatus::Accepted;

    if (check && criterion_ok) {
      // Re-verify both halves of the acceptance test in a fresh pass.
      const double rk2 = subproblem_residual(ctx, sub.x_hat).norm();
      const double dec2 = quadratic_model_decrease(p.reg, s.x, s.grad,
                                                   gk.apply_G, sub.x_hat);
      const double bound = params.theta *
          std::min(s.r_norm, std::pow(s.r_norm, 1.0 + params.tau));
      const double dsq = (sub.x_hat - s.x).squaredNorm();
      if (!(rk2 <= bound * (1.0 + 1e-9)))
        monitor.violation(k, "re-verified ||R_k|| bound violated");
      if (!(dec2 >= 0.5 * params.alpha * mu * dsq * (1.0 - 1e-9) - 1e-300))
        monitor.violation(k, "re-verified model decrease bound violated");
      for (std::size_t i = 1; i < sub.restart_decreases.size(); ++i)
        if (sub.restart_decreases[i] <
            sub.restart_decreases[i - 1] * (1.0 - 1e-12) - 1e-300)
          monitor.violation(k, "inner model value increased across restarts");
    }

    const Vector d = sub.x_hat - s.x;
    const double d_norm = d.norm();
    PointEval eval_hat = evaluate(p, sub.x_hat);

    // pred uses the unregularized second-order model at x_k.
    const Vector hv = f_hessvec(p, s.eval, d);
    const double pred = phi_diff(p.reg, s.x, sub.x_hat) - s.grad.dot(d) -
                        0.5 * d.dot(hv);
    const double ared = psi_value_diff(p.smooth, s.eval.u, eval_hat.u) +
                        phi_diff(p.reg, s.x, sub.x_hat);
    const bool pred_usable = pred > 1e-300;
    const double rho = pred_usable
                           ? ared / pred
                           : std::numeric_limits<double>::quiet_NaN();

    const double pred_floor = params.p_min * (1.0 - params.theta) * d_norm *
                              std::min(s.r_norm, std::pow(s.r_norm, params.kappa));
    const bool reject = !criterion_ok || !pred_usable || pred <= pred_floor ||
                        rho <= params.c1;

    IterationRecord rec;
    rec.k = k;
    rec.pred = pred;
    rec.ared = ared;
    rec.rho = rho;
    rec.nu = nu;
    rec.mu = mu;
    rec.d_norm = d_norm;
    rec.inner_iters = sub.inner_iters;
    rec.step_t = 0.0;

    double nu_next = nu;
    bool moved_by_linesearch = false;

    if (mode == Mode::LineSearch) {
      Vector x_acc;
      PointEval eval_acc;
      double ared_acc = 0.0;
      const double t = d_norm > 0.0
                           ? try_linesearch(d, d_norm * d_norm, eval_hat, ared,
                                            x_acc, eval_acc, ared_acc)
                           : 0.0;
      if (t > 0.0) {
        rec.classification = IterClass::Successful;
        rec.step_t = t;
        refresh_after_move(p, s, std::move(x_acc), std::move(eval_acc),
                           ared_acc);
        // nu held at its current value on success.
      } else {
        rec.classification = IterClass::Unsuccessful;
        nu_next = params.sigma2 * nu;
      }
    } else if (reject) {
      rec.classification = IterClass::Unsuccessful;
      nu_next = params.sigma2 * nu;
      if (mode == Mode::Hybrid && d_norm > 0.0) {
        Vector x_acc;
        PointEval eval_acc;
        double ared_acc = 0.0;
        const double t = try_linesearch(d, d_norm * d_norm, eval_hat, ared,
                                        x_acc, eval_acc, ared_acc);
        if (t > 0.0) {
          rec.step_t = t;
          moved_by_linesearch = true;
          refresh_after_move(p, s, std::move(x_acc), std::move(eval_acc),
                             ared_acc);
        }
      }
    } else {
      rec.step_t = 1.0;
      if (rho <= params.c2) {
        rec.classification = IterClass::Successful;
        nu_next = std::min(nu, params.nu_bar);
      } else {
        rec.classification = IterClass::HighlySuccessful;
        nu_next = std::min(std::max(params.sigma1 * nu, params.nu_min),
                           params.nu_bar);
      }
      refresh_after_move(p, s, sub.x_hat, std::move(eval_hat), ared);
    }

    if (check) monitor.observe_r(s.r_norm);

    const bool entered_K = s.r_norm <= params.eta * rbar;
    const double rbar_next = entered_K ? s.r_norm : rbar;
    const double mu_next = nu_next * std::pow(rbar_next, params.delta);

    if (check) {
      monitor.check_step(k, mode, criterion_ok, pred, d_norm, mu,
                         ctx.r_k_norm, gk.gnorm_est, rec.classification,
                         moved_by_linesearch);
      if (!moved_by_linesearch)
        monitor.check_mu_law(k, mode, rec.classification, false, mu, mu_next,
                             params.sigma2);
      monitor.check_rbar_update(k, entered_K, rbar, rbar_next, params.eta);
      if (rec.classification != IterClass::Unsuccessful && !(ared > 0.0))
        monitor.violation(k, "accepted step must strictly decrease F");
    }

    rec.F = s.F;
    rec.r_norm = s.r_norm;
    rec.entered_K = entered_K;
    rec.wall_ms = ms_since(iter_t0);
    out.trace.push_back(rec);

    nu = nu_next;
    rbar = rbar_next;
    mu = mu_next;

    if (s.r_norm <= params.tol) {
      reason = TermReason::ResidualTol;
      break;
    }
  }

  return finalize(p, s, std::move(out), reason, t0);
}

}  // namespace

RunResult run_irpnm_reg(const CompositeProblem& p, const AlgoParams& params,
                        const Vector& x0) {
  return run_newton_engine(p, params, x0, Mode::Reg);
}

RunResult run_irpnm_ls(const CompositeProblem& p, const AlgoParams& params,
                       const Vector& x0) {
  return run_newton_engine(p, params, x0, Mode::LineSearch);
}

RunResult run_irpnm_reg_ls(const CompositeProblem& p, const AlgoParams& params,
                           const Vector& x0) {
  return run_newton_engine(p, params, x0, Mode::Hybrid);
}

RunResult run_fista(const CompositeProblem& p, const AlgoParams& params,
                    const Vector& x0) {
  params.validate();
  const auto t0 = Clock::now();
  RunResult out;
  out.solver = "fista";

  Iterate s = make_iterate(p, x0);
  if (!std::isfinite(s.F))
    throw std::invalid_argument("run_fista: F(x0) is not finite");
  if (s.r_norm <= params.tol)
    return finalize(p, s, std::move(out), TermReason::ResidualTol, t0);

  // Initial step from ||A||^2 * max psi'' at the start point.
  const double op_norm = spectral_norm(*p.op).value;
  Vector hd;
  psi_hess_diag(p.smooth, s.eval.u, hd);
  const double l0 = std::max(op_norm * op_norm * hd.maxCoeff(), 1e-12);
  double step = 1.0 / l0;
  const double step_cap = 1e6 / l0;

  Vector x_prev = s.x;
  double theta_m = 1.0;
  TermReason reason = TermReason::MaxIterations;

  for (int k = 0; k < params.max_fista; ++k) {
    const auto iter_t0 = Clock::now();
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta_m *
                                                               theta_m));
    double momentum = (theta_m - 1.0) / theta_next;

    Vector y = s.x + momentum * (s.x - x_prev);
    PointEval eval_y = (momentum == 0.0) ? s.eval : evaluate(p, y);
    Vector grad_y = (momentum == 0.0) ? s.grad : f_grad(p, eval_y);

    step = std::min(step * 2.0, step_cap);
    Vector z;
    PointEval eval_z;
    int backtracks = 0;
    bool restarted = false;
    while (true) {
      z = prox(p.reg, y - step * grad_y, step);
      eval_z = evaluate(p, z);
      const Vector dz = z - y;
      const double fdiff = psi_value_diff(p.smooth, eval_z.u, eval_y.u);
      if (fdiff <=
          grad_y.dot(dz) + dz.squaredNorm() / (2.0 * step) + 1e-300) {
        // Function-value restart: if the accelerated point increased F,
        // redo the step from the current iterate (guaranteed descent).
        const double dF = psi_value_diff(p.smooth, eval_z.u, s.eval.u) -
                          phi_diff(p.reg, s.x, z);
        if (dF > 0.0 && !restarted) {
          restarted = true;
          theta_m = 1.0;
          momentum = 0.0;
          y = s.x;
          eval_y = s.eval;
          grad_y = s.grad;
          continue;
        }
        break;
      }
      step *= 0.5;
      ++backtracks;
      if (step < 1e-18) {
        out.diagnostic = "fista: backtracking step underflow";
        return finalize(p, s, std::move(out), TermReason::StepUnderflow, t0);
      }
    }

    const double ared = psi_value_diff(p.smooth, s.eval.u, eval_z.u) +
                        phi_diff(p.reg, s.x, z);
    const double d_moved = (z - s.x).norm();
    x_prev = s.x;
    refresh_after_move(p, s, std::move(z), std::move(eval_z), ared);
    theta_m = restarted ? 1.0 : theta_next;

    IterationRecord rec;
    rec.k = k;
    rec.classification = IterClass::Successful;
    rec.F = s.F;
    rec.r_norm = s.r_norm;
    rec.pred = std::numeric_limits<double>::quiet_NaN();
    rec.ared = ared;
    rec.rho = std::numeric_limits<double>::quiet_NaN();
    rec.nu = std::numeric_limits<double>::quiet_NaN();
    rec.mu = std::numeric_limits<double>::quiet_NaN();
    rec.d_norm = d_moved;
    rec.inner_iters = backtracks;
    rec.entered_K = false;
    rec.step_t = step;
    rec.wall_ms = ms_since(iter_t0);
    out.trace.push_back(rec);

    if (s.r_norm <= params.tol) {
      reason = TermReason::ResidualTol;
      break;
    }
  }

  return finalize(p, s, std::move(out), reason, t0);
}

std::string trace_csv(const std::vector<IterationRecord>& trace,
                      bool include_timing) {
  std::string out =
      "k,class,F,r_norm,pred,ared,rho,nu,mu,d_norm,inner_iters,in_K,wall_ms\n";
  char buf[512];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof(buf),
                  "%d,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,"
                  "%d,%.3f\n",
                  r.k, to_string(r.classification), r.F, r.r_norm, r.pred,
                  r.ared, r.rho, r.nu, r.mu, r.d_norm, r.inner_iters,
                  r.entered_K ? 1 : 0, include_timing ? r.wall_ms : 0.0);
    out += buf;
  }
  return out;
}

}  // namespace proxnewton
