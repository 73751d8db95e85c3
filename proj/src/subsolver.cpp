#include "proxnewton/subsolver.hpp"

#include <cmath>
#include <stdexcept>

namespace proxnewton {

double quadratic_model_decrease(const Regularizer& reg, const Vector& x_k,
                                const Vector& grad_k, const SymProduct& apply_M,
                                const Vector& x) {
  const Vector d = x - x_k;
  Vector md;
  apply_M(d, md);
  return phi_diff(reg, x_k, x) - grad_k.dot(d) - 0.5 * d.dot(md);
}

double qhat_value(const SubproblemContext& ctx, const Vector& x) {
  return ctx.F_k -
         quadratic_model_decrease(ctx.reg, ctx.x_k, ctx.grad_k, ctx.apply_G, x);
}

double q_value(const SubproblemContext& ctx, const Vector& x) {
  if (!ctx.apply_hess_f)
    throw std::invalid_argument("q_value: context lacks a hess f product");
  return ctx.F_k - quadratic_model_decrease(ctx.reg, ctx.x_k, ctx.grad_k,
                                            ctx.apply_hess_f, x);
}

Vector subproblem_residual(const SubproblemContext& ctx, const Vector& x) {
  Vector gd;
  ctx.apply_G(x - ctx.x_k, gd);
  gd += ctx.grad_k;
  return residual_from_gradient(ctx.reg, x, gd);
}

namespace {

struct Candidate {
  Vector x;
  Vector g_model;   // grad_k + G (x - x_k)
  double decrease;  // F_k - qhat(x)
  double d_sq;      // ||x - x_k||^2
};

}  // namespace

SubproblemResult solve_subproblem(const SubproblemContext& ctx,
                                  const SubsolverOptions& opts) {
  if (ctx.mu_k <= 0.0)
    throw std::invalid_argument("solve_subproblem: mu_k must be > 0");
  const double lip = std::max(ctx.gnorm_est, ctx.mu_k) * (1.0 + 1e-2);
  const double step = 1.0 / lip;
  const double sq = std::sqrt(ctx.mu_k / lip);
  const double beta = (1.0 - sq) / (1.0 + sq);
  const double r_bound =
      opts.theta * std::min(ctx.r_k_norm, std::pow(ctx.r_k_norm, 1.0 + opts.tau));

  SubproblemResult res;

  // Evaluates decrease / model gradient at z in one G-product.
  auto make_candidate = [&](Vector z) {
    Candidate c;
    const Vector d = z - ctx.x_k;
    Vector gd;
    ctx.apply_G(d, gd);
    c.d_sq = d.squaredNorm();
    c.decrease = phi_diff(ctx.reg, ctx.x_k, z) - ctx.grad_k.dot(d) -
                 0.5 * d.dot(gd);
    c.g_model = ctx.grad_k + gd;
    c.x = std::move(z);
    return c;
  };

  auto prox_grad_from = [&](const Candidate& c) {
    return prox(ctx.reg, c.x - step * c.g_model, step);
  };

  Candidate cur;
  cur.x = ctx.x_k;
  cur.g_model = ctx.grad_k;
  cur.decrease = 0.0;
  cur.d_sq = 0.0;

  // Momentum point and its model gradient. Since the model gradient is
  // affine, g(y) for y = z + beta (z - x_prev) is the same combination of
  // the already-computed gradients at z and x_prev; no extra G-product.
  Vector y = ctx.x_k;
  Vector g_model_y = ctx.grad_k;
  Candidate best = cur;

  for (int it = 1; it <= opts.max_iters; ++it) {
    Candidate next =
        make_candidate(prox(ctx.reg, y - step * g_model_y, step));

    // Monotone safeguard: a prox-gradient step from the current point cannot
    // increase the model (step < 1/L), so restart momentum there if the
    // accelerated step did.
    if (next.decrease < cur.decrease) {
      res.restart_decreases.push_back(cur.decrease);
      next = make_candidate(prox_grad_from(cur));
      y = next.x;
      g_model_y = next.g_model;
    } else {
      y = next.x + beta * (next.x - cur.x);
      g_model_y = (1.0 + beta) * next.g_model - beta * cur.g_model;
    }

    res.inner_iters = it;

    const Vector rk = residual_from_gradient(ctx.reg, next.x, next.g_model);
    const double rk_norm = rk.norm();
    const bool dec_ok =
        next.decrease >= 0.5 * opts.alpha * ctx.mu_k * next.d_sq;
    if (rk_norm <= r_bound && dec_ok) {
      res.x_hat = next.x;
      res.Rk_norm = rk_norm;
      res.decrease = next.decrease;
      res.qhat_value = ctx.F_k - next.decrease;
      res.decrease_ok = true;
      res.status = SubStatus::Accepted;
      return res;
    }

    if (next.decrease > best.decrease) best = next;
    cur = std::move(next);
  }

  Vector gd_best;
  ctx.apply_G(best.x - ctx.x_k, gd_best);
  res.x_hat = best.x;
  res.Rk_norm =
      residual_from_gradient(ctx.reg, best.x, ctx.grad_k + gd_best).norm();
  res.decrease = best.decrease;
  res.qhat_value = ctx.F_k - best.decrease;
  res.decrease_ok = best.decrease >= 0.5 * opts.alpha * ctx.mu_k * best.d_sq;
  res.status = SubStatus::MaxIters;
  return res;
}

}  // namespace proxnewton
