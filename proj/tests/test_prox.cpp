#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "proxnewton/problem.hpp"
#include "proxnewton/subsolver.hpp"

using namespace proxnewton;

TEST_CASE("zero regularizer prox is the identity") {
  Rng rng(31);
  const Vector v = oracles::random_normal(rng, 8);
  CHECK(prox(Regularizer::zero(), v, 2.5) == v);
  CHECK_THROWS_AS(prox(Regularizer::zero(), v, 0.0), std::invalid_argument);
}

TEST_CASE("l1 prox: hand case and grid-search oracle") {
  const Regularizer reg = Regularizer::l1(1.0);
  Vector v(3);
  v << 3.0, -0.5, 1.0;
  const Vector p = prox(reg, v, 1.0);
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == 0.0);
  for (int i = 0; i < 3; ++i) {
    const double want = oracles::prox_l1_grid_oracle(v[i], 1.0);
    CHECK(std::abs(p[i] - want) <= 1e-3);
  }
  // exact zero on the threshold boundary
  Vector b(1);
  b << 1.0;
  CHECK(prox(reg, b, 1.0)[0] == 0.0);
}

TEST_CASE("weighted l1 prox exempts zero-weight coordinates") {
  Vector w(3);
  w << 1.0, 0.0, 2.0;
  const Regularizer reg = Regularizer::l1(0.5, w);
  Vector v(3);
  v << 1.0, 1.0, 1.0;
  const Vector p = prox(reg, v, 1.0);
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(1.0));  // untouched
  CHECK(p[2] == 0.0);
}

TEST_CASE("group prox: block shrinkage against radial grid search") {
  std::vector<Group> groups(1);
  groups[0].indices = {0, 1, 2, 3};
  const Regularizer reg = Regularizer::group_l2(1.0, std::move(groups));
  Rng rng(32);
  Vector v = oracles::random_normal(rng, 4);
  v *= 4.0 / v.norm();
  const Vector p = prox(reg, v, 1.0);
  CHECK((p - 0.75 * v).norm() <= 1e-12);

  // radial grid: minimizer of t*||s v|| + 1/2 ||s v - v||^2 over scalings s
  double best_s = 0.0, best = std::numeric_limits<double>::infinity();
  for (double s = 0.0; s <= 1.5; s += 1e-5) {
    const double val = s * v.norm() + 0.5 * (1.0 - s) * (1.0 - s) *
                                          v.squaredNorm();
    if (val < best) {
      best = val;
      best_s = s;
    }
  }
  CHECK(std::abs(best_s - 0.75) <= 1e-4);

  // zero block stays zero
  Vector z = Vector::Zero(4);
  CHECK(prox(reg, z, 1.0).norm() == 0.0);
}

TEST_CASE("prox is nonexpansive") {
  Rng rng(33);
  std::vector<Group> groups(2);
  groups[0].indices = {0, 1, 2};
  groups[1].indices = {3, 4, 5, 6, 7};
  const std::vector<Regularizer> regs = {
      Regularizer::l1(0.7), Regularizer::group_l2(0.9, groups),
      Regularizer::zero()};
  for (const auto& reg : regs) {
    for (int t = 0; t < 100; ++t) {
      const Vector v1 = 3.0 * oracles::random_normal(rng, 8);
      const Vector v2 = 3.0 * oracles::random_normal(rng, 8);
      const double lhs = (prox(reg, v1, 0.8) - prox(reg, v2, 0.8)).norm();
      CHECK(lhs <= (v1 - v2).norm() * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("prox optimality: v - prox(v) lies in t * subdifferential") {
  Rng rng(34);
  SUBCASE("l1") {
    Vector w(6);
    w << 1, 1, 0, 2, 1, 1;
    const Regularizer reg = Regularizer::l1(0.6, w);
    const double t = 1.3;
    for (int trial = 0; trial < 50; ++trial) {
      const Vector v = 2.0 * oracles::random_normal(rng, 6);
      const Vector p = prox(reg, v, t);
      for (int i = 0; i < 6; ++i) {
        const double resid = v[i] - p[i];
        const double bound = t * reg.lambda * w[i];
        if (p[i] != 0.0) {
          CHECK(resid == doctest::Approx(bound * (p[i] > 0 ? 1.0 : -1.0))
                             .epsilon(1e-12));
        } else {
          CHECK(std::abs(resid) <= bound + 1e-12);
        }
      }
    }
  }
  SUBCASE("group-l2") {
    std::vector<Group> groups(2);
    groups[0].indices = {0, 1, 2};
    groups[1].indices = {3, 4};
    const Regularizer reg = Regularizer::group_l2(0.8, groups);
    const double t = 0.9;
    for (int trial = 0; trial < 50; ++trial) {
      const Vector v = oracles::random_normal(rng, 5);
      const Vector p = prox(reg, v, t);
      for (const auto& g : reg.groups) {
        Vector vg(g.indices.size()), pg(g.indices.size());
        for (std::size_t i = 0; i < g.indices.size(); ++i) {
          vg[i] = v[g.indices[i]];
          pg[i] = p[g.indices[i]];
        }
        const double bound = t * reg.lambda * g.weight;
        if (pg.norm() > 0.0) {
          const Vector want = bound * pg / pg.norm();
          CHECK((vg - pg - want).norm() <= 1e-12);
        } else {
          CHECK(vg.norm() <= bound + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("group validation rejects overlaps and enforces coverage") {
  std::vector<Group> overlapping(2);
  overlapping[0].indices = {0, 1};
  overlapping[1].indices = {1, 2};
  const Regularizer bad = Regularizer::group_l2(1.0, overlapping);
  CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);

  std::vector<Group> partial(1);
  partial[0].indices = {0, 1};
  const Regularizer ok = Regularizer::group_l2(1.0, partial);
  CHECK_NOTHROW(ok.validate(3));                 // cover not requested
  CHECK_THROWS_AS(ok.validate(3, 3), std::invalid_argument);
  CHECK_NOTHROW(ok.validate(3, 2));              // covers {0,1}
}

TEST_CASE("residual mapping at and away from stationarity") {
  const Eigen::Index n = 4;
  Rng rng(35);
  const Vector c = oracles::random_normal(rng, n);
  CompositeProblem p;
  p.smooth = SmoothModel::least_squares();
  p.op = std::make_shared<IdentityOperator>(n);
  p.shift = c;
  p.reg = Regularizer::zero();
  CHECK(residual(p, evaluate(p, c)).norm() == 0.0);

  // f = 1/2 ||x||^2, phi = |.|_1: the origin is stationary
  CompositeProblem q = p;
  q.shift = Vector::Zero(n);
  q.reg = Regularizer::l1(1.0);
  CHECK(residual(q, evaluate(q, Vector::Zero(n))).norm() == 0.0);

  // 1-D: x=3 gives r = 3 - prox(3 - 3) = 3
  CompositeProblem one;
  one.smooth = SmoothModel::least_squares();
  one.op = std::make_shared<IdentityOperator>(1);
  one.shift = Vector::Zero(1);
  one.reg = Regularizer::l1(1.0);
  Vector x3(1);
  x3 << 3.0;
  CHECK(residual(one, evaluate(one, x3))[0] == doctest::Approx(3.0));
}

TEST_CASE("residual is locally Lipschitz in the iterate") {
  Rng rng(36);
  const Eigen::Index m = 20, n = 8;
  CompositeProblem p;
  p.smooth = SmoothModel::logistic(static_cast<int>(m));
  p.op = std::make_shared<DenseOperator>(oracles::random_normal_matrix(rng, m, n));
  p.shift = oracles::random_normal(rng, m);
  p.reg = Regularizer::l1(0.05);

  const Vector x = oracles::random_normal(rng, n);
  const PointEval e = evaluate(p, x);
  const Vector r0 = residual(p, e);
  // local gradient Lipschitz estimate from the Hessian at x
  Vector diag;
  psi_hess_diag(p.smooth, e.u, diag);
  const Matrix& a = *p.op->dense();
  const double lhat = oracles::svd_spectral_norm(
      Matrix(a.transpose() * diag.asDiagonal() * a));

  for (int t = 0; t < 20; ++t) {
    Vector dx = oracles::random_normal(rng, n);
    dx *= 1e-8 / dx.norm();
    const Vector r1 = residual(p, evaluate(p, x + dx));
    CHECK((r1 - r0).norm() <= (2.0 + lhat) * 1e-8);
  }
}

TEST_CASE("subproblem residual: exact solution, warm start, zero phi") {
  Rng rng(37);
  const Eigen::Index n = 8;
  Matrix q = oracles::random_normal_matrix(rng, n, n);
  Matrix G = q.transpose() * q + 0.5 * Matrix::Identity(n, n);
  const Vector grad = oracles::random_normal(rng, n);
  const Vector x_k = oracles::random_normal(rng, n);
  const Regularizer reg = Regularizer::l1(0.4);

  SubproblemContext ctx;
  ctx.x_k = x_k;
  ctx.grad_k = grad;
  ctx.apply_G = [&](const Vector& v, Vector& out) { out.noalias() = G * v; };
  ctx.mu_k = 0.5;
  ctx.reg = reg;

  // At the coordinate-descent minimizer the residual vanishes.
  const Vector x_star = oracles::subproblem_oracle(G, grad, x_k, reg);
  CHECK(subproblem_residual(ctx, x_star).norm() <= 1e-10);

  // At x_k the subproblem residual equals the prox-gradient residual.
  const Vector rk = subproblem_residual(ctx, x_k);
  const Vector r = residual_from_gradient(reg, x_k, grad);
  CHECK((rk - r).norm() == 0.0);

  // With phi = 0 it reduces to the linear-system residual.
  SubproblemContext ctx0 = ctx;
  ctx0.reg = Regularizer::zero();
  const Vector x = oracles::random_normal(rng, n);
  const Vector want = grad + G * (x - x_k);
  CHECK((subproblem_residual(ctx0, x) - want).norm() <= 1e-12);
}
