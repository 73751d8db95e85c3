#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "proxnewton/problem.hpp"

using namespace proxnewton;

TEST_CASE("logistic at zero: value, gradient, curvature") {
  const SmoothModel m = SmoothModel::logistic(4);
  const Vector u = Vector::Zero(4);
  CHECK(psi_value(m, u) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  Vector g;
  psi_grad(m, u, g);
  for (int i = 0; i < 4; ++i)
    CHECK(g[i] == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(psi_hess_min_eig(m, u) == doctest::Approx(0.0625).epsilon(1e-15));
}

TEST_CASE("logistic extremes stay finite") {
  const SmoothModel m = SmoothModel::logistic(2);
  Vector u(2);
  u << -800.0, 800.0;
  const double v = psi_value(m, u);
  CHECK(std::isfinite(v));
  CHECK(v == doctest::Approx(400.0).epsilon(1e-12));  // (1/m)*(-u_0)
  Vector g, h;
  psi_grad(m, u, g);
  psi_hess_diag(m, u, h);
  CHECK(g[0] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::abs(g[1]) <= 1e-300);
  CHECK(h.allFinite());
}

TEST_CASE("student-t at zero and its nonconvex curvature") {
  const SmoothModel m = SmoothModel::student_t(0.25);
  const Vector u = Vector::Zero(3);
  CHECK(psi_value(m, u) == 0.0);
  Vector g;
  psi_grad(m, u, g);
  CHECK(g.norm() == 0.0);
  Vector h;
  psi_hess_diag(m, u, h);
  CHECK(h[0] == doctest::Approx(8.0).epsilon(1e-15));  // 2/nu

  Vector u2(3);
  u2 << 0.1, 1.0, -2.0;
  double want = std::numeric_limits<double>::infinity();
  for (double ui : {0.1, 1.0, -2.0}) {
    const double q = 0.25 + ui * ui;
    want = std::min(want, 2.0 * (0.25 - ui * ui) / (q * q));
  }
  CHECK(psi_hess_min_eig(m, u2) == doctest::Approx(want).epsilon(1e-15));
  CHECK(psi_hess_min_eig(m, u2) < 0.0);
}

TEST_CASE("psi gradients match central differences for all models") {
  Rng rng(21);
  const std::vector<SmoothModel> models = {
      SmoothModel::least_squares(), SmoothModel::logistic(10),
      SmoothModel::student_t(0.25)};
  for (const auto& m : models) {
    for (int t = 0; t < 20; ++t) {
      const Vector u = oracles::random_normal(rng, 10);
      Vector g;
      psi_grad(m, u, g);
      const Vector fd = oracles::fd_gradient(
          [&](const Vector& w) { return psi_value(m, w); }, u, 1e-6);
      CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
  }
}

TEST_CASE("least-squares composite with identity operator is the quadratic") {
  const Eigen::Index n = 6;
  Rng rng(22);
  const Vector c = oracles::random_normal(rng, n);
  CompositeProblem p;
  p.smooth = SmoothModel::least_squares();
  p.op = std::make_shared<IdentityOperator>(n);
  p.shift = c;
  p.reg = Regularizer::zero();

  const Vector x = oracles::random_normal(rng, n);
  const PointEval e = evaluate(p, x);
  CHECK(f_value(p, e) ==
        doctest::Approx(0.5 * (x - c).squaredNorm()).epsilon(1e-14));
  CHECK((f_grad(p, e) - (x - c)).norm() <= 1e-14);
  const Vector v = oracles::random_normal(rng, n);
  CHECK((f_hessvec(p, e, v) - v).norm() <= 1e-14);
}

namespace {

CompositeProblem random_logistic_problem(Rng& rng, Eigen::Index m,
                                         Eigen::Index n) {
  CompositeProblem p;
  p.smooth = SmoothModel::logistic(static_cast<int>(m));
  p.op = std::make_shared<DenseOperator>(oracles::random_normal_matrix(rng, m, n));
  p.shift = oracles::random_normal(rng, m);
  p.reg = Regularizer::zero();
  return p;
}

}  // namespace

TEST_CASE("composite gradient and hessian-vector match finite differences") {
  Rng rng(23);
  CompositeProblem p = random_logistic_problem(rng, 50, 20);
  const Vector x = oracles::random_normal(rng, 20);
  const PointEval e = evaluate(p, x);

  const Vector g = f_grad(p, e);
  const Vector fd = oracles::fd_gradient(
      [&](const Vector& w) { return f_value(p, evaluate(p, w)); }, x, 1e-6);
  CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));

  const Vector v = oracles::random_normal(rng, 20);
  const Vector hv = f_hessvec(p, e, v);
  const Vector hv_fd = oracles::fd_jacobian_apply(
      [&](const Vector& w) { return f_grad(p, evaluate(p, w)); }, x, v, 1e-6);
  CHECK((hv - hv_fd).norm() <= 1e-5 * std::max(1.0, hv.norm()));
}

TEST_CASE("hessian products are symmetric") {
  Rng rng(24);
  CompositeProblem p = random_logistic_problem(rng, 30, 12);
  const Vector x = oracles::random_normal(rng, 12);
  const PointEval e = evaluate(p, x);
  for (int t = 0; t < 20; ++t) {
    const Vector v = oracles::random_normal(rng, 12);
    const Vector w = oracles::random_normal(rng, 12);
    const double lhs = f_hessvec(p, e, v).dot(w);
    const double rhs = v.dot(f_hessvec(p, e, w));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("convexified curvature A^T (psi'' + Lambda) A is PSD") {
  Rng rng(25);
  const Eigen::Index m = 25, n = 10;
  CompositeProblem p;
  p.smooth = SmoothModel::student_t(0.25);
  p.op = std::make_shared<DenseOperator>(oracles::random_normal_matrix(rng, m, n));
  p.shift = Vector::Zero(m);
  p.reg = Regularizer::zero();

  const Vector x = 0.8 * oracles::random_normal(rng, n);
  const PointEval e = evaluate(p, x);
  const double lam_min = psi_hess_min_eig(p.smooth, e.u);
  REQUIRE(lam_min < 0.0);  // otherwise the probe is vacuous
  const double Lambda = std::max(0.0, -lam_min);

  Vector diag;
  psi_hess_diag(p.smooth, e.u, diag);
  for (int t = 0; t < 50; ++t) {
    const Vector d = oracles::random_normal(rng, n);
    const Vector ad = p.op->apply(d);
    const double quad =
        ad.dot((diag.array() + Lambda).matrix().asDiagonal() * ad);
    CHECK(quad >= -1e-10 * d.squaredNorm());
  }
}

TEST_CASE("compensated psi difference tracks the true difference") {
  const SmoothModel m = SmoothModel::student_t(1.0);
  Rng rng(26);
  const Vector u = oracles::random_normal(rng, 40);
  Vector v = u;
  v[7] += 1e-9;
  const double d = psi_value_diff(m, u, v);
  // direct subtraction loses digits; the per-term form must stay close to
  // the analytic directional value
  Vector g;
  psi_grad(m, v, g);
  CHECK(d == doctest::Approx(-g[7] * 1e-9).epsilon(1e-4));
}
