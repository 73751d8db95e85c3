#pragma once

#include <memory>
#include <string>

#include "proxnewton/linops.hpp"
#include "proxnewton/prox.hpp"
#include "proxnewton/smooth.hpp"

namespace proxnewton {

struct ProblemMeta {
  std::string family;      // generator family, empty for hand-built problems
  std::uint64_t seed = 0;
  std::string note;
};

/// F(x) = psi(Ax - b) + phi(x): the sole input to every solver.
struct CompositeProblem {
  SmoothModel smooth;
  std::shared_ptr<const LinearOperator> op;
  Vector shift;  // b
  Regularizer reg;
  ProblemMeta meta;

  Eigen::Index dim() const { return op->cols(); }
};

/// Evaluation cache for one point: the fitted residual u = Ax - b is computed
/// once and shared by value, gradient and Hessian products. Caller-owned, one
/// per worker.
struct PointEval {
  Vector x;
  Vector u;  // Ax - b
};

PointEval evaluate(const CompositeProblem& p, const Vector& x);

double f_value(const CompositeProblem& p, const PointEval& e);
Vector f_grad(const CompositeProblem& p, const PointEval& e);

/// A^T (diag(psi''(u)) A v): Hessian-vector product of f at the cached point.
Vector f_hessvec(const CompositeProblem& p, const PointEval& e,
                 const Vector& v);

double F_value(const CompositeProblem& p, const PointEval& e);

/// Prox-gradient mapping r(x) = x - prox_phi(x - grad f(x)); zero exactly at
/// stationary points.
Vector residual(const CompositeProblem& p, const PointEval& e);

}  // namespace proxnewton
