#include "proxnewton/problem.hpp"

#include <stdexcept>

namespace proxnewton {

PointEval evaluate(const CompositeProblem& p, const Vector& x) {
  if (p.shift.size() != p.op->rows())
    throw std::invalid_argument("CompositeProblem: shift length != rows");
  PointEval e;
  e.x = x;
  p.op->apply(x, e.u);
  e.u -= p.shift;
  return e;
}

double f_value(const CompositeProblem& p, const PointEval& e) {
  return psi_value(p.smooth, e.u);
}

Vector f_grad(const CompositeProblem& p, const PointEval& e) {
  Vector g;
  psi_grad(p.smooth, e.u, g);
  return p.op->apply_adjoint(g);
}

Vector f_hessvec(const CompositeProblem& p, const PointEval& e,
                 const Vector& v) {
  Vector d;
  psi_hess_diag(p.smooth, e.u, d);
  Vector av;
  p.op->apply(v, av);
  av.array() *= d.array();
  return p.op->apply_adjoint(av);
}

double F_value(const CompositeProblem& p, const PointEval& e) {
  return f_value(p, e) + phi_value(p.reg, e.x);
}

Vector residual(const CompositeProblem& p, const PointEval& e) {
  return residual_from_gradient(p.reg, e.x, f_grad(p, e));
}

}  // namespace proxnewton
