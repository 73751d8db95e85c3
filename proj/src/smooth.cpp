#include "proxnewton/smooth.hpp"

#include <cmath>
#include <stdexcept>

namespace proxnewton {

namespace {

// log(1 + e^-u) without overflow on either tail.
inline double softplus_neg(double u) {
  return u > 0.0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
}

// sigma(-u) = 1 / (1 + e^u), overflow-safe.
inline double sigmoid_neg(double u) {
  if (u > 0.0) {
    const double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

inline void check_finite(const Vector& u) {
  if (!u.allFinite())
    throw std::invalid_argument("smooth model: non-finite input");
}

inline double psi_component(const SmoothModel& m, double u) {
  switch (m.kind) {
    case SmoothKind::LeastSquares:
      return 0.5 * u * u;
    case SmoothKind::Logistic:
      return softplus_neg(u) / static_cast<double>(m.sample_count);
    case SmoothKind::StudentT:
      return std::log1p(u * u / m.t_scale);
  }
  return 0.0;
}

}  // namespace

double psi_value(const SmoothModel& model, const Vector& u) {
  check_finite(u);
  if (model.kind == SmoothKind::LeastSquares) return 0.5 * u.squaredNorm();
  double acc = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double term = psi_component(model, u[i]) - comp;
    const double next = acc + term;
    comp = (next - acc) - term;
    acc = next;
  }
  return acc;
}

void psi_grad(const SmoothModel& model, const Vector& u, Vector& g) {
  check_finite(u);
  g.resize(u.size());
  switch (model.kind) {
    case SmoothKind::LeastSquares:
      g = u;
      break;
    case SmoothKind::Logistic: {
      const double inv_m = 1.0 / static_cast<double>(model.sample_count);
      for (Eigen::Index i = 0; i < u.size(); ++i)
        g[i] = -inv_m * sigmoid_neg(u[i]);
      break;
    }
    case SmoothKind::StudentT: {
      const double nu = model.t_scale;
      for (Eigen::Index i = 0; i < u.size(); ++i)
        g[i] = 2.0 * u[i] / (nu + u[i] * u[i]);
      break;
    }
  }
}

void psi_hess_diag(const SmoothModel& model, const Vector& u, Vector& h) {
  check_finite(u);
  h.resize(u.size());
  switch (model.kind) {
    case SmoothKind::LeastSquares:
      h.setOnes();
      break;
    case SmoothKind::Logistic: {
      const double inv_m = 1.0 / static_cast<double>(model.sample_count);
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double s = sigmoid_neg(u[i]);  // sigma(-u) = 1 - sigma(u)
        h[i] = inv_m * s * (1.0 - s);
      }
      break;
    }
    case SmoothKind::StudentT: {
      const double nu = model.t_scale;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double q = nu + u[i] * u[i];
        h[i] = 2.0 * (nu - u[i] * u[i]) / (q * q);
      }
      break;
    }
  }
}

double psi_hess_min_eig(const SmoothModel& model, const Vector& u) {
  if (model.kind == SmoothKind::LeastSquares) return 1.0;
  Vector h;
  psi_hess_diag(model, u, h);
  return h.minCoeff();
}

double psi_value_diff(const SmoothModel& model, const Vector& u,
                      const Vector& v) {
  check_finite(u);
  check_finite(v);
  if (u.size() != v.size())
    throw std::invalid_argument("psi_value_diff: length mismatch");
  double acc = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double d = psi_component(model, u[i]) - psi_component(model, v[i]);
    const double term = d - comp;
    const double next = acc + term;
    comp = (next - acc) - term;
    acc = next;
  }
  return acc;
}

}  // namespace proxnewton
