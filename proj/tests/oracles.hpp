// Test-only reference implementations. Everything here is independent of the
// library's solution paths: brute-force transforms, dense factorizations,
// coordinate descent run to machine tolerance, and finite differences.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "proxnewton/prox.hpp"
#include "proxnewton/rng.hpp"

namespace oracles {

using proxnewton::Matrix;
using proxnewton::Vector;

inline Vector random_normal(proxnewton::Rng& rng, Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline Matrix random_normal_matrix(proxnewton::Rng& rng, Eigen::Index r,
                                   Eigen::Index c) {
  Matrix a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = rng.normal();
  return a;
}

/// Direct cosine-sum orthonormal DCT-II, O(n^2).
inline Vector dct2_bruteforce(const Vector& x) {
  const Eigen::Index n = x.size();
  Vector y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      acc += x[i] * std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * n));
    const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    y[k] = scale * acc;
  }
  return y;
}

/// Largest singular value through Eigen's two-sided Jacobi SVD.
inline double svd_spectral_norm(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

/// Central finite-difference gradient of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f,
                          const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Central finite-difference directional derivative of a vector function.
inline Vector fd_jacobian_apply(
    const std::function<Vector(const Vector&)>& g, const Vector& x,
    const Vector& v, double h) {
  const double scale = h / std::max(v.norm(), 1e-30);
  return (g(x + scale * v) - g(x - scale * v)) / (2.0 * scale);
}

/// Exact minimizer of  g^T (x - x_k) + 1/2 (x - x_k)^T G (x - x_k) + phi(x)
/// for dense positive definite G, by cyclic coordinate descent (l1) or block
/// descent with a scalar secular equation (group-l2), iterated to machine
/// tolerance. Small n only.
inline Vector subproblem_oracle(const Matrix& G, const Vector& grad,
                                const Vector& x_k,
                                const proxnewton::Regularizer& reg,
                                int max_sweeps = 200000) {
  const Eigen::Index n = x_k.size();
  if (reg.kind == proxnewton::RegKind::Zero)
    return x_k - G.ldlt().solve(grad);

  Vector x = x_k;
  Vector gs = grad;  // gradient of the smooth part: grad + G (x - x_k)

  if (reg.kind == proxnewton::RegKind::L1) {
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double moved = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double gii = G(i, i);
        const double v = x[i] - gs[i] / gii;
        const double thr = reg.lambda * reg.coord_weight(i) / gii;
        const double mag = std::abs(v) - thr;
        const double xi_new = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
        const double delta = xi_new - x[i];
        if (delta != 0.0) {
          gs += delta * G.col(i);
          x[i] = xi_new;
          moved += std::abs(delta);
        }
      }
      if (moved <= 1e-16 * (1.0 + x.lpNorm<1>())) break;
    }
    return x;
  }

  // group-l2: block minimization via eigen-decomposition of each diagonal
  // block and bisection on the block norm.
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double moved = 0.0;
    for (const auto& grp : reg.groups) {
      const auto bs = static_cast<Eigen::Index>(grp.indices.size());
      Matrix gjj(bs, bs);
      Vector xj(bs), cj(bs);
      for (Eigen::Index a = 0; a < bs; ++a) {
        xj[a] = x[grp.indices[a]];
        for (Eigen::Index b = 0; b < bs; ++b)
          gjj(a, b) = G(grp.indices[a], grp.indices[b]);
      }
      for (Eigen::Index a = 0; a < bs; ++a)
        cj[a] = gs[grp.indices[a]] - gjj.row(a).dot(xj);
      // minimize 1/2 z^T gjj z + cj^T z + lam ||z||
      const double lam = reg.lambda * grp.weight;
      Vector zj;
      if (cj.norm() <= lam) {
        zj = Vector::Zero(bs);
      } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(gjj);
        const Vector d = es.eigenvalues();
        const Vector u = es.eigenvectors().transpose() * cj;
        auto norm_at = [&](double rho) {
          double s = 0.0;
          for (Eigen::Index a = 0; a < bs; ++a) {
            const double den = d[a] + lam / rho;
            s += (u[a] / den) * (u[a] / den);
          }
          return std::sqrt(s);
        };
        double lo = 1e-300, hi = cj.norm() / std::max(d.minCoeff(), 1e-300) + 1.0;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          if (norm_at(mid) > mid) lo = mid; else hi = mid;
        }
        const double rho = 0.5 * (lo + hi);
        Vector w(bs);
        for (Eigen::Index a = 0; a < bs; ++a) w[a] = u[a] / (d[a] + lam / rho);
        zj = -(es.eigenvectors() * w);
      }
      for (Eigen::Index a = 0; a < bs; ++a) {
        const double delta = zj[a] - x[grp.indices[a]];
        if (delta != 0.0) {
          gs += delta * G.col(grp.indices[a]);
          x[grp.indices[a]] = zj[a];
          moved += std::abs(delta);
        }
      }
    }
    if (moved <= 1e-16 * (1.0 + x.lpNorm<1>())) break;
  }
  return x;
}

/// 1-D grid search for the scalar prox of t*lambda*|.|: argmin over the grid
/// of lam_t |y| + 1/2 (y - v)^2.
inline double prox_l1_grid_oracle(double v, double lam_t, double lo = -5.0,
                                  double hi = 5.0, double step = 1e-4) {
  double best_y = lo, best = std::numeric_limits<double>::infinity();
  for (double y = lo; y <= hi; y += step) {
    const double val = lam_t * std::abs(y) + 0.5 * (y - v) * (y - v);
    if (val < best) {
      best = val;
      best_y = y;
    }
  }
  return best_y;
}

}  // namespace oracles
