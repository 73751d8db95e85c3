#include "proxnewton/linops.hpp"

#include <cmath>
#include <stdexcept>

#include "proxnewton/rng.hpp"

namespace proxnewton {

void LinearOperator::check_apply_dims(Eigen::Index got) const {
  if (got != cols())
    throw std::invalid_argument("LinearOperator::apply: vector length " +
                                std::to_string(got) + " != cols " +
                                std::to_string(cols()));
}

void LinearOperator::check_adjoint_dims(Eigen::Index got) const {
  if (got != rows())
    throw std::invalid_argument(
        "LinearOperator::apply_adjoint: vector length " + std::to_string(got) +
        " != rows " + std::to_string(rows()));
}

void IdentityOperator::apply(const Vector& x, Vector& out) const {
  check_apply_dims(x.size());
  out = x;
}

void IdentityOperator::apply_adjoint(const Vector& y, Vector& out) const {
  check_adjoint_dims(y.size());
  out = y;
}

void DenseOperator::apply(const Vector& x, Vector& out) const {
  check_apply_dims(x.size());
  out.noalias() = a_ * x;
}

void DenseOperator::apply_adjoint(const Vector& y, Vector& out) const {
  check_adjoint_dims(y.size());
  out.noalias() = a_.transpose() * y;
}

PartialDctOperator::PartialDctOperator(Eigen::Index n,
                                       std::vector<Eigen::Index> indices)
    : n_(n), indices_(std::move(indices)), plan_(n) {
  Eigen::Index prev = -1;
  for (Eigen::Index j : indices_) {
    if (j < 0 || j >= n_)
      throw std::invalid_argument("PartialDctOperator: index out of range");
    if (j <= prev)
      throw std::invalid_argument(
          "PartialDctOperator: indices must be strictly ascending");
    prev = j;
  }
}

void PartialDctOperator::apply(const Vector& x, Vector& out) const {
  check_apply_dims(x.size());
  Vector t;
  plan_.forward(x, t);
  out.resize(rows());
  for (Eigen::Index i = 0; i < rows(); ++i)
    out[i] = t[indices_[static_cast<std::size_t>(i)]];
}

void PartialDctOperator::apply_adjoint(const Vector& y, Vector& out) const {
  check_adjoint_dims(y.size());
  Vector t = Vector::Zero(n_);
  for (Eigen::Index i = 0; i < rows(); ++i)
    t[indices_[static_cast<std::size_t>(i)]] = y[i];
  plan_.inverse(t, out);
}

HaarBlurOperator::HaarBlurOperator(Eigen::Index side, int haar_levels,
                                   Vector blur_kernel)
    : side_(side), levels_(haar_levels), blur_(side, std::move(blur_kernel)) {
  if (haar_levels < 1 || side % (Eigen::Index{1} << haar_levels) != 0)
    throw std::invalid_argument(
        "HaarBlurOperator: side not divisible by 2^levels");
}

void HaarBlurOperator::apply(const Vector& x, Vector& out) const {
  check_apply_dims(x.size());
  Vector img = x;
  haar2d_inverse(img, side_, levels_);
  blur_.apply(img, out);
}

void HaarBlurOperator::apply_adjoint(const Vector& y, Vector& out) const {
  check_adjoint_dims(y.size());
  Vector img;
  blur_.apply_adjoint(y, img);
  haar2d_forward(img, side_, levels_);
  out = std::move(img);
}

SpectralNormEstimate symmetric_power_norm(
    const std::function<void(const Vector&, Vector&)>& apply_sym,
    Eigen::Index dim, double tol, int max_iter, const Vector& start) {
  SpectralNormEstimate est;
  Vector v;
  if (start.size() == dim && start.norm() > 0) {
    v = start / start.norm();
  } else {
    Rng rng(0x5EC7EA1ULL);
    v.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    v /= v.norm();
  }
  Vector w(dim);
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    apply_sym(v, w);
    const double lam = v.dot(w);  // Rayleigh quotient
    const double wn = w.norm();
    est.iterations = it;
    est.value = lam;
    if (wn == 0.0) {  // operator annihilates v: norm estimate 0
      est.value = 0.0;
      est.converged = true;
      break;
    }
    v = w / wn;
    if (it > 1 && std::abs(lam - prev) <= tol * std::max(std::abs(lam), 1.0)) {
      est.converged = true;
      break;
    }
    prev = lam;
  }
  est.eigvec = v;
  if (est.value < 0.0) est.value = 0.0;
  return est;
}

SpectralNormEstimate spectral_norm(const LinearOperator& op, double tol,
                                   int max_iter) {
  if (tol <= 0) throw std::invalid_argument("spectral_norm: tol must be > 0");
  Vector ax;
  auto gram = [&](const Vector& v, Vector& out) {
    op.apply(v, ax);
    op.apply_adjoint(ax, out);
  };
  // Relative tol on sigma^2 ~ 2x relative tol on sigma; halve it.
  SpectralNormEstimate est =
      symmetric_power_norm(gram, op.cols(), 0.5 * tol, max_iter);
  est.value = std::sqrt(std::max(est.value, 0.0));
  return est;
}

}  // namespace proxnewton
