#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "proxnewton/transforms.hpp"

namespace proxnewton {

/// Abstract forward/adjoint map. Operators are immutable after construction;
/// concurrent apply calls are safe.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;
  virtual std::string kind() const = 0;

  /// out = A x. Throws std::invalid_argument on dimension mismatch.
  virtual void apply(const Vector& x, Vector& out) const = 0;

  /// out = A^T y.
  virtual void apply_adjoint(const Vector& y, Vector& out) const = 0;

  Vector apply(const Vector& x) const {
    Vector out;
    apply(x, out);
    return out;
  }
  Vector apply_adjoint(const Vector& y) const {
    Vector out;
    apply_adjoint(y, out);
    return out;
  }

  /// Dense view, if the operator keeps one (used for reduced-Hessian fast
  /// paths); nullptr otherwise.
  virtual const Matrix* dense() const { return nullptr; }

 protected:
  void check_apply_dims(Eigen::Index got) const;
  void check_adjoint_dims(Eigen::Index got) const;
};

class IdentityOperator final : public LinearOperator {
 public:
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;
  explicit IdentityOperator(Eigen::Index n) : n_(n) {}
  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return n_; }
  std::string kind() const override { return "identity"; }
  void apply(const Vector& x, Vector& out) const override;
  void apply_adjoint(const Vector& y, Vector& out) const override;

 private:
  Eigen::Index n_;
};

class DenseOperator final : public LinearOperator {
 public:
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;
  explicit DenseOperator(Matrix a) : a_(std::move(a)) {}
  Eigen::Index rows() const override { return a_.rows(); }
  Eigen::Index cols() const override { return a_.cols(); }
  std::string kind() const override { return "dense"; }
  void apply(const Vector& x, Vector& out) const override;
  void apply_adjoint(const Vector& y, Vector& out) const override;
  const Matrix* dense() const override { return &a_; }
  const Matrix& matrix() const { return a_; }

 private:
  Matrix a_;
};

/// Rows of the orthonormal DCT-II selected by an ascending index set J:
/// A x = (dct(x))_J. The adjoint scatters into J and applies the inverse
/// transform.
class PartialDctOperator final : public LinearOperator {
 public:
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;
  PartialDctOperator(Eigen::Index n, std::vector<Eigen::Index> indices);
  Eigen::Index rows() const override {
    return static_cast<Eigen::Index>(indices_.size());
  }
  Eigen::Index cols() const override { return n_; }
  std::string kind() const override { return "partial-dct"; }
  void apply(const Vector& x, Vector& out) const override;
  void apply_adjoint(const Vector& y, Vector& out) const override;
  const std::vector<Eigen::Index>& indices() const { return indices_; }

 private:
  Eigen::Index n_;
  std::vector<Eigen::Index> indices_;
  DctPlan plan_;
};

/// Gaussian blur applied after orthonormal 2-D Haar synthesis: the forward
/// map is y -> blur(haar_inverse(y)), its adjoint haar_forward(blur^T(z)).
/// Square n x n with n = side^2.
class HaarBlurOperator final : public LinearOperator {
 public:
  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;
  HaarBlurOperator(Eigen::Index side, int haar_levels, Vector blur_kernel);
  Eigen::Index rows() const override { return side_ * side_; }
  Eigen::Index cols() const override { return side_ * side_; }
  std::string kind() const override { return "haar-composite"; }
  void apply(const Vector& x, Vector& out) const override;
  void apply_adjoint(const Vector& y, Vector& out) const override;
  Eigen::Index side() const { return side_; }
  int levels() const { return levels_; }
  const SymmetricBlur& blur() const { return blur_; }

 private:
  Eigen::Index side_;
  int levels_;
  SymmetricBlur blur_;
};

struct SpectralNormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  Vector eigvec;  // final iterate of the power method
};

/// Largest eigenvalue of a symmetric PSD operator by power iteration.
/// `start` may be empty, in which case a fixed seeded random vector is used.
SpectralNormEstimate symmetric_power_norm(
    const std::function<void(const Vector&, Vector&)>& apply_sym,
    Eigen::Index dim, double tol, int max_iter, const Vector& start = Vector());

/// Largest singular value of A, estimated by power iteration on A^T A.
/// Deterministic: the start vector comes from a fixed seed.
SpectralNormEstimate spectral_norm(const LinearOperator& op, double tol = 1e-6,
                                   int max_iter = 500);

}  // namespace proxnewton
