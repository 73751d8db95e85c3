#pragma once

#include <Eigen/Core>
#include <vector>

namespace proxnewton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Orthonormal DCT-II and its inverse (DCT-III), computed by the even/odd
/// split recursion. Even sizes halve recursively; an odd size (including an
/// odd tail of an even n) falls back to the direct cosine sum. All cosine
/// tables are precomputed at construction, so apply() is const and
/// thread-safe.
class DctPlan {
 public:
  explicit DctPlan(Eigen::Index n);

  Eigen::Index size() const { return n_; }

  /// y = C x with C the orthonormal DCT-II matrix,
  /// y_k = c_k sum_i x_i cos(pi (2i+1) k / (2n)).
  void forward(const Vector& x, Vector& y) const;

  /// x = C^T y (exact inverse of forward up to roundoff).
  void inverse(const Vector& y, Vector& x) const;

  Vector forward(const Vector& x) const;
  Vector inverse(const Vector& y) const;

 private:
  struct Level {
    Eigen::Index size;               // even size handled at this level
    std::vector<double> cosines;     // cos(pi (2i+1) / (2 size)), i < size/2
  };

  void forward_rec(double* x, double* scratch, Eigen::Index n,
                   std::size_t level) const;
  void inverse_rec(double* u, double* scratch, Eigen::Index n,
                   std::size_t level) const;
  void forward_direct(double* x, double* scratch, Eigen::Index n) const;
  void inverse_direct(double* u, double* scratch, Eigen::Index n) const;

  Eigen::Index n_;
  std::vector<Level> levels_;        // one entry per even halving
  Eigen::Index base_size_;           // odd (or 1) terminal size
  Matrix base_table_;                // dense cos table for the terminal size
};

/// In-place orthonormal 2-D Haar analysis of a square image stored row-major
/// as a length side*side vector. Each level transforms the rows and then the
/// columns of the current low-pass block with the (a+b)/sqrt2, (a-b)/sqrt2
/// butterfly. side must be divisible by 2^levels.
void haar2d_forward(Vector& img, Eigen::Index side, int levels);

/// Exact transpose (= inverse) of haar2d_forward.
void haar2d_inverse(Vector& coeffs, Eigen::Index side, int levels);

/// Normalized 1-D Gaussian kernel with `taps` entries and the given standard
/// deviation; the separable product is the usual taps x taps blur filter.
Vector gaussian_kernel_1d(int taps, double sigma);

/// Separable 2-D convolution with symmetric (half-sample mirror) boundary
/// extension, plus its exact adjoint.
class SymmetricBlur {
 public:
  SymmetricBlur(Eigen::Index side, Vector kernel);

  Eigen::Index side() const { return side_; }

  void apply(const Vector& img, Vector& out) const;
  void apply_adjoint(const Vector& img, Vector& out) const;

 private:
  void blur_rows(const double* in, double* out) const;
  void blur_cols(const double* in, double* out) const;
  void blur_rows_adjoint(const double* in, double* out) const;
  void blur_cols_adjoint(const double* in, double* out) const;

  Eigen::Index side_;
  Vector kernel_;
  int radius_;
};

}  // namespace proxnewton
