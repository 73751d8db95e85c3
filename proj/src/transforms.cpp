#include "proxnewton/transforms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace proxnewton {

namespace {
constexpr double kPi = std::numbers::pi;
// Terminal odd sizes up to this get a dense cosine table; larger odd sizes
// (test-only territory) compute cosines on the fly.
constexpr Eigen::Index kMaxBaseTable = 512;
}  // namespace

DctPlan::DctPlan(Eigen::Index n) : n_(n) {
  if (n <= 0) throw std::invalid_argument("DctPlan: size must be positive");
  Eigen::Index len = n;
  while (len > 1 && len % 2 == 0) {
    Level lev;
    lev.size = len;
    lev.cosines.resize(static_cast<std::size_t>(len / 2));
    for (Eigen::Index i = 0; i < len / 2; ++i) {
      lev.cosines[static_cast<std::size_t>(i)] =
          std::cos(kPi * static_cast<double>(2 * i + 1) /
                   (2.0 * static_cast<double>(len)));
    }
    levels_.push_back(std::move(lev));
    len /= 2;
  }
  base_size_ = len;
  if (base_size_ > 1 && base_size_ <= kMaxBaseTable) {
    base_table_.resize(base_size_, base_size_);
    for (Eigen::Index k = 0; k < base_size_; ++k)
      for (Eigen::Index i = 0; i < base_size_; ++i)
        base_table_(k, i) =
            std::cos(kPi * static_cast<double>((2 * i + 1) * k) /
                     (2.0 * static_cast<double>(base_size_)));
  }
}

// Unnormalized terminal transform: u_k = sum_i x_i cos(pi (2i+1) k / (2n)).
void DctPlan::forward_direct(double* x, double* scratch, Eigen::Index n) const {
  if (n == 1) return;
  if (n == base_size_ && base_table_.size() > 0) {
    Eigen::Map<Vector> out(scratch, n);
    out.noalias() = base_table_ * Eigen::Map<const Vector>(x, n);
  } else {
    for (Eigen::Index k = 0; k < n; ++k) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        acc += x[i] * std::cos(kPi * static_cast<double>((2 * i + 1) * k) /
                               (2.0 * static_cast<double>(n)));
      scratch[k] = acc;
    }
  }
  for (Eigen::Index k = 0; k < n; ++k) x[k] = scratch[k];
}

// Exact inverse of forward_direct: x_i = u_0/n + (2/n) sum_{k>=1} u_k cos(..).
void DctPlan::inverse_direct(double* u, double* scratch, Eigen::Index n) const {
  if (n == 1) return;
  if (n == base_size_ && base_table_.size() > 0) {
    Eigen::Map<const Vector> in(u, n);
    Vector weighted = in * (2.0 / static_cast<double>(n));
    weighted[0] = in[0] / static_cast<double>(n);
    Eigen::Map<Vector> out(scratch, n);
    out.noalias() = base_table_.transpose() * weighted;
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = u[0] / static_cast<double>(n);
      for (Eigen::Index k = 1; k < n; ++k)
        acc += (2.0 / static_cast<double>(n)) * u[k] *
               std::cos(kPi * static_cast<double>((2 * i + 1) * k) /
                        (2.0 * static_cast<double>(n)));
      scratch[i] = acc;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) u[i] = scratch[i];
}

// Result lands back in x; scratch must hold n doubles.
void DctPlan::forward_rec(double* x, double* scratch, Eigen::Index n,
                          std::size_t level) const {
  if (n % 2 != 0 || n == 1) {
    forward_direct(x, scratch, n);
    return;
  }
  const Eigen::Index h = n / 2;
  const auto& c = levels_[level].cosines;
  for (Eigen::Index i = 0; i < h; ++i) {
    scratch[i] = x[i] + x[n - 1 - i];
    scratch[h + i] =
        (x[i] - x[n - 1 - i]) / (2.0 * c[static_cast<std::size_t>(i)]);
  }
  forward_rec(scratch, x, h, level + 1);
  forward_rec(scratch + h, x, h, level + 1);
  for (Eigen::Index k = 0; k < h; ++k) {
    x[2 * k] = scratch[k];
    x[2 * k + 1] = scratch[h + k] + (k + 1 < h ? scratch[h + k + 1] : 0.0);
  }
}

void DctPlan::inverse_rec(double* u, double* scratch, Eigen::Index n,
                          std::size_t level) const {
  if (n % 2 != 0 || n == 1) {
    inverse_direct(u, scratch, n);
    return;
  }
  const Eigen::Index h = n / 2;
  const auto& c = levels_[level].cosines;
  // Undo the even/odd interleave: S into scratch[0..h), D into scratch[h..n).
  for (Eigen::Index k = 0; k < h; ++k) scratch[k] = u[2 * k];
  scratch[n - 1] = u[n - 1];
  for (Eigen::Index k = h - 2; k >= 0; --k)
    scratch[h + k] = u[2 * k + 1] - scratch[h + k + 1];
  inverse_rec(scratch, u, h, level + 1);
  inverse_rec(scratch + h, u, h, level + 1);
  for (Eigen::Index i = 0; i < h; ++i) {
    const double s = scratch[i];
    const double d = scratch[h + i] * c[static_cast<std::size_t>(i)];
    u[i] = 0.5 * s + d;
    u[n - 1 - i] = 0.5 * s - d;
  }
}

void DctPlan::forward(const Vector& x, Vector& y) const {
  if (x.size() != n_) throw std::invalid_argument("DctPlan: bad input length");
  y = x;
  Vector scratch(n_);
  forward_rec(y.data(), scratch.data(), n_, 0);
  const double root = std::sqrt(2.0 / static_cast<double>(n_));
  y *= root;
  y[0] *= 1.0 / std::sqrt(2.0);
}

void DctPlan::inverse(const Vector& y, Vector& x) const {
  if (y.size() != n_) throw std::invalid_argument("DctPlan: bad input length");
  x = y;
  const double root = std::sqrt(static_cast<double>(n_) / 2.0);
  x *= root;
  x[0] *= std::sqrt(2.0);
  Vector scratch(n_);
  inverse_rec(x.data(), scratch.data(), n_, 0);
}

Vector DctPlan::forward(const Vector& x) const {
  Vector y;
  forward(x, y);
  return y;
}

Vector DctPlan::inverse(const Vector& y) const {
  Vector x;
  inverse(y, x);
  return x;
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void haar_level_rows(double* img, Eigen::Index side, Eigen::Index size,
                     double* buf, bool inverse) {
  for (Eigen::Index r = 0; r < size; ++r) {
    double* row = img + r * side;
    const Eigen::Index h = size / 2;
    if (!inverse) {
      for (Eigen::Index i = 0; i < h; ++i) {
        buf[i] = (row[2 * i] + row[2 * i + 1]) * kInvSqrt2;
        buf[h + i] = (row[2 * i] - row[2 * i + 1]) * kInvSqrt2;
      }
    } else {
      for (Eigen::Index i = 0; i < h; ++i) {
        buf[2 * i] = (row[i] + row[h + i]) * kInvSqrt2;
        buf[2 * i + 1] = (row[i] - row[h + i]) * kInvSqrt2;
      }
    }
    for (Eigen::Index i = 0; i < size; ++i) row[i] = buf[i];
  }
}

void haar_level_cols(double* img, Eigen::Index side, Eigen::Index size,
                     double* buf, bool inverse) {
  for (Eigen::Index cidx = 0; cidx < size; ++cidx) {
    double* col = img + cidx;
    const Eigen::Index h = size / 2;
    if (!inverse) {
      for (Eigen::Index i = 0; i < h; ++i) {
        buf[i] = (col[2 * i * side] + col[(2 * i + 1) * side]) * kInvSqrt2;
        buf[h + i] = (col[2 * i * side] - col[(2 * i + 1) * side]) * kInvSqrt2;
      }
    } else {
      for (Eigen::Index i = 0; i < h; ++i) {
        buf[2 * i] = (col[i * side] + col[(h + i) * side]) * kInvSqrt2;
        buf[2 * i + 1] = (col[i * side] - col[(h + i) * side]) * kInvSqrt2;
      }
    }
    for (Eigen::Index i = 0; i < size; ++i) col[i * side] = buf[i];
  }
}

void check_haar_dims(Eigen::Index n, Eigen::Index side, int levels) {
  if (side <= 0 || n != side * side)
    throw std::invalid_argument("haar2d: image is not side*side");
  if (levels < 0 || side % (Eigen::Index{1} << levels) != 0)
    throw std::invalid_argument("haar2d: side not divisible by 2^levels");
}

}  // namespace

void haar2d_forward(Vector& img, Eigen::Index side, int levels) {
  check_haar_dims(img.size(), side, levels);
  std::vector<double> buf(static_cast<std::size_t>(side));
  Eigen::Index size = side;
  for (int lev = 0; lev < levels; ++lev) {
    haar_level_rows(img.data(), side, size, buf.data(), false);
    haar_level_cols(img.data(), side, size, buf.data(), false);
    size /= 2;
  }
}

void haar2d_inverse(Vector& coeffs, Eigen::Index side, int levels) {
  check_haar_dims(coeffs.size(), side, levels);
  std::vector<double> buf(static_cast<std::size_t>(side));
  // Coarsest level first, each undoing columns then rows.
  for (int lev = levels - 1; lev >= 0; --lev) {
    const Eigen::Index size = side >> lev;
    haar_level_cols(coeffs.data(), side, size, buf.data(), true);
    haar_level_rows(coeffs.data(), side, size, buf.data(), true);
  }
}

Vector gaussian_kernel_1d(int taps, double sigma) {
  if (taps <= 0 || taps % 2 == 0)
    throw std::invalid_argument("gaussian_kernel_1d: taps must be odd");
  Vector k(taps);
  const int r = taps / 2;
  for (int i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i - r);
    k[i] = std::exp(-t * t / (2.0 * sigma * sigma));
  }
  k /= k.sum();
  return k;
}

SymmetricBlur::SymmetricBlur(Eigen::Index side, Vector kernel)
    : side_(side), kernel_(std::move(kernel)),
      radius_(static_cast<int>(kernel_.size()) / 2) {
  if (kernel_.size() % 2 == 0)
    throw std::invalid_argument("SymmetricBlur: kernel must have odd length");
  if (side_ < kernel_.size())
    throw std::invalid_argument("SymmetricBlur: image smaller than kernel");
}

namespace {
// Half-sample mirror: -1 -> 0, -2 -> 1, n -> n-1, n+1 -> n-2.
inline Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}
}  // namespace

void SymmetricBlur::blur_rows(const double* in, double* out) const {
  for (Eigen::Index r = 0; r < side_; ++r) {
    const double* row = in + r * side_;
    double* orow = out + r * side_;
    for (Eigen::Index c = 0; c < side_; ++c) {
      double acc = 0.0;
      for (int t = -radius_; t <= radius_; ++t)
        acc += kernel_[t + radius_] * row[reflect(c + t, side_)];
      orow[c] = acc;
    }
  }
}

void SymmetricBlur::blur_cols(const double* in, double* out) const {
  for (Eigen::Index c = 0; c < side_; ++c) {
    for (Eigen::Index r = 0; r < side_; ++r) {
      double acc = 0.0;
      for (int t = -radius_; t <= radius_; ++t)
        acc += kernel_[t + radius_] * in[reflect(r + t, side_) * side_ + c];
      out[r * side_ + c] = acc;
    }
  }
}

void SymmetricBlur::blur_rows_adjoint(const double* in, double* out) const {
  std::fill(out, out + side_ * side_, 0.0);
  for (Eigen::Index r = 0; r < side_; ++r) {
    const double* row = in + r * side_;
    double* orow = out + r * side_;
    for (Eigen::Index c = 0; c < side_; ++c)
      for (int t = -radius_; t <= radius_; ++t)
        orow[reflect(c + t, side_)] += kernel_[t + radius_] * row[c];
  }
}

void SymmetricBlur::blur_cols_adjoint(const double* in, double* out) const {
  std::fill(out, out + side_ * side_, 0.0);
  for (Eigen::Index r = 0; r < side_; ++r)
    for (Eigen::Index c = 0; c < side_; ++c)
      for (int t = -radius_; t <= radius_; ++t)
        out[reflect(r + t, side_) * side_ + c] +=
            kernel_[t + radius_] * in[r * side_ + c];
}

void SymmetricBlur::apply(const Vector& img, Vector& out) const {
  if (img.size() != side_ * side_)
    throw std::invalid_argument("SymmetricBlur: bad image length");
  Vector tmp(side_ * side_);
  out.resize(side_ * side_);
  blur_rows(img.data(), tmp.data());
  blur_cols(tmp.data(), out.data());
}

void SymmetricBlur::apply_adjoint(const Vector& img, Vector& out) const {
  if (img.size() != side_ * side_)
    throw std::invalid_argument("SymmetricBlur: bad image length");
  Vector tmp(side_ * side_);
  out.resize(side_ * side_);
  blur_cols_adjoint(img.data(), tmp.data());
  blur_rows_adjoint(tmp.data(), out.data());
}

}  // namespace proxnewton
