#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "oracles.hpp"
#include "proxnewton/io.hpp"
#include "proxnewton/linops.hpp"

using namespace proxnewton;

namespace {

std::vector<std::unique_ptr<LinearOperator>> sample_operators(Rng& rng) {
  std::vector<std::unique_ptr<LinearOperator>> ops;
  ops.push_back(std::make_unique<IdentityOperator>(7));
  ops.push_back(std::make_unique<DenseOperator>(
      oracles::random_normal_matrix(rng, 9, 5)));
  ops.push_back(std::make_unique<PartialDctOperator>(
      32, std::vector<Eigen::Index>{0, 3, 4, 9, 17, 21, 30}));
  ops.push_back(std::make_unique<HaarBlurOperator>(
      16, 2, gaussian_kernel_1d(5, 1.5)));
  return ops;
}

}  // namespace

TEST_CASE("identity and dense forward/adjoint hand cases") {
  IdentityOperator id(3);
  Vector x(3);
  x << 1, 2, 3;
  CHECK(id.apply(x) == x);
  Vector y2(2);
  y2 << 4, 5;
  IdentityOperator id2(2);
  CHECK(id2.apply_adjoint(y2) == y2);

  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  DenseOperator dense(a);
  Vector ones = Vector::Ones(2);
  Vector ax = dense.apply(ones);
  CHECK(ax[0] == doctest::Approx(3.0));
  CHECK(ax[1] == doctest::Approx(7.0));
  Vector e0(2);
  e0 << 1, 0;
  Vector aty = dense.apply_adjoint(e0);
  CHECK(aty[0] == doctest::Approx(1.0));
  CHECK(aty[1] == doctest::Approx(2.0));
}

TEST_CASE("dimension mismatches are rejected") {
  DenseOperator dense(Matrix::Ones(3, 2));
  CHECK_THROWS_AS(dense.apply(Vector::Ones(3)), std::invalid_argument);
  CHECK_THROWS_AS(dense.apply_adjoint(Vector::Ones(2)), std::invalid_argument);
}

TEST_CASE("adjoint identity <Ax,y> = <x,A^T y> across operator kinds") {
  Rng rng(11);
  for (const auto& op : sample_operators(rng)) {
    for (int t = 0; t < 100; ++t) {
      const Vector x = oracles::random_normal(rng, op->cols());
      const Vector y = oracles::random_normal(rng, op->rows());
      const double lhs = op->apply(x).dot(y);
      const double rhs = x.dot(op->apply_adjoint(y));
      CHECK(std::abs(lhs - rhs) <=
            1e-10 * std::max({std::abs(lhs), std::abs(rhs), 1.0}));
    }
  }
}

TEST_CASE("random dense 5x3 adjoint identity is tight") {
  Rng rng(5);
  DenseOperator op(oracles::random_normal_matrix(rng, 5, 3));
  for (int t = 0; t < 20; ++t) {
    const Vector x = oracles::random_normal(rng, 3);
    const Vector y = oracles::random_normal(rng, 5);
    CHECK(std::abs(op.apply(x).dot(y) - x.dot(op.apply_adjoint(y))) <= 1e-12);
  }
}

TEST_CASE("orthonormal DCT-II matches the cosine-sum oracle") {
  Rng rng(2);
  // 1042 = 2 * 521 exercises the on-the-fly odd tail above the table limit
  for (Eigen::Index n : {1, 2, 3, 5, 8, 12, 20, 64, 96, 255, 256, 1042}) {
    DctPlan plan(n);
    const Vector x = oracles::random_normal(rng, n);
    const Vector got = plan.forward(x);
    const Vector want = oracles::dct2_bruteforce(x);
    CHECK((got - want).norm() <= 1e-11 * std::max(1.0, want.norm()));
    // exact inverse
    CHECK((plan.inverse(got) - x).norm() <= 1e-12 * std::max(1.0, x.norm()));
  }
}

TEST_CASE("full-index partial DCT is an isometry") {
  const Eigen::Index n = 48;
  std::vector<Eigen::Index> all(n);
  std::iota(all.begin(), all.end(), 0);
  PartialDctOperator op(n, all);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Vector x = oracles::random_normal(rng, n);
    const double ratio = op.apply(x).norm() / x.norm();
    CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("partial DCT gathers ascending selected coefficients") {
  const Eigen::Index n = 16;
  std::vector<Eigen::Index> idx{1, 5, 11};
  PartialDctOperator op(n, idx);
  Rng rng(4);
  const Vector x = oracles::random_normal(rng, n);
  const Vector full = oracles::dct2_bruteforce(x);
  const Vector sel = op.apply(x);
  REQUIRE(sel.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK(sel[i] == doctest::Approx(full[idx[i]]).epsilon(1e-12));
  CHECK_THROWS_AS(PartialDctOperator(16, std::vector<Eigen::Index>{3, 3}),
                  std::invalid_argument);
}

TEST_CASE("haar analysis of a constant image concentrates all energy") {
  const Eigen::Index side = 8;
  Vector img = Vector::Constant(side * side, 3.25);
  haar2d_forward(img, side, 3);
  // level 3 on 8x8: single approximation coefficient at (0,0)
  CHECK(img[0] == doctest::Approx(3.25 * side).epsilon(1e-12));
  img[0] = 0.0;
  CHECK(img.lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("haar round trip and isometry") {
  const Eigen::Index side = 16;
  Rng rng(6);
  Vector img = oracles::random_normal(rng, side * side);
  const Vector orig = img;
  haar2d_forward(img, side, 4);
  CHECK(img.norm() == doctest::Approx(orig.norm()).epsilon(1e-12));
  haar2d_inverse(img, side, 4);
  CHECK((img - orig).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK_THROWS_AS(haar2d_forward(img, 15, 1), std::invalid_argument);
  Vector odd(12 * 12);
  CHECK_THROWS_AS(haar2d_forward(odd, 12, 3), std::invalid_argument);
}

TEST_CASE("spectral norm: identity, diagonal, SVD oracle") {
  IdentityOperator id(6);
  CHECK(spectral_norm(id).value == doctest::Approx(1.0).epsilon(1e-6));

  Matrix d = Matrix::Zero(3, 3);
  d.diagonal() << 1, 2, 5;
  DenseOperator diag_op(d);
  CHECK(spectral_norm(diag_op).value == doctest::Approx(5.0).epsilon(1e-6));

  Rng rng(8);
  const Matrix a = oracles::random_normal_matrix(rng, 10, 6);
  DenseOperator op(a);
  const double want = oracles::svd_spectral_norm(a);
  CHECK(spectral_norm(op, 1e-9, 2000).value ==
        doctest::Approx(want).epsilon(1e-6));

  DenseOperator opt(Matrix(a.transpose()));
  CHECK(spectral_norm(op, 1e-9, 2000).value ==
        doctest::Approx(spectral_norm(opt, 1e-9, 2000).value).epsilon(1e-6));

  CHECK_THROWS_AS(spectral_norm(op, 0.0), std::invalid_argument);
}

TEST_CASE("concurrent applies on one operator are consistent") {
  Rng rng(13);
  PartialDctOperator dct(64, {0, 2, 5, 11, 23, 47, 63});
  HaarBlurOperator hb(16, 2, gaussian_kernel_1d(5, 1.5));
  const Vector x_dct = oracles::random_normal(rng, 64);
  const Vector x_hb = oracles::random_normal(rng, 256);
  const Vector want_dct = dct.apply(x_dct);
  const Vector want_hb = hb.apply(x_hb);

  std::atomic<int> mismatches{0};
  auto hammer = [&]() {
    for (int t = 0; t < 200; ++t) {
      if ((dct.apply(x_dct) - want_dct).norm() != 0.0) ++mismatches;
      if ((hb.apply(x_hb) - want_hb).norm() != 0.0) ++mismatches;
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) pool.emplace_back(hammer);
  for (auto& th : pool) th.join();
  CHECK(mismatches.load() == 0);
}

TEST_CASE("binary matrix format round trip with little-endian header") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "pn_mat.bin").string();
  Rng rng(9);
  const Matrix a = oracles::random_normal_matrix(rng, 3, 4);
  write_dense_matrix(path, a);

  std::string raw = read_text_file(path);
  REQUIRE(raw.size() == 16 + 12 * 8);
  CHECK(static_cast<unsigned char>(raw[0]) == 3);  // rows, little-endian
  CHECK(static_cast<unsigned char>(raw[1]) == 0);
  CHECK(static_cast<unsigned char>(raw[8]) == 4);  // cols

  const Matrix b = read_dense_matrix(path);
  REQUIRE(b.rows() == 3);
  REQUIRE(b.cols() == 4);
  CHECK((a - b).lpNorm<Eigen::Infinity>() == 0.0);
  fs::remove(path);
}
