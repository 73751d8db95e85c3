#include "proxnewton/bench.hpp"

#include <cmath>
#include <stdexcept>

#include "proxnewton/io.hpp"
#include "proxnewton/rng.hpp"

namespace proxnewton {

namespace {

constexpr double kNoiseVarLogistic = 0.1;   // label noise variance
constexpr double kStudentNoiseScale = 0.1;  // measurement noise scale
constexpr double kImageNoiseScale = 1e-3;

double family_default_clambda(const std::string& family) {
  return family == "image-restore" ? 1e-2 : 0.1;
}

Eigen::Index isqrt_exact(Eigen::Index n) {
  const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(
      static_cast<double>(n))));
  if (side * side != n)
    throw std::invalid_argument("image-restore: n must be a perfect square");
  return side;
}

}  // namespace

void BenchSpec::apply_defaults() {
  if (std::isnan(c_lambda)) c_lambda = family_default_clambda(family);
  if (std::isnan(tol)) tol = family == "image-restore" ? 1e-4 : 1e-5;
  if (family == "logistic-l1" || family == "logistic-group") {
    if (n == 0) n = 200;
    if (m == 0) m = 2000;
    if (s == 0) s = 10;
    if (family == "logistic-group" && l == 0) l = 20;
  } else if (family == "student-l1") {
    if (n == 0) n = 4096;
    if (m == 0) m = n / 8;
    if (s == 0) s = n / 40;
  } else if (family == "student-group") {
    if (n == 0) n = 4096;
    if (m == 0) m = n / 8;
    if (l == 0) l = 256;
    if (s == 0) s = 16;
  } else if (family == "image-restore") {
    if (n == 0) n = 64 * 64;
    const Eigen::Index side = isqrt_exact(n);
    if (haar_level == 0) haar_level = side >= 256 ? 4 : 2;
  } else {
    throw std::invalid_argument("unknown benchmark family: " + family);
  }
}

double logistic_lambda_max(const Matrix& features, const Vector& labels) {
  const auto m = features.rows();
  Vector pos = Vector::Zero(features.cols());
  Vector neg = Vector::Zero(features.cols());
  double m_pos = 0.0, m_neg = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (labels[i] > 0.0) {
      pos += features.row(i);
      m_pos += 1.0;
    } else {
      neg += features.row(i);
      m_neg += 1.0;
    }
  }
  const double dm = static_cast<double>(m);
  return ((m_neg / dm) * pos - (m_pos / dm) * neg).norm() / dm;
}

namespace {

struct LogisticData {
  Matrix features;  // raw a_i rows
  Vector labels;    // +-1
  Vector y_true;
  double v_true = 0.0;
};

// Draw order: y_true support, y_true values (ascending support index),
// v_true, then per row its support followed by its values, then the m label
// noise draws.
LogisticData gen_logistic_data(const BenchSpec& spec, Rng& rng) {
  LogisticData d;
  const auto n = spec.n, m = spec.m, s = spec.s;
  if (s > n) throw std::invalid_argument("logistic: s > n");
  d.y_true = Vector::Zero(n);
  const auto y_support =
      rng.sample_indices(static_cast<std::size_t>(n),
                         static_cast<std::size_t>(std::min(10 * s, n)));
  for (auto idx : y_support) d.y_true[static_cast<Eigen::Index>(idx)] =
      rng.normal();
  d.v_true = rng.normal();

  d.features = Matrix::Zero(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto support = rng.sample_indices(static_cast<std::size_t>(n),
                                            static_cast<std::size_t>(s));
    for (auto idx : support)
      d.features(i, static_cast<Eigen::Index>(idx)) = rng.normal();
  }

  const double noise_sd = std::sqrt(kNoiseVarLogistic);
  d.labels.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double score =
        d.features.row(i).dot(d.y_true) + d.v_true + noise_sd * rng.normal();
    d.labels[i] = score >= 0.0 ? 1.0 : -1.0;
  }
  return d;
}

GeneratedProblem assemble_logistic(const BenchSpec& spec,
                                   const LogisticData& d, Regularizer reg,
                                   double lambda) {
  const auto n = spec.n, m = spec.m;
  Matrix a(m, n + 1);
  for (Eigen::Index i = 0; i < m; ++i) {
    a.row(i).head(n) = d.labels[i] * d.features.row(i);
    a(i, n) = d.labels[i];
  }
  GeneratedProblem gp;
  gp.problem.smooth = SmoothModel::logistic(static_cast<int>(m));
  gp.problem.op = std::make_shared<DenseOperator>(std::move(a));
  gp.problem.shift = Vector::Zero(m);
  gp.problem.reg = std::move(reg);
  gp.problem.meta.family = spec.family;
  gp.problem.meta.seed = spec.seed;
  gp.x0 = Vector::Zero(n + 1);
  gp.truth.resize(n + 1);
  gp.truth.head(n) = d.y_true;
  gp.truth[n] = d.v_true;
  gp.lambda = lambda;
  return gp;
}

struct StudentData {
  std::shared_ptr<PartialDctOperator> op;
  Vector x_true;
  Vector b;
};

// Draw order: measurement index set J, then the signal (support; per entry a
// sign word and a uniform magnitude exponent), then the m noise draws.
StudentData gen_student_data(const BenchSpec& spec, bool group_sparse,
                             int noise_dof, Rng& rng) {
  StudentData d;
  const auto n = spec.n, m = spec.m;
  if (m > n) throw std::invalid_argument("student: m > n");
  auto j_set = rng.sample_indices(static_cast<std::size_t>(n),
                                  static_cast<std::size_t>(m));
  std::vector<Eigen::Index> indices(j_set.begin(), j_set.end());
  d.op = std::make_shared<PartialDctOperator>(n, std::move(indices));

  d.x_true = Vector::Zero(n);
  auto draw_entry = [&]() {
    const double sgn = rng.sign();
    return sgn * std::pow(10.0, spec.dyn_range_db * rng.uniform() / 20.0);
  };
  if (!group_sparse) {
    const auto support = rng.sample_indices(static_cast<std::size_t>(n),
                                            static_cast<std::size_t>(spec.s));
    for (auto idx : support)
      d.x_true[static_cast<Eigen::Index>(idx)] = draw_entry();
  } else {  // s whole groups of size n/l
    if (spec.n % spec.l != 0)
      throw std::invalid_argument("student-group: l must divide n");
    const Eigen::Index bs = spec.n / spec.l;
    const auto groups = rng.sample_indices(static_cast<std::size_t>(spec.l),
                                           static_cast<std::size_t>(spec.s));
    for (auto g : groups) {
      const Eigen::Index base = static_cast<Eigen::Index>(g) * bs;
      for (Eigen::Index i = 0; i < bs; ++i) d.x_true[base + i] = draw_entry();
    }
  }

  d.b = d.op->apply(d.x_true);
  for (Eigen::Index i = 0; i < m; ++i)
    d.b[i] += kStudentNoiseScale * rng.student_t(noise_dof);
  return d;
}

BenchSpec normalized(const BenchSpec& spec_in, const char* family) {
  BenchSpec spec = spec_in;
  if (spec.family.empty()) spec.family = family;
  spec.apply_defaults();
  return spec;
}

std::vector<Group> contiguous_groups(Eigen::Index n, Eigen::Index l) {
  if (l <= 0 || n % l != 0)
    throw std::invalid_argument("groups: l must divide n");
  const Eigen::Index bs = n / l;
  std::vector<Group> groups(static_cast<std::size_t>(l));
  for (Eigen::Index g = 0; g < l; ++g) {
    auto& grp = groups[static_cast<std::size_t>(g)];
    grp.indices.resize(static_cast<std::size_t>(bs));
    for (Eigen::Index i = 0; i < bs; ++i) grp.indices[i] = g * bs + i;
  }
  return groups;
}

}  // namespace

GeneratedProblem gen_logistic_l1(const BenchSpec& spec_in) {
  const BenchSpec spec = normalized(spec_in, "logistic-l1");
  Rng rng(spec.seed);
  LogisticData d = gen_logistic_data(spec, rng);
  const double lambda =
      spec.c_lambda * logistic_lambda_max(d.features, d.labels);
  Vector weights = Vector::Ones(spec.n + 1);
  weights[spec.n] = 0.0;  // intercept unpenalized
  GeneratedProblem gp = assemble_logistic(
      spec, d, Regularizer::l1(lambda, std::move(weights)), lambda);
  return gp;
}

GeneratedProblem gen_logistic_group(const BenchSpec& spec_in) {
  const BenchSpec spec = normalized(spec_in, "logistic-group");
  Rng rng(spec.seed);
  LogisticData d = gen_logistic_data(spec, rng);
  const double lambda =
      spec.c_lambda * logistic_lambda_max(d.features, d.labels);
  // Contiguous equal blocks over the features; the intercept coordinate n
  // belongs to no group and so stays unpenalized.
  auto groups = contiguous_groups(spec.n, spec.l);
  return assemble_logistic(
      spec, d, Regularizer::group_l2(lambda, std::move(groups)), lambda);
}

GeneratedProblem gen_student_l1(const BenchSpec& spec_in) {
  const BenchSpec spec = normalized(spec_in, "student-l1");
  Rng rng(spec.seed);
  StudentData d = gen_student_data(spec, /*group_sparse=*/false,
                                   /*noise_dof=*/4, rng);
  GeneratedProblem gp;
  gp.problem.smooth = SmoothModel::student_t(0.25);
  gp.problem.op = d.op;
  gp.problem.shift = d.b;
  gp.problem.meta.family = spec.family;
  gp.problem.meta.seed = spec.seed;
  gp.truth = d.x_true;
  gp.x0 = d.op->apply_adjoint(d.b);

  PointEval at_zero = evaluate(gp.problem, Vector::Zero(spec.n));
  const double lambda =
      spec.c_lambda *
      f_grad(gp.problem, at_zero).lpNorm<Eigen::Infinity>();
  gp.problem.reg = Regularizer::l1(lambda);
  gp.lambda = lambda;
  return gp;
}

GeneratedProblem gen_student_group(const BenchSpec& spec_in) {
  const BenchSpec spec = normalized(spec_in, "student-group");
  Rng rng(spec.seed);
  StudentData d = gen_student_data(spec, /*group_sparse=*/true,
                                   /*noise_dof=*/5, rng);
  GeneratedProblem gp;
  gp.problem.smooth = SmoothModel::student_t(0.2);
  gp.problem.op = d.op;
  gp.problem.shift = d.b;
  gp.problem.meta.family = spec.family;
  gp.problem.meta.seed = spec.seed;
  gp.truth = d.x_true;
  gp.x0 = d.op->apply_adjoint(d.b);

  PointEval at_zero = evaluate(gp.problem, Vector::Zero(spec.n));
  const double lambda = spec.c_lambda * f_grad(gp.problem, at_zero).norm();
  gp.problem.reg =
      Regularizer::group_l2(lambda, contiguous_groups(spec.n, spec.l));
  gp.lambda = lambda;
  return gp;
}

GeneratedProblem gen_image_restore(const BenchSpec& spec_in) {
  const BenchSpec spec = normalized(spec_in, "image-restore");
  Rng rng(spec.seed);
  const Eigen::Index side = isqrt_exact(spec.n);
  Vector truth = spec.image_path.empty() ? synthetic_image(side)
                                         : read_pgm(spec.image_path, side);

  auto op = std::make_shared<HaarBlurOperator>(side, spec.haar_level,
                                               gaussian_kernel_1d(9, 4.0));
  // Observation: blur the image, add heavy-tailed noise. Draw order: the n
  // noise values, nothing else is random.
  Vector b;
  op->blur().apply(truth, b);
  for (Eigen::Index i = 0; i < b.size(); ++i)
    b[i] += kImageNoiseScale * rng.student_t(1);

  GeneratedProblem gp;
  gp.problem.smooth = SmoothModel::student_t(1.0);
  gp.problem.op = op;
  gp.problem.shift = b;
  gp.problem.reg = Regularizer::l1(spec.c_lambda);
  gp.problem.meta.family = spec.family;
  gp.problem.meta.seed = spec.seed;
  gp.truth = truth;
  gp.lambda = spec.c_lambda;
  gp.nu_min_override = 1e-4;
  gp.image_side = side;
  gp.haar_level = spec.haar_level;

  // y0 = B b: analysis coefficients of the observed image.
  Vector y0 = b;
  haar2d_forward(y0, side, spec.haar_level);
  gp.x0 = std::move(y0);
  return gp;
}

GeneratedProblem generate(const BenchSpec& spec) {
  if (spec.family == "logistic-l1") return gen_logistic_l1(spec);
  if (spec.family == "logistic-group") return gen_logistic_group(spec);
  if (spec.family == "student-l1") return gen_student_l1(spec);
  if (spec.family == "student-group") return gen_student_group(spec);
  if (spec.family == "image-restore") return gen_image_restore(spec);
  throw std::invalid_argument("unknown benchmark family: " + spec.family);
}

BenchMetrics compute_metrics(const CompositeProblem& p, const RunResult& run) {
  BenchMetrics m;
  m.F = run.final_F;
  m.r_norm = run.final_r_norm;
  m.iters = run.outer_iters;
  m.wall_ms = run.wall_ms;
  (void)p;
  return m;
}

double psnr(const Vector& img, const Vector& reference) {
  if (img.size() != reference.size())
    throw std::invalid_argument("psnr: size mismatch");
  const double mse = (img - reference).squaredNorm() /
                     static_cast<double>(img.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

Vector synthetic_image(Eigen::Index side) {
  if (side % 16 != 0)
    throw std::invalid_argument("synthetic_image: side must be a multiple of 16");
  // Piecewise-constant blocks on sixteenth-of-side boundaries, so the image
  // is sparse under the Haar transforms the restoration family uses.
  Vector img = Vector::Constant(side * side, 0.15);
  const Eigen::Index u = side / 16;
  auto rect = [&](Eigen::Index r0, Eigen::Index r1, Eigen::Index c0,
                  Eigen::Index c1, double val) {
    for (Eigen::Index r = r0 * u; r < r1 * u; ++r)
      for (Eigen::Index c = c0 * u; c < c1 * u; ++c) img[r * side + c] = val;
  };
  rect(2, 6, 2, 8, 0.90);
  rect(4, 10, 10, 14, 0.55);
  rect(9, 13, 3, 7, 0.05);
  rect(12, 15, 9, 12, 0.75);
  rect(1, 3, 11, 15, 0.35);
  return img;
}

Vector restore_image(const GeneratedProblem& gp, const Vector& y) {
  Vector img = y;
  haar2d_inverse(img, gp.image_side, gp.haar_level);
  return img.cwiseMax(0.0).cwiseMin(1.0);
}

Vector observed_image(const GeneratedProblem& gp) {
  return gp.problem.shift.cwiseMax(0.0).cwiseMin(1.0);
}

}  // namespace proxnewton
