#pragma once

#include <limits>
#include <optional>
#include <string>

#include "proxnewton/problem.hpp"
#include "proxnewton/solver.hpp"

namespace proxnewton {

/// Seeded description of one benchmark instance. Sizes left at 0 pick the
/// family's desk-scale default (full-scale sizes remain reachable by setting
/// them explicitly). Generation is bit-reproducible: every random quantity is
/// drawn from one counter-based stream in the order documented on each
/// generator.
struct BenchSpec {
  std::string family;  // logistic-l1 | logistic-group | student-l1 |
                       // student-group | image-restore
  std::uint64_t seed = 1;
  Eigen::Index n = 0;      // features / signal length / pixels
  Eigen::Index m = 0;      // samples / measurements
  Eigen::Index s = 0;      // sparsity (entries or groups)
  Eigen::Index l = 0;      // group count
  double dyn_range_db = 20.0;
  // Relative regularization strength (absolute lambda for image-restore);
  // NaN picks the family default (0.1, image 1e-2).
  double c_lambda = std::numeric_limits<double>::quiet_NaN();
  // NaN picks the family default (1e-5, image 1e-4).
  double tol = std::numeric_limits<double>::quiet_NaN();
  int haar_level = 0;      // 0: default for the image side
  std::string image_path;  // optional PGM source for image-restore

  void apply_defaults();
};

struct GeneratedProblem {
  CompositeProblem problem;
  Vector x0;
  Vector truth;            // x_true where the family has one
  double lambda = 0.0;
  std::optional<double> nu_min_override;  // image family raises the nu floor
  Eigen::Index image_side = 0;
  int haar_level = 0;
};

GeneratedProblem gen_logistic_l1(const BenchSpec& spec);
GeneratedProblem gen_logistic_group(const BenchSpec& spec);
GeneratedProblem gen_student_l1(const BenchSpec& spec);
GeneratedProblem gen_student_group(const BenchSpec& spec);
GeneratedProblem gen_image_restore(const BenchSpec& spec);

/// Dispatch on spec.family.
GeneratedProblem generate(const BenchSpec& spec);

/// The smallest lambda for which the penalized block of the l1-logistic
/// problem stays identically zero at the solution, evaluated from the raw
/// feature rows and labels. With m+/m- the label counts,
///   lambda_max = (1/m) || (m-/m) sum_{b_i=+1} a_i - (m+/m) sum_{b_i=-1} a_i ||_2.
/// The vector inside the norm is -grad_y f at (y,v) = (0, log(m+/m-)); its
/// Euclidean norm dominates the max-norm bound the optimality condition
/// needs, so the zero solution survives with margin.
double logistic_lambda_max(const Matrix& features, const Vector& labels);

struct BenchMetrics {
  double F = 0.0;
  double r_norm = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  std::optional<double> psnr;
};

BenchMetrics compute_metrics(const CompositeProblem& p, const RunResult& run);

/// Peak signal-to-noise ratio of two [0,1] images; +infinity for identical
/// inputs (the "exact" marker).
double psnr(const Vector& img, const Vector& reference);

/// Deterministic geometric test image (flat background, rectangles, disc,
/// diagonal ramp) with side*side pixels in [0,1].
Vector synthetic_image(Eigen::Index side);

/// Wavelet coefficients -> restored image for the image-restore family.
Vector restore_image(const GeneratedProblem& gp, const Vector& y);

/// Blurred noisy observation b of the image family (pixel domain).
Vector observed_image(const GeneratedProblem& gp);

}  // namespace proxnewton
