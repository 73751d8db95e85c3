#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "proxnewton/transforms.hpp"

namespace proxnewton {

enum class RegKind { Zero, L1, GroupL2 };

struct Group {
  std::vector<Eigen::Index> indices;
  double weight = 1.0;
};

/// Convex regularizer phi with an exact closed-form proximity operator.
///   zero:     phi = 0
///   l1:       phi(x) = lambda * sum_i w_i |x_i|
///   group-l2: phi(x) = lambda * sum_g w_g ||x_G||_2
/// Weights default to 1; a weight of 0 exempts a coordinate (the intercept
/// of the logistic families). Groups must be disjoint; coordinates outside
/// every group are unpenalized.
struct Regularizer {
  RegKind kind = RegKind::Zero;
  double lambda = 0.0;
  Vector weights;              // l1; empty means all-ones
  std::vector<Group> groups;   // group-l2

  static Regularizer zero() { return {}; }
  static Regularizer l1(double lambda, Vector weights = Vector());
  static Regularizer group_l2(double lambda, std::vector<Group> groups);

  double coord_weight(Eigen::Index i) const {
    return weights.size() > 0 ? weights[i] : 1.0;
  }

  /// Throws if groups overlap or lambda/weights are negative. When
  /// `expect_cover` >= 0, additionally requires the groups to cover
  /// exactly {0,...,expect_cover-1}.
  void validate(Eigen::Index dim, Eigen::Index expect_cover = -1) const;
};

double phi_value(const Regularizer& reg, const Vector& x);

/// phi(x) - phi(z), accumulated term by term (compensated) so the result is
/// accurate even when both values dwarf their difference.
double phi_diff(const Regularizer& reg, const Vector& x, const Vector& z);

/// argmin_y { t*phi(y) + 1/2 ||y - v||^2 }, exact closed form. t > 0.
void prox(const Regularizer& reg, const Vector& v, double t, Vector& out);
Vector prox(const Regularizer& reg, const Vector& v, double t);

/// r-style residual for a gradient g at x: x - prox_phi(x - g) with unit
/// proximal step. With g = grad f(x) this is the prox-gradient mapping, zero
/// exactly at stationary points; with g = grad f(x_k) + (H_k + mu_k I)(x-x_k)
/// it is the subproblem residual R_k.
void residual_from_gradient(const Regularizer& reg, const Vector& x,
                            const Vector& g, Vector& out);
Vector residual_from_gradient(const Regularizer& reg, const Vector& x,
                              const Vector& g);

}  // namespace proxnewton
