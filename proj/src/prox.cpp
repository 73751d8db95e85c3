#include "proxnewton/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace proxnewton {

Regularizer Regularizer::l1(double lambda, Vector weights) {
  Regularizer r;
  r.kind = RegKind::L1;
  r.lambda = lambda;
  r.weights = std::move(weights);
  return r;
}

Regularizer Regularizer::group_l2(double lambda, std::vector<Group> groups) {
  Regularizer r;
  r.kind = RegKind::GroupL2;
  r.lambda = lambda;
  r.groups = std::move(groups);
  return r;
}

void Regularizer::validate(Eigen::Index dim, Eigen::Index expect_cover) const {
  if (lambda < 0.0) throw std::invalid_argument("Regularizer: lambda < 0");
  if (kind == RegKind::L1 && weights.size() > 0) {
    if (weights.size() != dim)
      throw std::invalid_argument("Regularizer: weight length != dim");
    if ((weights.array() < 0.0).any())
      throw std::invalid_argument("Regularizer: negative weight");
  }
  if (kind == RegKind::GroupL2) {
    std::vector<char> seen(static_cast<std::size_t>(dim), 0);
    for (const auto& g : groups) {
      if (g.weight < 0.0)
        throw std::invalid_argument("Regularizer: negative group weight");
      for (Eigen::Index i : g.indices) {
        if (i < 0 || i >= dim)
          throw std::invalid_argument("Regularizer: group index out of range");
        if (seen[static_cast<std::size_t>(i)])
          throw std::invalid_argument("Regularizer: groups overlap");
        seen[static_cast<std::size_t>(i)] = 1;
      }
    }
    if (expect_cover >= 0) {
      for (Eigen::Index i = 0; i < expect_cover; ++i)
        if (!seen[static_cast<std::size_t>(i)])
          throw std::invalid_argument(
              "Regularizer: groups do not cover the penalized block");
    }
  }
}

namespace {

inline double group_norm(const Vector& x, const Group& g) {
  double s = 0.0;
  for (Eigen::Index i : g.indices) s += x[i] * x[i];
  return std::sqrt(s);
}

}  // namespace

double phi_value(const Regularizer& reg, const Vector& x) {
  switch (reg.kind) {
    case RegKind::Zero:
      return 0.0;
    case RegKind::L1: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        acc += reg.coord_weight(i) * std::abs(x[i]);
      return reg.lambda * acc;
    }
    case RegKind::GroupL2: {
      double acc = 0.0;
      for (const auto& g : reg.groups) acc += g.weight * group_norm(x, g);
      return reg.lambda * acc;
    }
  }
  return 0.0;
}

double phi_diff(const Regularizer& reg, const Vector& x, const Vector& z) {
  if (x.size() != z.size())
    throw std::invalid_argument("phi_diff: length mismatch");
  double acc = 0.0, comp = 0.0;
  auto add = [&](double d) {
    const double term = d - comp;
    const double next = acc + term;
    comp = (next - acc) - term;
    acc = next;
  };
  switch (reg.kind) {
    case RegKind::Zero:
      return 0.0;
    case RegKind::L1:
      for (Eigen::Index i = 0; i < x.size(); ++i)
        add(reg.coord_weight(i) * (std::abs(x[i]) - std::abs(z[i])));
      break;
    case RegKind::GroupL2:
      for (const auto& g : reg.groups)
        add(g.weight * (group_norm(x, g) - group_norm(z, g)));
      break;
  }
  return reg.lambda * acc;
}

void prox(const Regularizer& reg, const Vector& v, double t, Vector& out) {
  if (t <= 0.0) throw std::invalid_argument("prox: step t must be > 0");
  switch (reg.kind) {
    case RegKind::Zero:
      out = v;
      return;
    case RegKind::L1: {
      out.resize(v.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double thr = t * reg.lambda * reg.coord_weight(i);
        const double mag = std::abs(v[i]) - thr;
        out[i] = mag > 0.0 ? (v[i] > 0.0 ? mag : -mag) : 0.0;
      }
      return;
    }
    case RegKind::GroupL2: {
      out = v;  // coordinates outside every group pass through
      for (const auto& g : reg.groups) {
        const double nrm = group_norm(v, g);
        const double thr = t * reg.lambda * g.weight;
        // ||v_G|| = 0 keeps the zero block: the unique minimizer.
        const double scale = nrm > thr ? 1.0 - thr / nrm : 0.0;
        for (Eigen::Index i : g.indices) out[i] = scale * v[i];
      }
      return;
    }
  }
}

Vector prox(const Regularizer& reg, const Vector& v, double t) {
  Vector out;
  prox(reg, v, t, out);
  return out;
}

void residual_from_gradient(const Regularizer& reg, const Vector& x,
                            const Vector& g, Vector& out) {
  if (x.size() != g.size())
    throw std::invalid_argument("residual_from_gradient: length mismatch");
  Vector p;
  prox(reg, x - g, 1.0, p);
  out = x - p;
}

Vector residual_from_gradient(const Regularizer& reg, const Vector& x,
                              const Vector& g) {
  Vector out;
  residual_from_gradient(reg, x, g, out);
  return out;
}

}  // namespace proxnewton
