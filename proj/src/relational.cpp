#include "relrbf/relational.hpp"

#include "relrbf/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace relrbf {

namespace {
constexpr double kSumTol = 1e-12;
}

RelationalPrototype RelationalPrototype::make(const Vector& u, PrototypeMode mode) {
  if (!u.allFinite()) throw Error(Errc::NonFinite, "prototype weights must be finite");
  const double total = u.sum();
  if (std::abs(total) <= kSumTol) throw Error(Errc::ZeroWeightSum, "prototype weights sum to zero");
  if (mode == PrototypeMode::medoid && (u.array() != 0.0).count() != 1) {
    throw Error(Errc::InvalidConfig, "medoid prototypes need exactly one nonzero weight");
  }
  if ((u.array() < 0.0).any()) warn("negative prototype weights place the prototype outside the convex hull");
  return RelationalPrototype(u / total, mode);
}

RelationalPrototype RelationalPrototype::unit(Index n, Index m, PrototypeMode mode) {
  if (m < 0 || m >= n) throw Error(Errc::DimensionMismatch, "node index out of range");
  Vector w = Vector::Zero(n);
  w(m) = 1.0;
  return RelationalPrototype(std::move(w), mode);
}

std::optional<Index> RelationalPrototype::medoid_index() const {
  Index hit = -1;
  for (Index i = 0; i < weights_.size(); ++i) {
    if (weights_(i) == 0.0) continue;
    if (weights_(i) != 1.0 || hit >= 0) return std::nullopt;
    hit = i;
  }
  if (hit < 0) return std::nullopt;
  return hit;
}

Vector relational_distance(const AdjacencyMatrix& r, const RelationalPrototype& v) {
  if (v.size() != r.size()) {
    throw Error(Errc::DimensionMismatch,
                "prototype has " + std::to_string(v.size()) + " weights for " + std::to_string(r.size()) + " nodes");
  }
  if (std::abs(v.weights().sum() - 1.0) > kSumTol) {
    throw Error(Errc::UnnormalizedPrototype, "prototype weights do not sum to one");
  }
  const Vector rv = r.entries() * v.weights();
  const double self = v.weights().dot(rv);
  return rv.array() - 0.5 * self;
}

Matrix relational_distances(const AdjacencyMatrix& r, const Matrix& weights) {
  if (weights.cols() != r.size()) throw Error(Errc::DimensionMismatch, "prototype weights vs graph size");
  // R is symmetric, so VR has rows (R v_j)ᵀ.
  Matrix vr = weights * r.entries();
  for (Index j = 0; j < vr.rows(); ++j) {
    const double self = vr.row(j).dot(weights.row(j));
    vr.row(j).array() -= 0.5 * self;
  }
  return vr;
}

Index nearest_medoid(const AdjacencyMatrix& r, std::span<const int> members) {
  if (members.empty()) throw Error(Errc::EmptySet, "medoid of an empty set");
  Index best = -1;
  double best_sum = std::numeric_limits<double>::infinity();
  for (int m : members) {
    double s = 0.0;
    for (int i : members) s += r(m, i);
    if (s < best_sum || (s == best_sum && m < best)) {
      best_sum = s;
      best = m;
    }
  }
  return best;
}

DistanceState initial_distances(const AdjacencyMatrix& r, std::span<const RelationalPrototype> prototypes) {
  DistanceState state;
  state.d.resize(static_cast<Index>(prototypes.size()), r.size());
  for (std::size_t j = 0; j < prototypes.size(); ++j) {
    state.d.row(static_cast<Index>(j)) = relational_distance(r, prototypes[j]).transpose();
  }
  return state;
}

}  // namespace relrbf
