#pragma once

#include "relrbf/graph.hpp"

#include <optional>
#include <span>

namespace relrbf {

enum class PrototypeMode { free, medoid };

/// Normalized weight vector over the graph nodes. The latent prototype is the
/// weighted average of the (unknown) node vectors with these weights.
class RelationalPrototype {
 public:
  /// Normalizes `u` by its sum. In medoid mode `u` must have exactly one
  /// nonzero entry.
  static RelationalPrototype make(const Vector& u, PrototypeMode mode = PrototypeMode::free);
  /// The prototype sitting on node `m`.
  static RelationalPrototype unit(Index n, Index m, PrototypeMode mode = PrototypeMode::medoid);

  const Vector& weights() const { return weights_; }
  PrototypeMode mode() const { return mode_; }
  Index size() const { return weights_.size(); }
  /// Node index when the weights are a unit basis vector.
  std::optional<Index> medoid_index() const;

 private:
  RelationalPrototype(Vector w, PrototypeMode mode) : weights_(std::move(w)), mode_(mode) {}

  Vector weights_;
  PrototypeMode mode_ = PrototypeMode::free;
};

/// Prototype-to-node squared distances d_i = (Rv)_i − vᵀRv/2.
Vector relational_distance(const AdjacencyMatrix& r, const RelationalPrototype& v);

/// Batched form for a c×n matrix of prototype weights (one prototype per row).
/// Rows are not checked for normalization.
Matrix relational_distances(const AdjacencyMatrix& r, const Matrix& weights);

/// Member minimizing the summed dissimilarity to the other members; ties go to
/// the smallest index.
Index nearest_medoid(const AdjacencyMatrix& r, std::span<const int> members);

/// Prototype-by-observation distance matrix carried across training epochs.
struct DistanceState {
  Matrix d;  // c×n
  int epoch = 0;
};

DistanceState initial_distances(const AdjacencyMatrix& r, std::span<const RelationalPrototype> prototypes);

}  // namespace relrbf
