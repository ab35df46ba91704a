#pragma once

#include "relrbf/config.hpp"
#include "relrbf/network.hpp"
#include "relrbf/relational.hpp"
#include "relrbf/rng.hpp"

#include <cstdint>
#include <vector>

namespace relrbf {

/// Hard assignment of n objects to `clusters` groups (0-based).
struct Partition {
  std::vector<int> assignment;
  int clusters = 0;

  std::vector<std::vector<int>> members() const;
  std::vector<int> sizes() const;
  bool operator==(const Partition&) const = default;
};

/// Random balanced partition: a shuffled round-robin, so no cluster is empty.
Partition random_partition(int n, int clusters, Rng& rng);

struct KMeansResult {
  Partition partition;
  std::vector<RelationalPrototype> prototypes;
  std::vector<Partition> history;  // initial partition first
  std::vector<double> objective;   // Σ_i d(prototype of i's cluster, i), per history entry
  int iterations = 0;
};

/// Relational k-means seeded with a random partition from (seed, Stream::Partition).
KMeansResult relational_kmeans(const AdjacencyMatrix& r, int clusters, std::uint64_t seed, int max_iter = 300);
/// Relational k-means from a given starting partition; runs until the
/// partition repeats. Empty clusters steal the observation farthest from its
/// own prototype.
KMeansResult relational_kmeans(const AdjacencyMatrix& r, const Partition& initial, int max_iter = 300);

/// Prototype weights for a partition: normalized cluster indicators (free
/// mode) or unit vectors on each cluster medoid.
Matrix partition_weights(const AdjacencyMatrix& r, const Partition& p, PrototypeMode mode);

/// w0, W ~ U[weight_init], σ ~ U[sigma_init], drawn from (seed, Stream::Params)
/// in the order w0, W (row-major), σ.
NetworkParams init_params(int prototypes, int outputs, const TrainConfig& config, std::uint64_t seed);
NetworkParams init_params(int prototypes, int outputs, const TrainConfig& config, Rng& rng);

struct Split {
  std::vector<int> train;
  std::vector<int> test;
  std::vector<int> val;
};

/// round(fraction·n) training indices; the remainder is halved with the odd
/// element going to the test set. With labels, classes are interleaved so each
/// set keeps roughly the class proportions.
Split split(int n, std::uint64_t seed, const std::vector<int>* labels = nullptr, double train_fraction = 0.7);

}  // namespace relrbf
