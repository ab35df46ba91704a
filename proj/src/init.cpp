#include "relrbf/init.hpp"

#include "relrbf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace relrbf {

void TrainConfig::check() const {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  if (!(0.0 < eta_min && eta_min <= eta_max)) fail("need 0 < eta_min <= eta_max");
  if (!(weight_init_lo <= weight_init_hi)) fail("weight_init range is empty");
  if (!(0.0 < sigma_init_lo && sigma_init_lo <= sigma_init_hi)) fail("sigma_init range must be positive");
  if (!(0.0 < lr_decay && lr_decay < 1.0 && 1.0 < lr_growth)) fail("need 0 < lr_decay < 1 < lr_growth");
  if (!(mse_reject_ratio >= 1.0)) fail("mse_reject_ratio must be >= 1");
  if (patience_stop < 1 || patience_grow < 1) fail("patience values must be positive");
  if (c_init < 1 || c_init > c_max) fail("need 1 <= c_init <= c_max");
  if (max_epochs < 0) fail("max_epochs must be >= 0");
  if (exit_window < 1) fail("exit_window must be positive");
  if (!(sigma_min > 0.0)) fail("sigma_min must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train_fraction must lie in (0, 1)");
  if (kmeans_max_iter < 1) fail("kmeans_max_iter must be positive");
}

std::vector<std::vector<int>> Partition::members() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(clusters));
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out[static_cast<std::size_t>(assignment[i])].push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> Partition::sizes() const {
  std::vector<int> out(static_cast<std::size_t>(clusters), 0);
  for (int a : assignment) ++out[static_cast<std::size_t>(a)];
  return out;
}

Partition random_partition(int n, int clusters, Rng& rng) {
  if (clusters < 1 || clusters > n) {
    throw Error(Errc::InvalidClusterCount, std::to_string(clusters) + " clusters for " + std::to_string(n) + " objects");
  }
  const std::vector<int> perm = random_permutation(n, rng);
  Partition p;
  p.clusters = clusters;
  p.assignment.assign(static_cast<std::size_t>(n), 0);
  for (int pos = 0; pos < n; ++pos) p.assignment[static_cast<std::size_t>(perm[static_cast<std::size_t>(pos)])] = pos % clusters;
  return p;
}

Matrix partition_weights(const AdjacencyMatrix& r, const Partition& p, PrototypeMode mode) {
  const Index n = r.size();
  if (static_cast<Index>(p.assignment.size()) != n) throw Error(Errc::DimensionMismatch, "partition vs graph size");
  Matrix v = Matrix::Zero(p.clusters, n);
  const auto groups = p.members();
  for (int j = 0; j < p.clusters; ++j) {
    const auto& m = groups[static_cast<std::size_t>(j)];
    if (m.empty()) throw Error(Errc::EmptySet, "cluster " + std::to_string(j) + " is empty");
    if (mode == PrototypeMode::medoid) {
      v(j, nearest_medoid(r, m)) = 1.0;
    } else {
      for (int i : m) v(j, i) = 1.0 / static_cast<double>(m.size());
    }
  }
  return v;
}

KMeansResult relational_kmeans(const AdjacencyMatrix& r, int clusters, std::uint64_t seed, int max_iter) {
  const auto n = static_cast<int>(r.size());
  if (clusters < 1 || clusters > n) {
    throw Error(Errc::InvalidClusterCount, std::to_string(clusters) + " clusters for " + std::to_string(n) + " objects");
  }
  Rng rng = make_rng(seed, Stream::Partition);
  return relational_kmeans(r, random_partition(n, clusters, rng), max_iter);
}

KMeansResult relational_kmeans(const AdjacencyMatrix& r, const Partition& initial, int max_iter) {
  const auto n = static_cast<int>(r.size());
  const int c = initial.clusters;
  if (c < 1 || c > n) {
    throw Error(Errc::InvalidClusterCount, std::to_string(c) + " clusters for " + std::to_string(n) + " objects");
  }
  if (static_cast<int>(initial.assignment.size()) != n) throw Error(Errc::DimensionMismatch, "partition vs graph size");

  KMeansResult res;
  Partition current = initial;
  res.history.push_back(current);
  for (int it = 0; it < max_iter; ++it) {
    const Matrix d = relational_distances(r, partition_weights(r, current, PrototypeMode::free));
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += d(current.assignment[static_cast<std::size_t>(i)], i);
    res.objective.push_back(obj);

    Partition next;
    next.clusters = c;
    next.assignment.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Index best = 0;
      for (Index j = 1; j < c; ++j) {
        if (d(j, i) < d(best, i)) best = j;
      }
      next.assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    // Empty-cluster repair: move the observation farthest from its own prototype.
    std::vector<int> sizes = next.sizes();
    for (int k = 0; k < c; ++k) {
      if (sizes[static_cast<std::size_t>(k)] > 0) continue;
      int far = -1;
      for (int i = 0; i < n; ++i) {
        const int a = next.assignment[static_cast<std::size_t>(i)];
        if (sizes[static_cast<std::size_t>(a)] <= 1) continue;
        if (far < 0 || d(a, i) > d(next.assignment[static_cast<std::size_t>(far)], far)) far = i;
      }
      --sizes[static_cast<std::size_t>(next.assignment[static_cast<std::size_t>(far)])];
      next.assignment[static_cast<std::size_t>(far)] = k;
      ++sizes[static_cast<std::size_t>(k)];
    }
    res.iterations = it + 1;
    if (next == current) break;
    current = std::move(next);
    res.history.push_back(current);
  }
  if (res.objective.size() < res.history.size()) {
    const Matrix d = relational_distances(r, partition_weights(r, current, PrototypeMode::free));
    double obj = 0.0;
    for (int i = 0; i < n; ++i) obj += d(current.assignment[static_cast<std::size_t>(i)], i);
    res.objective.push_back(obj);
  }

  const Matrix w = partition_weights(r, current, PrototypeMode::free);
  for (int j = 0; j < c; ++j) res.prototypes.push_back(RelationalPrototype::make(w.row(j).transpose()));
  res.partition = std::move(current);
  return res;
}

NetworkParams init_params(int prototypes, int outputs, const TrainConfig& config, Rng& rng) {
  NetworkParams p;
  p.w0.resize(outputs);
  p.W.resize(prototypes, outputs);
  p.sigma.resize(prototypes);
  for (int k = 0; k < outputs; ++k) p.w0(k) = rng.uniform(config.weight_init_lo, config.weight_init_hi);
  for (int j = 0; j < prototypes; ++j) {
    for (int k = 0; k < outputs; ++k) p.W(j, k) = rng.uniform(config.weight_init_lo, config.weight_init_hi);
  }
  for (int j = 0; j < prototypes; ++j) p.sigma(j) = rng.uniform(config.sigma_init_lo, config.sigma_init_hi);
  return p;
}

NetworkParams init_params(int prototypes, int outputs, const TrainConfig& config, std::uint64_t seed) {
  Rng rng = make_rng(seed, Stream::Params);
  return init_params(prototypes, outputs, config, rng);
}

Split split(int n, std::uint64_t seed, const std::vector<int>* labels, double train_fraction) {
  if (n < 10) throw Error(Errc::TooFewSamples, "need at least 10 samples to split, got " + std::to_string(n));
  if (labels && static_cast<int>(labels->size()) != n) throw Error(Errc::DimensionMismatch, "labels vs sample count");
  Rng rng = make_rng(seed, Stream::Split);
  std::vector<int> order = random_permutation(n, rng);
  if (labels) {
    // Interleave classes: each object gets the fractional position of its
    // rank within its (shuffled) class.
    std::vector<int> seen(static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end()) + 1), 0);
    std::vector<int> count(seen.size(), 0);
    for (int l : *labels) ++count[static_cast<std::size_t>(l)];
    std::vector<double> key(static_cast<std::size_t>(n));
    for (int i : order) {
      const auto l = static_cast<std::size_t>((*labels)[static_cast<std::size_t>(i)]);
      key[static_cast<std::size_t>(i)] = (seen[l]++ + 0.5) / static_cast<double>(count[l]);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)]; });
  }
  const auto n_train = static_cast<int>(std::lround(train_fraction * n));
  const int rest = n - n_train;
  const int n_test = (rest + 1) / 2;
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.test.assign(order.begin() + n_train, order.begin() + n_train + n_test);
  s.val.assign(order.begin() + n_train + n_test, order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.val.begin(), s.val.end());
  return s;
}

}  // namespace relrbf
