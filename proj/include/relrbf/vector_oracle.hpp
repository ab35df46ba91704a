#pragma once

#include "relrbf/training.hpp"

#include <string>
#include <vector>

namespace relrbf {

/// ‖x − v‖².
double vector_distance(const Vector& x, const Vector& v);

/// c×n squared distances between prototype rows of `centers` and rows of `x`.
Matrix vector_distances(const Matrix& x, const Matrix& centers);

struct LloydResult {
  Partition partition;
  Matrix centroids;                // c×d
  std::vector<Partition> history;  // initial partition first
  int iterations = 0;
};

/// Lloyd's k-means from a given partition with centroid initialization and
/// the same empty-cluster repair as relational_kmeans.
LloydResult vector_kmeans(const Matrix& x, const Partition& initial, int max_iter = 300);

/// Reference geometry: prototypes are explicit points in feature space.
class VectorPrototypes final : public PrototypeModel {
 public:
  explicit VectorPrototypes(std::shared_ptr<const Matrix> x);

  std::unique_ptr<PrototypeModel> clone() const override;
  Index observations() const override { return x_->rows(); }
  Index prototypes() const override { return centers_.rows(); }
  Partition initialize(const std::vector<int>& train, const Partition& initial, PrototypeMode mode,
                       int max_iter) override;
  const Matrix& distances() const override { return d_; }
  void shift(const Matrix& eps_h, const Vector& eta, PrototypeMode mode, const std::vector<int>& train) override;
  void add_prototype_at(Index m) override;

  const Matrix& centers() const { return centers_; }

 private:
  std::shared_ptr<const Matrix> x_;
  Matrix centers_;  // c×d
  Matrix d_;
};

struct VectorTrainResult {
  NetworkParams params;
  Matrix centers;
  TrainMetrics metrics;
  Split split;
  int best_epoch = 0;
  int epochs_run = 0;
};

VectorTrainResult vector_train(const Matrix& x, const Matrix& targets, const TrainConfig& config,
                               const std::vector<int>* labels = nullptr);

struct EpochDeviation {
  int epoch = 0;
  double distances = 0.0;
  double hidden = 0.0;
  double output = 0.0;
  double w0 = 0.0;
  double W = 0.0;
  double sigma = 0.0;

  double max() const;
};

enum class DualityStatus { pass, fail, no_oracle };

struct DualityReport {
  DualityStatus status = DualityStatus::fail;
  double tolerance = 1e-8;
  double max_deviation = 0.0;
  std::vector<EpochDeviation> epochs;
  std::string note;

  bool passed() const { return status == DualityStatus::pass; }
};

std::string_view to_string(DualityStatus s);

inline constexpr double kDualityTolerance = 1e-8;

/// Trains the graph network on from_features(x) and the vector network on x in
/// lock-step for `epochs` epochs and records the largest absolute deviation of
/// distances, hidden activations, responses and parameters after each epoch.
DualityReport duality_check(const Matrix& x, const Matrix& targets, TrainConfig config, int epochs,
                            double tolerance = kDualityTolerance);

/// Graph-only entry point: realizes R by classical scaling when the PSD test
/// passes; otherwise reports status no_oracle.
DualityReport duality_check(const AdjacencyMatrix& r, const Matrix& targets, TrainConfig config, int epochs,
                            double tolerance = kDualityTolerance);

}  // namespace relrbf
