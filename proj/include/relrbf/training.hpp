#pragma once

#include "relrbf/config.hpp"
#include "relrbf/init.hpp"
#include "relrbf/network.hpp"
#include "relrbf/relational.hpp"

#include <memory>
#include <string>
#include <vector>

namespace relrbf {

/// Effective step size for every trainable quantity.
struct StepSizes {
  Vector w0;     // g
  Matrix W;      // c×g
  Vector sigma;  // c
  Vector proto;  // c

  static StepSizes uniform(Index prototypes, Index outputs, double eta);
  StepSizes scaled(double factor) const;
};

/// ε°(i,k) = y(i,k) − ŷ(i,k).
Matrix output_errors(const Matrix& targets, const NetworkResponse& response);

/// w0_k += η Σ_i ε°(i,k);  w_jk += η Σ_i ε°(i,k) h(j,i). The sum runs over all
/// columns of `distances`; rows of `eps_o` outside the training set are zero.
NetworkParams update_weights(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o, double eta);
NetworkParams update_weights(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o,
                             const StepSizes& eta);

/// Backpropagated centre coefficient, c×n:
/// ε^h(j,i) = [Σ_k ε°(i,k) w_jk] · exp(−d(j,i)/2σ_j²) / σ_j².
/// A latent step v_j += η Σ_i ε^h(j,i)(x_i − v_j) is gradient descent on SSE.
Matrix hidden_errors(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o);

/// Relational form of the latent shift, applied row-wise to the c×n prototype
/// weights: v ← (1 − η Σ_y ε^h_y)·v + η·ε^h. Rows keep summing to one.
Matrix shift_prototype_weights(const Matrix& weights, const Matrix& eps_h, const Vector& eta);

/// Simulated prototype shift: updated distances for the shifted prototypes,
/// computed by shifting the weights and re-evaluating the relational distance.
DistanceState offset_distances(const DistanceState& state, const AdjacencyMatrix& r, const Matrix& weights,
                               const Matrix& eps_h, double eta);
DistanceState offset_distances(const DistanceState& state, const AdjacencyMatrix& r, const Matrix& weights,
                               const Matrix& eps_h, const Vector& eta);

/// Same update written as an additive offset to the current distances, using
/// only entries of R (no re-normalization step). Cross-check for
/// offset_distances.
Matrix offset_distances_closed_form(const Matrix& distances, const AdjacencyMatrix& r, const Matrix& weights,
                                    const Matrix& eps_h, const Vector& eta);

/// σ_j += η Σ_i [Σ_k ε°(i,k) w_jk] exp(−d(j,i)/2σ_j²) d(j,i)/σ_j³, clamped
/// below at `sigma_min`.
NetworkParams update_bandwidths(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o,
                                double eta, double sigma_min = 1e-3);
NetworkParams update_bandwidths(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o,
                                const StepSizes& eta, double sigma_min = 1e-3);

struct LearningRateState {
  double scale = 1.0;
};

/// Returns whether the pending parameters are accepted. Rejection (new MSE
/// above ratio·old) multiplies the scale by lr_decay; an accepted decrease
/// multiplies it by lr_growth.
bool adapt_learning_rate(LearningRateState& lr, double mse_new, double mse_old, const TrainConfig& config);

struct TrainMetrics {
  std::vector<double> train_sse;
  std::vector<double> val_sse;
  std::vector<double> test_sse;
  std::vector<double> lr_scale;
  std::vector<int> prototypes;
  std::vector<bool> accepted;
  long negative_distance_events = 0;

  bool operator==(const TrainMetrics&) const = default;
};

/// Prototype geometry driven by the training loop. The graph implementation
/// works on relational weights over an adjacency matrix; the vector oracle
/// moves explicit points.
class PrototypeModel {
 public:
  virtual ~PrototypeModel() = default;

  virtual std::unique_ptr<PrototypeModel> clone() const = 0;
  virtual Index observations() const = 0;
  virtual Index prototypes() const = 0;
  /// Clusters the training observations starting from `initial` (indexed over
  /// `train`) and places one prototype per cluster. Returns the final partition.
  virtual Partition initialize(const std::vector<int>& train, const Partition& initial, PrototypeMode mode,
                               int max_iter) = 0;
  /// c×n prototype-to-observation squared distances.
  virtual const Matrix& distances() const = 0;
  /// Latent step v_j += η_j Σ_i ε^h(j,i)(x_i − v_j). In medoid mode the
  /// result snaps to the nearest training observation.
  virtual void shift(const Matrix& eps_h, const Vector& eta, PrototypeMode mode, const std::vector<int>& train) = 0;
  /// Appends a prototype located on observation m.
  virtual void add_prototype_at(Index m) = 0;
};

class GraphPrototypes final : public PrototypeModel {
 public:
  explicit GraphPrototypes(std::shared_ptr<const AdjacencyMatrix> r);

  std::unique_ptr<PrototypeModel> clone() const override;
  Index observations() const override { return r_->size(); }
  Index prototypes() const override { return weights_.rows(); }
  Partition initialize(const std::vector<int>& train, const Partition& initial, PrototypeMode mode,
                       int max_iter) override;
  const Matrix& distances() const override { return d_; }
  void shift(const Matrix& eps_h, const Vector& eta, PrototypeMode mode, const std::vector<int>& train) override;
  void add_prototype_at(Index m) override;

  /// c×n relational prototype weights (rows sum to one).
  const Matrix& weights() const { return weights_; }
  const AdjacencyMatrix& graph() const { return *r_; }

 private:
  std::shared_ptr<const AdjacencyMatrix> r_;
  Matrix weights_;
  Matrix d_;
};

/// Growth rule: `rising` consecutive validation increases since the last
/// growth reach patience_grow and capacity remains.
bool should_grow(int rising, Index prototypes, const TrainConfig& config);

struct TrainSnapshot {
  NetworkParams params;
  std::shared_ptr<const PrototypeModel> model;
  int epoch = 0;
  double val_sse = 0.0;
};

/// One training run, stepped an epoch at a time. Epoch order: weights,
/// prototype shift, bandwidths, acceptance test, growth check, exit test.
class TrainingSession {
 public:
  /// `targets` is n×g over all observations; only `split.train` rows drive
  /// the updates. Randomness comes from named streams of `config.seed`.
  TrainingSession(std::unique_ptr<PrototypeModel> model, Matrix targets, Split split, TrainConfig config);

  /// Runs one epoch. Returns false once training has stopped.
  bool step();
  void run();

  /// Adds a prototype on the training observation with the largest output
  /// error. No-op returning false at c_max.
  bool grow_prototype();

  bool finished() const { return finished_; }
  int epoch() const { return epoch_; }
  const std::string& stop_reason() const { return stop_reason_; }

  const NetworkParams& params() const { return params_; }
  const PrototypeModel& model() const { return *model_; }
  const NetworkResponse& response() const { return response_; }
  const TrainMetrics& metrics() const { return metrics_; }
  const StepSizes& base_rates() const { return base_rates_; }
  double lr_scale() const { return lr_.scale; }
  const Split& split() const { return split_; }
  const Partition& initial_partition() const { return initial_partition_; }
  const TrainSnapshot& best() const { return best_; }
  const Matrix& targets() const { return targets_; }

 private:
  Matrix masked_errors(const NetworkResponse& response) const;
  double subset_sse(const NetworkResponse& response, const std::vector<int>& idx) const;
  void record_epoch(bool accepted);

  std::unique_ptr<PrototypeModel> model_;
  Matrix targets_;
  Split split_;
  TrainConfig config_;
  Vector train_mask_;

  NetworkParams params_;
  StepSizes base_rates_;
  LearningRateState lr_;
  Rng growth_rng_;
  Partition initial_partition_;
  NetworkResponse response_;
  double train_sse_ = 0.0;

  TrainMetrics metrics_;
  TrainSnapshot best_;
  std::vector<double> accepted_sse_;
  double prev_val_ = 0.0;
  int rising_ = 0;
  int rising_since_growth_ = 0;
  int epoch_ = 0;
  bool finished_ = false;
  std::string stop_reason_;
};

struct TrainResult {
  NetworkParams params;
  Matrix prototype_weights;  // c×n
  DistanceState d_state;
  TrainMetrics metrics;
  Split split;
  int best_epoch = 0;
  int epochs_run = 0;
  std::string stop_reason;
};

/// Full training run on a graph. The split is drawn from the config seed
/// (stratified by `labels` when config.stratify is set and labels are given).
TrainResult train(const AdjacencyMatrix& r, const Matrix& targets, const TrainConfig& config,
                  const std::vector<int>* labels = nullptr);
TrainResult train(std::shared_ptr<const AdjacencyMatrix> r, const Matrix& targets, const TrainConfig& config,
                  const Split& split);

}  // namespace relrbf
