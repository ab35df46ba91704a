#include "relrbf/training.hpp"

#include "relrbf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relrbf {

namespace {

void require_shapes(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o) {
  if (distances.rows() != params.prototypes() || eps_o.rows() != distances.cols() ||
      eps_o.cols() != params.outputs()) {
    throw Error(Errc::DimensionMismatch, "params, distances and output errors disagree");
  }
}

void require_positive(const StepSizes& eta) {
  const bool ok = (eta.w0.array() > 0.0).all() && (eta.W.array() > 0.0).all() && (eta.sigma.array() > 0.0).all() &&
                  (eta.proto.array() > 0.0).all();
  if (!ok) throw Error(Errc::NonpositiveEta, "learning rates must be positive");
}

Matrix hidden_layer(const NetworkParams& params, const Matrix& distances) {
  Matrix h(distances.rows(), distances.cols());
  for (Index j = 0; j < distances.rows(); ++j) {
    const double scale = -1.0 / (2.0 * params.sigma(j) * params.sigma(j));
    h.row(j) = (distances.row(j).array() * scale).exp();
  }
  return h;
}

// Negatives smaller than this fraction of max|d| are rounding noise, not events.
constexpr double kNegativeDistanceRelTol = 1e-12;

}  // namespace

StepSizes StepSizes::uniform(Index prototypes, Index outputs, double eta) {
  StepSizes s;
  s.w0 = Vector::Constant(outputs, eta);
  s.W = Matrix::Constant(prototypes, outputs, eta);
  s.sigma = Vector::Constant(prototypes, eta);
  s.proto = Vector::Constant(prototypes, eta);
  return s;
}

StepSizes StepSizes::scaled(double factor) const {
  return StepSizes{w0 * factor, W * factor, sigma * factor, proto * factor};
}

Matrix output_errors(const Matrix& targets, const NetworkResponse& response) {
  if (targets.rows() != response.output.rows() || targets.cols() != response.output.cols()) {
    throw Error(Errc::DimensionMismatch, "targets vs responses");
  }
  return targets - response.output;
}

NetworkParams update_weights(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o, double eta) {
  if (!(eta > 0.0)) throw Error(Errc::NonpositiveEta, "eta must be positive");
  return update_weights(params, distances, eps_o, StepSizes::uniform(params.prototypes(), params.outputs(), eta));
}

NetworkParams update_weights(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o,
                             const StepSizes& eta) {
  require_shapes(params, distances, eps_o);
  require_positive(eta);
  const Matrix h = hidden_layer(params, distances);
  NetworkParams out = params;
  out.w0.array() += eta.w0.array() * eps_o.colwise().sum().transpose().array();
  out.W.array() += eta.W.array() * (h * eps_o).array();
  return out;
}

Matrix hidden_errors(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o) {
  require_shapes(params, distances, eps_o);
  const Matrix h = hidden_layer(params, distances);
  // back(j,i) = Σ_k w_jk ε°(i,k)
  Matrix eps_h = params.W * eps_o.transpose();
  for (Index j = 0; j < eps_h.rows(); ++j) {
    eps_h.row(j).array() *= h.row(j).array() / (params.sigma(j) * params.sigma(j));
  }
  return eps_h;
}

Matrix shift_prototype_weights(const Matrix& weights, const Matrix& eps_h, const Vector& eta) {
  if (weights.rows() != eps_h.rows() || weights.cols() != eps_h.cols() || eta.size() != weights.rows()) {
    throw Error(Errc::DimensionMismatch, "prototype weights vs hidden errors");
  }
  Matrix out(weights.rows(), weights.cols());
  for (Index j = 0; j < weights.rows(); ++j) {
    const double s = eta(j) * eps_h.row(j).sum();
    out.row(j) = (1.0 - s) * weights.row(j) + eta(j) * eps_h.row(j);
    const double total = out.row(j).sum();
    if (std::abs(total) < 1e-12) throw Error(Errc::DegenerateShift, "shifted prototype weights sum to zero");
    out.row(j) /= total;
  }
  return out;
}

DistanceState offset_distances(const DistanceState& state, const AdjacencyMatrix& r, const Matrix& weights,
                               const Matrix& eps_h, double eta) {
  if (!(eta > 0.0)) throw Error(Errc::NonpositiveEta, "eta must be positive");
  return offset_distances(state, r, weights, eps_h, Vector::Constant(weights.rows(), eta));
}

DistanceState offset_distances(const DistanceState& state, const AdjacencyMatrix& r, const Matrix& weights,
                               const Matrix& eps_h, const Vector& eta) {
  if (state.d.rows() != weights.rows() || state.d.cols() != r.size()) {
    throw Error(Errc::DimensionMismatch, "distance state vs prototypes");
  }
  if ((eta.array() <= 0.0).any()) throw Error(Errc::NonpositiveEta, "eta must be positive");
  DistanceState out;
  out.d = relational_distances(r, shift_prototype_weights(weights, eps_h, eta));
  out.epoch = state.epoch + 1;
  return out;
}

Matrix offset_distances_closed_form(const Matrix& distances, const AdjacencyMatrix& r, const Matrix& weights,
                                    const Matrix& eps_h, const Vector& eta) {
  if (distances.rows() != weights.rows() || weights.cols() != r.size() || eps_h.rows() != weights.rows() ||
      eps_h.cols() != weights.cols() || eta.size() != weights.rows()) {
    throw Error(Errc::DimensionMismatch, "closed-form offset operands disagree");
  }
  const Matrix& rm = r.entries();
  const Matrix rv = weights * rm;  // rows (R v_j)ᵀ
  const Matrix re = eps_h * rm;    // rows (R e_j)ᵀ
  Matrix out = distances;
  for (Index j = 0; j < weights.rows(); ++j) {
    const double s = eta(j) * eps_h.row(j).sum();
    const double q = weights.row(j).dot(rv.row(j));
    const double p = eps_h.row(j).dot(rv.row(j));
    const double t = eps_h.row(j).dot(re.row(j));
    const double self = ((1.0 - s) * (1.0 - s) - 1.0) * q + 2.0 * eta(j) * (1.0 - s) * p + eta(j) * eta(j) * t;
    out.row(j) += -s * rv.row(j) + eta(j) * re.row(j);
    out.row(j).array() -= 0.5 * self;
  }
  return out;
}

NetworkParams update_bandwidths(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o, double eta,
                                double sigma_min) {
  if (!(eta > 0.0)) throw Error(Errc::NonpositiveEta, "eta must be positive");
  return update_bandwidths(params, distances, eps_o, StepSizes::uniform(params.prototypes(), params.outputs(), eta),
                           sigma_min);
}

NetworkParams update_bandwidths(const NetworkParams& params, const Matrix& distances, const Matrix& eps_o,
                                const StepSizes& eta, double sigma_min) {
  require_shapes(params, distances, eps_o);
  require_positive(eta);
  if ((params.sigma.array() <= 0.0).any()) throw Error(Errc::NonpositiveSigma, "bandwidths must be positive");
  const Matrix h = hidden_layer(params, distances);
  const Matrix back = params.W * eps_o.transpose();  // c×n
  NetworkParams out = params;
  for (Index j = 0; j < params.prototypes(); ++j) {
    const double s3 = params.sigma(j) * params.sigma(j) * params.sigma(j);
    const double grad = (back.row(j).array() * h.row(j).array() * distances.row(j).array()).sum() / s3;
    out.sigma(j) = std::max(params.sigma(j) + eta.sigma(j) * grad, sigma_min);
  }
  if ((out.sigma.array() <= 0.0).any()) throw Error(Errc::NonpositiveSigma, "bandwidth clamp failed");
  return out;
}

bool adapt_learning_rate(LearningRateState& lr, double mse_new, double mse_old, const TrainConfig& config) {
  if (!std::isfinite(mse_new) || mse_new > config.mse_reject_ratio * mse_old) {
    lr.scale *= config.lr_decay;
    return false;
  }
  if (mse_new < mse_old) lr.scale *= config.lr_growth;
  return true;
}

// ---------------------------------------------------------------------------

GraphPrototypes::GraphPrototypes(std::shared_ptr<const AdjacencyMatrix> r) : r_(std::move(r)) {
  weights_.resize(0, r_->size());
  d_.resize(0, r_->size());
}

std::unique_ptr<PrototypeModel> GraphPrototypes::clone() const { return std::make_unique<GraphPrototypes>(*this); }

Partition GraphPrototypes::initialize(const std::vector<int>& train, const Partition& initial, PrototypeMode mode,
                                      int max_iter) {
  const AdjacencyMatrix sub = r_->submatrix(train);
  KMeansResult km = relational_kmeans(sub, initial, max_iter);
  const Matrix local = partition_weights(sub, km.partition, mode);
  weights_ = Matrix::Zero(local.rows(), r_->size());
  for (std::size_t a = 0; a < train.size(); ++a) weights_.col(train[a]) = local.col(static_cast<Index>(a));
  d_ = relational_distances(*r_, weights_);
  return km.partition;
}

void GraphPrototypes::shift(const Matrix& eps_h, const Vector& eta, PrototypeMode mode,
                            const std::vector<int>& train) {
  weights_ = shift_prototype_weights(weights_, eps_h, eta);
  d_ = relational_distances(*r_, weights_);
  if (mode != PrototypeMode::medoid) return;
  for (Index j = 0; j < weights_.rows(); ++j) {
    int best = train.front();
    for (int i : train) {
      if (d_(j, i) < d_(j, best)) best = i;
    }
    weights_.row(j).setZero();
    weights_(j, best) = 1.0;
    d_.row(j) = r_->entries().col(best).transpose();
  }
}

void GraphPrototypes::add_prototype_at(Index m) {
  const Index c = weights_.rows();
  weights_.conservativeResize(c + 1, Eigen::NoChange);
  weights_.row(c).setZero();
  weights_(c, m) = 1.0;
  d_.conservativeResize(c + 1, Eigen::NoChange);
  d_.row(c) = r_->entries().col(m).transpose();
}

// ---------------------------------------------------------------------------

TrainingSession::TrainingSession(std::unique_ptr<PrototypeModel> model, Matrix targets, Split split,
                                 TrainConfig config)
    : model_(std::move(model)),
      targets_(std::move(targets)),
      split_(std::move(split)),
      config_(config),
      growth_rng_(make_rng(config.seed, Stream::Growth)) {
  config_.check();
  const Index n = model_->observations();
  if (targets_.rows() != n) throw Error(Errc::DimensionMismatch, "targets vs observation count");
  if (split_.train.empty()) throw Error(Errc::TooFewSamples, "empty training set");
  const auto n_train = static_cast<int>(split_.train.size());
  if (config_.c_init > n_train) {
    throw Error(Errc::InvalidClusterCount, "c_init exceeds the training set size");
  }
  train_mask_ = Vector::Zero(n);
  for (int i : split_.train) train_mask_(i) = 1.0;

  Rng part_rng = make_rng(config_.seed, Stream::Partition);
  initial_partition_ = random_partition(n_train, config_.c_init, part_rng);
  model_->initialize(split_.train, initial_partition_, config_.mode, config_.kmeans_max_iter);

  const auto c = static_cast<int>(model_->prototypes());
  const auto g = static_cast<int>(targets_.cols());
  params_ = init_params(c, g, config_, config_.seed);

  Rng lr_rng = make_rng(config_.seed, Stream::LearningRates);
  base_rates_.w0.resize(g);
  base_rates_.W.resize(c, g);
  base_rates_.sigma.resize(c);
  base_rates_.proto.resize(c);
  for (int k = 0; k < g; ++k) base_rates_.w0(k) = lr_rng.uniform(config_.eta_min, config_.eta_max);
  for (int j = 0; j < c; ++j) {
    for (int k = 0; k < g; ++k) base_rates_.W(j, k) = lr_rng.uniform(config_.eta_min, config_.eta_max);
  }
  for (int j = 0; j < c; ++j) base_rates_.sigma(j) = lr_rng.uniform(config_.eta_min, config_.eta_max);
  for (int j = 0; j < c; ++j) base_rates_.proto(j) = lr_rng.uniform(config_.eta_min, config_.eta_max);
  lr_.scale = config_.lr_scale_init > 0.0 ? config_.lr_scale_init : 1.0 / n_train;

  response_ = forward(model_->distances(), params_);
  train_sse_ = subset_sse(response_, split_.train);
  prev_val_ = subset_sse(response_, split_.val);
  best_ = TrainSnapshot{params_, model_->clone(), 0, prev_val_};
  accepted_sse_.push_back(train_sse_);
  record_epoch(true);
  if (config_.max_epochs == 0) {
    finished_ = true;
    stop_reason_ = "max_epochs";
  }
}

Matrix TrainingSession::masked_errors(const NetworkResponse& response) const {
  Matrix e = output_errors(targets_, response);
  e.array().colwise() *= train_mask_.array();
  return e;
}

double TrainingSession::subset_sse(const NetworkResponse& response, const std::vector<int>& idx) const {
  double s = 0.0;
  for (int i : idx) s += (targets_.row(i) - response.output.row(i)).squaredNorm();
  return s;
}

void TrainingSession::record_epoch(bool accepted) {
  metrics_.train_sse.push_back(train_sse_);
  metrics_.val_sse.push_back(subset_sse(response_, split_.val));
  metrics_.test_sse.push_back(subset_sse(response_, split_.test));
  metrics_.lr_scale.push_back(lr_.scale);
  metrics_.prototypes.push_back(static_cast<int>(model_->prototypes()));
  metrics_.accepted.push_back(accepted);
}

bool should_grow(int rising, Index prototypes, const TrainConfig& config) {
  return rising >= config.patience_grow && prototypes < config.c_max;
}

bool TrainingSession::grow_prototype() {
  if (model_->prototypes() >= config_.c_max) return false;
  const Matrix e = masked_errors(response_);
  int worst = split_.train.front();
  double worst_err = -1.0;
  for (int i : split_.train) {
    const double err = e.row(i).cwiseAbs().maxCoeff();
    if (err > worst_err) {
      worst_err = err;
      worst = i;
    }
  }
  model_->add_prototype_at(worst);

  const Index c = params_.prototypes();
  const Index g = params_.outputs();
  params_.W.conservativeResize(c + 1, Eigen::NoChange);
  params_.sigma.conservativeResize(c + 1);
  for (Index k = 0; k < g; ++k) params_.W(c, k) = growth_rng_.uniform(config_.weight_init_lo, config_.weight_init_hi);
  params_.sigma(c) = growth_rng_.uniform(config_.sigma_init_lo, config_.sigma_init_hi);

  base_rates_.W.conservativeResize(c + 1, Eigen::NoChange);
  base_rates_.sigma.conservativeResize(c + 1);
  base_rates_.proto.conservativeResize(c + 1);
  for (Index k = 0; k < g; ++k) base_rates_.W(c, k) = growth_rng_.uniform(config_.eta_min, config_.eta_max);
  base_rates_.sigma(c) = growth_rng_.uniform(config_.eta_min, config_.eta_max);
  base_rates_.proto(c) = growth_rng_.uniform(config_.eta_min, config_.eta_max);

  response_ = forward(model_->distances(), params_);
  train_sse_ = subset_sse(response_, split_.train);
  prev_val_ = subset_sse(response_, split_.val);
  return true;
}

bool TrainingSession::step() {
  if (finished_) return false;
  ++epoch_;
  const auto n_train = static_cast<double>(split_.train.size());
  const StepSizes eta = base_rates_.scaled(lr_.scale);
  const Matrix& d = model_->distances();

  // Weights and biases.
  NetworkParams pending = update_weights(params_, d, masked_errors(response_), eta);

  // Simulated prototype shift, then bandwidths on the shifted distances. A
  // non-finite trial is rejected by the MSE test; a degenerate shift is
  // rejected with the step halved.
  std::unique_ptr<PrototypeModel> moved = model_->clone();
  NetworkResponse next;
  double sse_next = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;
  try {
    const Matrix eps_h = hidden_errors(pending, d, masked_errors(forward(d, pending)));
    if (eps_h.allFinite()) {
      moved->shift(eps_h, eta.proto, config_.mode, split_.train);
      const Matrix& d_next = moved->distances();
      pending = update_bandwidths(pending, d_next, masked_errors(forward(d_next, pending)), eta, config_.sigma_min);
      next = forward(d_next, pending);
      sse_next = subset_sse(next, split_.train);
    }
  } catch (const Error& e) {
    if (e.code() != Errc::DegenerateShift) throw;
    degenerate = true;
    lr_.scale *= 0.5;
  }
  const bool accepted =
      !degenerate && adapt_learning_rate(lr_, sse_next / n_train, train_sse_ / n_train, config_);
  if (accepted) {
    params_ = std::move(pending);
    model_ = std::move(moved);
    response_ = std::move(next);
    train_sse_ = sse_next;
    const Matrix& dn = model_->distances();
    const double floor = -kNegativeDistanceRelTol * std::max(dn.cwiseAbs().maxCoeff(), 1.0);
    metrics_.negative_distance_events += (dn.array() < floor).count();
  }
  record_epoch(accepted);

  if (accepted) {
    const double val = metrics_.val_sse.back();
    if (val < best_.val_sse) best_ = TrainSnapshot{params_, model_->clone(), epoch_, val};
    if (val > prev_val_) {
      ++rising_;
      ++rising_since_growth_;
    } else {
      rising_ = 0;
      rising_since_growth_ = 0;
    }
    prev_val_ = val;
    accepted_sse_.push_back(train_sse_);
  }

  if (should_grow(rising_since_growth_, model_->prototypes(), config_)) {
    grow_prototype();
    rising_since_growth_ = 0;
  }

  if (rising_ >= config_.patience_stop) {
    finished_ = true;
    stop_reason_ = "validation_rising";
  } else if (accepted_sse_.size() > static_cast<std::size_t>(config_.exit_window) &&
             std::abs(accepted_sse_.back() - accepted_sse_[accepted_sse_.size() - 1 - config_.exit_window]) <
                 config_.exit_tol) {
    finished_ = true;
    stop_reason_ = "converged";
  } else if (epoch_ >= config_.max_epochs) {
    finished_ = true;
    stop_reason_ = "max_epochs";
  }
  return !finished_;
}

void TrainingSession::run() {
  while (step()) {
  }
}

TrainResult train(std::shared_ptr<const AdjacencyMatrix> r, const Matrix& targets, const TrainConfig& config,
                  const Split& split) {
  TrainingSession session(std::make_unique<GraphPrototypes>(r), targets, split, config);
  session.run();
  const TrainSnapshot& best = session.best();
  const auto& model = dynamic_cast<const GraphPrototypes&>(*best.model);
  TrainResult out;
  out.params = best.params;
  out.prototype_weights = model.weights();
  out.d_state = DistanceState{model.distances(), best.epoch};
  out.metrics = session.metrics();
  out.split = session.split();
  out.best_epoch = best.epoch;
  out.epochs_run = session.epoch();
  out.stop_reason = session.stop_reason();
  return out;
}

TrainResult train(const AdjacencyMatrix& r, const Matrix& targets, const TrainConfig& config,
                  const std::vector<int>* labels) {
  config.check();
  const Split s = split(static_cast<int>(r.size()), config.seed, config.stratify ? labels : nullptr,
                        config.train_fraction);
  return train(std::make_shared<const AdjacencyMatrix>(r), targets, config, s);
}

}  // namespace relrbf
