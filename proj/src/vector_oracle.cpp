#include "relrbf/vector_oracle.hpp"

#include "relrbf/errors.hpp"
#include "relrbf/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace relrbf {

double vector_distance(const Vector& x, const Vector& v) {
  if (x.size() != v.size()) throw Error(Errc::DimensionMismatch, "vector lengths differ");
  return (x - v).squaredNorm();
}

Matrix vector_distances(const Matrix& x, const Matrix& centers) {
  if (x.cols() != centers.cols()) throw Error(Errc::DimensionMismatch, "feature dimensions differ");
  Matrix d(centers.rows(), x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < centers.rows(); ++j) d(j, i) = (x.row(i) - centers.row(j)).squaredNorm();
  }
  return d;
}

namespace {

Matrix centroids_of(const Matrix& x, const Partition& p) {
  Matrix mu = Matrix::Zero(p.clusters, x.cols());
  const std::vector<int> sizes = p.sizes();
  for (std::size_t i = 0; i < p.assignment.size(); ++i) mu.row(p.assignment[i]) += x.row(static_cast<Index>(i));
  for (int j = 0; j < p.clusters; ++j) {
    if (sizes[static_cast<std::size_t>(j)] == 0) throw Error(Errc::EmptySet, "empty cluster");
    mu.row(j) /= static_cast<double>(sizes[static_cast<std::size_t>(j)]);
  }
  return mu;
}

}  // namespace

LloydResult vector_kmeans(const Matrix& x, const Partition& initial, int max_iter) {
  const auto n = static_cast<int>(x.rows());
  const int c = initial.clusters;
  if (c < 1 || c > n) throw Error(Errc::InvalidClusterCount, "cluster count out of range");
  if (static_cast<int>(initial.assignment.size()) != n) throw Error(Errc::DimensionMismatch, "partition vs data");

  LloydResult res;
  Partition current = initial;
  res.history.push_back(current);
  for (int it = 0; it < max_iter; ++it) {
    const Matrix d = vector_distances(x, centroids_of(x, current));
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
  res.centroids = centroids_of(x, current);
  res.partition = std::move(current);
  return res;
}

VectorPrototypes::VectorPrototypes(std::shared_ptr<const Matrix> x) : x_(std::move(x)) {
  centers_.resize(0, x_->cols());
  d_.resize(0, x_->rows());
}

std::unique_ptr<PrototypeModel> VectorPrototypes::clone() const { return std::make_unique<VectorPrototypes>(*this); }

Partition VectorPrototypes::initialize(const std::vector<int>& train, const Partition& initial, PrototypeMode mode,
                                       int max_iter) {
  Matrix sub(static_cast<Index>(train.size()), x_->cols());
  for (std::size_t a = 0; a < train.size(); ++a) sub.row(static_cast<Index>(a)) = x_->row(train[a]);
  LloydResult km = vector_kmeans(sub, initial, max_iter);
  centers_ = km.centroids;
  if (mode == PrototypeMode::medoid) {
    // Member with the least summed squared distance to its cluster.
    const auto groups = km.partition.members();
    for (int j = 0; j < km.partition.clusters; ++j) {
      int best = -1;
      double best_sum = 0.0;
      for (int m : groups[static_cast<std::size_t>(j)]) {
        double s = 0.0;
        for (int i : groups[static_cast<std::size_t>(j)]) s += (sub.row(m) - sub.row(i)).squaredNorm();
        if (best < 0 || s < best_sum) {
          best = m;
          best_sum = s;
        }
      }
      centers_.row(j) = sub.row(best);
    }
  }
  d_ = vector_distances(*x_, centers_);
  return km.partition;
}

void VectorPrototypes::shift(const Matrix& eps_h, const Vector& eta, PrototypeMode mode,
                             const std::vector<int>& train) {
  if (eps_h.rows() != centers_.rows() || eps_h.cols() != x_->rows()) {
    throw Error(Errc::DimensionMismatch, "hidden errors vs prototypes");
  }
  for (Index j = 0; j < centers_.rows(); ++j) {
    Vector step = Vector::Zero(x_->cols());
    for (Index i = 0; i < x_->rows(); ++i) {
      if (eps_h(j, i) != 0.0) step += eps_h(j, i) * (x_->row(i) - centers_.row(j)).transpose();
    }
    centers_.row(j) += eta(j) * step.transpose();
  }
  if (mode == PrototypeMode::medoid) {
    for (Index j = 0; j < centers_.rows(); ++j) {
      int best = train.front();
      double best_d = (x_->row(best) - centers_.row(j)).squaredNorm();
      for (int i : train) {
        const double di = (x_->row(i) - centers_.row(j)).squaredNorm();
        if (di < best_d) {
          best = i;
          best_d = di;
        }
      }
      centers_.row(j) = x_->row(best);
    }
  }
  d_ = vector_distances(*x_, centers_);
}

void VectorPrototypes::add_prototype_at(Index m) {
  const Index c = centers_.rows();
  centers_.conservativeResize(c + 1, Eigen::NoChange);
  centers_.row(c) = x_->row(m);
  d_.conservativeResize(c + 1, Eigen::NoChange);
  for (Index i = 0; i < x_->rows(); ++i) d_(c, i) = (x_->row(i) - centers_.row(c)).squaredNorm();
}

VectorTrainResult vector_train(const Matrix& x, const Matrix& targets, const TrainConfig& config,
                               const std::vector<int>* labels) {
  config.check();
  const Split s = split(static_cast<int>(x.rows()), config.seed, config.stratify ? labels : nullptr,
                        config.train_fraction);
  TrainingSession session(std::make_unique<VectorPrototypes>(std::make_shared<const Matrix>(x)), targets, s, config);
  session.run();
  const TrainSnapshot& best = session.best();
  VectorTrainResult out;
  out.params = best.params;
  out.centers = dynamic_cast<const VectorPrototypes&>(*best.model).centers();
  out.metrics = session.metrics();
  out.split = session.split();
  out.best_epoch = best.epoch;
  out.epochs_run = session.epoch();
  return out;
}

double EpochDeviation::max() const { return std::max({distances, hidden, output, w0, W, sigma}); }

std::string_view to_string(DualityStatus s) {
  switch (s) {
    case DualityStatus::pass: return "pass";
    case DualityStatus::fail: return "fail";
    case DualityStatus::no_oracle: return "no_oracle";
  }
  return "fail";
}

namespace {

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

EpochDeviation compare(const TrainingSession& graph, const TrainingSession& vec) {
  EpochDeviation dev;
  dev.epoch = graph.epoch();
  dev.distances = max_abs_diff(graph.model().distances(), vec.model().distances());
  dev.hidden = max_abs_diff(graph.response().hidden, vec.response().hidden);
  dev.output = max_abs_diff(graph.response().output, vec.response().output);
  dev.w0 = max_abs_diff(graph.params().w0, vec.params().w0);
  dev.W = max_abs_diff(graph.params().W, vec.params().W);
  dev.sigma = max_abs_diff(graph.params().sigma, vec.params().sigma);
  return dev;
}

DualityReport run_lockstep(std::shared_ptr<const AdjacencyMatrix> r, std::shared_ptr<const Matrix> x,
                           const Matrix& targets, TrainConfig config, int epochs, double tolerance) {
  config.max_epochs = epochs;
  const Split s = split(static_cast<int>(r->size()), config.seed, nullptr, config.train_fraction);
  TrainingSession graph(std::make_unique<GraphPrototypes>(std::move(r)), targets, s, config);
  TrainingSession vec(std::make_unique<VectorPrototypes>(std::move(x)), targets, s, config);

  DualityReport rep;
  rep.tolerance = tolerance;
  auto record = [&] {
    EpochDeviation dev = compare(graph, vec);
    rep.max_deviation = std::max(rep.max_deviation, dev.max());
    rep.epochs.push_back(dev);
  };
  if (graph.initial_partition() != vec.initial_partition()) rep.note = "initial partitions differ";
  record();
  while (!graph.finished() || !vec.finished()) {
    const bool g_more = graph.step();
    const bool v_more = vec.step();
    record();
    if (g_more != v_more || graph.epoch() != vec.epoch()) {
      rep.note = "trainers stopped at different epochs";
      rep.max_deviation = std::numeric_limits<double>::infinity();
      break;
    }
  }
  rep.status = rep.max_deviation <= tolerance ? DualityStatus::pass : DualityStatus::fail;
  return rep;
}

}  // namespace

DualityReport duality_check(const Matrix& x, const Matrix& targets, TrainConfig config, int epochs,
                            double tolerance) {
  auto r = std::make_shared<const AdjacencyMatrix>(from_features(x, false));
  return run_lockstep(std::move(r), std::make_shared<const Matrix>(x), targets, config, epochs, tolerance);
}

DualityReport duality_check(const AdjacencyMatrix& r, const Matrix& targets, TrainConfig config, int epochs,
                            double tolerance) {
  const RealizabilityReport real = validate(r);
  if (!real.euclidean_embeddable) {
    DualityReport rep;
    rep.status = DualityStatus::no_oracle;
    rep.tolerance = tolerance;
    rep.note = "graph fails the PSD realizability test (min eigenvalue " + std::to_string(real.min_eigenvalue) +
               "); no vector oracle available";
    return rep;
  }
  Embedding emb = cmds(r);
  return run_lockstep(std::make_shared<const AdjacencyMatrix>(r), std::make_shared<const Matrix>(std::move(emb.x)),
                      targets, config, epochs, tolerance);
}

}  // namespace relrbf
