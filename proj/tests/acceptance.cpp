#include "relrbf/errors.hpp"
#include "relrbf/experiment.hpp"

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace relrbf;
using namespace testing;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix sq_dist(const Matrix& x, const Matrix& centres) {
  Matrix d(centres.rows(), x.rows());
  for (Index j = 0; j < centres.rows(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) d(j, i) = (x.row(i) - centres.row(j)).squaredNorm();
  }
  return d;
}

Matrix random_targets(Index n, Index g, Rng& rng) {
  Matrix y = Matrix::Zero(n, g);
  for (Index i = 0; i < n; ++i) y(i, static_cast<Index>(rng.below(static_cast<std::uint64_t>(g)))) = 1.0;
  return y;
}

Matrix random_weights(Index c, Index n, Rng& rng) {
  Matrix w(c, n);
  for (Index j = 0; j < c; ++j) {
    for (Index i = 0; i < n; ++i) w(j, i) = rng.uniform();
    w.row(j) /= w.row(j).sum();
  }
  return w;
}

double rel_norm(const Vector& a, const Vector& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

Vector fd_gradient(Index size, const std::function<double(Index, double)>& f_at) {
  Vector g(size);
  const double h = 1e-6;
  for (Index t = 0; t < size; ++t) g(t) = (f_at(t, h) - f_at(t, -h)) / (2.0 * h);
  return g;
}

void distance_identity() {
  const auto t0 = Clock::now();
  Rng rng(1001, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(50));
    const Index d = 1 + static_cast<Index>(rng.below(8));
    const Matrix x = random_points(n, d, rng, rng.uniform(0.1, 10.0));
    Vector u(n);
    for (Index i = 0; i < n; ++i) u(i) = rng.uniform(0.01, 1.0);
    const RelationalPrototype v = RelationalPrototype::make(u);
    const Vector latent = x.transpose() * v.weights();
    const Vector got = relational_distance(AdjacencyMatrix(brute_sq_distances(x)), v);
    Vector want(n);
    for (Index i = 0; i < n; ++i) want(i) = (x.row(i).transpose() - latent).squaredNorm();
    worst = std::max(worst, max_rel_err(got, want));
  }
  const double secs = seconds_since(t0);
  report(1, "distance identity", worst <= 1e-10 && secs < 5.0,
         fmt("max relative error %.2e (<= 1e-10) over 1000 instances, %.2f s (< 5 s)", worst, secs));
}

void trajectory_duality() {
  const auto t0 = Clock::now();
  Rng rng(1002, 0);
  int passed = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 20 + static_cast<Index>(rng.below(41));
    const Index d = 1 + static_cast<Index>(rng.below(8));
    const Index g = 2 + static_cast<Index>(rng.below(3));
    TrainConfig cfg;
    cfg.c_init = 2 + static_cast<int>(rng.below(4));
    cfg.c_max = cfg.c_init + static_cast<int>(rng.below(3));
    cfg.mode = rng.below(4) == 0 ? PrototypeMode::medoid : PrototypeMode::free;
    cfg.seed = 5000 + static_cast<std::uint64_t>(trial);
    const DualityReport rep = duality_check(random_points(n, d, rng), random_targets(n, g, rng), cfg, 20);
    passed += rep.passed() ? 1 : 0;
    worst = std::max(worst, rep.max_deviation);
  }
  const double secs = seconds_since(t0);
  report(2, "trajectory duality", passed == 20 && worst <= kDualityTolerance && secs < 30.0,
         fmt("%d/20 instances pass, max deviation %.2e (<= 1e-8), %.2f s (< 30 s)", passed, worst, secs));
}

void offset_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(1003, 0);
  double worst_route = 0.0;
  double worst_closed = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.below(40));
    const Index dim = 1 + static_cast<Index>(rng.below(6));
    const Index c = 1 + static_cast<Index>(rng.below(5));
    const Matrix x = random_points(n, dim, rng);
    const AdjacencyMatrix r(brute_sq_distances(x));
    const Matrix w = random_weights(c, n, rng);
    Matrix eh(c, n);
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < n; ++i) eh(j, i) = rng.uniform(-1, 1);
    }
    const Vector eta = Vector::NullaryExpr(c, [&](Index) { return rng.uniform(0.005, 0.2) / static_cast<double>(n); });

    // Explicit latent step c' = c + η Σ_i ε_i (x_i − c).
    const Matrix centres = w * x;
    Matrix shifted = centres;
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < n; ++i) shifted.row(j) += eta(j) * eh(j, i) * (x.row(i) - centres.row(j));
    }
    const Matrix oracle = sq_dist(x, shifted);
    const Matrix d = relational_distances(r, w);
    worst_route = std::max(worst_route, max_rel_err(offset_distances(DistanceState{d, 0}, r, w, eh, eta).d, oracle));
    worst_closed = std::max(worst_closed, max_rel_err(offset_distances_closed_form(d, r, w, eh, eta), oracle));
  }
  const double secs = seconds_since(t0);
  report(3, "distance offset equivalence", worst_route <= 1e-9 && worst_closed <= 1e-9 && secs < 5.0,
         fmt("weight route %.2e, closed form %.2e vs latent shift (<= 1e-9) over 500 steps, %.2f s (< 5 s)",
             worst_route, worst_closed, secs));
}

void gradient_checks() {
  const auto t0 = Clock::now();
  Rng rng(1004, 0);
  double worst = 0.0;
  for (int point = 0; point < 100; ++point) {
    const Index n = 5 + static_cast<Index>(rng.below(15));
    const Index dim = 1 + static_cast<Index>(rng.below(4));
    const Index c = 1 + static_cast<Index>(rng.below(4));
    const Index g = 1 + static_cast<Index>(rng.below(3));
    const Matrix x = random_points(n, dim, rng);
    const Matrix centres = random_points(c, dim, rng, 0.7);
    const Matrix y = random_targets(n, g, rng);
    NetworkParams p;
    p.w0 = Vector::NullaryExpr(g, [&](Index) { return rng.uniform(-1, 1); });
    p.W = Matrix::NullaryExpr(c, g, [&](Index, Index) { return rng.uniform(-1.5, 1.5); });
    p.sigma = Vector::NullaryExpr(c, [&](Index) { return rng.uniform(0.6, 2.0); });

    const auto loss = [&](const NetworkParams& q, const Matrix& cs) { return sse(y, forward(sq_dist(x, cs), q)); };
    const Matrix d = sq_dist(x, centres);
    const Matrix eps = output_errors(y, forward(d, p));

    // Every update is −(η/2)·∂SSE.
    const NetworkParams weights = update_weights(p, d, eps, 1.0);
    const Vector fd_w0 = fd_gradient(g, [&](Index t, double h) {
      NetworkParams q = p;
      q.w0(t) += h;
      return loss(q, centres);
    });
    const Vector fd_w = fd_gradient(c * g, [&](Index t, double h) {
      NetworkParams q = p;
      q.W.data()[t] += h;
      return loss(q, centres);
    });
    const Matrix dw = weights.W - p.W;
    worst = std::max(worst, rel_norm(weights.w0 - p.w0, -0.5 * fd_w0));
    worst = std::max(worst, rel_norm(Eigen::Map<const Vector>(dw.data(), dw.size()), -0.5 * fd_w));

    const double eta = 1e-3;
    const NetworkParams bw = update_bandwidths(p, d, eps, eta, 1e-12);
    const Vector fd_s = fd_gradient(c, [&](Index t, double h) {
      NetworkParams q = p;
      q.sigma(t) += h;
      return loss(q, centres);
    });
    worst = std::max(worst, rel_norm((bw.sigma - p.sigma) / eta, -0.5 * fd_s));

    const Matrix eh = hidden_errors(p, d, eps);
    for (Index j = 0; j < c; ++j) {
      Vector step = Vector::Zero(dim);
      for (Index i = 0; i < n; ++i) step += eh(j, i) * (x.row(i) - centres.row(j)).transpose();
      const Vector fd_c = fd_gradient(dim, [&](Index t, double h) {
        Matrix cs = centres;
        cs(j, t) += h;
        return loss(p, cs);
      });
      worst = std::max(worst, rel_norm(step, -0.5 * fd_c));
    }
  }
  const double secs = seconds_since(t0);
  report(4, "gradient checks", worst <= 1e-5 && secs < 10.0,
         fmt("max relative error %.2e (<= 1e-5) over 100 points, %.2f s (< 10 s)", worst, secs));
}

void kmeans_equivalence() {
  const auto t0 = Clock::now();
  Rng rng(1005, 0);
  int identical = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 10 + static_cast<Index>(rng.below(60));
    const int c = 2 + static_cast<int>(rng.below(6));
    const Matrix x = random_points(n, 1 + static_cast<Index>(rng.below(6)), rng);
    const Partition start = random_partition(static_cast<int>(n), c, rng);
    const KMeansResult rel = relational_kmeans(AdjacencyMatrix(brute_sq_distances(x)), start);
    const LloydResult vec = vector_kmeans(x, start);
    identical += rel.history == vec.history ? 1 : 0;
  }
  const double secs = seconds_since(t0);
  report(5, "k-means equivalence", identical == 50 && secs < 10.0,
         fmt("%d/50 identical partition sequences, %.2f s (< 10 s)", identical, secs));
}

ExperimentConfig uci_config(const std::string& kind, const std::string& file) {
  ExperimentConfig cfg;
  cfg.dataset.kind = kind;
  cfg.dataset.path = data_file(file);
  cfg.monte_carlo = 10;
  cfg.check();
  return cfg;
}

void uci_reproduction() {
  const auto t0 = Clock::now();
  const Report wdbc = cmd_train(uci_config("wdbc", "wdbc.data"));
  const Report voting = cmd_train(uci_config("voting", "house-votes-84.data"));
  const Report heart = cmd_train(uci_config("heart-cleveland", "processed.cleveland.data"));
  const double secs = seconds_since(t0);
  const ModeSummary& w = wdbc.modes.front();
  const ModeSummary& v = voting.modes.front();
  const ModeSummary& h = heart.modes.front();
  const bool ok = w.train.mean >= 0.95 && w.test.mean >= 0.93 && v.train.mean >= 0.92 && h.train.mean >= 0.80 &&
                  secs < 900.0;
  report(6, "UCI reproduction", ok,
         fmt("WDBC train %.4f (>= 0.95) test %.4f (>= 0.93); voting train %.4f (>= 0.92); heart train %.4f "
             "(>= 0.80); 10 runs each, %.1f s (< 900 s)",
             w.train.mean, w.test.mean, v.train.mean, h.train.mean, secs));
  report(7, "WDBC response deviation", std::abs(w.deviation_mean) <= 0.05 && w.deviation_std <= 0.3,
         fmt("mean %.4f (within +-0.05), std %.4f (<= 0.3)", w.deviation_mean, w.deviation_std));
}

void medoid_degradation() {
  ExperimentConfig cfg;
  cfg.dataset.kind = "synthetic-blobs";
  cfg.dataset.n = 90;
  cfg.dataset.classes = 3;
  cfg.dataset.sep = 6.0;
  cfg.dataset.dim = 50;
  cfg.monte_carlo = 10;
  cfg.compare_modes = true;
  cfg.check();
  const auto t0 = Clock::now();
  const Report rep = cmd_train(cfg);
  const double free_acc = rep.modes.at(0).test.mean;
  const double medoid_acc = rep.modes.at(1).test.mean;
  report(8, "medoid-mode degradation", free_acc >= medoid_acc,
         fmt("free test %.4f >= medoid test %.4f (paired delta %.4f +- %.4f), 10 seeds, %.1f s", free_acc,
             medoid_acc, rep.paired_delta->mean, rep.paired_delta->std, seconds_since(t0)));
}

void cmds_round_trip() {
  const auto t0 = Clock::now();
  Rng rng(1009, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_points(5 + static_cast<Index>(rng.below(40)), 1 + static_cast<Index>(rng.below(8)), rng);
    const Matrix r = brute_sq_distances(x);
    worst = std::max(worst, max_rel_err(brute_sq_distances(cmds(AdjacencyMatrix(r)).x), r));
  }
  const AdjacencyMatrix bad = four_point_non_euclidean();
  const double change = (brute_sq_distances(cmds(bad).x) - bad.entries()).cwiseAbs().maxCoeff();
  const double secs = seconds_since(t0);
  report(9, "CMDS round trip", worst <= 1e-8 && change > 0.0 && secs < 1.0,
         fmt("realizable relative error %.2e (<= 1e-8); non-realizable max change %.3f (> 0), %.3f s (< 1 s)", worst,
             change, secs));
}

void transform_degradation() {
  ExperimentConfig cfg;
  cfg.dataset.kind = "pseudo-euclidean-blobs";
  cfg.dataset.n = 90;
  cfg.dataset.classes = 3;
  cfg.dataset.sep = 6.0;
  cfg.dataset.dim = 2;
  cfg.monte_carlo = 10;
  cfg.check();
  const auto t0 = Clock::now();
  const Dataset data = cmd_ingest(cfg.dataset);
  const double raw = cmd_train(data, cfg).modes.front().test.mean;
  cfg.transform = Transform::cmds;
  const double c = cmd_train(data, cfg).modes.front().test.mean;
  cfg.transform = Transform::pmds;
  const double p = cmd_train(data, cfg).modes.front().test.mean;
  report(10, "transform degradation on a non-Euclidean graph", c <= raw && p <= raw,
         fmt("test accuracy cmds %.4f, pmds %.4f <= untransformed %.4f (min eigenvalue %.2f), 10 seeds, %.1f s", c, p,
             raw, validate(data.r).min_eigenvalue, seconds_since(t0)));
}

}  // namespace

int main() {
  try {
    distance_identity();
    trajectory_duality();
    offset_equivalence();
    gradient_checks();
    kmeans_equivalence();
    uci_reproduction();
    medoid_degradation();
    cmds_round_trip();
    transform_degradation();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
