#include "relrbf/datasets.hpp"
#include "relrbf/errors.hpp"
#include "relrbf/vector_oracle.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace relrbf;
using namespace testing;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Matrix random_targets(Index n, Index g, Rng& rng) {
  Matrix y = Matrix::Zero(n, g);
  for (Index i = 0; i < n; ++i) y(i, static_cast<Index>(rng.below(static_cast<std::uint64_t>(g)))) = 1.0;
  return y;
}

}  // namespace

TEST_SUITE("vector_oracle") {
  TEST_CASE("vector_distance examples") {
    CHECK(vector_distance(v2(0.3, -2), v2(0.3, -2)) == 0.0);
    CHECK(vector_distance(v2(0, 1), v2(0.5, 0)) == doctest::Approx(1.25));
    CHECK(vector_distance(v2(1, 0), v2(1.0 / 3, 1.0 / 3)) == doctest::Approx(5.0 / 9.0));
    CHECK_THROWS_AS(vector_distance(v2(0, 1), Vector::Zero(3)), Error);
  }

  TEST_CASE("vector and relational distances agree") {
    const AdjacencyMatrix r = three_point_graph();
    Matrix w(1, 3);
    w << 1.0 / 3, 1.0 / 3, 1.0 / 3;
    Matrix centre(1, 2);
    centre << 1.0 / 3, 1.0 / 3;
    CHECK((relational_distances(r, w) - vector_distances(three_points(), centre)).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("Lloyd and relational k-means share partition sequences") {
    Rng rng(41, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const Index n = 10 + static_cast<Index>(rng.below(30));
      const int c = 2 + static_cast<int>(rng.below(4));
      const Matrix x = random_points(n, 3, rng);
      const Partition start = random_partition(static_cast<int>(n), c, rng);
      const KMeansResult rel = relational_kmeans(from_features(x, false), start);
      const LloydResult vec = vector_kmeans(x, start);
      CHECK(rel.history == vec.history);
      CHECK(rel.partition == vec.partition);
    }
  }

  TEST_CASE("both trainers need ten observations") {
    const Matrix y = Matrix::Identity(3, 3);
    TrainConfig cfg;
    cfg.c_init = cfg.c_max = 2;
    CHECK_THROWS_AS(vector_train(three_points(), y, cfg), Error);
    CHECK_THROWS_AS(train(from_features(three_points(), false), y, cfg), Error);
  }

  TEST_CASE("vector and graph trainers produce the same SSE trace") {
    Rng rng(42, 0);
    Matrix x(12, 2);
    x.topRows(3) = three_points();
    x.bottomRows(9) = random_points(9, 2, rng);
    const Matrix y = random_targets(12, 2, rng);
    TrainConfig cfg;
    cfg.c_init = 2;
    cfg.c_max = 4;
    cfg.max_epochs = 40;
    const VectorTrainResult vr = vector_train(x, y, cfg);
    const TrainResult gr = train(from_features(x, false), y, cfg);
    REQUIRE(vr.metrics.train_sse.size() == gr.metrics.train_sse.size());
    for (std::size_t e = 0; e < vr.metrics.train_sse.size(); ++e) {
      CHECK(std::abs(vr.metrics.train_sse[e] - gr.metrics.train_sse[e]) <= 1e-8);
    }
  }

  TEST_CASE("zero-epoch run returns the initial draw") {
    Rng rng(43, 0);
    const Matrix x = random_points(15, 2, rng);
    const Matrix y = random_targets(15, 2, rng);
    TrainConfig cfg;
    cfg.c_init = cfg.c_max = 3;
    cfg.max_epochs = 0;
    const VectorTrainResult vr = vector_train(x, y, cfg);
    const NetworkParams p = init_params(3, 2, cfg, cfg.seed);
    CHECK(vr.params.w0 == p.w0);
    CHECK(vr.params.W == p.W);
    CHECK(vr.params.sigma == p.sigma);
    CHECK(vr.epochs_run == 0);
  }

  TEST_CASE("constant targets: same solution from both trainers") {
    Rng rng(44, 0);
    const Matrix x = random_points(20, 2, rng);
    const Matrix y = Matrix::Constant(20, 1, -0.4);
    TrainConfig cfg;
    cfg.c_init = cfg.c_max = 2;
    cfg.max_epochs = 300;
    const VectorTrainResult vr = vector_train(x, y, cfg);
    const TrainResult gr = train(from_features(x, false), y, cfg);
    CHECK((vr.params.w0 - gr.params.w0).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((vr.params.W - gr.params.W).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(vr.metrics.train_sse.back() < 1e-2 * vr.metrics.train_sse.front());
  }

  TEST_CASE("duality passes on random realizable data") {
    Rng rng(45, 0);
    const Matrix x = random_points(40, 5, rng);
    const Matrix y = random_targets(40, 2, rng);
    TrainConfig cfg;
    cfg.c_init = 4;
    cfg.c_max = 6;
    const DualityReport rep = duality_check(x, y, cfg, 20);
    CHECK(rep.passed());
    CHECK(rep.max_deviation <= kDualityTolerance);
    CHECK(rep.epochs.size() == 21);
    CHECK(rep.note.empty());
  }

  TEST_CASE("duality with duplicated points") {
    Rng rng(46, 0);
    Matrix x(30, 3);
    x.topRows(15) = random_points(15, 3, rng);
    x.bottomRows(15) = x.topRows(15);
    const DualityReport rep = duality_check(x, random_targets(30, 2, rng), TrainConfig{}, 20);
    CHECK(rep.passed());
  }

  TEST_CASE("duality on a graph goes through its classical embedding") {
    const LabeledData blobs = synthetic_blobs(40, 2, 5.0, 3, 9);
    TrainConfig cfg;
    cfg.c_init = 3;
    cfg.c_max = 5;
    const DualityReport rep = duality_check(from_features(blobs.x, false), one_hot(blobs.labels, 2), cfg, 20);
    CHECK(rep.passed());
  }

  TEST_CASE("non-realizable graph has no oracle") {
    const LabeledGraph g = pseudo_euclidean_blobs(30, 2, 6.0, 2, 1);
    const DualityReport rep = duality_check(g.r, one_hot(g.labels, 2), TrainConfig{}, 5);
    CHECK(rep.status == DualityStatus::no_oracle);
    CHECK_FALSE(rep.passed());
    CHECK(rep.note.find("no vector oracle") != std::string::npos);
  }

  TEST_CASE("medoid mode keeps the two routes in lock-step") {
    Rng rng(47, 0);
    const Matrix x = random_points(30, 2, rng);
    TrainConfig cfg;
    cfg.mode = PrototypeMode::medoid;
    cfg.c_init = 3;
    cfg.c_max = 5;
    CHECK(duality_check(x, random_targets(30, 3, rng), cfg, 20).passed());
  }
}
