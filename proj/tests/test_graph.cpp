#include "relrbf/errors.hpp"
#include "relrbf/graph.hpp"

#include "support.hpp"

#include <doctest.h>

#include <fstream>

using namespace relrbf;
using namespace testing;

TEST_SUITE("graph") {
  TEST_CASE("validate: three-point Euclidean graph") {
    const AdjacencyMatrix r = three_point_graph();
    const RealizabilityReport rep = validate(r);
    CHECK(rep.is_symmetric);
    CHECK(rep.is_nonnegative);
    CHECK(rep.is_antireflexive);
    CHECK(rep.sqrt_metric_ok);
    CHECK(rep.euclidean_embeddable);
    CHECK(rep.min_eigenvalue >= -1e-12);
    CHECK(rep.min_eigenvalue == doctest::Approx(oracle_min_eigenvalue(r.entries())).epsilon(1e-9));
  }

  TEST_CASE("validate: zero matrix") {
    const RealizabilityReport rep = validate(Matrix::Zero(3, 3));
    CHECK(rep.is_symmetric);
    CHECK(rep.is_nonnegative);
    CHECK(rep.is_antireflexive);
    CHECK(rep.sqrt_metric_ok);
    CHECK(rep.euclidean_embeddable);
  }

  TEST_CASE("validate: triangle violation") {
    Matrix r(3, 3);
    r << 0, 1, 9, 1, 0, 1, 9, 1, 0;
    const RealizabilityReport rep = validate(r);
    CHECK_FALSE(rep.sqrt_metric_ok);
    CHECK_FALSE(rep.euclidean_embeddable);
    CHECK_FALSE(oracle_sqrt_metric(r));
    CHECK(oracle_min_eigenvalue(r) < 0.0);
  }

  TEST_CASE("validate: metric but not Euclidean") {
    const AdjacencyMatrix r = four_point_non_euclidean();
    const RealizabilityReport rep = validate(r);
    CHECK(rep.sqrt_metric_ok);
    CHECK_FALSE(rep.euclidean_embeddable);
    CHECK(rep.min_eigenvalue == doctest::Approx(oracle_min_eigenvalue(r.entries())).epsilon(1e-9));
  }

  TEST_CASE("validate: structural failures are reported, not thrown") {
    Matrix r(2, 2);
    r << 1, 2, 3, 0;
    const RealizabilityReport rep = validate(r);
    CHECK_FALSE(rep.is_symmetric);
    CHECK_FALSE(rep.is_antireflexive);
    CHECK_FALSE(rep.euclidean_embeddable);
  }

  TEST_CASE("validate: bad shapes and values throw") {
    CHECK_THROWS_AS(validate(Matrix::Zero(2, 3)), Error);
    Matrix r = Matrix::Zero(2, 2);
    r(0, 1) = std::nan("");
    try {
      validate(r);
      FAIL("expected NonFinite");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonFinite);
    }
  }

  TEST_CASE("validate agrees with the eigen oracle on random graphs") {
    Rng rng(7, 0);
    for (int trial = 0; trial < 50; ++trial) {
      const Index n = 3 + static_cast<Index>(rng.below(10));
      Matrix r = brute_sq_distances(random_points(n, 3, rng));
      if (trial % 2) {
        // Perturb one pair: usually breaks embeddability.
        const Index a = 0;
        const Index b = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
        r(a, b) = r(b, a) = r(a, b) * 3.0 + 1.0;
      }
      const RealizabilityReport rep = validate(r);
      const double lmin = oracle_min_eigenvalue(r);
      CHECK(rep.euclidean_embeddable == (lmin >= -1e-8 * rep.max_abs_eigenvalue));
      CHECK(rep.sqrt_metric_ok == oracle_sqrt_metric(r, 1e-9));
    }
  }

  TEST_CASE("AdjacencyMatrix invariants") {
    Matrix r(2, 2);
    r << 0, 1, 1 + 1e-14, 0;
    const AdjacencyMatrix ok(r);
    CHECK(ok(0, 1) == ok(1, 0));

    r(1, 0) = 1.1;
    CHECK_THROWS_WITH_AS(AdjacencyMatrix{r}, doctest::Contains("AsymmetryError"), Error);
    Matrix neg(2, 2);
    neg << 0, -1, -1, 0;
    try {
      AdjacencyMatrix bad(neg);
      FAIL("expected NegativeEntry");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NegativeEntry);
    }
    Matrix diag = Matrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    try {
      AdjacencyMatrix bad(diag);
      FAIL("expected NonzeroDiagonal");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NonzeroDiagonal);
    }
  }

  TEST_CASE("submatrix and permuted") {
    const AdjacencyMatrix r = three_point_graph();
    const AdjacencyMatrix s = r.submatrix({2, 0});
    REQUIRE(s.size() == 2);
    CHECK(s(0, 1) == 1.0);
    const AdjacencyMatrix p = r.permuted({2, 1, 0});
    CHECK(p(0, 1) == r(2, 1));
    CHECK(p(0, 2) == r(2, 0));
  }

  TEST_CASE("from_features examples") {
    const AdjacencyMatrix r = from_features(three_points(), false);
    CHECK(r(0, 1) == 1.0);
    CHECK(r(0, 2) == 1.0);
    CHECK(r(1, 2) == 2.0);

    const AdjacencyMatrix same = from_features(Matrix::Constant(4, 3, 2.5), false);
    CHECK(same.entries().isZero(0.0));

    Matrix one(2, 1);
    one << 0, 2;
    CHECK(from_features(one, false)(0, 1) == 4.0);

    CHECK_THROWS_AS(from_features(Matrix::Zero(1, 2), false), Error);
  }

  TEST_CASE("from_features matches brute force") {
    Rng rng(3, 0);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix x = random_points(12, 4, rng, 3.0);
      CHECK(max_rel_err(from_features(x, false).entries(), brute_sq_distances(x)) < 1e-12);
    }
  }

  TEST_CASE("standardization drops constant columns") {
    Matrix x(4, 3);
    x << 1, 5, 0, 2, 5, 1, 3, 5, 0, 4, 5, 1;
    std::vector<Index> dropped;
    const Matrix z = standardize_columns(x, &dropped);
    REQUIRE(dropped == std::vector<Index>{1});
    REQUIRE(z.cols() == 2);
    for (Index k = 0; k < z.cols(); ++k) {
      CHECK(z.col(k).mean() == doctest::Approx(0.0).epsilon(1e-12));
      const double var = (z.col(k).array() - z.col(k).mean()).square().sum() / 3.0;
      CHECK(var == doctest::Approx(1.0));
    }
    const AdjacencyMatrix r = from_features(x, true);
    CHECK(r.entries().isApprox(from_features(z, false).entries()));
  }

  TEST_CASE("adjacency CSV round trip") {
    Rng rng(11, 0);
    const AdjacencyMatrix r = from_features(random_points(9, 3, rng), false);
    const auto path = temp_path("roundtrip.csv");
    write_adjacency(r, path);
    const AdjacencyMatrix back = read_adjacency(path);
    CHECK(back.entries() == r.entries());

    write_adjacency(three_point_graph(), path);
    CHECK(read_adjacency(path).size() == 3);
  }

  TEST_CASE("adjacency CSV errors") {
    const auto path = temp_path("bad.csv");
    {
      std::ofstream out(path);
      out << "0,1,1\n1.5,0,2\n1,2,0\n";
    }
    try {
      read_adjacency(path);
      FAIL("expected AsymmetryError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::AsymmetryError);
    }
    {
      std::ofstream out(path);
      out << "0,1\n1,zero\n";
    }
    try {
      read_adjacency(path);
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
    }
    {
      std::ofstream out(path);
      out << "0,-1\n-1,0\n";
    }
    try {
      read_adjacency(path);
      FAIL("expected NegativeEntry");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::NegativeEntry);
    }
  }

  TEST_CASE("double_center of a Euclidean graph is the centred Gram matrix") {
    Rng rng(5, 0);
    const Matrix x = random_points(8, 3, rng);
    const Matrix xc = x.rowwise() - x.colwise().mean();
    CHECK(max_rel_err(double_center(brute_sq_distances(x)), xc * xc.transpose()) < 1e-12);
  }
}
