#pragma once

#include "relrbf/graph.hpp"
#include "relrbf/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

namespace testing {

using relrbf::Index;
using relrbf::Matrix;
using relrbf::Vector;

// X = {(0,0),(1,0),(0,1)}
inline Matrix three_points() {
  Matrix x(3, 2);
  x << 0, 0, 1, 0, 0, 1;
  return x;
}

inline relrbf::AdjacencyMatrix three_point_graph() {
  Matrix r(3, 3);
  r << 0, 1, 1, 1, 0, 2, 1, 2, 0;
  return relrbf::AdjacencyMatrix(r);
}

inline Matrix random_points(Index n, Index d, relrbf::Rng& rng, double scale = 1.0) {
  Matrix x(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < d; ++k) x(i, k) = scale * rng.normal();
  }
  return x;
}

// Pairwise squared distances by explicit loops.
inline Matrix brute_sq_distances(const Matrix& x) {
  Matrix r = Matrix::Zero(x.rows(), x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (Index k = 0; k < x.cols(); ++k) s += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
      r(i, j) = s;
    }
  }
  return r;
}

// Smallest eigenvalue of −JRJ/2 through the general (non-symmetric) solver.
inline double oracle_min_eigenvalue(const Matrix& r) {
  const Index n = r.rows();
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  const Matrix b = -0.5 * j * r * j;
  Eigen::EigenSolver<Matrix> es(b, false);
  return es.eigenvalues().real().minCoeff();
}

// Triangle inequality on √r over all ordered triples.
inline bool oracle_sqrt_metric(const Matrix& r, double tol = 1e-12) {
  const Index n = r.rows();
  for (Index a = 0; a < n; ++a) {
    for (Index b = 0; b < n; ++b) {
      for (Index c = 0; c < n; ++c) {
        if (std::sqrt(r(a, c)) > std::sqrt(r(a, b)) + std::sqrt(r(b, c)) + tol) return false;
      }
    }
  }
  return true;
}

// Four points with unit sides and both squared diagonals 3.5: √r is a
// metric, but a planar square only reaches 2, so −JRJ/2 has a negative
// eigenvalue.
inline relrbf::AdjacencyMatrix four_point_non_euclidean() {
  Matrix r(4, 4);
  r << 0, 1, 3.5, 1,
       1, 0, 1, 3.5,
       3.5, 1, 0, 1,
       1, 3.5, 1, 0;
  return relrbf::AdjacencyMatrix(r);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double max_rel_err(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  return scale == 0.0 ? 0.0 : (a - b).cwiseAbs().maxCoeff() / scale;
}

inline std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "relrbf_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline std::filesystem::path data_file(const std::string& name) { return std::filesystem::path(RELRBF_DATA_DIR) / name; }

}  // namespace testing
