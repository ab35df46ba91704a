#pragma once

#include "relrbf/graph.hpp"

#include <vector>

namespace relrbf {

/// Output biases, hidden-to-output weights and Gaussian bandwidths of a
/// two-layer RBF network with linear output units.
struct NetworkParams {
  Vector w0;     // g
  Matrix W;      // c×g
  Vector sigma;  // c

  Index prototypes() const { return W.rows(); }
  Index outputs() const { return W.cols(); }
  /// Throws on inconsistent shapes, non-finite entries or σ ≤ 0.
  void check() const;
};

struct NetworkResponse {
  Matrix hidden;  // c×n, h(j,i) = exp(−d(j,i) / 2σ_j²)
  Matrix output;  // n×g
};

double gaussian_kernel(double d, double sigma);

NetworkResponse forward(const Matrix& distances, const NetworkParams& params);

double sse(const Matrix& targets, const NetworkResponse& response);
double sse(const Matrix& targets, const Matrix& output);

/// Argmax over outputs per row, ties to the smallest class index.
std::vector<int> classify(const Matrix& output);

/// n×g one-hot encoding of labels in [0, g).
Matrix one_hot(const std::vector<int>& labels, int classes);

}  // namespace relrbf
