#include "relrbf/network.hpp"

#include "relrbf/errors.hpp"

#include <cmath>

namespace relrbf {

void NetworkParams::check() const {
  if (w0.size() != W.cols() || sigma.size() != W.rows()) {
    throw Error(Errc::DimensionMismatch, "network parameter shapes disagree");
  }
  if (!w0.allFinite() || !W.allFinite() || !sigma.allFinite()) {
    throw Error(Errc::NonFinite, "network parameters must be finite");
  }
  if ((sigma.array() <= 0.0).any()) throw Error(Errc::NonpositiveSigma, "bandwidths must be positive");
}

double gaussian_kernel(double d, double sigma) {
  if (!(sigma > 0.0)) throw Error(Errc::NonpositiveSigma, "sigma must be positive");
  return std::exp(-d / (2.0 * sigma * sigma));
}

NetworkResponse forward(const Matrix& distances, const NetworkParams& params) {
  const Index c = params.prototypes();
  if (distances.rows() != c || params.sigma.size() != c || params.w0.size() != params.outputs()) {
    throw Error(Errc::DimensionMismatch, "distance rows vs prototype count");
  }
  NetworkResponse out;
  out.hidden.resize(c, distances.cols());
  for (Index j = 0; j < c; ++j) {
    const double scale = -1.0 / (2.0 * params.sigma(j) * params.sigma(j));
    out.hidden.row(j) = (distances.row(j).array() * scale).exp();
  }
  out.output = out.hidden.transpose() * params.W;
  out.output.rowwise() += params.w0.transpose();
  return out;
}

double sse(const Matrix& targets, const Matrix& output) {
  if (targets.rows() != output.rows() || targets.cols() != output.cols()) {
    throw Error(Errc::DimensionMismatch, "targets vs responses");
  }
  return (targets - output).squaredNorm();
}

double sse(const Matrix& targets, const NetworkResponse& response) { return sse(targets, response.output); }

std::vector<int> classify(const Matrix& output) {
  std::vector<int> labels(static_cast<std::size_t>(output.rows()));
  for (Index i = 0; i < output.rows(); ++i) {
    Index best = 0;
    for (Index k = 1; k < output.cols(); ++k) {
      if (output(i, k) > output(i, best)) best = k;
    }
    labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return labels;
}

Matrix one_hot(const std::vector<int>& labels, int classes) {
  Matrix y = Matrix::Zero(static_cast<Index>(labels.size()), classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) throw Error(Errc::DimensionMismatch, "label out of range");
    y(static_cast<Index>(i), labels[i]) = 1.0;
  }
  return y;
}

}  // namespace relrbf
