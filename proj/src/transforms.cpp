#include "relrbf/transforms.hpp"

#include "relrbf/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

namespace relrbf {

namespace {

struct Spectrum {
  Vector values;  // descending
  Matrix vectors;
};

Spectrum centred_spectrum(const AdjacencyMatrix& r) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(double_center(r.entries()));
  if (solver.info() != Eigen::Success) throw Error(Errc::EigenFailure, "eigendecomposition did not converge");
  const Index n = r.size();
  Spectrum s{solver.eigenvalues().reverse(), solver.eigenvectors().rowwise().reverse()};
  for (Index k = 0; k < n; ++k) {
    Index arg = 0;
    s.vectors.col(k).cwiseAbs().maxCoeff(&arg);
    if (s.vectors(arg, k) < 0.0) s.vectors.col(k) *= -1.0;
  }
  return s;
}

Embedding embed(const Spectrum& s, const Vector& shifted) {
  const double scale = shifted.size() ? shifted.cwiseAbs().maxCoeff() : 0.0;
  const double keep_tol = 1e-12 * scale;
  std::vector<Index> keep;
  for (Index k = 0; k < shifted.size(); ++k) {
    if (shifted(k) > keep_tol) keep.push_back(k);
  }
  Embedding e;
  e.eigenvalues = s.values;
  e.x.resize(s.vectors.rows(), static_cast<Index>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    e.x.col(static_cast<Index>(a)) = s.vectors.col(keep[a]) * std::sqrt(shifted(keep[a]));
  }
  return e;
}

}  // namespace

Embedding cmds(const AdjacencyMatrix& r) {
  if (r.size() == 0) return {};
  const Spectrum s = centred_spectrum(r);
  return embed(s, s.values.cwiseMax(0.0));
}

Embedding pmds(const AdjacencyMatrix& r) {
  if (r.size() == 0) return {};
  const Spectrum s = centred_spectrum(r);
  const double lmin = s.values.minCoeff();
  const double tol = kDefaultPsdRelTol * s.values.cwiseAbs().maxCoeff();
  Vector shifted = s.values;
  if (lmin < -tol) shifted.array() += std::abs(lmin);
  return embed(s, shifted.cwiseMax(0.0));
}

VatOrder vat(const AdjacencyMatrix& r) {
  const auto n = static_cast<int>(r.size());
  std::vector<int> perm;
  perm.reserve(static_cast<std::size_t>(n));
  if (n > 0) {
    Index start = 0;
    Index other = 0;
    r.entries().maxCoeff(&start, &other);
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<double> reach(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    int cur = static_cast<int>(start);
    for (int step = 0; step < n; ++step) {
      perm.push_back(cur);
      visited[static_cast<std::size_t>(cur)] = 1;
      int next = -1;
      for (int k = 0; k < n; ++k) {
        if (visited[static_cast<std::size_t>(k)]) continue;
        reach[static_cast<std::size_t>(k)] = std::min(reach[static_cast<std::size_t>(k)], r(cur, k));
        if (next < 0 || reach[static_cast<std::size_t>(k)] < reach[static_cast<std::size_t>(next)]) next = k;
      }
      cur = next;
    }
  }
  return VatOrder{perm, r.permuted(perm)};
}

IvatResult ivat(const AdjacencyMatrix& r) {
  const auto n = static_cast<int>(r.size());
  Matrix mm = Matrix::Zero(n, n);
  if (n > 0) {
    // Prim's tree; a node joining through parent p inherits p's minimax row.
    std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
    std::vector<double> reach(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    std::vector<int> order;
    int cur = 0;
    for (int step = 0; step < n; ++step) {
      in_tree[static_cast<std::size_t>(cur)] = 1;
      const int p = parent[static_cast<std::size_t>(cur)];
      if (p >= 0) {
        const double edge = r(cur, p);
        for (int u : order) {
          const double v = u == p ? edge : std::max(edge, mm(p, u));
          mm(cur, u) = v;
          mm(u, cur) = v;
        }
      }
      order.push_back(cur);
      int next = -1;
      for (int k = 0; k < n; ++k) {
        if (in_tree[static_cast<std::size_t>(k)]) continue;
        if (r(cur, k) < reach[static_cast<std::size_t>(k)]) {
          reach[static_cast<std::size_t>(k)] = r(cur, k);
          parent[static_cast<std::size_t>(k)] = cur;
        }
        if (next < 0 || reach[static_cast<std::size_t>(k)] < reach[static_cast<std::size_t>(next)]) next = k;
      }
      cur = next;
    }
  }
  AdjacencyMatrix minimax(std::move(mm), 0.0);
  VatOrder order = vat(minimax);
  return IvatResult{std::move(order), std::move(minimax)};
}

void write_pgm(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  out << "P5\n" << m.cols() << ' ' << m.rows() << "\n255\n";
  const double lo = m.size() ? m.minCoeff() : 0.0;
  const double hi = m.size() ? m.maxCoeff() : 0.0;
  const double span = hi > lo ? hi - lo : 1.0;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const auto px = static_cast<unsigned char>(std::lround(255.0 * (m(i, j) - lo) / span));
      out.put(static_cast<char>(px));
    }
  }
}

}  // namespace relrbf
