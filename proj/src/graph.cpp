#include "relrbf/graph.hpp"

#include "relrbf/errors.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace relrbf {

namespace {

void require_square_finite(const Matrix& r) {
  if (r.rows() != r.cols()) {
    throw Error(Errc::NonSquare, std::to_string(r.rows()) + "x" + std::to_string(r.cols()));
  }
  if (!r.allFinite()) throw Error(Errc::NonFinite, "matrix has non-finite entries");
}

std::vector<double> parse_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<double> row;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t')) ++p;
    double value = 0.0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc()) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number");
    }
    row.push_back(value);
    p = next;
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p < end) {
      if (*p != ',') throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected ','");
      ++p;
    }
  }
  return row;
}

}  // namespace

AdjacencyMatrix::AdjacencyMatrix(Matrix entries, double symmetry_tol) : entries_(std::move(entries)) {
  require_square_finite(entries_);
  const Index n = entries_.rows();
  for (Index p = 0; p < n; ++p) {
    if (entries_(p, p) != 0.0) {
      throw Error(Errc::NonzeroDiagonal, "r(" + std::to_string(p) + "," + std::to_string(p) + ") != 0");
    }
    for (Index q = 0; q < n; ++q) {
      if (entries_(p, q) < 0.0) {
        throw Error(Errc::NegativeEntry, "r(" + std::to_string(p) + "," + std::to_string(q) + ") < 0");
      }
    }
  }
  for (Index p = 0; p < n; ++p) {
    for (Index q = p + 1; q < n; ++q) {
      const double a = entries_(p, q);
      const double b = entries_(q, p);
      if (std::abs(a - b) > symmetry_tol) {
        throw Error(Errc::AsymmetryError,
                    "r(" + std::to_string(p) + "," + std::to_string(q) + ") differs from its transpose");
      }
      if (a != b) entries_(p, q) = entries_(q, p) = 0.5 * (a + b);
    }
  }
}

AdjacencyMatrix AdjacencyMatrix::submatrix(const std::vector<int>& idx) const {
  const auto m = static_cast<Index>(idx.size());
  Matrix out(m, m);
  for (Index a = 0; a < m; ++a) {
    for (Index b = 0; b < m; ++b) out(a, b) = entries_(idx[a], idx[b]);
  }
  return AdjacencyMatrix(std::move(out), Unchecked{});
}

AdjacencyMatrix AdjacencyMatrix::permuted(const std::vector<int>& perm) const {
  if (static_cast<Index>(perm.size()) != size()) {
    throw Error(Errc::DimensionMismatch, "permutation length differs from matrix size");
  }
  return submatrix(perm);
}

Matrix double_center(const Matrix& r) {
  const Index n = r.rows();
  if (n == 0) return Matrix();
  const Vector row_mean = r.rowwise().mean();
  const Vector col_mean = r.colwise().mean().transpose();
  const double grand = r.mean();
  Matrix b(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) b(i, j) = -0.5 * (r(i, j) - row_mean(i) - col_mean(j) + grand);
  }
  return b;
}

RealizabilityReport validate(const Matrix& r, double tol_psd) {
  require_square_finite(r);
  const Index n = r.rows();
  RealizabilityReport rep;
  rep.is_symmetric = true;
  rep.is_nonnegative = true;
  rep.is_antireflexive = true;
  for (Index p = 0; p < n; ++p) {
    if (r(p, p) != 0.0) rep.is_antireflexive = false;
    for (Index q = 0; q < n; ++q) {
      if (r(p, q) < 0.0) rep.is_nonnegative = false;
      if (r(p, q) != r(q, p)) rep.is_symmetric = false;
    }
  }

  // Triangle inequality on sqrt(r) over all triples.
  rep.sqrt_metric_ok = rep.is_nonnegative;
  if (rep.sqrt_metric_ok) {
    const Matrix s = r.cwiseSqrt();
    const double slack = 1e-12 * std::max(1.0, s.maxCoeff());
    for (Index i = 0; i < n && rep.sqrt_metric_ok; ++i) {
      for (Index j = 0; j < n && rep.sqrt_metric_ok; ++j) {
        for (Index k = 0; k < n; ++k) {
          if (s(i, k) > s(i, j) + s(j, k) + slack) {
            rep.sqrt_metric_ok = false;
            break;
          }
        }
      }
    }
  }

  if (n == 0) {
    rep.euclidean_embeddable = true;
    return rep;
  }
  const Matrix sym = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(double_center(sym), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(Errc::EigenFailure, "PSD test did not converge");
  const Vector& ev = solver.eigenvalues();
  rep.min_eigenvalue = ev.minCoeff();
  rep.max_abs_eigenvalue = ev.cwiseAbs().maxCoeff();
  rep.tol_psd = tol_psd < 0.0 ? kDefaultPsdRelTol * rep.max_abs_eigenvalue : tol_psd;
  rep.euclidean_embeddable = rep.is_symmetric && rep.is_nonnegative && rep.is_antireflexive &&
                             rep.min_eigenvalue >= -rep.tol_psd;
  return rep;
}

RealizabilityReport validate(const AdjacencyMatrix& r, double tol_psd) { return validate(r.entries(), tol_psd); }

Matrix standardize_columns(const Matrix& x, std::vector<Index>* dropped) {
  const Index n = x.rows();
  std::vector<Index> keep;
  std::vector<Index> removed;
  Vector mean = x.colwise().mean().transpose();
  Vector sd(x.cols());
  for (Index k = 0; k < x.cols(); ++k) {
    const double ss = (x.col(k).array() - mean(k)).square().sum();
    sd(k) = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
    if (sd(k) > 0.0) {
      keep.push_back(k);
    } else {
      removed.push_back(k);
    }
  }
  for (Index k : removed) warn("dropping constant feature column " + std::to_string(k) + " before standardizing");
  if (dropped) *dropped = removed;
  Matrix z(n, static_cast<Index>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    const Index k = keep[a];
    z.col(static_cast<Index>(a)) = (x.col(k).array() - mean(k)) / sd(k);
  }
  return z;
}

AdjacencyMatrix from_features(const Matrix& x, bool standardize, std::vector<Index>* dropped) {
  if (x.rows() < 2) throw Error(Errc::TooFewSamples, "need at least two observations");
  if (!x.allFinite()) throw Error(Errc::NonFinite, "feature matrix has non-finite entries");
  if (dropped) dropped->clear();
  const Matrix z = standardize ? standardize_columns(x, dropped) : x;
  const Index n = z.rows();
  Matrix r = Matrix::Zero(n, n);
  for (Index q = 0; q < n; ++q) {
    for (Index p = q + 1; p < n; ++p) {
      const double d2 = (z.row(p) - z.row(q)).squaredNorm();
      r(p, q) = d2;
      r(q, p) = d2;
    }
  }
  return AdjacencyMatrix(std::move(r), 0.0);
}

Matrix read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    rows.push_back(parse_csv_line(line, line_no));
    if (rows.back().size() != rows.front().size()) {
      throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": ragged row");
    }
  }
  const auto nrows = static_cast<Index>(rows.size());
  const Index ncols = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Matrix m(nrows, ncols);
  for (Index i = 0; i < nrows; ++i) {
    for (Index j = 0; j < ncols; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

void write_csv_matrix(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  out << std::setprecision(17);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

AdjacencyMatrix read_adjacency(const std::filesystem::path& path) {
  Matrix m = read_csv_matrix(path);
  if (m.rows() != m.cols()) {
    throw Error(Errc::ParseError, path.string() + ": expected a square matrix, got " + std::to_string(m.rows()) +
                                      "x" + std::to_string(m.cols()));
  }
  return AdjacencyMatrix(std::move(m), 1e-12);
}

void write_adjacency(const AdjacencyMatrix& r, const std::filesystem::path& path) {
  write_csv_matrix(r.entries(), path);
}

}  // namespace relrbf
