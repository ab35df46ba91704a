#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <vector>

namespace relrbf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Symmetric, non-negative, zero-diagonal matrix of pairwise dissimilarities.
/// Entries are read as squared distances of some (possibly unknown) latent
/// vector set. Immutable once constructed.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;

  /// Validates the structural invariants. Asymmetry up to `symmetry_tol`
  /// (absolute) is removed by averaging; anything larger throws.
  explicit AdjacencyMatrix(Matrix entries, double symmetry_tol = 1e-12);

  Index size() const { return entries_.rows(); }
  double operator()(Index p, Index q) const { return entries_(p, q); }
  const Matrix& entries() const { return entries_; }

  /// Rows/columns restricted to `idx`, in the given order.
  AdjacencyMatrix submatrix(const std::vector<int>& idx) const;
  /// Reorders rows and columns: result(a, b) = (*this)(perm[a], perm[b]).
  AdjacencyMatrix permuted(const std::vector<int>& perm) const;

 private:
  struct Unchecked {};
  AdjacencyMatrix(Matrix entries, Unchecked) : entries_(std::move(entries)) {}

  Matrix entries_;
};

struct RealizabilityReport {
  bool is_symmetric = false;
  bool is_nonnegative = false;
  bool is_antireflexive = false;
  bool sqrt_metric_ok = false;
  bool euclidean_embeddable = false;
  double min_eigenvalue = 0.0;
  double max_abs_eigenvalue = 0.0;
  double tol_psd = 0.0;
};

/// Default PSD tolerance factor, relative to the largest |eigenvalue|.
inline constexpr double kDefaultPsdRelTol = 1e-8;

/// Structural checks plus the double-centering PSD test on −JRJ/2.
/// `tol_psd < 0` selects the scale-relative default.
RealizabilityReport validate(const Matrix& r, double tol_psd = -1.0);
RealizabilityReport validate(const AdjacencyMatrix& r, double tol_psd = -1.0);

/// Double-centred Gram matrix −(1/2)·J·R·J.
Matrix double_center(const Matrix& r);

/// Squared (optionally per-column standardized) Euclidean distances between
/// rows of `x`. Constant columns are dropped with a warning when
/// standardizing; their indices are reported through `dropped`.
AdjacencyMatrix from_features(const Matrix& x, bool standardize,
                              std::vector<Index>* dropped = nullptr);

/// Column-wise z-scores with the n−1 standard deviation; constant columns removed.
Matrix standardize_columns(const Matrix& x, std::vector<Index>* dropped = nullptr);

AdjacencyMatrix read_adjacency(const std::filesystem::path& path);
void write_adjacency(const AdjacencyMatrix& r, const std::filesystem::path& path);

/// Generic numeric CSV: one row per line, comma separated, lines starting with
/// '#' skipped. Rows must have equal length.
Matrix read_csv_matrix(const std::filesystem::path& path);
void write_csv_matrix(const Matrix& m, const std::filesystem::path& path);

}  // namespace relrbf
