#pragma once

#include "relrbf/graph.hpp"

#include <filesystem>
#include <vector>

namespace relrbf {

struct Embedding {
  Matrix x;            // n×d'
  Vector eigenvalues;  // spectrum of −JRJ/2 (before any shift), descending
  Index dims() const { return x.cols(); }
};

/// Classical scaling: negative eigenvalues of −JRJ/2 are zeroed and every
/// positive direction is kept. Each eigenvector's largest-magnitude entry is
/// made positive.
Embedding cmds(const AdjacencyMatrix& r);

/// Spectral-shift scaling: every eigenvalue is raised by |λ_min| before
/// embedding (no shift when the spectrum is already non-negative).
Embedding pmds(const AdjacencyMatrix& r);

struct VatOrder {
  std::vector<int> perm;    // reordered position a holds object perm[a]
  AdjacencyMatrix reordered;
};

/// Prim-style ordering starting from an endpoint of the largest entry.
VatOrder vat(const AdjacencyMatrix& r);

struct IvatResult {
  VatOrder order;           // VAT order with the minimax matrix reordered
  AdjacencyMatrix minimax;  // minimax path distances in the original order
};

/// Replaces each entry with the smallest achievable largest edge over paths
/// between the two objects, then VAT-orders the result.
IvatResult ivat(const AdjacencyMatrix& r);

/// 8-bit binary PGM; 0 (black) for the smallest entry.
void write_pgm(const Matrix& m, const std::filesystem::path& path);

}  // namespace relrbf
