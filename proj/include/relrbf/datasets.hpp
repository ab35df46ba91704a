#pragma once

#include "relrbf/graph.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace relrbf {

struct LabeledData {
  Matrix x;  // n×d raw features
  std::vector<int> labels;
  std::vector<std::string> class_names;

  int classes() const { return static_cast<int>(class_names.size()); }
};

struct LabeledGraph {
  AdjacencyMatrix r;
  std::vector<int> labels;
  std::vector<std::string> class_names;

  int classes() const { return static_cast<int>(class_names.size()); }
};

/// Breast cancer diagnostic file: id, B|M, 30 features. B → 0, M → 1.
LabeledData load_wdbc(const std::filesystem::path& path);
/// Congressional votes: party, 16 votes in {y, n, ?} → {+1, −1, 0}.
/// democrat → 0, republican → 1.
LabeledData load_voting(const std::filesystem::path& path);
/// Processed Cleveland heart file: 13 features, '?' replaced by the column
/// median, class = (num > 0).
LabeledData load_heart_cleveland(const std::filesystem::path& path);

/// One integer label per line ('#' lines skipped); class names are the
/// distinct values in ascending order and labels are remapped to 0..g−1.
LabeledData read_labels(const std::filesystem::path& path);

/// Isotropic unit-variance Gaussian clusters; class k sits on a circle of
/// diameter `sep` in the first two coordinates (a line when dim = 1).
/// Labels are assigned round-robin, so classes are balanced.
LabeledData synthetic_blobs(int n, int classes, double sep, int dim, std::uint64_t seed);

/// Non-Euclidean labeled graph: r_ij = ‖x_i − x_j‖² − ‖z_i − z_j‖² + offset for
/// i ≠ j. x is `dim`-dimensional noise with no class structure; z holds blobs
/// like synthetic_blobs(…, sep, 2, …). offset makes every entry non-negative.
/// The class signal lives in the negative part of the spectrum.
LabeledGraph pseudo_euclidean_blobs(int n, int classes, double sep, int dim, std::uint64_t seed);

}  // namespace relrbf
