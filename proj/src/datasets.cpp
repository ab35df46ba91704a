#include "relrbf/datasets.hpp"

#include "relrbf/errors.hpp"
#include "relrbf/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

namespace relrbf {

namespace {

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::MalformedFile, "cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
      const auto b = f.find_first_not_of(" \t");
      const auto e = f.find_last_not_of(" \t");
      fields.push_back(b == std::string::npos ? std::string() : f.substr(b, e - b + 1));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

[[noreturn]] void malformed(const std::filesystem::path& path, std::size_t row, const std::string& what) {
  throw Error(Errc::MalformedFile, path.string() + " row " + std::to_string(row + 1) + ": " + what);
}

void check_width(const std::filesystem::path& path, const std::vector<std::vector<std::string>>& rows,
                 std::size_t width) {
  if (rows.empty()) throw Error(Errc::MalformedFile, path.string() + ": no records");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) malformed(path, i, "expected " + std::to_string(width) + " fields");
  }
}

}  // namespace

LabeledData load_wdbc(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  check_width(path, rows, 32);
  LabeledData out;
  out.class_names = {"B", "M"};
  out.x.resize(static_cast<Index>(rows.size()), 30);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string& dx = rows[i][1];
    if (dx != "B" && dx != "M") malformed(path, i, "diagnosis must be B or M");
    out.labels.push_back(dx == "M" ? 1 : 0);
    for (int k = 0; k < 30; ++k) {
      const auto v = parse_number(rows[i][static_cast<std::size_t>(k + 2)]);
      if (!v) malformed(path, i, "non-numeric feature");
      out.x(static_cast<Index>(i), k) = *v;
    }
  }
  return out;
}

LabeledData load_voting(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  check_width(path, rows, 17);
  LabeledData out;
  out.class_names = {"democrat", "republican"};
  out.x.resize(static_cast<Index>(rows.size()), 16);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string& party = rows[i][0];
    if (party != "democrat" && party != "republican") malformed(path, i, "unknown party");
    out.labels.push_back(party == "republican" ? 1 : 0);
    for (int k = 0; k < 16; ++k) {
      const std::string& v = rows[i][static_cast<std::size_t>(k + 1)];
      double code = 0.0;
      if (v == "y") {
        code = 1.0;
      } else if (v == "n") {
        code = -1.0;
      } else if (v != "?") {
        malformed(path, i, "vote must be y, n or ?");
      }
      out.x(static_cast<Index>(i), k) = code;
    }
  }
  return out;
}

LabeledData load_heart_cleveland(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  check_width(path, rows, 14);
  const auto n = static_cast<Index>(rows.size());
  LabeledData out;
  out.class_names = {"absent", "present"};
  out.x = Matrix::Constant(n, 13, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int k = 0; k < 13; ++k) {
      const std::string& f = rows[i][static_cast<std::size_t>(k)];
      if (f == "?") continue;
      const auto v = parse_number(f);
      if (!v) malformed(path, i, "non-numeric feature");
      out.x(static_cast<Index>(i), k) = *v;
    }
    const auto num = parse_number(rows[i][13]);
    if (!num) malformed(path, i, "non-numeric class");
    out.labels.push_back(*num > 0.0 ? 1 : 0);
  }
  for (Index k = 0; k < 13; ++k) {
    std::vector<double> present;
    for (Index i = 0; i < n; ++i) {
      if (!std::isnan(out.x(i, k))) present.push_back(out.x(i, k));
    }
    if (present.empty()) throw Error(Errc::MalformedFile, path.string() + ": column with no values");
    std::sort(present.begin(), present.end());
    const std::size_t m = present.size();
    const double median = m % 2 ? present[m / 2] : 0.5 * (present[m / 2 - 1] + present[m / 2]);
    for (Index i = 0; i < n; ++i) {
      if (std::isnan(out.x(i, k))) out.x(i, k) = median;
    }
  }
  return out;
}

LabeledData read_labels(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  std::vector<long> raw;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) malformed(path, i, "expected one label");
    const std::string& s = rows[i][0];
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) malformed(path, i, "label must be an integer");
    raw.push_back(v);
  }
  std::map<long, int> codes;
  for (long v : raw) codes.emplace(v, 0);
  LabeledData out;
  for (auto& [v, code] : codes) {
    code = static_cast<int>(out.class_names.size());
    out.class_names.push_back(std::to_string(v));
  }
  for (long v : raw) out.labels.push_back(codes.at(v));
  return out;
}

namespace {

Matrix blob_centres(int classes, double sep, int dim) {
  Matrix mu = Matrix::Zero(classes, dim);
  for (int k = 0; k < classes; ++k) {
    if (dim == 1) {
      mu(k, 0) = sep * k;
    } else {
      const double a = 2.0 * std::numbers::pi * k / classes;
      mu(k, 0) = 0.5 * sep * std::cos(a);
      mu(k, 1) = 0.5 * sep * std::sin(a);
    }
  }
  return mu;
}

void check_generator_args(int n, int classes, int dim) {
  if (classes < 1 || n < classes) throw Error(Errc::InvalidConfig, "need 1 ≤ classes ≤ n");
  if (dim < 1) throw Error(Errc::InvalidConfig, "dim must be ≥ 1");
}

}  // namespace

LabeledData synthetic_blobs(int n, int classes, double sep, int dim, std::uint64_t seed) {
  check_generator_args(n, classes, dim);
  Rng rng = make_rng(seed, Stream::Data);
  const Matrix mu = blob_centres(classes, sep, dim);
  LabeledData out;
  for (int k = 0; k < classes; ++k) out.class_names.push_back("class" + std::to_string(k));
  out.x.resize(n, dim);
  for (int i = 0; i < n; ++i) {
    const int k = i % classes;
    out.labels.push_back(k);
    for (int j = 0; j < dim; ++j) out.x(i, j) = mu(k, j) + rng.normal();
  }
  return out;
}

LabeledGraph pseudo_euclidean_blobs(int n, int classes, double sep, int dim, std::uint64_t seed) {
  check_generator_args(n, classes, dim);
  const LabeledData z = synthetic_blobs(n, classes, sep, 2, seed);
  Rng rng(seed, static_cast<std::uint64_t>(Stream::Data) + 100);
  Matrix x(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = rng.normal();
  }
  Matrix r = Matrix::Zero(n, n);
  double lowest = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      r(i, j) = (x.row(i) - x.row(j)).squaredNorm() - (z.x.row(i) - z.x.row(j)).squaredNorm();
      lowest = std::min(lowest, r(i, j));
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      r(i, j) -= lowest;
      r(j, i) = r(i, j);
    }
  }
  return LabeledGraph{AdjacencyMatrix(std::move(r)), z.labels, z.class_names};
}

}  // namespace relrbf
