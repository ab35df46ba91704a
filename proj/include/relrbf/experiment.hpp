#pragma once

#include "relrbf/config.hpp"
#include "relrbf/datasets.hpp"
#include "relrbf/training.hpp"
#include "relrbf/transforms.hpp"
#include "relrbf/vector_oracle.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace relrbf {

enum class Transform { none, cmds, pmds };

struct DatasetSpec {
  std::string kind;  // wdbc | voting | heart-cleveland | adjacency-csv | synthetic-blobs | pseudo-euclidean-blobs
  std::filesystem::path path;
  std::filesystem::path labels;  // adjacency-csv only
  std::optional<bool> standardize;  // default: true for UCI kinds, false otherwise
  int n = 60;
  int classes = 2;
  double sep = 10.0;
  int dim = 2;
  std::uint64_t seed = 1;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  TrainConfig train;
  int monte_carlo = 1;
  bool compare_modes = false;  // also run the other prototype mode on each seed
  Transform transform = Transform::none;
  int threads = 0;  // 0: hardware concurrency
  int histogram_bins = 21;
  double histogram_lo = -1.0;
  double histogram_hi = 1.0;
  int duality_epochs = 20;
  std::filesystem::path checkpoint;  // eval input
  std::filesystem::path output = "relrbf_out";

  /// Throws Error(InvalidConfig) on unknown keys, wrong types or bad values.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;
  void check() const;
};

struct Dataset {
  AdjacencyMatrix r;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  /// Features that realize r exactly (after standardization), when known.
  std::optional<Matrix> features;

  int classes() const { return static_cast<int>(class_names.size()); }
  Matrix targets() const { return one_hot(labels, classes()); }
};

Dataset cmd_ingest(const DatasetSpec& spec);

/// Graph handed to the trainer: r itself, or the distances of its CMDS/PMDS embedding.
AdjacencyMatrix apply_transform(const AdjacencyMatrix& r, Transform t);

/// Rows: true class, columns: predicted class.
using Confusion = std::vector<std::vector<long>>;

Confusion confusion(const std::vector<int>& labels, const std::vector<int>& predicted, const std::vector<int>& idx,
                    int classes);
double accuracy(const Confusion& m);

struct Histogram {
  std::vector<double> edges;  // bins + 1
  std::vector<long> counts;
  long below = 0;
  long above = 0;

  Histogram(int bins, double lo, double hi);
  void add(double value);
  void merge(const Histogram& other);
};

struct RunOutcome {
  int run = 0;
  std::uint64_t seed = 0;
  PrototypeMode mode = PrototypeMode::free;
  Confusion train, test, val;
  Histogram deviation;
  double deviation_sum = 0.0;
  double deviation_sq_sum = 0.0;
  long deviation_count = 0;
  TrainResult result;

  explicit RunOutcome(const ExperimentConfig& cfg)
      : deviation(cfg.histogram_bins, cfg.histogram_lo, cfg.histogram_hi) {}
};

struct SetSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over runs
  Confusion pooled;
};

struct ModeSummary {
  PrototypeMode mode = PrototypeMode::free;
  std::vector<RunOutcome> runs;
  SetSummary train, test, val;
  Histogram deviation;
  double deviation_mean = 0.0;
  double deviation_std = 0.0;

  explicit ModeSummary(const ExperimentConfig& cfg)
      : deviation(cfg.histogram_bins, cfg.histogram_lo, cfg.histogram_hi) {}
};

struct Report {
  ExperimentConfig config;
  int observations = 0;
  std::vector<std::string> class_names;
  std::vector<ModeSummary> modes;  // configured mode first
  /// Present with compare_modes: per-seed test accuracy, free minus medoid.
  std::optional<SetSummary> paired_delta;
  std::vector<double> paired_deltas;

  nlohmann::json to_json() const;
};

/// One training run on seed config.train.seed + run.
RunOutcome run_once(const Dataset& data, const AdjacencyMatrix& r, const ExperimentConfig& cfg, int run,
                    PrototypeMode mode);

/// Monte Carlo training: runs execute on a worker pool and are folded in run order.
Report cmd_train(const Dataset& data, const ExperimentConfig& cfg);
Report cmd_train(const ExperimentConfig& cfg);

nlohmann::json checkpoint_json(const TrainResult& result, std::uint64_t seed);

struct EvalResult {
  Confusion all, train, test, val;
  double max_distance_drift = 0.0;  // stored d_state vs recomputed distances
};

/// Re-evaluates a checkpoint against the configured dataset.
EvalResult cmd_eval(const ExperimentConfig& cfg);

DualityReport cmd_duality(const ExperimentConfig& cfg);
nlohmann::json to_json(const DualityReport& rep);

struct TransformOutput {
  Embedding embedding;
  AdjacencyMatrix transformed;
  RealizabilityReport before;
  RealizabilityReport after;
};

TransformOutput cmd_transform(const ExperimentConfig& cfg);

struct DiagnoseOutput {
  VatOrder vat;
  IvatResult ivat;
  RealizabilityReport realizability;
};

DiagnoseOutput cmd_diagnose(const AdjacencyMatrix& r);
nlohmann::json to_json(const RealizabilityReport& rep);

/// Writers used by the CLI; each creates `dir` if needed.
void write_report(const Report& rep, const std::filesystem::path& dir);
void write_transform(const TransformOutput& out, const std::filesystem::path& dir);
void write_diagnose(const DiagnoseOutput& out, const std::filesystem::path& dir);

std::string_view to_string(Transform t);
std::string_view to_string(PrototypeMode m);

}  // namespace relrbf
