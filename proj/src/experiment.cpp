#include "relrbf/experiment.hpp"

#include "relrbf/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace relrbf {

using nlohmann::json;

std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::none: return "none";
    case Transform::cmds: return "cmds";
    case Transform::pmds: return "pmds";
  }
  return "none";
}

std::string_view to_string(PrototypeMode m) { return m == PrototypeMode::medoid ? "medoid" : "free"; }

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::InvalidConfig, what); }

void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> known) {
  if (!j.is_object()) invalid(where + " must be an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) invalid("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) invalid(std::string(key) + " must be a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) invalid(std::string(key) + " must be an integer");
    if (std::is_unsigned_v<T> && v.get<long long>() < 0) invalid(std::string(key) + " must be non-negative");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) invalid(std::string(key) + " must be a number");
  } else {
    if (!v.is_string()) invalid(std::string(key) + " must be a string");
  }
  out = v.get<T>();
}

PrototypeMode parse_mode(const std::string& s) {
  if (s == "free") return PrototypeMode::free;
  if (s == "medoid") return PrototypeMode::medoid;
  invalid("mode must be free or medoid");
}

Transform parse_transform(const std::string& s) {
  if (s == "none") return Transform::none;
  if (s == "cmds") return Transform::cmds;
  if (s == "pmds") return Transform::pmds;
  invalid("transform must be none, cmds or pmds");
}

const std::set<std::string> kKinds = {"wdbc",           "voting",          "heart-cleveland",
                                      "adjacency-csv",  "synthetic-blobs", "pseudo-euclidean-blobs"};

bool is_uci(const std::string& kind) { return kind == "wdbc" || kind == "voting" || kind == "heart-cleveland"; }

TrainConfig train_from_json(const json& j) {
  reject_unknown(j, "train",
                 {"eta_min", "eta_max", "weight_init_lo", "weight_init_hi", "sigma_init_lo", "sigma_init_hi",
                  "lr_decay", "lr_growth", "mse_reject_ratio", "patience_stop", "patience_grow", "c_init", "c_max",
                  "seed", "max_epochs", "exit_tol", "exit_window", "lr_scale_init", "sigma_min", "mode", "stratify",
                  "kmeans_max_iter", "train_fraction"});
  TrainConfig t;
  read(j, "eta_min", t.eta_min);
  read(j, "eta_max", t.eta_max);
  read(j, "weight_init_lo", t.weight_init_lo);
  read(j, "weight_init_hi", t.weight_init_hi);
  read(j, "sigma_init_lo", t.sigma_init_lo);
  read(j, "sigma_init_hi", t.sigma_init_hi);
  read(j, "lr_decay", t.lr_decay);
  read(j, "lr_growth", t.lr_growth);
  read(j, "mse_reject_ratio", t.mse_reject_ratio);
  read(j, "patience_stop", t.patience_stop);
  read(j, "patience_grow", t.patience_grow);
  read(j, "c_init", t.c_init);
  read(j, "c_max", t.c_max);
  read(j, "seed", t.seed);
  read(j, "max_epochs", t.max_epochs);
  read(j, "exit_tol", t.exit_tol);
  read(j, "exit_window", t.exit_window);
  read(j, "lr_scale_init", t.lr_scale_init);
  read(j, "sigma_min", t.sigma_min);
  std::string mode = "free";
  read(j, "mode", mode);
  t.mode = parse_mode(mode);
  read(j, "stratify", t.stratify);
  read(j, "kmeans_max_iter", t.kmeans_max_iter);
  read(j, "train_fraction", t.train_fraction);
  return t;
}

json train_to_json(const TrainConfig& t) {
  return json{{"eta_min", t.eta_min},
              {"eta_max", t.eta_max},
              {"weight_init_lo", t.weight_init_lo},
              {"weight_init_hi", t.weight_init_hi},
              {"sigma_init_lo", t.sigma_init_lo},
              {"sigma_init_hi", t.sigma_init_hi},
              {"lr_decay", t.lr_decay},
              {"lr_growth", t.lr_growth},
              {"mse_reject_ratio", t.mse_reject_ratio},
              {"patience_stop", t.patience_stop},
              {"patience_grow", t.patience_grow},
              {"c_init", t.c_init},
              {"c_max", t.c_max},
              {"seed", t.seed},
              {"max_epochs", t.max_epochs},
              {"exit_tol", t.exit_tol},
              {"exit_window", t.exit_window},
              {"lr_scale_init", t.lr_scale_init},
              {"sigma_min", t.sigma_min},
              {"mode", to_string(t.mode)},
              {"stratify", t.stratify},
              {"kmeans_max_iter", t.kmeans_max_iter},
              {"train_fraction", t.train_fraction}};
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const json& j, Index rows, Index cols, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) throw Error(Errc::MalformedFile, std::string(what) + ": bad shape");
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(Errc::MalformedFile, std::string(what) + ": bad shape");
    }
    for (Index k = 0; k < cols; ++k) m(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
  }
  return m;
}

Vector vector_from_json(const json& j, Index size, const char* what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size) throw Error(Errc::MalformedFile, std::string(what) + ": bad shape");
  Vector v(size);
  for (Index i = 0; i < size; ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_lines(const std::vector<int>& values, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::ParseError, "cannot write " + path.string());
  for (int v : values) out << v << '\n';
}

json confusion_json(const Confusion& m) {
  json rows = json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

SetSummary summarize(const std::vector<double>& values, Confusion pooled) {
  SetSummary s;
  s.pooled = std::move(pooled);
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

void add_into(Confusion& acc, const Confusion& m) {
  if (acc.empty()) {
    acc = m;
    return;
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) acc[i][j] += m[i][j];
  }
}

json summary_json(const SetSummary& s) {
  return json{{"accuracy_mean", s.mean}, {"accuracy_std", s.std}, {"confusion", confusion_json(s.pooled)}};
}

json histogram_json(const Histogram& h) {
  return json{{"edges", h.edges}, {"counts", h.counts}, {"below", h.below}, {"above", h.above}};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j, "config",
                 {"dataset", "train", "monte_carlo", "compare_modes", "transform", "threads", "histogram",
                  "duality_epochs", "checkpoint", "output"});
  ExperimentConfig cfg;
  if (!j.contains("dataset")) invalid("dataset is required");
  const json& d = j.at("dataset");
  reject_unknown(d, "dataset", {"kind", "path", "labels", "standardize", "n", "classes", "sep", "dim", "seed"});
  read(d, "kind", cfg.dataset.kind);
  std::string s;
  if (d.contains("path")) {
    read(d, "path", s);
    cfg.dataset.path = s;
  }
  if (d.contains("labels")) {
    read(d, "labels", s);
    cfg.dataset.labels = s;
  }
  if (d.contains("standardize")) {
    bool b = false;
    read(d, "standardize", b);
    cfg.dataset.standardize = b;
  }
  read(d, "n", cfg.dataset.n);
  read(d, "classes", cfg.dataset.classes);
  read(d, "sep", cfg.dataset.sep);
  read(d, "dim", cfg.dataset.dim);
  read(d, "seed", cfg.dataset.seed);

  if (j.contains("train")) cfg.train = train_from_json(j.at("train"));
  read(j, "monte_carlo", cfg.monte_carlo);
  read(j, "compare_modes", cfg.compare_modes);
  std::string transform = "none";
  read(j, "transform", transform);
  cfg.transform = parse_transform(transform);
  read(j, "threads", cfg.threads);
  if (j.contains("histogram")) {
    const json& h = j.at("histogram");
    reject_unknown(h, "histogram", {"bins", "lo", "hi"});
    read(h, "bins", cfg.histogram_bins);
    read(h, "lo", cfg.histogram_lo);
    read(h, "hi", cfg.histogram_hi);
  }
  read(j, "duality_epochs", cfg.duality_epochs);
  if (j.contains("checkpoint")) {
    read(j, "checkpoint", s);
    cfg.checkpoint = s;
  }
  if (j.contains("output")) {
    read(j, "output", s);
    cfg.output = s;
  }
  cfg.check();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::InvalidConfig, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json d{{"kind", dataset.kind}, {"path", dataset.path.string()}, {"n", dataset.n}, {"classes", dataset.classes},
         {"sep", dataset.sep},   {"dim", dataset.dim},             {"seed", dataset.seed}};
  if (!dataset.labels.empty()) d["labels"] = dataset.labels.string();
  if (dataset.standardize) d["standardize"] = *dataset.standardize;
  return json{{"dataset", d},
              {"train", train_to_json(train)},
              {"monte_carlo", monte_carlo},
              {"compare_modes", compare_modes},
              {"transform", relrbf::to_string(transform)},
              {"histogram", {{"bins", histogram_bins}, {"lo", histogram_lo}, {"hi", histogram_hi}}},
              {"duality_epochs", duality_epochs}};
}

void ExperimentConfig::check() const {
  if (!kKinds.count(dataset.kind)) throw Error(Errc::UnknownKind, "unknown dataset kind '" + dataset.kind + "'");
  const bool generated = dataset.kind == "synthetic-blobs" || dataset.kind == "pseudo-euclidean-blobs";
  if (!generated && dataset.path.empty()) invalid("dataset.path is required for kind " + dataset.kind);
  if (dataset.kind == "adjacency-csv" && dataset.labels.empty()) invalid("adjacency-csv needs dataset.labels");
  if (generated) {
    if (dataset.classes < 1 || dataset.n < dataset.classes) invalid("need 1 <= dataset.classes <= dataset.n");
    if (dataset.dim < 1) invalid("dataset.dim must be positive");
    if (!std::isfinite(dataset.sep)) invalid("dataset.sep must be finite");
  }
  if (monte_carlo < 1) invalid("monte_carlo must be positive");
  if (threads < 0) invalid("threads must be >= 0");
  if (histogram_bins < 1 || !(histogram_lo < histogram_hi)) invalid("histogram needs bins >= 1 and lo < hi");
  if (duality_epochs < 0) invalid("duality_epochs must be >= 0");
  train.check();
}

Dataset cmd_ingest(const DatasetSpec& spec) {
  Dataset out;
  LabeledData raw;
  const bool standardize = spec.standardize.value_or(is_uci(spec.kind));
  if (spec.kind == "wdbc") {
    raw = load_wdbc(spec.path);
  } else if (spec.kind == "voting") {
    raw = load_voting(spec.path);
  } else if (spec.kind == "heart-cleveland") {
    raw = load_heart_cleveland(spec.path);
  } else if (spec.kind == "synthetic-blobs") {
    raw = synthetic_blobs(spec.n, spec.classes, spec.sep, spec.dim, spec.seed);
  } else if (spec.kind == "adjacency-csv") {
    out.r = read_adjacency(spec.path);
    LabeledData lab = read_labels(spec.labels);
    if (static_cast<Index>(lab.labels.size()) != out.r.size()) {
      throw Error(Errc::MalformedFile, "label count does not match the adjacency matrix");
    }
    out.labels = std::move(lab.labels);
    out.class_names = std::move(lab.class_names);
    return out;
  } else if (spec.kind == "pseudo-euclidean-blobs") {
    LabeledGraph g = pseudo_euclidean_blobs(spec.n, spec.classes, spec.sep, spec.dim, spec.seed);
    out.r = std::move(g.r);
    out.labels = std::move(g.labels);
    out.class_names = std::move(g.class_names);
    return out;
  } else {
    throw Error(Errc::UnknownKind, "unknown dataset kind '" + spec.kind + "'");
  }
  Matrix x = standardize ? standardize_columns(raw.x) : raw.x;
  out.r = from_features(x, false);
  out.features = std::move(x);
  out.labels = std::move(raw.labels);
  out.class_names = std::move(raw.class_names);
  return out;
}

AdjacencyMatrix apply_transform(const AdjacencyMatrix& r, Transform t) {
  switch (t) {
    case Transform::none: return r;
    case Transform::cmds: return from_features(cmds(r).x, false);
    case Transform::pmds: return from_features(pmds(r).x, false);
  }
  return r;
}

Confusion confusion(const std::vector<int>& labels, const std::vector<int>& predicted, const std::vector<int>& idx,
                    int classes) {
  Confusion m(static_cast<std::size_t>(classes), std::vector<long>(static_cast<std::size_t>(classes), 0));
  for (int i : idx) {
    ++m[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]
       [static_cast<std::size_t>(predicted[static_cast<std::size_t>(i)])];
  }
  return m;
}

double accuracy(const Confusion& m) {
  long hits = 0;
  long total = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      total += m[i][j];
      if (i == j) hits += m[i][j];
    }
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

Histogram::Histogram(int bins, double lo, double hi) : counts(static_cast<std::size_t>(bins), 0) {
  for (int b = 0; b <= bins; ++b) edges.push_back(lo + (hi - lo) * b / bins);
}

void Histogram::add(double value) {
  const double lo = edges.front();
  const double hi = edges.back();
  if (value < lo) {
    ++below;
    return;
  }
  if (value > hi) {
    ++above;
    return;
  }
  const auto bins = static_cast<long>(counts.size());
  const long b = std::min(bins - 1, static_cast<long>((value - lo) / (hi - lo) * static_cast<double>(bins)));
  ++counts[static_cast<std::size_t>(b)];
}

void Histogram::merge(const Histogram& other) {
  for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += other.counts[b];
  below += other.below;
  above += other.above;
}

RunOutcome run_once(const Dataset& data, const AdjacencyMatrix& r, const ExperimentConfig& cfg, int run,
                    PrototypeMode mode) {
  RunOutcome out(cfg);
  out.run = run;
  out.seed = cfg.train.seed + static_cast<std::uint64_t>(run);
  out.mode = mode;
  TrainConfig tc = cfg.train;
  tc.seed = out.seed;
  tc.mode = mode;
  const Matrix y = data.targets();
  const Split s = split(static_cast<int>(r.size()), tc.seed, tc.stratify ? &data.labels : nullptr, tc.train_fraction);
  out.result = train(std::make_shared<const AdjacencyMatrix>(r), y, tc, s);

  const NetworkResponse resp = forward(out.result.d_state.d, out.result.params);
  const std::vector<int> pred = classify(resp.output);
  out.train = confusion(data.labels, pred, s.train, data.classes());
  out.test = confusion(data.labels, pred, s.test, data.classes());
  out.val = confusion(data.labels, pred, s.val, data.classes());
  const Matrix resid = y - resp.output;
  for (Index i = 0; i < resid.rows(); ++i) {
    for (Index k = 0; k < resid.cols(); ++k) {
      const double e = resid(i, k);
      out.deviation.add(e);
      out.deviation_sum += e;
      out.deviation_sq_sum += e * e;
      ++out.deviation_count;
    }
  }
  return out;
}

namespace {

ModeSummary fold(const ExperimentConfig& cfg, PrototypeMode mode, std::vector<RunOutcome> runs) {
  ModeSummary m(cfg);
  m.mode = mode;
  std::vector<double> tr, te, va;
  Confusion ctr, cte, cva;
  double sum = 0.0;
  double sq = 0.0;
  long count = 0;
  for (const RunOutcome& r : runs) {
    tr.push_back(accuracy(r.train));
    te.push_back(accuracy(r.test));
    va.push_back(accuracy(r.val));
    add_into(ctr, r.train);
    add_into(cte, r.test);
    add_into(cva, r.val);
    m.deviation.merge(r.deviation);
    sum += r.deviation_sum;
    sq += r.deviation_sq_sum;
    count += r.deviation_count;
  }
  m.train = summarize(tr, std::move(ctr));
  m.test = summarize(te, std::move(cte));
  m.val = summarize(va, std::move(cva));
  if (count > 0) {
    m.deviation_mean = sum / static_cast<double>(count);
    const double var = count > 1 ? (sq - sum * m.deviation_mean) / static_cast<double>(count - 1) : 0.0;
    m.deviation_std = std::sqrt(std::max(0.0, var));
  }
  m.runs = std::move(runs);
  return m;
}

}  // namespace

Report cmd_train(const Dataset& data, const ExperimentConfig& cfg) {
  cfg.check();
  const AdjacencyMatrix r = apply_transform(data.r, cfg.transform);
  std::vector<PrototypeMode> modes{cfg.train.mode};
  if (cfg.compare_modes) {
    modes.push_back(cfg.train.mode == PrototypeMode::free ? PrototypeMode::medoid : PrototypeMode::free);
  }
  const int jobs = cfg.monte_carlo * static_cast<int>(modes.size());
  std::vector<std::optional<RunOutcome>> slots(static_cast<std::size_t>(jobs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int job = next++; job < jobs; job = next++) {
      try {
        const int run = job % cfg.monte_carlo;
        const PrototypeMode mode = modes[static_cast<std::size_t>(job / cfg.monte_carlo)];
        slots[static_cast<std::size_t>(job)] = run_once(data, r, cfg, run, mode);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  Report rep;
  rep.config = cfg;
  rep.observations = static_cast<int>(data.r.size());
  rep.class_names = data.class_names;
  for (std::size_t mi = 0; mi < modes.size(); ++mi) {
    std::vector<RunOutcome> runs;
    for (int run = 0; run < cfg.monte_carlo; ++run) {
      runs.push_back(std::move(*slots[mi * static_cast<std::size_t>(cfg.monte_carlo) + static_cast<std::size_t>(run)]));
    }
    rep.modes.push_back(fold(cfg, modes[mi], std::move(runs)));
  }
  if (cfg.compare_modes) {
    const ModeSummary& free = rep.modes[0].mode == PrototypeMode::free ? rep.modes[0] : rep.modes[1];
    const ModeSummary& medoid = rep.modes[0].mode == PrototypeMode::free ? rep.modes[1] : rep.modes[0];
    for (int run = 0; run < cfg.monte_carlo; ++run) {
      rep.paired_deltas.push_back(accuracy(free.runs[static_cast<std::size_t>(run)].test) -
                                  accuracy(medoid.runs[static_cast<std::size_t>(run)].test));
    }
    rep.paired_delta = summarize(rep.paired_deltas, {});
  }
  return rep;
}

Report cmd_train(const ExperimentConfig& cfg) { return cmd_train(cmd_ingest(cfg.dataset), cfg); }

json Report::to_json() const {
  json modes_json = json::array();
  for (const ModeSummary& m : modes) {
    json runs_json = json::array();
    for (const RunOutcome& r : m.runs) {
      const TrainMetrics& tm = r.result.metrics;
      runs_json.push_back(json{{"run", r.run},
                               {"seed", r.seed},
                               {"accuracy", {{"train", accuracy(r.train)}, {"test", accuracy(r.test)},
                                             {"val", accuracy(r.val)}}},
                               {"confusion", {{"train", confusion_json(r.train)}, {"test", confusion_json(r.test)},
                                              {"val", confusion_json(r.val)}}},
                               {"best_epoch", r.result.best_epoch},
                               {"epochs_run", r.result.epochs_run},
                               {"stop_reason", r.result.stop_reason},
                               {"prototypes", r.result.params.prototypes()},
                               {"negative_distance_events", tm.negative_distance_events},
                               {"trace", {{"train_sse", tm.train_sse},
                                          {"val_sse", tm.val_sse},
                                          {"test_sse", tm.test_sse},
                                          {"lr_scale", tm.lr_scale},
                                          {"prototypes", tm.prototypes},
                                          {"accepted", tm.accepted}}}});
    }
    modes_json.push_back(json{{"mode", relrbf::to_string(m.mode)},
                              {"train", summary_json(m.train)},
                              {"test", summary_json(m.test)},
                              {"val", summary_json(m.val)},
                              {"response_deviation", {{"mean", m.deviation_mean},
                                                      {"std", m.deviation_std},
                                                      {"histogram", histogram_json(m.deviation)}}},
                              {"runs", runs_json}});
  }
  json out{{"config", config.to_json()},
           {"observations", observations},
           {"classes", class_names},
           {"modes", modes_json}};
  if (paired_delta) {
    out["paired_test_delta"] = json{{"definition", "free minus medoid test accuracy, per seed"},
                                    {"mean", paired_delta->mean},
                                    {"std", paired_delta->std},
                                    {"per_run", paired_deltas}};
  }
  return out;
}

json checkpoint_json(const TrainResult& result, std::uint64_t seed) {
  return json{{"n", result.prototype_weights.cols()},
              {"c", result.params.prototypes()},
              {"g", result.params.outputs()},
              {"w0", vector_json(result.params.w0)},
              {"W", matrix_json(result.params.W)},
              {"sigma", vector_json(result.params.sigma)},
              {"prototypes", matrix_json(result.prototype_weights)},
              {"d_state", matrix_json(result.d_state.d)},
              {"seed", seed},
              {"epoch", result.best_epoch}};
}

EvalResult cmd_eval(const ExperimentConfig& cfg) {
  if (cfg.checkpoint.empty()) invalid("eval needs a checkpoint path");
  std::ifstream in(cfg.checkpoint);
  if (!in) throw Error(Errc::MalformedFile, "cannot open checkpoint " + cfg.checkpoint.string());
  const Dataset data = cmd_ingest(cfg.dataset);
  const AdjacencyMatrix r = apply_transform(data.r, cfg.transform);
  EvalResult out;
  try {
    const json j = json::parse(in);
    const Index n = j.at("n").get<Index>();
    const Index c = j.at("c").get<Index>();
    const Index g = j.at("g").get<Index>();
    if (n != r.size() || g != data.classes()) throw Error(Errc::DimensionMismatch, "checkpoint does not fit the dataset");
    NetworkParams p;
    p.w0 = vector_from_json(j.at("w0"), g, "w0");
    p.W = matrix_from_json(j.at("W"), c, g, "W");
    p.sigma = vector_from_json(j.at("sigma"), c, "sigma");
    p.check();
    const Matrix weights = matrix_from_json(j.at("prototypes"), c, n, "prototypes");
    const Matrix stored = matrix_from_json(j.at("d_state"), c, n, "d_state");
    const Matrix d = relational_distances(r, weights);
    out.max_distance_drift = c > 0 ? (d - stored).cwiseAbs().maxCoeff() : 0.0;
    const std::vector<int> pred = classify(forward(d, p).output);
    const auto seed = j.at("seed").get<std::uint64_t>();
    const Split s = split(static_cast<int>(n), seed, cfg.train.stratify ? &data.labels : nullptr,
                          cfg.train.train_fraction);
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int i = 0; i < static_cast<int>(n); ++i) all[static_cast<std::size_t>(i)] = i;
    out.all = confusion(data.labels, pred, all, data.classes());
    out.train = confusion(data.labels, pred, s.train, data.classes());
    out.test = confusion(data.labels, pred, s.test, data.classes());
    out.val = confusion(data.labels, pred, s.val, data.classes());
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedFile, "checkpoint: " + std::string(e.what()));
  }
  return out;
}

DualityReport cmd_duality(const ExperimentConfig& cfg) {
  const Dataset data = cmd_ingest(cfg.dataset);
  if (data.features && cfg.transform == Transform::none) {
    return duality_check(*data.features, data.targets(), cfg.train, cfg.duality_epochs);
  }
  return duality_check(apply_transform(data.r, cfg.transform), data.targets(), cfg.train, cfg.duality_epochs);
}

json to_json(const DualityReport& rep) {
  json epochs = json::array();
  for (const EpochDeviation& e : rep.epochs) {
    epochs.push_back(json{{"epoch", e.epoch},
                          {"distances", e.distances},
                          {"hidden", e.hidden},
                          {"output", e.output},
                          {"w0", e.w0},
                          {"W", e.W},
                          {"sigma", e.sigma}});
  }
  json out{{"status", to_string(rep.status)},
           {"tolerance", rep.tolerance},
           {"max_deviation", std::isfinite(rep.max_deviation) ? json(rep.max_deviation) : json("inf")},
           {"epochs", epochs}};
  if (!rep.note.empty()) out["note"] = rep.note;
  return out;
}

TransformOutput cmd_transform(const ExperimentConfig& cfg) {
  const Dataset data = cmd_ingest(cfg.dataset);
  const Transform t = cfg.transform == Transform::none ? Transform::cmds : cfg.transform;
  TransformOutput out;
  out.embedding = t == Transform::pmds ? pmds(data.r) : cmds(data.r);
  out.transformed = from_features(out.embedding.x, false);
  out.before = validate(data.r);
  out.after = validate(out.transformed);
  return out;
}

DiagnoseOutput cmd_diagnose(const AdjacencyMatrix& r) {
  return DiagnoseOutput{vat(r), ivat(r), validate(r)};
}

json to_json(const RealizabilityReport& rep) {
  return json{{"symmetric", rep.is_symmetric},
              {"nonnegative", rep.is_nonnegative},
              {"zero_diagonal", rep.is_antireflexive},
              {"sqrt_metric", rep.sqrt_metric_ok},
              {"euclidean_embeddable", rep.euclidean_embeddable},
              {"min_eigenvalue", rep.min_eigenvalue},
              {"max_abs_eigenvalue", rep.max_abs_eigenvalue},
              {"tol_psd", rep.tol_psd}};
}

void write_report(const Report& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "checkpoints");
  write_json(rep.to_json(), dir / "report.json");
  {
    std::ofstream out(dir / "accuracy.csv");
    out << "mode,run,seed,train,test,val,best_epoch,epochs_run,prototypes\n";
    out.precision(17);
    for (const ModeSummary& m : rep.modes) {
      for (const RunOutcome& r : m.runs) {
        out << to_string(m.mode) << ',' << r.run << ',' << r.seed << ',' << accuracy(r.train) << ','
            << accuracy(r.test) << ',' << accuracy(r.val) << ',' << r.result.best_epoch << ','
            << r.result.epochs_run << ',' << r.result.params.prototypes() << '\n';
      }
    }
  }
  {
    std::ofstream out(dir / "deviation_histogram.csv");
    out << "mode,lo,hi,count\n";
    out.precision(17);
    for (const ModeSummary& m : rep.modes) {
      for (std::size_t b = 0; b < m.deviation.counts.size(); ++b) {
        out << to_string(m.mode) << ',' << m.deviation.edges[b] << ',' << m.deviation.edges[b + 1] << ','
            << m.deviation.counts[b] << '\n';
      }
    }
  }
  {
    std::ofstream out(dir / "confusion.csv");
    out << "mode,set,true_class,predicted_class,count\n";
    for (const ModeSummary& m : rep.modes) {
      const std::pair<const char*, const SetSummary*> sets[] = {{"train", &m.train}, {"test", &m.test}, {"val", &m.val}};
      for (const auto& [name, s] : sets) {
        for (std::size_t i = 0; i < s->pooled.size(); ++i) {
          for (std::size_t j = 0; j < s->pooled[i].size(); ++j) {
            out << to_string(m.mode) << ',' << name << ',' << rep.class_names[i] << ',' << rep.class_names[j] << ','
                << s->pooled[i][j] << '\n';
          }
        }
      }
    }
  }
  for (const ModeSummary& m : rep.modes) {
    for (const RunOutcome& r : m.runs) {
      write_json(checkpoint_json(r.result, r.seed),
                 dir / "checkpoints" / (std::string(to_string(m.mode)) + "_run" + std::to_string(r.run) + ".json"));
    }
  }
}

void write_transform(const TransformOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_csv_matrix(out.embedding.x, dir / "embedding.csv");
  write_csv_matrix(out.embedding.eigenvalues, dir / "eigenvalues.csv");
  write_adjacency(out.transformed, dir / "transformed_adjacency.csv");
  write_json(json{{"dims", out.embedding.dims()}, {"before", to_json(out.before)}, {"after", to_json(out.after)}},
             dir / "transform.json");
}

void write_diagnose(const DiagnoseOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_lines(out.vat.perm, dir / "vat_perm.csv");
  write_adjacency(out.vat.reordered, dir / "vat.csv");
  write_lines(out.ivat.order.perm, dir / "ivat_perm.csv");
  write_adjacency(out.ivat.order.reordered, dir / "ivat.csv");
  write_pgm(out.vat.reordered.entries(), dir / "vat.pgm");
  write_pgm(out.ivat.order.reordered.entries(), dir / "ivat.pgm");
  write_json(to_json(out.realizability), dir / "realizability.json");
}

}  // namespace relrbf
