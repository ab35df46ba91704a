#include "relrbf/errors.hpp"
#include "relrbf/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace relrbf;
using nlohmann::json;

namespace {

constexpr int kValidationFailure = 2;
constexpr int kDualityFailure = 3;

void save(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

json confusion_json(const Confusion& m) {
  json rows = json::array();
  for (const auto& row : m) rows.push_back(row);
  return rows;
}

int run_ingest(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const Dataset data = cmd_ingest(cfg.dataset);
  std::filesystem::create_directories(out);
  write_adjacency(data.r, out / "adjacency.csv");
  {
    std::ofstream labels(out / "labels.csv");
    for (int l : data.labels) labels << l << '\n';
  }
  std::vector<long> counts(static_cast<std::size_t>(data.classes()), 0);
  for (int l : data.labels) ++counts[static_cast<std::size_t>(l)];
  const json summary{{"n", data.r.size()},
                     {"classes", data.class_names},
                     {"class_counts", counts},
                     {"realizability", to_json(validate(data.r))}};
  save(summary, out / "ingest.json");
  std::cout << summary.dump(2) << '\n';
  return 0;
}

int run_train(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const Report rep = cmd_train(cfg);
  write_report(rep, out);
  for (const ModeSummary& m : rep.modes) {
    std::printf("%-6s train %.4f ± %.4f  test %.4f ± %.4f  val %.4f ± %.4f  deviation %.4f ± %.4f\n",
                std::string(to_string(m.mode)).c_str(), m.train.mean, m.train.std, m.test.mean, m.test.std,
                m.val.mean, m.val.std, m.deviation_mean, m.deviation_std);
  }
  if (rep.paired_delta) {
    std::printf("paired test delta (free - medoid) %.4f ± %.4f\n", rep.paired_delta->mean, rep.paired_delta->std);
  }
  return 0;
}

int run_eval(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const EvalResult r = cmd_eval(cfg);
  const json j{{"accuracy", {{"all", accuracy(r.all)}, {"train", accuracy(r.train)}, {"test", accuracy(r.test)},
                             {"val", accuracy(r.val)}}},
               {"confusion", {{"all", confusion_json(r.all)}, {"train", confusion_json(r.train)},
                              {"test", confusion_json(r.test)}, {"val", confusion_json(r.val)}}},
               {"max_distance_drift", r.max_distance_drift}};
  std::filesystem::create_directories(out);
  save(j, out / "eval.json");
  std::cout << j["accuracy"].dump() << '\n';
  return 0;
}

int run_duality(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const DualityReport rep = cmd_duality(cfg);
  std::filesystem::create_directories(out);
  save(to_json(rep), out / "duality.json");
  std::printf("duality %s: max deviation %.3e (tolerance %.1e) over %zu epochs\n",
              std::string(to_string(rep.status)).c_str(), rep.max_deviation, rep.tolerance, rep.epochs.size());
  if (!rep.note.empty()) std::printf("%s\n", rep.note.c_str());
  switch (rep.status) {
    case DualityStatus::pass: return 0;
    case DualityStatus::fail: return kDualityFailure;
    case DualityStatus::no_oracle: return kValidationFailure;
  }
  return kDualityFailure;
}

int run_transform(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const TransformOutput t = cmd_transform(cfg);
  write_transform(t, out);
  std::printf("embedded in %ld dimensions; min eigenvalue %.3e -> %.3e\n", static_cast<long>(t.embedding.dims()),
              t.before.min_eigenvalue, t.after.min_eigenvalue);
  return 0;
}

int run_diagnose(const ExperimentConfig& cfg, const std::filesystem::path& out) {
  const Dataset data = cmd_ingest(cfg.dataset);
  const DiagnoseOutput d = cmd_diagnose(apply_transform(data.r, cfg.transform));
  write_diagnose(d, out);
  std::cout << to_json(d.realizability).dump(2) << '\n';
  return 0;
}

bool is_validation(Errc c) {
  switch (c) {
    case Errc::InvalidConfig:
    case Errc::UnknownKind:
    case Errc::MalformedFile:
    case Errc::ParseError:
    case Errc::NonSquare:
    case Errc::NonFinite:
    case Errc::NonzeroDiagonal:
    case Errc::AsymmetryError:
    case Errc::NegativeEntry:
    case Errc::DimensionMismatch:
    case Errc::TooFewSamples:
    case Errc::InvalidClusterCount:
      return true;
    default:
      return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-based RBF network trainer"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;

  const std::pair<const char*, const char*> commands[] = {
      {"ingest", "load a dataset and write its adjacency matrix"},
      {"train", "Monte Carlo training runs and report"},
      {"eval", "evaluate a checkpoint"},
      {"duality", "lock-step comparison against the vector oracle"},
      {"transform", "CMDS/PMDS embedding of the graph"},
      {"diagnose", "VAT/iVAT reordering and realizability"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override train.seed");
    sub->add_option("--out", out_dir, "output directory (overrides config output)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationFailure;
  }

  try {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (seed) cfg.train.seed = *seed;
    const std::filesystem::path out = out_dir.empty() ? cfg.output : std::filesystem::path(out_dir);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "ingest") return run_ingest(cfg, out);
    if (cmd == "train") return run_train(cfg, out);
    if (cmd == "eval") return run_eval(cfg, out);
    if (cmd == "duality") return run_duality(cfg, out);
    if (cmd == "transform") return run_transform(cfg, out);
    return run_diagnose(cfg, out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(to_string(e.code())).c_str(), e.what());
    return is_validation(e.code()) ? kValidationFailure : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
