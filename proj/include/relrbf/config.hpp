#pragma once

#include "relrbf/relational.hpp"

#include <cstdint>

namespace relrbf {

/// Training protocol settings. The first block holds the standard protocol
/// values; the rest are knobs it leaves unquantified.
struct TrainConfig {
  double eta_min = 0.05;  // per-parameter base learning rates ~ U[eta_min, eta_max]
  double eta_max = 2.0;
  double weight_init_lo = -1.75;
  double weight_init_hi = 1.75;
  double sigma_init_lo = 0.25;
  double sigma_init_hi = 3.75;
  double lr_decay = 0.70;
  double lr_growth = 1.05;
  double mse_reject_ratio = 1.05;
  int patience_stop = 30;
  int patience_grow = 5;
  int c_init = 10;
  int c_max = 10;
  std::uint64_t seed = 1;

  int max_epochs = 2000;
  double exit_tol = 1e-10;  // |ΔSSE| over exit_window accepted epochs
  int exit_window = 10;
  /// Initial global step scale; ≤ 0 selects 1/|train|.
  double lr_scale_init = 0.0;
  double sigma_min = 1e-3;
  PrototypeMode mode = PrototypeMode::free;
  bool stratify = false;
  int kmeans_max_iter = 300;
  double train_fraction = 0.7;

  /// Throws Error(InvalidConfig) when an invariant is violated.
  void check() const;
};

}  // namespace relrbf
