#pragma once

#include <cstdint>
#include <vector>

namespace relrbf {

/// Counter-based generator: draw k of stream (seed, stream) is a pure function
/// of (seed, stream, k). Independent consumers use distinct stream ids so that
/// the graph trainer and the vector oracle see identical randomness.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller (consumes two draws).
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Named streams consumed by the training protocol.
enum class Stream : std::uint64_t {
  Split = 1,
  Partition = 2,
  Params = 3,
  LearningRates = 4,
  Growth = 5,
  Data = 6,
};

inline Rng make_rng(std::uint64_t seed, Stream s) { return Rng(seed, static_cast<std::uint64_t>(s)); }

/// Fisher-Yates permutation of 0..n-1.
std::vector<int> random_permutation(int n, Rng& rng);

}  // namespace relrbf
