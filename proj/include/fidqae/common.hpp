// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace fidqae {

/// Class label for a transaction record. Fraud is the positive class
/// throughout: every confusion-matrix quantity counts fraud as "positive".
enum class Label { non_fraud = 0, fraud = 1 };

inline int label_to_int(Label l) { return l == Label::fraud ? 1 : 0; }
Label label_from_int(int v);

/// Deterministic random source. Wraps std::mt19937_64 (whose output sequence
/// is fully pinned by the standard) and derives doubles by explicit bit
/// manipulation, so identical seeds give identical streams on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1). 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via Box-Muller.
  double normal();

  /// In-place Fisher-Yates shuffle. Hand-rolled because std::shuffle's
  /// engine-consumption pattern is implementation-defined.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

/// Mixes a base seed with stream tags into an independent child seed
/// (splitmix64 finalizer). Used to give parallel tasks and per-sample
/// samplers reproducible streams that do not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                          std::uint64_t tag_b = 0);

/// Caps the number of worker threads used by parallel_for. 0 restores the
/// default (hardware concurrency).
void set_max_threads(int n);
int max_threads();

/// Runs fn(i) for i in [0, n). Work is split into contiguous index ranges,
/// one per worker; every call site writes results indexed by i only, so the
/// output is independent of the thread count and of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace fidqae
