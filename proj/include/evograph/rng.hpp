// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evograph {

/// Counter-based splittable generator. The value of draw i is a pure function
/// of (seed, label, i): a SplitMix64 finalizer applied to key + (i+1)*golden.
/// Named child streams get independent keys, so adding draws to one stage
/// never shifts the values another stage sees.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label);

  RngStream child(std::string_view name) const;

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p);
  /// Standard normal via Box-Muller; consumes two draws.
  double normal();

  /// k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  std::uint64_t seed() const noexcept { return seed_; }
  const std::string& label() const noexcept { return label_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  RngStream(std::uint64_t seed, std::string label, std::uint64_t key);

  std::uint64_t seed_;
  std::string label_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace evograph
