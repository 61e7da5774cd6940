// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "evograph/nn/params.hpp"

namespace evograph::nn {

/// Text format:
///   evograph-checkpoint 1
///   header <key> <value>        (any number)
///   bundle <label> <tag> <tensor count>
///   tensor <name> <rows> <cols>
///   <row-major values, one row per line, %.17g>
/// Values round-trip exactly.
struct Checkpoint {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<std::pair<std::string, ParamBundle>> bundles;

  const std::string& get(const std::string& key) const;
  const ParamBundle& bundle(const std::string& label) const;
};

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace evograph::nn
