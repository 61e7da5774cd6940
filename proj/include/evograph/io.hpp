// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "evograph/graph.hpp"

namespace evograph {

/// Directory layout: per timestep k, t{k}.edges (first line `n=<count>`,
/// then `u v` per line), t{k}.feat (CSV, n rows), optional t{k}.labels and
/// t{k}.mask. Regression labels are always written with a decimal point or
/// exponent so the task survives a round trip.
struct LoadOptions {
  bool labels = true;  // false skips both labels and masks
};

EvolvingGraph load_sequence(const std::filesystem::path& dir, const LoadOptions& opts = {});
void save_sequence(const EvolvingGraph& g, const std::filesystem::path& dir);

std::filesystem::path frame_file(const std::filesystem::path& dir, std::size_t k, const char* ext);

/// Reads t{k}.labels; nullopt when the file does not exist.
std::optional<Labels> read_labels_file(const std::filesystem::path& dir, std::size_t k, std::size_t n);

/// Reads t{k}.mask; empty when the file does not exist.
std::vector<NodeId> read_mask_file(const std::filesystem::path& dir, std::size_t k);

/// Called with every path the loader is about to open; lets the harness audit
/// label-file access. The hook is per thread.
using OpenHook = std::function<void(const std::filesystem::path&)>;
void set_open_hook(OpenHook hook);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace evograph
