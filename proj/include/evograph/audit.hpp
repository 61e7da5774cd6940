// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <type_traits>
#include <vector>

#include "evograph/graph.hpp"

namespace evograph {

/// Post-deployment estimator entry points take GraphFrame. This keeps label
/// data out of their reach at compile time.
template <class T>
concept CarriesLabels = requires(const T& t) { t.labels; };

static_assert(!CarriesLabels<GraphFrame>, "GraphFrame must not expose labels");
static_assert(CarriesLabels<GraphSnapshot>);

enum class Purpose {
  Warmup,            // labeled frames at or before deployment
  Scoring,           // ground-truth full_loss for evaluation
  SupervisedOracle,  // flagged baseline that buys fresh labels
  Estimator,         // anything else; never permitted after deployment
};

std::string to_string(Purpose p);

struct AccessRecord {
  int time_index = 0;
  Purpose purpose = Purpose::Scoring;
  std::size_t count = 0;
  bool allowed = true;
  std::string source;
};

/// Holds ground-truth labels and hands them out by purpose, logging every
/// read. Reads that break isolation are logged as violations and throw.
class LabelVault {
 public:
  LabelVault(int t_deploy, bool oracle_granted);
  ~LabelVault();
  LabelVault(const LabelVault&) = delete;
  LabelVault& operator=(const LabelVault&) = delete;

  void deposit(int t, Labels labels);
  /// Labels stay on disk until requested; file opens from this thread that
  /// bypass the vault count as violations.
  void deposit_file(int t, const std::filesystem::path& dir, std::size_t n);
  void watch_label_files();

  const Labels& all(int t, Purpose purpose);
  Labels subset(int t, const std::vector<NodeId>& nodes, Purpose purpose);

  bool has(int t) const;
  int t_deploy() const { return t_deploy_; }
  bool oracle_granted() const { return oracle_granted_; }

  const std::vector<AccessRecord>& log() const { return log_; }
  std::size_t violations() const;
  std::size_t revealed(Purpose purpose) const;

 private:
  struct Slot {
    std::optional<Labels> labels;
    std::filesystem::path dir;
    std::size_t n = 0;
  };

  void check(int t, Purpose purpose, std::size_t count, const std::string& source);
  const Labels& fetch(int t);

  int t_deploy_;
  bool oracle_granted_;
  bool watching_ = false;
  bool inside_ = false;
  std::map<int, Slot> slots_;
  std::vector<AccessRecord> log_;
};

}  // namespace evograph
