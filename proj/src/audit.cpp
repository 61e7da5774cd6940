// SPDX-License-Identifier: Apache-2.0
#include "evograph/audit.hpp"

#include "evograph/io.hpp"

namespace evograph {

std::string to_string(Purpose p) {
  switch (p) {
    case Purpose::Warmup: return "warmup";
    case Purpose::Scoring: return "scoring";
    case Purpose::SupervisedOracle: return "supervised_oracle";
    case Purpose::Estimator: return "estimator";
  }
  return "unknown";
}

LabelVault::LabelVault(int t_deploy, bool oracle_granted) : t_deploy_(t_deploy), oracle_granted_(oracle_granted) {}

LabelVault::~LabelVault() {
  if (watching_) set_open_hook({});
}

void LabelVault::deposit(int t, Labels labels) { slots_[t].labels = std::move(labels); }

void LabelVault::deposit_file(int t, const std::filesystem::path& dir, std::size_t n) {
  auto& slot = slots_[t];
  slot.labels.reset();
  slot.dir = dir;
  slot.n = n;
}

void LabelVault::watch_label_files() {
  watching_ = true;
  set_open_hook([this](const std::filesystem::path& p) {
    if (inside_ || p.extension() != ".labels") return;
    const auto stem = p.stem().string();
    int t = -1;
    try {
      t = std::stoi(stem.substr(1));
    } catch (...) {
      return;
    }
    if (t > t_deploy_) {
      log_.push_back({t, Purpose::Estimator, 0, false, "file:" + p.filename().string()});
      throw Error(ErrorCode::LabelIsolationViolation, "unaudited open of " + p.string());
    }
  });
}

bool LabelVault::has(int t) const { return slots_.count(t) > 0; }

void LabelVault::check(int t, Purpose purpose, std::size_t count, const std::string& source) {
  bool allowed = false;
  switch (purpose) {
    case Purpose::Scoring: allowed = true; break;
    case Purpose::Warmup: allowed = t <= t_deploy_; break;
    case Purpose::SupervisedOracle:
      if (!oracle_granted_) {
        log_.push_back({t, purpose, 0, false, source});
        throw Error(ErrorCode::LabelAccessDenied, "supervised oracle requires an explicitly flagged run");
      }
      allowed = true;
      break;
    case Purpose::Estimator: allowed = t <= t_deploy_; break;
  }
  log_.push_back({t, purpose, count, allowed, source});
  if (!allowed) {
    throw Error(ErrorCode::LabelIsolationViolation,
                "label read at t=" + std::to_string(t) + " for purpose " + to_string(purpose));
  }
}

const Labels& LabelVault::fetch(int t) {
  auto it = slots_.find(t);
  if (it == slots_.end()) throw Error(ErrorCode::MissingLabels, "no labels at t=" + std::to_string(t));
  auto& slot = it->second;
  if (!slot.labels) {
    inside_ = true;
    try {
      slot.labels = read_labels_file(slot.dir, static_cast<std::size_t>(t), slot.n);
    } catch (...) {
      inside_ = false;
      throw;
    }
    inside_ = false;
    if (!slot.labels) throw Error(ErrorCode::MissingLabels, "no labels file at t=" + std::to_string(t));
  }
  return *slot.labels;
}

const Labels& LabelVault::all(int t, Purpose purpose) {
  auto it = slots_.find(t);
  if (it == slots_.end()) throw Error(ErrorCode::MissingLabels, "no labels at t=" + std::to_string(t));
  const auto& slot = it->second;
  check(t, purpose, slot.labels ? slot.labels->values.size() : slot.n, slot.dir.empty() ? "memory" : "file");
  return fetch(t);
}

Labels LabelVault::subset(int t, const std::vector<NodeId>& nodes, Purpose purpose) {
  auto it = slots_.find(t);
  if (it == slots_.end()) throw Error(ErrorCode::MissingLabels, "no labels at t=" + std::to_string(t));
  check(t, purpose, nodes.size(), it->second.dir.empty() ? "memory" : "file");
  const Labels& labels = fetch(t);
  Labels out;
  out.task = labels.task;
  out.values.reserve(nodes.size());
  for (auto i : nodes) {
    if (i >= labels.values.size()) throw Error(ErrorCode::InconsistentDimension, "label index out of range");
    out.values.push_back(labels.values[i]);
  }
  return out;
}

std::size_t LabelVault::violations() const {
  std::size_t v = 0;
  for (const auto& r : log_) v += r.allowed ? 0 : 1;
  return v;
}

std::size_t LabelVault::revealed(Purpose purpose) const {
  std::size_t total = 0;
  for (const auto& r : log_) {
    if (r.purpose == purpose && r.allowed) total += r.count;
  }
  return total;
}

}  // namespace evograph
