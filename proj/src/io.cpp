// SPDX-License-Identifier: Apache-2.0
#include "evograph/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

namespace fs = std::filesystem;

namespace evograph {

namespace {

thread_local OpenHook open_hook;

void notify_open(const fs::path& p) {
  if (open_hook) open_hook(p);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(const fs::path& file, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, file.filename().string() + " line " + std::to_string(line) + ": " + what);
}

template <class T>
T parse_number(std::string_view tok, const fs::path& file, std::size_t line) {
  T value{};
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) parse_fail(file, line, "bad number '" + std::string(tok) + "'");
  return value;
}

std::ifstream open_input(const fs::path& p) {
  notify_open(p);
  std::ifstream in(p);
  if (!in) throw Error(ErrorCode::MissingFile, p.string());
  return in;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t read_edges(const fs::path& p, std::vector<Edge>& edges) {
  auto in = open_input(p);
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> n;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty()) continue;
    if (!n) {
      if (s.substr(0, 2) != "n=") parse_fail(p, lineno, "expected header n=<count>");
      n = parse_number<std::size_t>(trim(s.substr(2)), p, lineno);
      continue;
    }
    const auto sp = s.find_first_of(" \t");
    if (sp == std::string_view::npos) parse_fail(p, lineno, "expected 'u v'");
    const auto u = parse_number<NodeId>(trim(s.substr(0, sp)), p, lineno);
    const auto v = parse_number<NodeId>(trim(s.substr(sp + 1)), p, lineno);
    edges.push_back({u, v});
  }
  if (!n) parse_fail(p, lineno + 1, "missing header n=<count>");
  return *n;
}

Matrix read_features(const fs::path& p, std::size_t k) {
  auto in = open_input(p);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0, rows = 0, cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty()) continue;
    const auto toks = split(s, ',');
    if (rows == 0) cols = toks.size();
    if (toks.size() != cols) {
      throw Error(ErrorCode::InconsistentDimension, "t=" + std::to_string(k) + ": " + p.filename().string() +
                                                        " line " + std::to_string(lineno) + " has " +
                                                        std::to_string(toks.size()) + " columns, expected " +
                                                        std::to_string(cols));
    }
    for (auto t : toks) values.push_back(parse_number<double>(t, p, lineno));
    ++rows;
  }
  Matrix x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  std::copy(values.begin(), values.end(), x.data());
  return x;
}

bool looks_integral(std::string_view tok) {
  return tok.find_first_of(".eEnNiI") == std::string_view::npos;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + p.string());
  out << body;
  if (!out) throw Error(ErrorCode::MissingFile, "write failed for " + p.string());
}

}  // namespace

void set_open_hook(OpenHook hook) { open_hook = std::move(hook); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path frame_file(const fs::path& dir, std::size_t k, const char* ext) {
  return dir / ("t" + std::to_string(k) + "." + ext);
}

std::optional<Labels> read_labels_file(const fs::path& dir, std::size_t k, std::size_t n) {
  const auto p = frame_file(dir, k, "labels");
  if (!fs::exists(p)) return std::nullopt;
  auto in = open_input(p);
  Labels labels;
  bool integral = true;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto s = trim(line);
    if (s.empty()) continue;
    integral = integral && looks_integral(s);
    labels.values.push_back(parse_number<double>(s, p, lineno));
  }
  labels.task = integral && !labels.values.empty() ? Task::classification : Task::regression;
  if (labels.values.size() != n) {
    throw Error(ErrorCode::InconsistentDimension, "t=" + std::to_string(k) + ": " + std::to_string(labels.values.size()) +
                                                      " labels for " + std::to_string(n) + " nodes");
  }
  return labels;
}

std::vector<NodeId> read_mask_file(const fs::path& dir, std::size_t k) {
  std::vector<NodeId> mask;
  const auto p = frame_file(dir, k, "mask");
  if (!fs::exists(p)) return mask;
  auto in = open_input(p);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (!t.empty()) mask.push_back(parse_number<NodeId>(t, p, lineno));
  }
  return mask;
}

EvolvingGraph load_sequence(const fs::path& dir, const LoadOptions& opts) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingFile, dir.string() + " is not a directory");
  if (!fs::exists(frame_file(dir, 0, "edges"))) throw Error(ErrorCode::MissingFile, frame_file(dir, 0, "edges").string());
  EvolvingGraph g;
  for (std::size_t k = 0; fs::exists(frame_file(dir, k, "edges")); ++k) {
    GraphSnapshot s;
    s.time_index = static_cast<int>(k);
    s.n = read_edges(frame_file(dir, k, "edges"), s.edges);
    s.features = read_features(frame_file(dir, k, "feat"), k);
    if (static_cast<std::size_t>(s.features.rows()) != s.n) {
      throw Error(ErrorCode::InconsistentDimension, "t=" + std::to_string(k) + ": " +
                                                        std::to_string(s.features.rows()) + " feature rows for " +
                                                        std::to_string(s.n) + " nodes");
    }
    if (k == 0) {
      g.feature_dim = static_cast<std::size_t>(s.features.cols());
    } else if (static_cast<std::size_t>(s.features.cols()) != g.feature_dim) {
      throw Error(ErrorCode::InconsistentDimension, "t=" + std::to_string(k) + ": feature width " +
                                                        std::to_string(s.features.cols()) + ", expected " +
                                                        std::to_string(g.feature_dim));
    }
    if (opts.labels) {
      s.labels = read_labels_file(dir, k, s.n);
      s.mask = read_mask_file(dir, k);
    }
    require_valid(s);
    g.snapshots.push_back(std::move(s));
  }
  return g;
}

void save_sequence(const EvolvingGraph& g, const fs::path& dir) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < g.snapshots.size(); ++k) {
    const auto& s = g.snapshots[k];
    std::string body = "n=" + std::to_string(s.n) + "\n";
    for (const auto& e : canonical_edges(s.edges)) body += std::to_string(e.u) + " " + std::to_string(e.v) + "\n";
    write_file(frame_file(dir, k, "edges"), body);

    body.clear();
    for (Eigen::Index r = 0; r < s.features.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.features.cols(); ++c) {
        if (c) body += ',';
        body += format_double(s.features(r, c));
      }
      body += '\n';
    }
    write_file(frame_file(dir, k, "feat"), body);

    if (s.labels) {
      body.clear();
      for (double v : s.labels->values) {
        if (s.labels->task == Task::classification) {
          body += std::to_string(static_cast<long long>(v));
        } else {
          auto txt = format_double(v);
          if (looks_integral(txt)) txt += ".0";
          body += txt;
        }
        body += '\n';
      }
      write_file(frame_file(dir, k, "labels"), body);
    }
    if (!s.mask.empty()) {
      body.clear();
      for (auto i : s.mask) body += std::to_string(i) + "\n";
      write_file(frame_file(dir, k, "mask"), body);
    }
  }
}

}  // namespace evograph
