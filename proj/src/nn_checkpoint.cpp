// SPDX-License-Identifier: Apache-2.0
#include "evograph/nn/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "evograph/io.hpp"

namespace evograph::nn {

const std::string& Checkpoint::get(const std::string& key) const {
  for (const auto& [k, v] : header) {
    if (k == key) return v;
  }
  throw Error(ErrorCode::ParseError, "checkpoint header lacks " + key);
}

const ParamBundle& Checkpoint::bundle(const std::string& label) const {
  for (const auto& [l, b] : bundles) {
    if (l == label) return b;
  }
  throw Error(ErrorCode::ParseError, "checkpoint lacks bundle " + label);
}

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "evograph-checkpoint 1\n";
  for (const auto& [k, v] : ck.header) out << "header " << k << ' ' << v << '\n';
  for (const auto& [label, b] : ck.bundles) {
    out << "bundle " << label << ' ' << to_string(b.tag()) << ' ' << b.tensors().size() << '\n';
    for (const auto& t : b.tensors()) {
      out << "tensor " << t.name << ' ' << t.value.rows() << ' ' << t.value.cols() << '\n';
      for (Eigen::Index r = 0; r < t.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < t.value.cols(); ++c) {
          if (c) out << ' ';
          out << format_double(t.value(r, c));
        }
        out << '\n';
      }
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
  f << out.str();
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "checkpoint line " + std::to_string(line) + ": " + what);
}

}  // namespace

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::MissingFile, path.string());
  Checkpoint ck;
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() -> std::istringstream {
    if (!std::getline(f, line)) fail(lineno + 1, "unexpected end of file");
    ++lineno;
    return std::istringstream(line);
  };
  {
    auto in = next();
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "evograph-checkpoint" || version != 1) fail(lineno, "bad magic");
  }
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream in(line);
    std::string kind;
    in >> kind;
    if (kind == "header") {
      std::string key, value;
      in >> key;
      std::getline(in, value);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      ck.header.emplace_back(key, value);
    } else if (kind == "bundle") {
      std::string label, tag;
      std::size_t count = 0;
      if (!(in >> label >> tag >> count)) fail(lineno, "bad bundle line");
      ParamBundle b(parse_component(tag));
      for (std::size_t t = 0; t < count; ++t) {
        auto tin = next();
        std::string word, name;
        Eigen::Index rows = 0, cols = 0;
        if (!(tin >> word >> name >> rows >> cols) || word != "tensor") fail(lineno, "bad tensor line");
        auto& m = b.add(name, rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
          auto vin = next();
          for (Eigen::Index c = 0; c < cols; ++c) {
            std::string tok;
            if (!(vin >> tok)) fail(lineno, "too few values");
            double v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail(lineno, "bad value '" + tok + "'");
            m(r, c) = v;
          }
        }
      }
      ck.bundles.emplace_back(label, std::move(b));
    } else {
      fail(lineno, "unknown record '" + kind + "'");
    }
  }
  return ck;
}

}  // namespace evograph::nn
