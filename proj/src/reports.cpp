// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evograph/harness.hpp"
#include "evograph/io.hpp"
#include "evograph/metrics.hpp"

namespace evograph {

namespace fs = std::filesystem;

namespace {

std::string cell(const std::vector<double>& col, std::size_t i) {
  return i < col.size() ? format_double(col[i]) : std::string();
}

std::string num(double v) { return std::isnan(v) ? std::string() : format_double(v); }

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorCode::MissingFile, "short write to " + p.string());
}

std::string trace_csv(const RunResult& r) {
  std::ostringstream s;
  s << "tau,actual,smart,linear,doc,supervised,theorem2\n";
  for (std::size_t i = 0; i < r.tau.size(); ++i) {
    s << r.tau[i] << ',' << format_double(r.actual[i]) << ',' << format_double(r.smart[i]) << ','
      << cell(r.linear, i) << ',' << cell(r.doc, i) << ',' << cell(r.supervised, i) << ',' << cell(r.theorem2, i)
      << '\n';
  }
  return s.str();
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream s;
  s << "method,mape,rmse,mae,se,seeds\n";
  for (const auto& r : rows) {
    s << r.method << ',' << num(r.mape) << ',' << num(r.rmse) << ',' << num(r.mae) << ',' << num(r.se) << ','
      << r.seeds << '\n';
  }
  return s.str();
}

void audit_rows(std::ostringstream& s, const RunResult& r) {
  for (const auto& a : r.audit) {
    s << r.seed << ',' << a.time_index << ',' << to_string(a.purpose) << ',' << a.count << ','
      << (a.allowed ? 1 : 0) << ',' << a.source << '\n';
  }
}

const char* kAuditHeader = "seed,time_index,purpose,count,allowed,source\n";

// Writes into a sibling temp directory, then swaps it into place, so a failed
// run never leaves a half-written report behind.
template <class Fill>
void publish(const fs::path& dir, Fill fill) {
  const fs::path target = dir.has_filename() ? dir : dir.parent_path();
  const fs::path tmp = target.parent_path() / (target.filename().string() + ".partial");
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    fill(tmp);
    fs::remove_all(target);
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& s, const fs::path& p, std::size_t lineno) {
  if (s.empty() || s == "nan") return std::nan("");
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::ParseError, p.string() + " line " + std::to_string(lineno) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

void write_run_report(const ExperimentConfig& cfg, const RunResult& run, const fs::path& dir) {
  publish(dir, [&](const fs::path& tmp) {
    write_file(tmp / "trace.csv", trace_csv(run));
    write_file(tmp / "summary.csv", summary_csv(summarize({run})));
    std::ostringstream a;
    a << kAuditHeader;
    audit_rows(a, run);
    write_file(tmp / "audit.csv", a.str());
    write_file(tmp / "config.echo.json", echo_config(cfg));
  });
}

void write_sweep_report(const ExperimentConfig& cfg, const std::vector<RunResult>& runs, const fs::path& dir) {
  publish(dir, [&](const fs::path& tmp) {
    write_file(tmp / "summary.csv", summary_csv(summarize(runs)));
    std::ostringstream per, a;
    per << "seed,method,mape,rmse,mae\n";
    a << kAuditHeader;
    for (const auto& r : runs) {
      for (const auto& s : r.scores) {
        per << r.seed << ',' << s.method << ',' << format_double(s.mape) << ',' << format_double(s.rmse) << ','
            << format_double(s.mae) << '\n';
      }
      audit_rows(a, r);
      const auto sub = tmp / ("seed_" + std::to_string(r.seed));
      fs::create_directories(sub);
      write_file(sub / "trace.csv", trace_csv(r));
    }
    write_file(tmp / "per_seed.csv", per.str());
    write_file(tmp / "audit.csv", a.str());
    write_file(tmp / "config.echo.json", echo_config(cfg));
  });
}

void write_curve_csv(const std::vector<CurveRow>& rows, const fs::path& path) {
  std::ostringstream s;
  s << "tau,bound,estimate,se\n";
  for (const auto& r : rows) {
    s << r.tau << ',' << format_double(r.bound) << ',' << format_double(r.estimate) << ',' << format_double(r.se)
      << '\n';
  }
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".partial";
  write_file(tmp, s.str());
  fs::rename(tmp, path);
}

TraceFile read_trace_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, path.string() + " line 1: empty file");
  const auto header = split(line);
  if (header.size() < 2 || header[0] != "tau") {
    throw Error(ErrorCode::ParseError, path.string() + " line 1: expected a tau column first");
  }
  TraceFile t;
  long actual_col = -1;
  std::vector<std::size_t> method_cols;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "actual") {
      actual_col = static_cast<long>(c);
    } else {
      t.methods.push_back(header[c]);
      method_cols.push_back(c);
    }
  }
  if (actual_col < 0) throw Error(ErrorCode::ParseError, path.string() + " line 1: no actual column");
  t.columns.resize(t.methods.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(lineno) + ": wrong cell count");
    }
    const double tau = parse_cell(cells[0], path, lineno);
    if (std::isnan(tau)) throw Error(ErrorCode::ParseError, path.string() + " line " + std::to_string(lineno) + ": no tau");
    t.tau.push_back(static_cast<int>(tau));
    t.actual.push_back(parse_cell(cells[static_cast<std::size_t>(actual_col)], path, lineno));
    for (std::size_t m = 0; m < method_cols.size(); ++m) t.columns[m].push_back(parse_cell(cells[method_cols[m]], path, lineno));
  }
  return t;
}

std::vector<MethodScore> score_trace(const TraceFile& trace) {
  std::vector<MethodScore> out;
  for (std::size_t m = 0; m < trace.methods.size(); ++m) {
    // The closed-form column is a relative-error curve, not a loss prediction.
    if (trace.methods[m] == "theorem2") continue;
    const auto& col = trace.columns[m];
    if (col.empty() || std::any_of(col.begin(), col.end(), [](double v) { return std::isnan(v); })) continue;
    const LossTrace lt{col, trace.actual};
    out.push_back(MethodScore{trace.methods[m], mape(lt), rmse(lt), mae(lt)});
  }
  return out;
}

}  // namespace evograph
