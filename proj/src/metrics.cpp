// SPDX-License-Identifier: Apache-2.0
#include "evograph/metrics.hpp"

#include <cmath>
#include <string>

#include "evograph/error.hpp"

namespace evograph {

namespace {

void check(const LossTrace& t) {
  if (t.predicted.size() != t.actual.size() || t.actual.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "trace needs equal, non-zero lengths");
  }
}

}  // namespace

double mape(const LossTrace& t) {
  check(t);
  double total = 0;
  for (std::size_t k = 0; k < t.actual.size(); ++k) {
    if (!(t.actual[k] > 0)) throw Error(ErrorCode::ZeroActual, "actual loss at step " + std::to_string(k) + " is not positive");
    total += std::abs(t.predicted[k] - t.actual[k]) / t.actual[k];
  }
  return 100.0 * total / static_cast<double>(t.actual.size());
}

double rmse(const LossTrace& t) {
  check(t);
  double total = 0;
  for (std::size_t k = 0; k < t.actual.size(); ++k) {
    const double d = t.predicted[k] - t.actual[k];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(t.actual.size()));
}

double mae(const LossTrace& t) {
  check(t);
  double total = 0;
  for (std::size_t k = 0; k < t.actual.size(); ++k) total += std::abs(t.predicted[k] - t.actual[k]);
  return total / static_cast<double>(t.actual.size());
}

double mean(const std::vector<double>& s) {
  if (s.empty()) throw Error(ErrorCode::TooFewSamples, "mean of an empty sample");
  double total = 0;
  for (double v : s) total += v;
  return total / static_cast<double>(s.size());
}

double standard_error(const std::vector<double>& s) {
  if (s.size() < 2) throw Error(ErrorCode::TooFewSamples, "standard error needs at least two samples");
  const double m = mean(s);
  double var = 0;
  for (double v : s) var += (v - m) * (v - m);
  const double n = static_cast<double>(s.size());
  return std::sqrt(var / (n - 1.0)) / std::sqrt(n);
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorCode::TooFewSamples, "pearson needs two paired samples");
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace evograph
