// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace evograph {

/// Predicted and actual losses over the post-deployment steps.
struct LossTrace {
  std::vector<double> predicted;
  std::vector<double> actual;
};

/// Mean absolute percentage error, in percent.
double mape(const LossTrace& trace);
double rmse(const LossTrace& trace);
double mae(const LossTrace& trace);

/// Sample standard deviation (n - 1) over sqrt(n).
double standard_error(const std::vector<double>& samples);
double mean(const std::vector<double>& samples);

/// Pearson correlation; used for trend checks.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace evograph
