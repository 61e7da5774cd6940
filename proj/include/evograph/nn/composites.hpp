// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "evograph/graph.hpp"
#include "evograph/rng.hpp"

namespace evograph::nn {

/// A fixed trainable pipeline on a small random fixture, exposed as a scalar
/// function of one flat parameter vector. Used to check the hand-derived
/// backward passes against finite differences.
class Composite {
 public:
  virtual ~Composite() = default;
  virtual const std::string& name() const = 0;
  virtual Vector parameters() const = 0;
  /// Loss at theta; fills the analytic gradient when grad is non-null.
  virtual double evaluate(const Vector& theta, Vector* grad) const = 0;
};

/// gcn_mse, gcn_ce, gat_structure, gat_feature, recon, lstm_sequence, warmup.
const std::vector<std::string>& composite_names();

/// Throws UnsupportedComposite for names outside composite_names().
std::unique_ptr<Composite> make_composite(const std::string& name, RngStream& rng);

}  // namespace evograph::nn
