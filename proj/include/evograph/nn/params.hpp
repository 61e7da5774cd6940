// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "evograph/graph.hpp"

namespace evograph::nn {

enum class Component { gcn, gat_phi, lstm_M, decoder_a };

std::string to_string(Component c);
Component parse_component(const std::string& name);

struct Tensor {
  std::string name;
  Matrix value;
};

/// Ordered named tensors. The flat view concatenates tensors in order, each
/// row-major.
class ParamBundle {
 public:
  ParamBundle() = default;
  explicit ParamBundle(Component tag) : tag_(tag) {}

  Component tag() const { return tag_; }
  Matrix& add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  Matrix& operator[](const std::string& name);
  const Matrix& operator[](const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }

  std::size_t size() const;
  Vector flatten() const;
  void unflatten(const Vector& flat);

  ParamBundle zeros_like() const;
  void set_zero();
  /// this += s * other; shapes must match.
  void axpy(double s, const ParamBundle& other);
  bool same_shape(const ParamBundle& other) const;

 private:
  Component tag_ = Component::gcn;
  std::vector<Tensor> tensors_;
};

/// Every entry uniform on (-s, s) with s = 1/sqrt(fan_in).
void init_uniform(Matrix& m, double fan_in, RngStream& rng);

/// Each coordinate uniform on [theta_c - xi, theta_c + xi].
Vector perturb(const Vector& theta_star, double xi, RngStream& rng);

struct AdamState {
  Vector m;
  Vector v;
  long step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(const ParamBundle& p, double lr);
void adam_update(ParamBundle& params, const ParamBundle& grads, AdamState& st);
/// Flat-vector form, used by tests and the bundle overload.
void adam_update(Vector& params, const Vector& grads, AdamState& st);

}  // namespace evograph::nn
