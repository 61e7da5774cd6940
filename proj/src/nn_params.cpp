// SPDX-License-Identifier: Apache-2.0
#include "evograph/nn/params.hpp"

#include <cmath>

namespace evograph::nn {

std::string to_string(Component c) {
  switch (c) {
    case Component::gcn: return "gcn";
    case Component::gat_phi: return "gat_phi";
    case Component::lstm_M: return "lstm_M";
    case Component::decoder_a: return "decoder_a";
  }
  return "unknown";
}

Component parse_component(const std::string& name) {
  if (name == "gcn") return Component::gcn;
  if (name == "gat_phi") return Component::gat_phi;
  if (name == "lstm_M") return Component::lstm_M;
  if (name == "decoder_a") return Component::decoder_a;
  throw Error(ErrorCode::ParseError, "unknown component tag '" + name + "'");
}

Matrix& ParamBundle::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (contains(name)) throw Error(ErrorCode::ConfigInvalid, "duplicate tensor " + name);
  tensors_.push_back({name, Matrix::Zero(rows, cols)});
  return tensors_.back().value;
}

Matrix& ParamBundle::operator[](const std::string& name) {
  for (auto& t : tensors_) {
    if (t.name == name) return t.value;
  }
  throw Error(ErrorCode::DimensionMismatch, "no tensor named " + name);
}

const Matrix& ParamBundle::operator[](const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t.value;
  }
  throw Error(ErrorCode::DimensionMismatch, "no tensor named " + name);
}

bool ParamBundle::contains(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return true;
  }
  return false;
}

std::size_t ParamBundle::size() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += static_cast<std::size_t>(t.value.size());
  return n;
}

Vector ParamBundle::flatten() const {
  Vector flat(static_cast<Eigen::Index>(size()));
  Eigen::Index off = 0;
  for (const auto& t : tensors_) {
    // Matrix is row-major, so data() is already in row-major order.
    flat.segment(off, t.value.size()) = Eigen::Map<const Vector>(t.value.data(), t.value.size());
    off += t.value.size();
  }
  return flat;
}

void ParamBundle::unflatten(const Vector& flat) {
  if (static_cast<std::size_t>(flat.size()) != size()) {
    throw Error(ErrorCode::DimensionMismatch, "flat vector length " + std::to_string(flat.size()) + " != " +
                                                  std::to_string(size()));
  }
  Eigen::Index off = 0;
  for (auto& t : tensors_) {
    Eigen::Map<Vector>(t.value.data(), t.value.size()) = flat.segment(off, t.value.size());
    off += t.value.size();
  }
}

ParamBundle ParamBundle::zeros_like() const {
  ParamBundle z(tag_);
  for (const auto& t : tensors_) z.add(t.name, t.value.rows(), t.value.cols());
  return z;
}

void ParamBundle::set_zero() {
  for (auto& t : tensors_) t.value.setZero();
}

bool ParamBundle::same_shape(const ParamBundle& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const auto& a = tensors_[i];
    const auto& b = other.tensors_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) return false;
  }
  return true;
}

void ParamBundle::axpy(double s, const ParamBundle& other) {
  if (!same_shape(other)) throw Error(ErrorCode::DimensionMismatch, "bundle shapes differ");
  for (std::size_t i = 0; i < tensors_.size(); ++i) tensors_[i].value += s * other.tensors_[i].value;
}

void init_uniform(Matrix& m, double fan_in, RngStream& rng) {
  const double s = 1.0 / std::sqrt(std::max(fan_in, 1.0));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-s, s);
}

Vector perturb(const Vector& theta_star, double xi, RngStream& rng) {
  if (!(xi > 0)) throw Error(ErrorCode::ConfigInvalid, "xi must be positive");
  Vector out(theta_star.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = theta_star[i] + rng.uniform(-xi, xi);
  return out;
}

AdamState make_adam(const ParamBundle& p, double lr) {
  AdamState st;
  st.m = Vector::Zero(static_cast<Eigen::Index>(p.size()));
  st.v = Vector::Zero(static_cast<Eigen::Index>(p.size()));
  st.lr = lr;
  return st;
}

void adam_update(Vector& params, const Vector& grads, AdamState& st) {
  if (params.size() != grads.size()) throw Error(ErrorCode::DimensionMismatch, "params and grads differ in length");
  if (st.m.size() != params.size()) {
    if (st.m.size() != 0) throw Error(ErrorCode::DimensionMismatch, "Adam moments do not match parameters");
    st.m = Vector::Zero(params.size());
    st.v = Vector::Zero(params.size());
  }
  ++st.step;
  const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
  const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * g;
    st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * g * g;
    const double mh = st.m[i] / c1;
    const double vh = st.v[i] / c2;
    params[i] -= st.lr * mh / (std::sqrt(vh) + st.eps);
  }
}

void adam_update(ParamBundle& params, const ParamBundle& grads, AdamState& st) {
  if (!params.same_shape(grads)) throw Error(ErrorCode::DimensionMismatch, "gradient bundle shape differs");
  Vector flat = params.flatten();
  adam_update(flat, grads.flatten(), st);
  params.unflatten(flat);
}

}  // namespace evograph::nn
