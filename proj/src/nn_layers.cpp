// SPDX-License-Identifier: Apache-2.0
#include "evograph/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "evograph/kernels.hpp"

namespace evograph::nn {

namespace {

using Index = Eigen::Index;

double act(double z, const GcnSpec& s) {
  switch (s.activation) {
    case Activation::none: return z;
    case Activation::relu: return z > 0 ? z : 0.0;
    case Activation::leaky: return z > 0 ? z : s.leaky_slope * z;
  }
  return z;
}

double act_grad(double z, const GcnSpec& s) {
  switch (s.activation) {
    case Activation::none: return 1.0;
    case Activation::relu: return z > 0 ? 1.0 : 0.0;
    case Activation::leaky: return z > 0 ? 1.0 : s.leaky_slope;
  }
  return 1.0;
}

std::string head_name(const char* base, std::size_t h) { return base + std::to_string(h); }

bool adjacent(const Adjacency& adj, NodeId u, NodeId v) {
  return std::binary_search(adj.begin(u), adj.end(u), v);
}

}  // namespace

// ---- GCN -----------------------------------------------------------------

ParamBundle make_gcn(const std::vector<std::size_t>& dims, RngStream& rng) {
  if (dims.size() < 2 || dims.size() > 4) throw Error(ErrorCode::ConfigInvalid, "gcn supports 1 to 3 layers");
  ParamBundle p(Component::gcn);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    auto& w = p.add("W" + std::to_string(l), static_cast<Index>(dims[l]), static_cast<Index>(dims[l + 1]));
    init_uniform(w, static_cast<double>(dims[l]), rng);
  }
  return p;
}

std::size_t gcn_layers(const ParamBundle& p) { return p.tensors().size(); }

Matrix gcn_forward(const NormalizedAdjacency& L, const Matrix& X, const ParamBundle& p, const GcnSpec& spec,
                   GcnCache* cache) {
  const std::size_t layers = gcn_layers(p);
  if (layers < 1 || layers > 3) throw Error(ErrorCode::DimensionMismatch, "gcn needs 1 to 3 layers");
  if (static_cast<std::size_t>(X.rows()) != L.n()) throw Error(ErrorCode::DimensionMismatch, "X rows != node count");
  if (cache) {
    cache->propagated.clear();
    cache->pre.clear();
  }
  Matrix h = X;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& w = p.tensors()[l].value;
    if (h.cols() != w.rows()) throw Error(ErrorCode::DimensionMismatch, "gcn layer " + std::to_string(l) + " width");
    Matrix ph;
    kernels::propagate(L, h, ph);
    Matrix z = ph * w;
    if (cache) {
      cache->propagated.push_back(ph);
      cache->pre.push_back(z);
    }
    const bool last = l + 1 == layers;
    if (!(last && spec.linear_output)) z = z.unaryExpr([&](double v) { return act(v, spec); });
    h = std::move(z);
  }
  return h;
}

ParamBundle gcn_backward(const NormalizedAdjacency& L, const ParamBundle& p, const GcnSpec& spec,
                         const GcnCache& cache, const Matrix& dO) {
  const std::size_t layers = gcn_layers(p);
  if (cache.pre.size() != layers) throw Error(ErrorCode::DimensionMismatch, "gcn cache does not match params");
  ParamBundle g = p.zeros_like();
  Matrix dh = dO;
  for (std::size_t l = layers; l-- > 0;) {
    const bool last = l + 1 == layers;
    Matrix dz = dh;
    if (!(last && spec.linear_output)) {
      dz = dz.cwiseProduct(cache.pre[l].unaryExpr([&](double v) { return act_grad(v, spec); }));
    }
    g.tensors()[l].value = cache.propagated[l].transpose() * dz;
    if (l > 0) {
      const Matrix dp = dz * p.tensors()[l].value.transpose();
      kernels::propagate_transpose(L, dp, dh);
    }
  }
  return g;
}

// ---- GAT -----------------------------------------------------------------

ParamBundle make_gat(std::size_t in, std::size_t out, std::size_t heads, RngStream& rng) {
  if (heads < 1) throw Error(ErrorCode::ConfigInvalid, "gat needs at least one head");
  ParamBundle p(Component::gat_phi);
  for (std::size_t h = 0; h < heads; ++h) {
    init_uniform(p.add(head_name("W", h), static_cast<Index>(in), static_cast<Index>(out)), static_cast<double>(in), rng);
    init_uniform(p.add(head_name("a_src", h), static_cast<Index>(out), 1), static_cast<double>(out), rng);
    init_uniform(p.add(head_name("a_dst", h), static_cast<Index>(out), 1), static_cast<double>(out), rng);
  }
  return p;
}

Matrix gat_forward(const Adjacency& adj, const Matrix& O, const ParamBundle& p, const GatSpec& spec,
                   GatCache* cache) {
  if (static_cast<std::size_t>(O.rows()) != adj.n) throw Error(ErrorCode::DimensionMismatch, "O rows != node count");
  if (p.tensors().size() != 3 * spec.heads) throw Error(ErrorCode::DimensionMismatch, "gat head count mismatch");
  if (cache) {
    cache->adj = adj;
    cache->input = O;
    cache->z.assign(spec.heads, Matrix());
    cache->pre.assign(spec.heads, {});
    cache->alpha.assign(spec.heads, {});
  }
  Matrix F;
  std::vector<double> pre, alpha;
  for (std::size_t h = 0; h < spec.heads; ++h) {
    const auto& W = p[head_name("W", h)];
    if (O.cols() != W.rows()) throw Error(ErrorCode::DimensionMismatch, "gat input width");
    const Matrix z = O * W;
    const Vector s = z * p[head_name("a_src", h)];
    const Vector t = z * p[head_name("a_dst", h)];
    kernels::gat_attention(adj, s, t, spec.slope, pre, alpha);
    Matrix fh;
    kernels::gat_aggregate(adj, alpha, z, fh);
    if (h == 0) F = fh;
    else F += fh;
    if (cache) {
      cache->z[h] = z;
      cache->pre[h] = pre;
      cache->alpha[h] = alpha;
    }
  }
  if (spec.heads > 1) F /= static_cast<double>(spec.heads);
  return F;
}

ParamBundle gat_backward(const ParamBundle& p, const GatSpec& spec, const GatCache& cache, const Matrix& dF) {
  const auto& adj = cache.adj;
  ParamBundle g = p.zeros_like();
  const double scale = 1.0 / static_cast<double>(spec.heads);
  for (std::size_t h = 0; h < spec.heads; ++h) {
    const Matrix& z = cache.z[h];
    const auto& alpha = cache.alpha[h];
    const auto& pre = cache.pre[h];
    Matrix dz = Matrix::Zero(z.rows(), z.cols());
    Vector ds = Vector::Zero(z.rows());
    Vector dt = Vector::Zero(z.rows());
    std::vector<double> dalpha;
    for (std::size_t i = 0; i < adj.n; ++i) {
      const auto ri = static_cast<Index>(i);
      const std::size_t base = kernels::att_offset(adj, i);
      const std::size_t deg = adj.degree(i);
      dalpha.assign(deg + 1, 0.0);
      double dot = 0;
      for (std::size_t k = 0; k <= deg; ++k) {
        const auto j = static_cast<Index>(k == 0 ? i : adj.neighbors[adj.offsets[i] + k - 1]);
        dalpha[k] = scale * dF.row(ri).dot(z.row(j));
        dz.row(j) += (scale * alpha[base + k]) * dF.row(ri);
        dot += alpha[base + k] * dalpha[k];
      }
      for (std::size_t k = 0; k <= deg; ++k) {
        const auto j = static_cast<Index>(k == 0 ? i : adj.neighbors[adj.offsets[i] + k - 1]);
        const double de = alpha[base + k] * (dalpha[k] - dot);
        const double dpre = pre[base + k] > 0 ? de : spec.slope * de;
        ds[ri] += dpre;
        dt[j] += dpre;
      }
    }
    const auto& a_src = p[head_name("a_src", h)];
    const auto& a_dst = p[head_name("a_dst", h)];
    g[head_name("a_src", h)] = z.transpose() * ds;
    g[head_name("a_dst", h)] = z.transpose() * dt;
    dz += ds * a_src.transpose() + dt * a_dst.transpose();
    g[head_name("W", h)] = cache.input.transpose() * dz;
  }
  return g;
}

// ---- decoders --------------------------------------------------------------

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double softplus_inverse(double y) {
  if (!(y > 0)) throw Error(ErrorCode::ConfigInvalid, "softplus inverse needs a positive value");
  return y + std::log(-std::expm1(-y));
}

Matrix structure_decode(const Matrix& F) {
  Matrix a = F * F.transpose();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = i; j < a.cols(); ++j) a(i, j) = a(j, i) = sigmoid(a(i, j));
  }
  return a;
}

PairSet sample_pairs(const Adjacency& adj, const std::vector<Edge>& edges, RngStream& rng) {
  PairSet ps;
  ps.pairs.reserve(2 * edges.size());
  ps.targets.reserve(2 * edges.size());
  for (const auto& e : edges) {
    ps.pairs.push_back(e);
    ps.targets.push_back(1.0);
  }
  if (adj.n < 2) return ps;
  const std::size_t want = edges.size();
  std::size_t got = 0, attempts = 0;
  while (got < want && attempts < 100 * want + 100) {
    ++attempts;
    const auto u = static_cast<NodeId>(rng.below(adj.n));
    const auto v = static_cast<NodeId>(rng.below(adj.n));
    if (u == v || adjacent(adj, u, v)) continue;
    ps.pairs.push_back({std::min(u, v), std::max(u, v)});
    ps.targets.push_back(0.0);
    ++got;
  }
  return ps;
}

double structure_loss(const Matrix& F, const PairSet& pairs, Matrix* dF) {
  if (pairs.pairs.empty()) return 0.0;
  constexpr double lo = 1e-12, hi = 1.0 - 1e-12;
  const double inv = 1.0 / static_cast<double>(pairs.pairs.size());
  double total = 0;
  for (std::size_t k = 0; k < pairs.pairs.size(); ++k) {
    const auto [u, v] = pairs.pairs[k];
    const double y = pairs.targets[k];
    const double p = sigmoid(F.row(u).dot(F.row(v)));
    const double pc = std::clamp(p, lo, hi);
    total -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
    if (dF && p == pc) {
      const double g = (p - y) * inv;
      const Eigen::RowVectorXd fu = F.row(u);
      dF->row(u) += g * F.row(v);
      dF->row(v) += g * fu;
    }
  }
  return total * inv;
}

ParamBundle make_decoder(std::size_t out, std::size_t B, RngStream& rng) {
  ParamBundle p(Component::decoder_a);
  init_uniform(p.add("a", static_cast<Index>(out), static_cast<Index>(B)), static_cast<double>(B), rng);
  return p;
}

Matrix feature_decode(const Matrix& F, const ParamBundle& dec) {
  const auto& a = dec["a"];
  if (F.cols() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "decoder width differs from F");
  return F * a.transpose();
}

double feature_loss(const Matrix& O, const Matrix& F, const ParamBundle& dec, Matrix* dF, ParamBundle* ddec) {
  const Matrix rec = feature_decode(F, dec);
  if (rec.rows() != O.rows() || rec.cols() != O.cols()) throw Error(ErrorCode::DimensionMismatch, "decoder output shape");
  const Matrix diff = rec - O;
  const double count = static_cast<double>(diff.size());
  if (dF || ddec) {
    const Matrix g = diff * (2.0 / count);
    if (dF) *dF += g * dec["a"];
    if (ddec) (*ddec)["a"] += g.transpose() * F;
  }
  return diff.squaredNorm() / count;
}

// ---- LSTM ----------------------------------------------------------------

LstmState zero_state(std::size_t hidden) {
  return {Vector::Zero(static_cast<Index>(hidden)), Vector::Zero(static_cast<Index>(hidden))};
}

ParamBundle make_lstm(std::size_t in, std::size_t hidden, RngStream& rng) {
  const auto H = static_cast<Index>(hidden);
  ParamBundle p(Component::lstm_M);
  init_uniform(p.add("Wx", 4 * H, static_cast<Index>(in)), static_cast<double>(hidden), rng);
  init_uniform(p.add("Wh", 4 * H, H), static_cast<double>(hidden), rng);
  init_uniform(p.add("b", 4 * H, 1), static_cast<double>(hidden), rng);
  init_uniform(p.add("w_out", 1, H), static_cast<double>(hidden), rng);
  p.add("b_out", 1, 1);
  return p;
}

std::size_t lstm_hidden(const ParamBundle& p) { return static_cast<std::size_t>(p["Wh"].cols()); }
std::size_t lstm_input(const ParamBundle& p) { return static_cast<std::size_t>(p["Wx"].cols()); }

double lstm_step(const Vector& x, const LstmState& st, const ParamBundle& p, LstmState& next, LstmStepCache* cache) {
  const auto& Wx = p["Wx"];
  const auto& Wh = p["Wh"];
  const Index H = Wh.cols();
  if (x.size() != Wx.cols() || st.h.size() != H || st.c.size() != H) {
    throw Error(ErrorCode::DimensionMismatch, "lstm input or state width");
  }
  const Vector z = Wx * x + Wh * st.h + Eigen::Map<const Vector>(p["b"].data(), 4 * H);
  const Vector i = z.segment(0, H).unaryExpr([](double v) { return sigmoid(v); });
  const Vector f = z.segment(H, H).unaryExpr([](double v) { return sigmoid(v); });
  const Vector g = z.segment(2 * H, H).array().tanh();
  const Vector o = z.segment(3 * H, H).unaryExpr([](double v) { return sigmoid(v); });
  const Vector c = f.cwiseProduct(st.c) + i.cwiseProduct(g);
  const Vector tc = c.array().tanh();
  const Vector h = o.cwiseProduct(tc);
  const double r = p["w_out"].row(0).dot(h) + p["b_out"](0, 0);
  if (cache) *cache = {x, st.h, st.c, i, f, g, o, c, tc, h};
  next.h = h;
  next.c = c;
  return r;
}

LstmSequence lstm_run(const std::vector<Vector>& xs, const LstmState& start, const ParamBundle& p) {
  LstmSequence seq;
  seq.raw.reserve(xs.size());
  seq.steps.resize(xs.size());
  LstmState st = start;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    LstmState next;
    seq.raw.push_back(lstm_step(xs[k], st, p, next, &seq.steps[k]));
    st = std::move(next);
  }
  seq.final = st;
  return seq;
}

ParamBundle lstm_backward(const ParamBundle& p, const LstmSequence& seq, const std::vector<double>& draw,
                          std::vector<Vector>* dx) {
  if (draw.size() != seq.steps.size()) throw Error(ErrorCode::DimensionMismatch, "one gradient per step required");
  const Index H = p["Wh"].cols();
  ParamBundle g = p.zeros_like();
  auto& dWx = g["Wx"];
  auto& dWh = g["Wh"];
  auto& db = g["b"];
  auto& dw = g["w_out"];
  auto& dbo = g["b_out"];
  const auto& Wx = p["Wx"];
  const auto& Wh = p["Wh"];
  const Vector w_out = p["w_out"].row(0).transpose();
  if (dx) dx->assign(seq.steps.size(), Vector());
  Vector dh_next = Vector::Zero(H);
  Vector dc_next = Vector::Zero(H);
  Vector dz(4 * H);
  for (std::size_t k = seq.steps.size(); k-- > 0;) {
    const auto& s = seq.steps[k];
    const Vector dh = draw[k] * w_out + dh_next;
    dw.row(0) += draw[k] * s.h.transpose();
    dbo(0, 0) += draw[k];
    const Vector d_o = dh.cwiseProduct(s.tanh_c);
    const Vector dc = dh.cwiseProduct(s.o).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix()) + dc_next;
    dz.segment(0, H) = dc.cwiseProduct(s.g).cwiseProduct(s.i.cwiseProduct((1.0 - s.i.array()).matrix()));
    dz.segment(H, H) = dc.cwiseProduct(s.c_prev).cwiseProduct(s.f.cwiseProduct((1.0 - s.f.array()).matrix()));
    dz.segment(2 * H, H) = dc.cwiseProduct(s.i).cwiseProduct((1.0 - s.g.array().square()).matrix());
    dz.segment(3 * H, H) = d_o.cwiseProduct(s.o.cwiseProduct((1.0 - s.o.array()).matrix()));
    dc_next = dc.cwiseProduct(s.f);
    dWx += dz * s.x.transpose();
    dWh += dz * s.h_prev.transpose();
    db += dz;
    if (dx) (*dx)[k] = Wx.transpose() * dz;
    dh_next = Wh.transpose() * dz;
  }
  return g;
}

// ---- losses --------------------------------------------------------------

double loss_mse(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "mse shapes differ");
  }
  if (pred.size() == 0) return 0.0;
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

double loss_bce(const Matrix& probs, const Matrix& targets) {
  if (probs.rows() != targets.rows() || probs.cols() != targets.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "bce shapes differ");
  }
  if (probs.size() == 0) return 0.0;
  double total = 0;
  for (Index k = 0; k < probs.size(); ++k) {
    const double p = std::clamp(probs.data()[k], 1e-12, 1.0 - 1e-12);
    const double y = targets.data()[k];
    total -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
  }
  return total / static_cast<double>(probs.size());
}

double softmax_cross_entropy(const Matrix& logits, const std::vector<double>& classes, const std::vector<NodeId>& rows,
                             Matrix* dlogits) {
  if (classes.size() != static_cast<std::size_t>(logits.rows())) {
    throw Error(ErrorCode::DimensionMismatch, "class vector length differs from logits");
  }
  std::vector<NodeId> all;
  const auto* use = &rows;
  if (rows.empty()) {
    all.resize(classes.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
    use = &all;
  }
  if (use->empty()) throw Error(ErrorCode::EmptyMask, "no rows to score");
  if (dlogits) *dlogits = Matrix::Zero(logits.rows(), logits.cols());
  const double inv = 1.0 / static_cast<double>(use->size());
  double total = 0;
  for (auto r : *use) {
    const auto c = static_cast<Index>(classes[r]);
    if (c < 0 || c >= logits.cols()) throw Error(ErrorCode::DimensionMismatch, "class id outside logits");
    const double mx = logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(r).array() - mx).exp();
    const double z = e.sum();
    total += std::log(z) + mx - logits(r, c);
    if (dlogits) {
      dlogits->row(r) = e * (inv / z);
      (*dlogits)(r, c) -= inv;
    }
  }
  return total * inv;
}

double masked_mse(const Matrix& pred, const std::vector<double>& target, const std::vector<NodeId>& rows,
                  Matrix* dpred) {
  if (target.size() != static_cast<std::size_t>(pred.rows())) {
    throw Error(ErrorCode::DimensionMismatch, "target length differs from predictions");
  }
  std::vector<NodeId> all;
  const auto* use = &rows;
  if (rows.empty()) {
    all.resize(target.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<NodeId>(i);
    use = &all;
  }
  if (use->empty()) throw Error(ErrorCode::EmptyMask, "no rows to score");
  if (dpred) *dpred = Matrix::Zero(pred.rows(), pred.cols());
  const double inv = 1.0 / static_cast<double>(use->size());
  double total = 0;
  for (auto r : *use) {
    const double d = pred(r, 0) - target[r];
    total += d * d;
    if (dpred) (*dpred)(r, 0) += 2.0 * d * inv;
  }
  return total * inv;
}

}  // namespace evograph::nn
