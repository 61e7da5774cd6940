// SPDX-License-Identifier: Apache-2.0
#include "evograph/theory.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "evograph/kernels.hpp"

namespace evograph {

namespace {

void require_positive(const std::vector<double>& degrees) {
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (!(degrees[i] >= 1.0)) throw Error(ErrorCode::ZeroDegree, "degree below 1 at position " + std::to_string(i));
  }
}

std::vector<double> expand(const DegreeHistogram& q) {
  std::vector<double> d;
  d.reserve(q.total);
  for (const auto& [deg, count] : q.counts) d.insert(d.end(), count, static_cast<double>(deg));
  return d;
}

}  // namespace

double beta_coeff(const std::vector<double>& degrees) {
  require_positive(degrees);
  double b = 0;
  for (double d : degrees) b += 1.0 / d;
  return b;
}

double c_coeff(const std::vector<double>& degrees, double alpha) {
  const double beta = beta_coeff(degrees);
  double num = 0;
  for (double d : degrees) num += std::pow(d, alpha - 1.0);
  return num / beta;
}

double node_rel_error(double d, double C, double alpha) {
  return C * C * std::pow(d, -2.0 * alpha - 1.0) - 2.0 * C * std::pow(d, -alpha - 1.0) + 1.0;
}

std::string describe(const GraphErrorVariant& v) {
  std::string s = v.prefactor == Prefactor::two_m_squared ? "prefactor=2m^2" : "prefactor=2m";
  s += v.middle == MiddleExponent::alpha_plus_4 ? " middle=d^(-alpha-4)" : " middle=d^(-2alpha-4)";
  s += v.c_form == CForm::sum_ratio ? " C=sum(d^(alpha-1))/beta" : " C=E[d^(alpha-1)]/(beta*E[1/d])";
  return s;
}

double graph_error_t2(const Theorem2Inputs& in, const GraphErrorVariant& variant) {
  if (in.Q.counts.empty() || in.Q.counts.begin()->first < 1) {
    throw Error(ErrorCode::ZeroDegree, "histogram must be non-empty with degrees >= 1");
  }
  if (!(in.m > 0) || !(in.n0 > 0) || in.t < 0) throw Error(ErrorCode::ConfigInvalid, "m, n0 must be positive, t >= 0");
  const auto d = expand(in.Q);
  const double n = static_cast<double>(d.size());
  double C = c_coeff(d, in.alpha);
  // E[d^(a-1)] / (beta * E[1/d]) reduces to the sum ratio divided by beta.
  if (variant.c_form == CForm::expectation_ratio) C /= beta_coeff(d);
  const double mid_exp = variant.middle == MiddleExponent::alpha_plus_4 ? -in.alpha - 4.0 : -2.0 * in.alpha - 4.0;
  double e1 = 0, e2 = 0, e3 = 0;
  for (double x : d) {
    e1 += std::pow(x, -2.0 * in.alpha - 4.0);
    e2 += std::pow(x, mid_exp);
    e3 += std::pow(x, -3.0);
  }
  e1 /= n, e2 /= n, e3 /= n;
  const double pre = variant.prefactor == Prefactor::two_m_squared ? 2.0 * in.m * in.m : 2.0 * in.m;
  return pre * in.t / (in.n0 + in.t) * (C * C * e1 - 2.0 * C * e2 + e3);
}

Vector fit_linear_gcn(const NormalizedAdjacency& L, const Matrix& X, const Vector& Y, const std::vector<NodeId>& rows) {
  if (static_cast<std::size_t>(X.rows()) != L.n() || static_cast<std::size_t>(Y.size()) != L.n()) {
    throw Error(ErrorCode::DimensionMismatch, "L, X and Y disagree on node count");
  }
  Matrix LX;
  kernels::propagate(L, X, LX);
  Matrix Z;
  Vector y;
  if (rows.empty()) {
    Z = LX;
    y = Y;
  } else {
    Z.resize(static_cast<Eigen::Index>(rows.size()), LX.cols());
    y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r] >= L.n()) throw Error(ErrorCode::DimensionMismatch, "row index outside graph");
      Z.row(static_cast<Eigen::Index>(r)) = LX.row(rows[r]);
      y[static_cast<Eigen::Index>(r)] = Y[rows[r]];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(Z), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Vector w = Vector::Zero(Z.cols());
  if (sv.size() == 0 || sv[0] == 0.0) return w;
  const double cutoff = 1e-10 * sv[0];
  const Vector uty = svd.matrixU().transpose() * y;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > cutoff) w += svd.matrixV().col(k) * (uty[k] / sv[k]);
  }
  return w;
}

double realized_relative_error(const Vector& pred, const std::vector<double>& labels) {
  if (static_cast<std::size_t>(pred.size()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "prediction and label lengths differ");
  }
  double total = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 0.0) continue;
    const double r = (pred[static_cast<Eigen::Index>(i)] - labels[i]) / labels[i];
    total += r * r;
    ++count;
  }
  if (count == 0) throw Error(ErrorCode::ZeroActual, "all labels are zero");
  return total / static_cast<double>(count);
}

void validate(const DistortionConfig& cfg) {
  if (cfg.hidden < 1) throw Error(ErrorCode::ConfigInvalid, "hidden width must be >= 1");
  if (!(cfg.xi > 0)) throw Error(ErrorCode::ConfigInvalid, "xi must be positive");
  if (!(cfg.slope > 0 && cfg.slope < 1)) throw Error(ErrorCode::ConfigInvalid, "slope must lie in (0, 1)");
  if (cfg.param_draws < 1 || cfg.evolution_draws < 1) throw Error(ErrorCode::ConfigInvalid, "draw counts must be >= 1");
}

ShallowGcn random_shallow_gcn(std::size_t hidden, std::size_t d, RngStream& rng) {
  ShallowGcn g;
  const double s = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(d, 1)));
  const auto N = static_cast<Eigen::Index>(hidden);
  g.a.resize(N);
  g.W.resize(N, static_cast<Eigen::Index>(d));
  g.b.resize(N);
  for (Eigen::Index j = 0; j < N; ++j) {
    g.a[j] = rng.uniform(-1.0, 1.0) / std::sqrt(static_cast<double>(hidden));
    for (Eigen::Index c = 0; c < g.W.cols(); ++c) g.W(j, c) = rng.uniform(-s, s);
    g.b[j] = rng.uniform(-s, s);
  }
  return g;
}

Vector neighbor_mean(const GraphFrame& f, std::size_t node) {
  Vector h = Vector::Zero(f.features.cols());
  std::size_t deg = 0;
  for (const auto& e : f.edges) {
    if (e.u == node) h += f.features.row(e.v).transpose(), ++deg;
    else if (e.v == node) h += f.features.row(e.u).transpose(), ++deg;
  }
  if (deg == 0) throw Error(ErrorCode::ZeroDegree, "node " + std::to_string(node) + " has no neighbours");
  return h / static_cast<double>(deg);
}

double shallow_forward(const ShallowGcn& theta, const Vector& h, double slope) {
  double out = 0;
  for (Eigen::Index j = 0; j < theta.a.size(); ++j) {
    const double z = theta.W.row(j).dot(h) + theta.b[j];
    out += theta.a[j] * (z > 0 ? z : slope * z);
  }
  return out;
}

EvolutionSample realized(const EvolvingGraph& g) {
  EvolutionSample s;
  s.paths.emplace_back();
  for (const auto& snap : g.snapshots) s.paths.back().push_back(static_cast<const GraphFrame&>(snap));
  return s;
}

EvolutionSample continuations(const GraphFrame& g0, std::size_t m, std::size_t steps, std::size_t draws,
                              RngStream& rng) {
  EvolutionSample s;
  s.paths.reserve(draws);
  for (std::size_t k = 0; k < draws; ++k) {
    auto child = rng.child("path" + std::to_string(k));
    s.paths.push_back(ba_continue(g0, m, steps, child));
  }
  return s;
}

namespace {

void check_node(const EvolutionSample& evo, std::size_t node, std::size_t tau) {
  if (evo.paths.empty()) throw Error(ErrorCode::ConfigInvalid, "no evolution paths");
  for (const auto& p : evo.paths) {
    if (p.empty() || node >= p.front().n) throw Error(ErrorCode::NodeNotPresent, "node absent at time 0");
    if (tau >= p.size()) throw Error(ErrorCode::ConfigInvalid, "tau beyond the sampled horizon");
  }
}

}  // namespace

double distortion_lower_bound(const EvolutionSample& evo, const DistortionConfig& cfg, std::size_t node,
                              std::size_t tau) {
  validate(cfg);
  check_node(evo, node, tau);
  double acc = 0;
  for (const auto& path : evo.paths) {
    const auto& f0 = path.front();
    const auto deg0 = degrees(f0.n, f0.edges)[node];
    const auto degt = degrees(path[tau].n, path[tau].edges)[node];
    if (deg0 == 0) throw Error(ErrorCode::ZeroDegree, "target node isolated at time 0");
    const Vector s0 = neighbor_mean(f0, node) * static_cast<double>(deg0);
    const double diff = 1.0 / static_cast<double>(degt) - 1.0 / static_cast<double>(deg0);
    acc += diff * diff * s0.squaredNorm();
  }
  const double xi2 = cfg.xi * cfg.xi;
  return static_cast<double>(cfg.hidden) * cfg.slope * cfg.slope * xi2 * xi2 / 9.0 * acc /
         static_cast<double>(evo.paths.size());
}

Estimate empirical_distortion(const EvolutionSample& evo, const ShallowGcn& theta_star, const DistortionConfig& cfg,
                              std::size_t node, std::size_t tau, RngStream& rng) {
  validate(cfg);
  check_node(evo, node, tau);
  if (static_cast<std::size_t>(theta_star.a.size()) != cfg.hidden) {
    throw Error(ErrorCode::DimensionMismatch, "theta* width differs from cfg.hidden");
  }
  std::vector<double> samples;
  const bool single = evo.paths.size() == 1;
  ShallowGcn theta = theta_star;
  for (std::size_t p = 0; p < evo.paths.size(); ++p) {
    const auto& path = evo.paths[p];
    const Vector h0 = neighbor_mean(path.front(), node);
    const Vector ht = neighbor_mean(path[tau], node);
    auto draws = rng.child("path" + std::to_string(p));
    double acc = 0;
    for (std::size_t k = 0; k < cfg.param_draws; ++k) {
      for (Eigen::Index j = 0; j < theta.a.size(); ++j) {
        theta.a[j] = theta_star.a[j] + draws.uniform(-cfg.xi, cfg.xi);
        for (Eigen::Index c = 0; c < theta.W.cols(); ++c) {
          theta.W(j, c) = theta_star.W(j, c) + draws.uniform(-cfg.xi, cfg.xi);
        }
      }
      const double diff = shallow_forward(theta, ht, cfg.slope) - shallow_forward(theta, h0, cfg.slope);
      if (single) samples.push_back(diff * diff);
      else acc += diff * diff;
    }
    if (!single) samples.push_back(acc / static_cast<double>(cfg.param_draws));
  }
  Estimate e;
  const double n = static_cast<double>(samples.size());
  for (double s : samples) e.mean += s / n;
  if (samples.size() > 1) {
    double var = 0;
    for (double s : samples) var += (s - e.mean) * (s - e.mean);
    e.se = std::sqrt(var / (n - 1.0) / n);
  }
  e.lo = e.mean - 1.96 * e.se;
  e.hi = e.mean + 1.96 * e.se;
  return e;
}

}  // namespace evograph
