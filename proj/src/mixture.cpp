// Copyright 2026 The Anchored Inversion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "anchored/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <utility>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "anchored/mvn.hpp"
#include "anchored/parallel.hpp"

namespace anchored {

WeightedJointSample WeightedJointSample::uniform(MatrixXd points, Index split) {
  const Index n = points.rows();
  WeightedJointSample s{std::move(points), VectorXd::Constant(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0), split};
  s.validate();
  return s;
}

void WeightedJointSample::validate() const {
  require_dims(weights.size() == points.rows(), "sample weights vs points");
  require_dims(split >= 0 && split <= points.cols(), "sample split index");
  if (points.rows() == 0) throw std::invalid_argument("joint sample is empty");
  if (!points.allFinite()) throw std::invalid_argument("joint sample contains non-finite values");
  if ((weights.array() < 0.0).any() || std::abs(weights.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("sample weights must be nonnegative and sum to one");
  }
}

VectorXd NormalMixture::weights() const {
  VectorXd w(size());
  for (Index i = 0; i < size(); ++i) w(i) = components[static_cast<std::size_t>(i)].weight;
  return w;
}

void NormalMixture::validate() const {
  double total = 0.0;
  for (const auto& c : components) {
    require_dims(c.mean.size() == dim && c.cov.rows() == dim && c.cov.cols() == dim, "mixture component");
    if (!(c.weight >= 0.0)) throw std::invalid_argument("mixture weight must be nonnegative");
    total += c.weight;
  }
  if (!components.empty() && std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mixture weights must sum to one");
  }
}

MatrixXd weighted_covariance(const MatrixXd& points, const VectorXd& weights, std::span<const Index> rows) {
  const Index d = points.cols();
  const auto m = static_cast<Index>(rows.size());
  MatrixXd x(m, d);
  VectorXd w(m);
  for (Index r = 0; r < m; ++r) {
    x.row(r) = points.row(rows[static_cast<std::size_t>(r)]);
    w(r) = weights(rows[static_cast<std::size_t>(r)]);
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw std::invalid_argument("neighbourhood has zero total weight");
  w /= total;
  const double denom = 1.0 - w.squaredNorm();
  if (!(denom > 0.0)) return MatrixXd::Zero(d, d);
  const Eigen::RowVectorXd mean = w.transpose() * x;
  x.rowwise() -= mean;
  MatrixXd cov = x.transpose() * w.asDiagonal() * x;
  return symmetrized(cov / denom);
}

MatrixXd weighted_covariance(const MatrixXd& points, const VectorXd& weights) {
  std::vector<Index> all(static_cast<std::size_t>(points.rows()));
  for (Index i = 0; i < points.rows(); ++i) all[static_cast<std::size_t>(i)] = i;
  return weighted_covariance(points, weights, all);
}

namespace {

/// Sample points whitened by the global weighted covariance, one point per column.
class MahalanobisIndex {
 public:
  explicit MahalanobisIndex(const WeightedJointSample& sample) {
    sample.validate();
    const MatrixXd cov = weighted_covariance(sample.points, sample.weights);
    try {
      const Cholesky<double> chol(cov, "global sample covariance");
      const Eigen::RowVectorXd mean = sample.weights.transpose() * sample.points;
      white_ = chol.whiten((sample.points.rowwise() - mean).transpose());
    } catch (const SingularMatrixError&) {
      throw SingularMatrixError("degenerate global sample covariance; Mahalanobis metric undefined");
    }
  }

  std::vector<Index> neighbourhood(Index i, Index k) const {
    const Index n = white_.cols();
    const VectorXd d2 = (white_.colwise() - white_.col(i)).colwise().squaredNorm().transpose();
    std::vector<std::pair<double, Index>> candidates;
    candidates.reserve(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) {
      if (j != i) candidates.emplace_back(d2(j), j);
    }
    const auto kk = static_cast<std::ptrdiff_t>(k);
    std::nth_element(candidates.begin(), candidates.begin() + (kk - 1), candidates.end());
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(k + 1));
    rows.push_back(i);
    for (std::ptrdiff_t r = 0; r < kk; ++r) rows.push_back(candidates[static_cast<std::size_t>(r)].second);
    std::sort(rows.begin(), rows.end());
    return rows;
  }

 private:
  MatrixXd white_;
};

void check_neighbour_count(const WeightedJointSample& sample, Index k) {
  const Index n = sample.size();
  if (k > n - 1) throw std::invalid_argument(fmt::format("neighbour count {} exceeds sample size - 1 = {}", k, n - 1));
  if (k < sample.dim() + 2) {
    throw std::invalid_argument(fmt::format("neighbour count {} must be at least dimension + 2 = {}", k, sample.dim() + 2));
  }
}

}  // namespace

std::vector<Index> mahalanobis_neighbourhood(const WeightedJointSample& sample, Index i, Index k) {
  check_neighbour_count(sample, k);
  require_dims(i >= 0 && i < sample.size(), "sample row");
  return MahalanobisIndex(sample).neighbourhood(i, k);
}

MatrixXd local_covariance(const WeightedJointSample& sample, Index i, Index k) {
  const auto rows = mahalanobis_neighbourhood(sample, i, k);
  return weighted_covariance(sample.points, sample.weights, rows);
}

NormalMixture build_kde(const WeightedJointSample& sample, Index k, double bandwidth, int workers) {
  sample.validate();
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
  const Index n = sample.size();
  const Index d = sample.dim();
  NormalMixture mix;
  mix.dim = d;
  mix.components.resize(static_cast<std::size_t>(n));
  if (n == 1) {
    mix.components[0] = {1.0, sample.points.row(0).transpose(), MatrixXd::Zero(d, d)};
    return mix;
  }
  check_neighbour_count(sample, k);
  const MahalanobisIndex index(sample);
  parallel_chunks(static_cast<std::size_t>(n), 32, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = static_cast<Index>(i);
      const auto rows = index.neighbourhood(row, k);
      mix.components[i] = {sample.weights(row), sample.points.row(row).transpose(),
                           bandwidth * weighted_covariance(sample.points, sample.weights, rows)};
    }
  });
  return mix;
}

NormalMixture condition(const NormalMixture& joint, Index split, const VectorXd& observed, int workers) {
  const Index d = joint.dim;
  require_dims(split >= 0 && split <= d, "conditioning split");
  const Index q = d - split;
  require_dims(observed.size() == q, "observed data vs trailing block");
  const auto n = static_cast<std::size_t>(joint.size());

  std::vector<MixtureComponent> conditioned(n);
  std::vector<double> log_weight(n, -std::numeric_limits<double>::infinity());
  std::vector<double> distance(n, std::numeric_limits<double>::infinity());

  parallel_chunks(n, 32, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& c = joint.components[i];
      auto& out = conditioned[i];
      if (q == 0) {
        out = c;
        log_weight[i] = c.weight > 0.0 ? std::log(c.weight) : log_weight[i];
        distance[i] = 0.0;
        continue;
      }
      const MatrixXd s22 = c.cov.bottomRightCorner(q, q);
      const Cholesky<double> chol(s22, "component data-block covariance");
      const VectorXd residual = observed - c.mean.tail(q);
      const VectorXd u = chol.whiten(residual);
      const MatrixXd whitened = chol.whiten(c.cov.bottomLeftCorner(q, split));  // L^{-1} S21
      distance[i] = u.squaredNorm();
      if (c.weight > 0.0) {
        log_weight[i] = std::log(c.weight) - 0.5 * (static_cast<double>(q) * std::log(2.0 * std::numbers::pi) +
                                                    chol.log_determinant() + u.squaredNorm());
      }
      out.mean = c.mean.head(split) + whitened.transpose() * u;
      MatrixXd v = c.cov.topLeftCorner(split, split);
      v.noalias() -= whitened.transpose() * whitened;
      out.cov = symmetrized(v);
    }
  });

  const double top = n == 0 ? -std::numeric_limits<double>::infinity()
                            : *std::max_element(log_weight.begin(), log_weight.end());
  if (!std::isfinite(top)) {
    const auto nearest = std::min_element(distance.begin(), distance.end());
    const auto idx = n == 0 ? Index(-1) : static_cast<Index>(nearest - distance.begin());
    const double dist = n == 0 ? std::numeric_limits<double>::infinity() : std::sqrt(*nearest);
    throw EmptyPosteriorError(
        fmt::format("conditioning left no component with positive weight; nearest component {} at Mahalanobis "
                    "distance {}",
                    idx, dist),
        idx, dist);
  }

  double total = 0.0;
  for (auto& lw : log_weight) total += std::exp(lw - top);
  NormalMixture result;
  result.dim = split;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(log_weight[i] - top) / total;
    if (w > 0.0) {
      conditioned[i].weight = w;
      result.components.push_back(std::move(conditioned[i]));
    }
  }
  // Renormalize after dropping underflowed components.
  double kept = 0.0;
  for (const auto& c : result.components) kept += c.weight;
  for (auto& c : result.components) c.weight /= kept;
  return result;
}

namespace {

Index draw_component(const NormalMixture& mix, Rng& rng) {
  if (mix.components.empty()) throw std::invalid_argument("cannot sample an empty mixture");
  const VectorXd w = mix.weights();
  std::discrete_distribution<Index> pick(w.data(), w.data() + w.size());
  return pick(rng);
}

}  // namespace

VectorXd mixture_draw(const NormalMixture& mix, Rng& rng) {
  const auto& c = mix.components[static_cast<std::size_t>(draw_component(mix, rng))];
  return c.mean + sampling_factor(c.cov) * standard_normal(mix.dim, rng);
}

MatrixXd mixture_sample(const NormalMixture& mix, Index count, Rng& rng) {
  MatrixXd draws(count, mix.dim);
  for (Index r = 0; r < count; ++r) draws.row(r) = mixture_draw(mix, rng).transpose();
  return draws;
}

VectorXd mixture_marginal_density(const NormalMixture& mix, std::span<const Index> coords, const MatrixXd& points) {
  const auto s = static_cast<Index>(coords.size());
  if (s == 0) throw std::invalid_argument("marginal needs at least one coordinate");
  require_dims(points.cols() == s, "evaluation points vs coordinate subset");
  for (Index c : coords) require_dims(c >= 0 && c < mix.dim, "marginal coordinate");

  VectorXd density = VectorXd::Zero(points.rows());
  for (const auto& comp : mix.components) {
    if (comp.weight <= 0.0) continue;
    VectorXd mean(s);
    MatrixXd cov(s, s);
    for (Index a = 0; a < s; ++a) {
      mean(a) = comp.mean(coords[static_cast<std::size_t>(a)]);
      for (Index b = 0; b < s; ++b) cov(a, b) = comp.cov(coords[static_cast<std::size_t>(a)], coords[static_cast<std::size_t>(b)]);
    }
    const Cholesky<double> chol(cov, "marginal component covariance");
    for (Index r = 0; r < points.rows(); ++r) {
      density(r) += comp.weight * std::exp(log_density(chol, mean, points.row(r).transpose()));
    }
  }
  return density;
}

VectorXd mixture_mean(const NormalMixture& mix) {
  VectorXd mean = VectorXd::Zero(mix.dim);
  for (const auto& c : mix.components) mean += c.weight * c.mean;
  return mean;
}

MatrixXd mixture_covariance(const NormalMixture& mix) {
  const VectorXd mean = mixture_mean(mix);
  MatrixXd cov = MatrixXd::Zero(mix.dim, mix.dim);
  for (const auto& c : mix.components) {
    const VectorXd delta = c.mean - mean;
    cov += c.weight * (c.cov + delta * delta.transpose());
  }
  return symmetrized(cov);
}

double effective_sample_size(const VectorXd& weights) {
  const double sq = weights.squaredNorm();
  if (!(sq > 0.0)) throw std::invalid_argument("effective sample size of all-zero weights");
  return 1.0 / sq;
}

void write_mixture(std::ostream& out, const NormalMixture& mix) {
  fmt::print(out, "anchored-mixture 1\ndim {} components {}\n", mix.dim, mix.size());
  for (const auto& c : mix.components) {
    fmt::print(out, "{:.17g}", c.weight);
    for (Index j = 0; j < mix.dim; ++j) fmt::print(out, " {:.17g}", c.mean(j));
    fmt::print(out, "\n");
    for (Index r = 0; r < mix.dim; ++r) {
      for (Index j = 0; j < mix.dim; ++j) fmt::print(out, j == 0 ? "{:.17g}" : " {:.17g}", c.cov(r, j));
      fmt::print(out, "\n");
    }
  }
}

NormalMixture read_mixture(std::istream& in) {
  std::string magic, dim_key, comp_key;
  int version = 0;
  Index dim = 0, count = 0;
  if (!(in >> magic >> version) || magic != "anchored-mixture" || version != 1) {
    throw std::runtime_error("not an anchored-mixture v1 stream");
  }
  if (!(in >> dim_key >> dim >> comp_key >> count) || dim_key != "dim" || comp_key != "components" || dim < 0 ||
      count < 0) {
    throw std::runtime_error("malformed mixture header");
  }
  NormalMixture mix;
  mix.dim = dim;
  mix.components.resize(static_cast<std::size_t>(count));
  for (auto& c : mix.components) {
    c.mean.resize(dim);
    c.cov.resize(dim, dim);
    bool ok = static_cast<bool>(in >> c.weight);
    for (Index j = 0; ok && j < dim; ++j) ok = static_cast<bool>(in >> c.mean(j));
    for (Index r = 0; ok && r < dim; ++r) {
      for (Index j = 0; ok && j < dim; ++j) ok = static_cast<bool>(in >> c.cov(r, j));
    }
    if (!ok) throw std::runtime_error("truncated mixture stream");
  }
  mix.validate();
  return mix;
}

}  // namespace anchored
