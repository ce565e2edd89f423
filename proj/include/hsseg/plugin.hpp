#pragma once

// Plug-in labeling: combine per-pixel class log-likelihoods with a
// weight field. K=2 thresholds the likelihood ratio R = ((1-pi)/pi) *
// exp(l1 - l0) at 1 (ties, R = 1, give label 0); K>2 takes the argmax
// of log w_k + l_k with ties to the smallest class index. The oracle
// rule is the same computation fed with the true model and weights.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "hsseg/core.hpp"
#include "hsseg/divergence.hpp"
#include "hsseg/errors.hpp"
#include "hsseg/learn.hpp"
#include "hsseg/mixlet.hpp"

namespace hsseg::plugin {

struct Posteriors {
  GridGeometry geom;
  int K = 2;
  std::vector<double> post;  // N x K, rows sum to 1
};

// R = ((1 - pi)/pi) exp(l1 - l0); pi = 0 -> +inf, pi = 1 -> 0.
inline double likelihood_ratio(const std::vector<double>& loglikes_i,
                               const std::vector<double>& weights_i) {
  double pi = weights_i[0];
  if (pi <= 0.0) return std::numeric_limits<double>::infinity();
  if (pi >= 1.0) return 0.0;
  double log_r = std::log1p(-pi) - std::log(pi) + loglikes_i[1] - loglikes_i[0];
  return std::exp(log_r);
}

namespace detail {

inline int decide_pixel(const double* ll, const double* w, int K) {
  if (K == 2) {
    // log R > 0 <=> 1 < R; R = 1 maps to label 0 (strict inequality).
    double pi = w[0];
    if (pi <= 0.0) return 1;
    if (pi >= 1.0) return 0;
    double log_r = std::log1p(-pi) - std::log(pi) + ll[1] - ll[0];
    return log_r > 0.0 ? 1 : 0;
  }
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    if (w[k] <= 0.0) continue;
    double score = std::log(w[k]) + ll[k];
    if (score > best_score) {
      best_score = score;
      best = k;
    }
  }
  return best;
}

}  // namespace detail

inline LabelMap decide_loglikes(const GridGeometry& geom,
                                const std::vector<double>& loglikes, int K,
                                const WeightField& weights) {
  if (weights.geom != geom || weights.K != K)
    throw GeometryMismatch("weights incompatible with log-likelihoods");
  if (static_cast<std::int64_t>(loglikes.size()) != geom.N * K)
    throw DimensionMismatch("loglikes size != N*K");
  LabelMap out;
  out.geom = geom;
  out.K = K;
  out.labels.resize(geom.N);
  for (std::int64_t i = 0; i < geom.N; ++i)
    out.labels[i] = detail::decide_pixel(loglikes.data() + i * K,
                                         weights.weights.data() + i * K, K);
  return out;
}

inline LabelMap decide(const HyperCube& cube, const learn::ClassModel& model,
                       const WeightField& weights) {
  auto ll = mixlet::pixel_loglikes(cube, model);
  return decide_loglikes(cube.geom, ll, model.K, weights);
}

inline LabelMap oracle_decide(const HyperCube& cube,
                              const learn::ClassModel& true_model,
                              const WeightField& true_weights) {
  return decide(cube, true_model, true_weights);
}

inline Posteriors posteriors(const GridGeometry& geom,
                             const std::vector<double>& loglikes, int K,
                             const WeightField& weights) {
  Posteriors out;
  out.geom = geom;
  out.K = K;
  out.post.resize(geom.N * K);
  for (std::int64_t i = 0; i < geom.N; ++i) {
    const double* ll = loglikes.data() + i * K;
    const double* w = weights.weights.data() + i * K;
    double m = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
      if (w[k] > 0.0) m = std::max(m, std::log(w[k]) + ll[k]);
    double s = 0.0;
    for (int k = 0; k < K; ++k) {
      double v = w[k] > 0.0 ? std::exp(std::log(w[k]) + ll[k] - m) : 0.0;
      out.post[i * K + k] = v;
      s += v;
    }
    for (int k = 0; k < K; ++k) out.post[i * K + k] /= s;
  }
  return out;
}

// Single-draw empirical excess risk d_H(pred, truth) - d_H(oracle, truth).
inline double excess_risk(const LabelMap& pred, const LabelMap& oracle,
                          const LabelMap& truth) {
  return divergence::hamming(pred, truth) - divergence::hamming(oracle, truth);
}

}  // namespace hsseg::plugin
