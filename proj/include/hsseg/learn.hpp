#pragma once

// Learning step: per-class Gaussian substitutes from a labeled training
// set. Pooled diagonal variance, support selection by hard thresholding
// of standardized means at sqrt(2 log(p)/n), means truncated off-support.
//
// Off-support bands are excluded from every density evaluation (they
// would otherwise divide by a zeroed variance); they cancel in all
// likelihood ratios, so decisions are unaffected.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hsseg/errors.hpp"

namespace hsseg::learn {

struct TrainingSet {
  int K = 2;
  int p = 0;
  std::vector<int> labels;                  // one class per sample
  std::vector<std::vector<double>> spectra; // one length-p vector per sample

  int n() const { return static_cast<int>(labels.size()); }

  std::vector<int> class_counts() const {
    std::vector<int> n_k(K, 0);
    for (int y : labels) {
      if (y < 0 || y >= K) throw ClassOutOfRange(std::to_string(y));
      ++n_k[y];
    }
    return n_k;
  }

  void validate() const {
    if (K < 2) throw InvalidArguments("K must be >= 2");
    if (p < 1) throw InvalidDimensions("p must be >= 1");
    if (labels.size() != spectra.size())
      throw ShapeMismatch("labels/spectra size mismatch");
    for (const auto& z : spectra) {
      if (static_cast<int>(z.size()) != p)
        throw DimensionMismatch("spectrum length != p");
      for (double v : z)
        if (!std::isfinite(v)) throw NonFiniteValue("training spectrum");
    }
    for (int c : class_counts())
      if (c < 2) throw InvalidCounts("every class needs n_k >= 2");
  }
};

struct ClassModel {
  int K = 2;
  int p = 0;
  std::vector<std::vector<double>> means;  // K x p, zero off-support
  std::vector<double> var;                 // p, shared diagonal covariance
  std::vector<int> support;                // sorted band indices
  double threshold_used = 0.0;
};

struct PooledStats {
  std::vector<std::vector<double>> means;  // K x p class means
  std::vector<double> var;                 // p pooled unbiased variances
};

// Class means plus the pooled unbiased variance with divisor (n - K),
// each sample centered by its own class mean.
inline PooledStats pooled_stats(const TrainingSet& ts) {
  ts.validate();
  const auto n_k = ts.class_counts();
  PooledStats st;
  st.means.assign(ts.K, std::vector<double>(ts.p, 0.0));
  st.var.assign(ts.p, 0.0);
  for (int s = 0; s < ts.n(); ++s)
    for (int j = 0; j < ts.p; ++j) st.means[ts.labels[s]][j] += ts.spectra[s][j];
  for (int k = 0; k < ts.K; ++k)
    for (int j = 0; j < ts.p; ++j) st.means[k][j] /= n_k[k];
  for (int s = 0; s < ts.n(); ++s) {
    const auto& mu = st.means[ts.labels[s]];
    for (int j = 0; j < ts.p; ++j) {
      double r = ts.spectra[s][j] - mu[j];
      st.var[j] += r * r;
    }
  }
  const double divisor = ts.n() - ts.K;
  for (int j = 0; j < ts.p; ++j) {
    st.var[j] /= divisor;
    if (st.var[j] <= 0.0)
      throw DegenerateVariance("band " + std::to_string(j) +
                               " has zero pooled variance");
  }
  return st;
}

// sqrt(2 log(p) / n); logs are natural throughout.
inline double threshold_value(int p, int n) {
  if (p < 2 || n < 1) throw InvalidDimensions("need p >= 2 and n >= 1");
  return std::sqrt(2.0 * std::log(static_cast<double>(p)) / n);
}

// Bands whose standardized class mean strictly exceeds tau for some class.
inline std::vector<int> select_support(
    const std::vector<std::vector<double>>& means,
    const std::vector<double>& var, double tau) {
  const int p = static_cast<int>(var.size());
  std::vector<int> support;
  for (int j = 0; j < p; ++j) {
    if (var[j] <= 0.0) throw NonPositiveVariance("band " + std::to_string(j));
    double sd = std::sqrt(var[j]);
    for (const auto& mu : means) {
      if (std::abs(mu[j]) / sd > tau) {
        support.push_back(j);
        break;
      }
    }
  }
  return support;
}

inline ClassModel fit(const TrainingSet& ts) {
  auto st = pooled_stats(ts);
  ClassModel m;
  m.K = ts.K;
  m.p = ts.p;
  m.var = st.var;
  m.threshold_used = threshold_value(ts.p, ts.n());
  m.support = select_support(st.means, st.var, m.threshold_used);
  m.means.assign(ts.K, std::vector<double>(ts.p, 0.0));
  for (int k = 0; k < ts.K; ++k)
    for (int j : m.support) m.means[k][j] = st.means[k][j];
  return m;
}

// Diagonal-Gaussian log density over the selected support only.
inline double log_density(const ClassModel& m, int k,
                          const std::vector<double>& x) {
  if (k < 0 || k >= m.K) throw ClassOutOfRange(std::to_string(k));
  if (static_cast<int>(x.size()) != m.p)
    throw DimensionMismatch("spectrum length != p");
  constexpr double ln_2pi = 1.8378770664093454835606594728112;
  double s = 0.0;
  for (int j : m.support) {
    double r = x[j] - m.means[k][j];
    s += -0.5 * (ln_2pi + std::log(m.var[j])) - r * r / (2.0 * m.var[j]);
  }
  return s;
}

// Same, reading bands from a raw pixel-major slice (avoids copying when
// scanning a whole cube).
inline double log_density(const ClassModel& m, int k, const double* x) {
  if (k < 0 || k >= m.K) throw ClassOutOfRange(std::to_string(k));
  constexpr double ln_2pi = 1.8378770664093454835606594728112;
  double s = 0.0;
  for (int j : m.support) {
    double r = x[j] - m.means[k][j];
    s += -0.5 * (ln_2pi + std::log(m.var[j])) - r * r / (2.0 * m.var[j]);
  }
  return s;
}

}  // namespace hsseg::learn
