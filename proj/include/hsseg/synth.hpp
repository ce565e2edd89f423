#pragma once

// Synthetic ground truth: piecewise-constant weight fields whose
// discontinuity sets are coverable by few dyadic cells, sparse-mean
// Gaussian class spectra, and seeded training sets. All outputs are
// pure functions of (spec, seed); spectra use one RNG stream per pixel.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hsseg/core.hpp"
#include "hsseg/errors.hpp"
#include "hsseg/learn.hpp"
#include "hsseg/rng.hpp"

namespace hsseg::synth {

enum class SceneKind { Constant, HalfPlane, BoundaryFragment, NestedSquares };

enum class Mixing { Pure, Soft };

struct SceneSpec {
  GridGeometry geom;
  int K = 2;
  SceneKind kind = SceneKind::HalfPlane;
  double lipschitz = 1.0;  // boundary-fragment slope bound L
  std::uint64_t seed = 0;
  Mixing mixing = Mixing::Pure;
  double soft_min = 0.0;  // soft mixing: dominant-class weight range [a,b]
  double soft_max = 1.0;

  void validate() const {
    if (K < 2) throw InvalidArguments("K >= 2");
    if (kind == SceneKind::BoundaryFragment) {
      if (geom.d != 2)
        throw UnsupportedDimension("boundary-fragment requires d=2");
      if (lipschitz <= 0.0) throw InvalidArguments("Lipschitz bound L > 0");
    }
    if (mixing == Mixing::Soft &&
        !(0.0 <= soft_min && soft_min <= soft_max && soft_max <= 1.0))
      throw InvalidArguments("soft mixing needs 0 <= a <= b <= 1");
  }
};

struct SignalSpec {
  int p = 0;
  int p0 = 0;              // nonzero standardized mean components per class
  double separation = 1.0; // per-active-band standardized mean gap
  double var = 1.0;        // shared band variance (scalar)

  void validate(int K) const {
    if (p < 1 || p0 < 0 || p0 > p) throw InvalidArguments("need 0 <= p0 <= p");
    if (K * p0 > p)
      throw InvalidArguments("K*p0 must fit in p (disjoint class supports)");
    if (separation <= 0.0) throw InvalidArguments("separation > 0");
    if (var <= 0.0) throw NonPositiveVariance("var");
  }
};

// The true class densities behind a SignalSpec: class k puts mean
// separation*sd on its own block of p0 bands, zero elsewhere. Disjoint
// blocks make all pairwise squared Mahalanobis distances 2*p0*sep^2.
inline learn::ClassModel true_class_model(const SignalSpec& sig, int K) {
  sig.validate(K);
  learn::ClassModel m;
  m.K = K;
  m.p = sig.p;
  m.var.assign(sig.p, sig.var);
  m.means.assign(K, std::vector<double>(sig.p, 0.0));
  double amp = sig.separation * std::sqrt(sig.var);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < sig.p0; ++j) {
      m.means[k][k * sig.p0 + j] = amp;
      m.support.push_back(k * sig.p0 + j);
    }
  std::sort(m.support.begin(), m.support.end());
  return m;
}

namespace detail {

// RNG stream ids; keeps scene randomness, per-pixel spectra and training
// draws on disjoint streams of the same seed.
constexpr std::uint64_t kSceneStream = 0xB0DA0001ULL;
constexpr std::uint64_t kRegionStream = 0xB0DA0002ULL;
constexpr std::uint64_t kPixelStreamBase = 1ULL << 32;
constexpr std::uint64_t kTrainStream = 0xB0DA0003ULL;

// Seeded L-Lipschitz piecewise-linear boundary t2 = b(t1) on [0,1],
// 17 knots, values kept inside [0.25, 0.75].
struct FragmentBoundary {
  std::vector<double> knots_y;

  FragmentBoundary(std::uint64_t seed, double L) {
    CounterRng rng(seed, kSceneStream);
    const int n_knots = 17;
    const double step = 1.0 / (n_knots - 1);
    knots_y.resize(n_knots);
    knots_y[0] = 0.25 + 0.5 * rng.next_uniform();
    for (int i = 1; i < n_knots; ++i) {
      double slope = (2.0 * rng.next_uniform() - 1.0) * L;
      double y = knots_y[i - 1] + slope * step;
      knots_y[i] = std::clamp(y, 0.25, 0.75);
    }
  }

  double operator()(double t1) const {
    const int n = static_cast<int>(knots_y.size());
    double pos = t1 * (n - 1);
    int i = std::min(n - 2, static_cast<int>(pos));
    double frac = pos - i;
    return knots_y[i] + frac * (knots_y[i + 1] - knots_y[i]);
  }
};

inline int region_of(const SceneSpec& spec, const std::vector<double>& t,
                     const FragmentBoundary* boundary) {
  switch (spec.kind) {
    case SceneKind::Constant:
      return 0;
    case SceneKind::HalfPlane:
      return t[0] < 0.5 ? 0 : 1;
    case SceneKind::BoundaryFragment:
      return t[1] <= (*boundary)(t[0]) ? 0 : 1;
    case SceneKind::NestedSquares: {
      double r = 0.0;
      for (double c : t) r = std::max(r, std::abs(c - 0.5));
      int idx = static_cast<int>(r * 2.0 * spec.K);
      return std::min(spec.K - 1, idx);
    }
  }
  return 0;
}

}  // namespace detail

// Piecewise-constant weight field: each region's class gets weight w
// (1 for pure mixing, else a seeded uniform draw in [a,b] per region),
// the remaining mass split evenly over the other classes.
inline WeightField make_weight_field(const SceneSpec& spec) {
  spec.validate();
  const detail::FragmentBoundary* boundary = nullptr;
  detail::FragmentBoundary frag(spec.seed, spec.lipschitz);
  if (spec.kind == SceneKind::BoundaryFragment) boundary = &frag;

  const int max_regions = spec.K;
  std::vector<double> region_w(max_regions, 1.0);
  if (spec.mixing == Mixing::Soft) {
    CounterRng rng(spec.seed, detail::kRegionStream);
    for (int r = 0; r < max_regions; ++r)
      region_w[r] =
          spec.soft_min + (spec.soft_max - spec.soft_min) * rng.next_uniform();
  }

  WeightField wf;
  wf.geom = spec.geom;
  wf.K = spec.K;
  wf.weights.assign(spec.geom.N * spec.K, 0.0);
  for (std::int64_t i = 0; i < spec.geom.N; ++i) {
    int r = detail::region_of(spec, pixel_center(spec.geom, i), boundary);
    int cls = r % spec.K;
    double w = region_w[cls];
    double rest = (1.0 - w) / (spec.K - 1);
    for (int k = 0; k < spec.K; ++k)
      wf.weights[i * spec.K + k] = (k == cls) ? w : rest;
  }
  return wf;
}

// Draws Y[i] from the pixel's weight row, then X[i] from the labeled
// class density. Stream i serves pixel i: one uniform for the label,
// then the p Gaussian band draws.
inline std::pair<HyperCube, LabelMap> sample_cube(const WeightField& wf,
                                                  const SignalSpec& sig,
                                                  std::uint64_t seed) {
  sig.validate(wf.K);
  auto model = true_class_model(sig, wf.K);
  const double sd = std::sqrt(sig.var);
  HyperCube cube;
  cube.geom = wf.geom;
  cube.p = sig.p;
  cube.data.resize(wf.geom.N * sig.p);
  LabelMap lm;
  lm.geom = wf.geom;
  lm.K = wf.K;
  lm.labels.resize(wf.geom.N);
  for (std::int64_t i = 0; i < wf.geom.N; ++i) {
    CounterRng rng(seed, detail::kPixelStreamBase + i);
    double u = rng.next_uniform();
    int y = wf.K - 1;
    double acc = 0.0;
    for (int k = 0; k < wf.K; ++k) {
      acc += wf.at(i, k);
      if (u < acc) {
        y = k;
        break;
      }
    }
    lm.labels[i] = y;
    for (int j = 0; j < sig.p; ++j)
      cube.data[i * sig.p + j] = model.means[y][j] + sd * rng.next_gaussian();
  }
  return {cube, lm};
}

// n_k i.i.d. draws per class from the true class densities.
inline learn::TrainingSet sample_training_set(const SignalSpec& sig,
                                              const std::vector<int>& n_k,
                                              std::uint64_t seed) {
  const int K = static_cast<int>(n_k.size());
  if (K < 2) throw InvalidCounts("need at least two classes");
  for (int c : n_k)
    if (c < 2) throw InvalidCounts("each class needs n_k >= 2");
  sig.validate(K);
  auto model = true_class_model(sig, K);
  const double sd = std::sqrt(sig.var);
  learn::TrainingSet ts;
  ts.K = K;
  ts.p = sig.p;
  CounterRng rng(seed, detail::kTrainStream);
  for (int k = 0; k < K; ++k)
    for (int s = 0; s < n_k[k]; ++s) {
      std::vector<double> z(sig.p);
      for (int j = 0; j < sig.p; ++j)
        z[j] = model.means[k][j] + sd * rng.next_gaussian();
      ts.labels.push_back(k);
      ts.spectra.push_back(std::move(z));
    }
  return ts;
}

}  // namespace hsseg::synth
