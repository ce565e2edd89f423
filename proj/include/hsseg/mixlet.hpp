#pragma once

// Mixlet estimator: penalized maximum-likelihood estimation of the
// per-pixel mixture weight field over recursive dyadic partitions,
// maximized exactly by a bottom-up dynamic program over the 2^d-tree.
//
// Objective: log Q(X) - 4 * pen(Q) with pen(Q) = m * c_N per leaf,
// c_N = 1.5 log N + (4/3) log 2 for K = 2. All likelihood arithmetic is
// in the log domain (p ~ 1000 bands underflows raw densities).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "hsseg/core.hpp"
#include "hsseg/errors.hpp"
#include "hsseg/learn.hpp"
#include "hsseg/parallel.hpp"

namespace hsseg::mixlet {

// Uniform grid G = { j/(M-1) : j = 0..M-1 } on [0,1].
struct WeightGrid {
  int M = 0;

  static WeightGrid make(int M) {
    if (M < 2) throw InvalidArguments("grid needs M >= 2");
    return WeightGrid{M};
  }

  // Default grid scale: M = ceil(N^{3/2}).
  static WeightGrid for_image(std::int64_t N) {
    double m = std::ceil(std::pow(static_cast<double>(N), 1.5));
    return make(std::max<int>(2, static_cast<int>(m)));
  }

  double value(int j) const { return static_cast<double>(j) / (M - 1); }
};

// Per-leaf coding cost c_N; the penalty of a partition with m leaves is
// m * c_N. For K > 2 the (K-1) free simplex coordinates each cost
// 1.5 log N.
inline double leaf_cost(std::int64_t N, int K = 2) {
  if (N < 1) throw InvalidArguments("N >= 1");
  if (K < 2) throw InvalidArguments("K >= 2");
  return (K - 1) * 1.5 * std::log(static_cast<double>(N)) +
         (4.0 / 3.0) * std::log(2.0);
}

inline double penalty(std::int64_t m, std::int64_t N) {
  if (m < 1 || N < 1) throw InvalidArguments("m >= 1 and N >= 1");
  return static_cast<double>(m) * leaf_cost(N, 2);
}

// Kraft sum over the whole model set, by the tree recursion
//   S(pixel) = M e^{-c_N},  S(cell) = M e^{-c_N} + S(child)^{2^d}.
inline double kraft_sum(const GridGeometry& geom, const WeightGrid& grid) {
  const double leaf_term =
      static_cast<double>(grid.M) * std::exp(-leaf_cost(geom.N, 2));
  double s = leaf_term;
  const double fanout = std::pow(2.0, geom.d);
  for (int side = 2; side <= geom.side; side *= 2) {
    s = leaf_term + std::pow(s, fanout);
    if (!std::isfinite(s)) throw Error("Overflow in kraft_sum");
  }
  return s;
}

// An aligned dyadic hypercube of the pixel grid.
struct Cell {
  std::vector<int> origin;  // pixel coordinates of the low corner
  int size = 0;             // pixels per axis

  // Visits the linear pixel indices of the cell in row-major order.
  template <typename F>
  void for_each_pixel(const GridGeometry& geom, F&& f) const {
    std::vector<int> c(geom.d, 0);
    for (;;) {
      std::int64_t idx = 0;
      for (int a = 0; a < geom.d; ++a) idx = idx * geom.side + origin[a] + c[a];
      f(idx);
      int a = geom.d - 1;
      while (a >= 0 && ++c[a] == size) c[a--] = 0;
      if (a < 0) break;
    }
  }

  // Child c of the dyadic split; bit (d-1-a) of c selects the half on
  // axis a, matching row-major pixel order.
  Cell child(int d, int c) const {
    Cell ch;
    ch.origin = origin;
    ch.size = size / 2;
    for (int a = 0; a < d; ++a)
      if ((c >> (d - 1 - a)) & 1) ch.origin[a] += ch.size;
    return ch;
  }
};

struct RdpNode {
  bool is_leaf = true;
  Cell cell;
  std::vector<double> weights;   // length K, simplex (leaves only)
  std::vector<int> children;     // node indices (internal nodes only)
};

struct RdpTree {
  GridGeometry geom;
  int K = 2;
  std::vector<RdpNode> nodes;  // root at index 0

  std::int64_t leaf_count() const {
    std::int64_t m = 0;
    for (const auto& n : nodes) m += n.is_leaf ? 1 : 0;
    return m;
  }

  WeightField flatten() const {
    WeightField wf;
    wf.geom = geom;
    wf.K = K;
    wf.weights.assign(geom.N * K, 0.0);
    for (const auto& n : nodes) {
      if (!n.is_leaf) continue;
      n.cell.for_each_pixel(geom, [&](std::int64_t i) {
        for (int k = 0; k < K; ++k) wf.weights[i * K + k] = n.weights[k];
      });
    }
    return wf;
  }
};

struct MixletFit {
  RdpTree tree;
  double objective = 0.0;  // loglik - 4 * penalty
  double loglik = 0.0;
  double penalty = 0.0;
  WeightField weights;
};

struct FitOptions {
  bool exact_scan = false;     // exhaustive grid scan instead of ternary search
  double penalty_scale = 1.0;  // multiplies the 4*pen term
};

// Per-pixel class log-likelihoods, N x K row-major.
inline std::vector<double> pixel_loglikes(const HyperCube& cube,
                                          const learn::ClassModel& model) {
  if (cube.p != model.p) throw DimensionMismatch("cube.p != model.p");
  std::vector<double> ll(cube.geom.N * model.K);
  parallel_for(0, cube.geom.N, [&](std::int64_t i) {
    const double* x = cube.data.data() + i * cube.p;
    for (int k = 0; k < model.K; ++k)
      ll[i * model.K + k] = learn::log_density(model, k, x);
  });
  return ll;
}

namespace detail {

// Mixture log-likelihood of one pixel: logsumexp of log w_k + ll_k.
inline double mix_loglike(const double* ll, const std::vector<double>& w) {
  const int K = static_cast<int>(w.size());
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k)
    if (w[k] > 0.0) m = std::max(m, std::log(w[k]) + ll[k]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (int k = 0; k < K; ++k)
    if (w[k] > 0.0) s += std::exp(std::log(w[k]) + ll[k] - m);
  return m + std::log(s);
}

// Cell log-likelihood at mixture weight pi of class 0 (K = 2), summed
// over the cell's pixels in the stable form l0 + log(pi + (1-pi)e^{l1-l0}).
inline double cell_loglike_at(const GridGeometry& geom, const Cell& cell,
                              const std::vector<double>& loglikes, double pi) {
  double total = 0.0;
  cell.for_each_pixel(geom, [&](std::int64_t i) {
    double l0 = loglikes[2 * i];
    double l1 = loglikes[2 * i + 1];
    double m = std::max(l0, l1);
    total += m + std::log(pi * std::exp(l0 - m) + (1.0 - pi) * std::exp(l1 - m));
  });
  return total;
}

}  // namespace detail

// Best leaf weight for one cell. K = 2: maximize over the grid, by
// ternary search on indices (the mixture log-likelihood is concave in
// pi) plus a +-2 local scan; ties go to the smaller grid index. K > 2:
// 50 EM weight updates from the barycenter.
inline std::pair<std::vector<double>, double> cell_best_weight_impl(
    const GridGeometry& geom, const Cell& cell,
    const std::vector<double>& loglikes, int K, const WeightGrid& grid,
    bool exact_scan) {
  if (cell.size < 1) throw EmptyCell("cell has no pixels");
  if (K == 2) {
    auto f = [&](int j) {
      return detail::cell_loglike_at(geom, cell, loglikes, grid.value(j));
    };
    int best = 0;
    double best_val;
    if (exact_scan) {
      best_val = f(0);
      for (int j = 1; j < grid.M; ++j) {
        double v = f(j);
        if (v > best_val) {
          best_val = v;
          best = j;
        }
      }
    } else {
      int lo = 0, hi = grid.M - 1;
      while (hi - lo > 4) {
        int m1 = lo + (hi - lo) / 3;
        int m2 = hi - (hi - lo) / 3;
        if (f(m1) < f(m2))
          lo = m1 + 1;
        else
          hi = m2;
      }
      best = lo;
      best_val = f(lo);
      for (int j = lo + 1; j <= hi; ++j) {
        double v = f(j);
        if (v > best_val) {
          best_val = v;
          best = j;
        }
      }
      for (int j = std::max(0, best - 2); j <= std::min(grid.M - 1, best + 2);
           ++j) {
        double v = f(j);
        if (v > best_val || (v == best_val && j < best)) {
          best_val = v;
          best = j;
        }
      }
    }
    return {{grid.value(best), 1.0 - grid.value(best)}, best_val};
  }

  // K > 2: EM on the mixture weights of a single cell.
  std::vector<double> w(K, 1.0 / K);
  std::int64_t n = 0;
  cell.for_each_pixel(geom, [&](std::int64_t) { ++n; });
  std::vector<double> resp(K);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> acc(K, 0.0);
    cell.for_each_pixel(geom, [&](std::int64_t i) {
      const double* ll = loglikes.data() + i * K;
      double m = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < K; ++k)
        if (w[k] > 0.0) m = std::max(m, std::log(w[k]) + ll[k]);
      double s = 0.0;
      for (int k = 0; k < K; ++k)
        resp[k] = w[k] > 0.0 ? std::exp(std::log(w[k]) + ll[k] - m) : 0.0,
        s += resp[k];
      for (int k = 0; k < K; ++k) acc[k] += resp[k] / s;
    });
    double tot = 0.0;
    for (int k = 0; k < K; ++k) {
      w[k] = std::max(0.0, acc[k] / n);
      tot += w[k];
    }
    for (int k = 0; k < K; ++k) w[k] /= tot;
  }
  double val = 0.0;
  cell.for_each_pixel(geom, [&](std::int64_t i) {
    val += detail::mix_loglike(loglikes.data() + i * K, w);
  });
  return {w, val};
}

inline std::pair<std::vector<double>, double> cell_best_weight(
    const GridGeometry& geom, const Cell& cell,
    const std::vector<double>& loglikes, int K, const WeightGrid& grid,
    bool exact_scan = false) {
  return cell_best_weight_impl(geom, cell, loglikes, K, grid, exact_scan);
}

// Exact maximizer of loglik(Q) - 4*pen(Q) over all RDP models, from
// precomputed per-pixel log-likelihoods.
inline MixletFit fit_loglikes(const GridGeometry& geom,
                              const std::vector<double>& loglikes, int K,
                              const WeightGrid& grid,
                              const FitOptions& opt = {}) {
  if (static_cast<std::int64_t>(loglikes.size()) != geom.N * K)
    throw DimensionMismatch("loglikes size != N*K");
  const double cost = 4.0 * opt.penalty_scale * leaf_cost(geom.N, K);
  const int fanout = 1 << geom.d;

  RdpTree tree;
  tree.geom = geom;
  tree.K = K;

  // Bottom-up over the cell hierarchy; returns (value, node index).
  std::function<std::pair<double, int>(const Cell&)> solve =
      [&](const Cell& cell) -> std::pair<double, int> {
    auto [w, ll] = cell_best_weight(geom, cell, loglikes, K, grid, opt.exact_scan);
    double leaf_val = ll - cost;
    if (cell.size == 1) {
      tree.nodes.push_back({true, cell, std::move(w), {}});
      return {leaf_val, static_cast<int>(tree.nodes.size()) - 1};
    }
    double split_val = 0.0;
    std::vector<std::pair<double, int>> sub(fanout);
    std::size_t mark = tree.nodes.size();
    for (int c = 0; c < fanout; ++c) {
      sub[c] = solve(cell.child(geom.d, c));
      split_val += sub[c].first;
    }
    if (leaf_val >= split_val) {  // tie -> coarser partition
      tree.nodes.resize(mark);
      tree.nodes.push_back({true, cell, std::move(w), {}});
      return {leaf_val, static_cast<int>(tree.nodes.size()) - 1};
    }
    RdpNode node;
    node.is_leaf = false;
    node.cell = cell;
    for (auto& s : sub) node.children.push_back(s.second);
    tree.nodes.push_back(std::move(node));
    return {split_val, static_cast<int>(tree.nodes.size()) - 1};
  };

  Cell root;
  root.origin.assign(geom.d, 0);
  root.size = geom.side;
  auto [value, root_idx] = solve(root);

  // Re-root so node 0 is the root.
  std::swap(tree.nodes[0], tree.nodes[root_idx]);
  for (auto& n : tree.nodes)
    for (auto& c : n.children) {
      if (c == 0) c = root_idx;
      else if (c == root_idx) c = 0;
    }

  MixletFit out;
  out.tree = std::move(tree);
  out.penalty = opt.penalty_scale *
                static_cast<double>(out.tree.leaf_count()) * leaf_cost(geom.N, K);
  out.objective = value;
  out.loglik = value + 4.0 * out.penalty;
  out.weights = out.tree.flatten();
  return out;
}

inline MixletFit fit(const HyperCube& cube, const learn::ClassModel& model,
                     const WeightGrid& grid, const FitOptions& opt = {}) {
  validate_cube(cube);
  auto ll = pixel_loglikes(cube, model);
  return fit_loglikes(cube.geom, ll, model.K, grid, opt);
}

}  // namespace hsseg::mixlet
