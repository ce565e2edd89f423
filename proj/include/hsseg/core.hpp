#pragma once

// Core containers for hyperspectral segmentation: the pixel grid, the
// observed cube, label maps and per-pixel mixture weight fields.
//
// Pixels are linearized in row-major order over axes, axis 0 slowest.
// Grid sides must be exact powers of two so that recursive dyadic
// partitions align with pixels down to single-pixel cells.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hsseg/errors.hpp"

namespace hsseg {

struct GridGeometry {
  int d = 0;       // spatial dimension, >= 1
  int side = 0;    // pixels per axis, power of two
  std::int64_t N = 0;  // side^d

  static GridGeometry make(int d, int side) {
    if (d < 1) throw InvalidArguments("dimension d must be >= 1");
    if (side < 1 || (side & (side - 1)) != 0)
      throw NonPowerOfTwoSide("side " + std::to_string(side) +
                              " is not a power of two");
    GridGeometry g;
    g.d = d;
    g.side = side;
    g.N = 1;
    for (int a = 0; a < d; ++a) g.N *= side;
    return g;
  }

  bool operator==(const GridGeometry&) const = default;

  // Axis coordinates of pixel i, row-major with axis 0 slowest.
  std::vector<int> coords(std::int64_t i) const {
    if (i < 0 || i >= N)
      throw IndexOutOfRange("pixel index " + std::to_string(i));
    std::vector<int> c(d);
    for (int a = d - 1; a >= 0; --a) {
      c[a] = static_cast<int>(i % side);
      i /= side;
    }
    return c;
  }

  std::int64_t index(const std::vector<int>& c) const {
    std::int64_t i = 0;
    for (int a = 0; a < d; ++a) i = i * side + c[a];
    return i;
  }
};

// Center t_i of pixel i under the regular partition of [0,1]^d.
inline std::vector<double> pixel_center(const GridGeometry& geom,
                                        std::int64_t i) {
  auto c = geom.coords(i);
  std::vector<double> t(geom.d);
  for (int a = 0; a < geom.d; ++a) t[a] = (c[a] + 0.5) / geom.side;
  return t;
}

struct HyperCube {
  GridGeometry geom;
  int p = 0;                 // bands per pixel
  std::vector<double> data;  // N*p, pixel-major

  double at(std::int64_t pixel, int band) const {
    return data[pixel * p + band];
  }
};

inline void validate_cube(const HyperCube& cube) {
  if (cube.geom.side < 1 || (cube.geom.side & (cube.geom.side - 1)) != 0)
    throw NonPowerOfTwoSide("side " + std::to_string(cube.geom.side));
  if (cube.p < 1) throw ShapeMismatch("bands p must be >= 1");
  if (static_cast<std::int64_t>(cube.data.size()) != cube.geom.N * cube.p)
    throw ShapeMismatch("data length " + std::to_string(cube.data.size()) +
                        " != N*p = " + std::to_string(cube.geom.N * cube.p));
  for (double v : cube.data)
    if (!std::isfinite(v)) throw NonFiniteValue("cube contains a non-finite value");
}

struct LabelMap {
  GridGeometry geom;
  int K = 2;
  std::vector<int> labels;  // N entries in {0,...,K-1}

  void validate() const {
    if (static_cast<std::int64_t>(labels.size()) != geom.N)
      throw ShapeMismatch("label count != N");
    for (int v : labels)
      if (v < 0 || v >= K) throw ClassOutOfRange("label " + std::to_string(v));
  }
};

struct WeightField {
  GridGeometry geom;
  int K = 2;
  std::vector<double> weights;  // N*K row-major; rows on the simplex

  double at(std::int64_t pixel, int k) const { return weights[pixel * K + k]; }

  void validate() const {
    if (static_cast<std::int64_t>(weights.size()) != geom.N * K)
      throw ShapeMismatch("weight count != N*K");
    for (std::int64_t i = 0; i < geom.N; ++i) {
      double s = 0;
      for (int k = 0; k < K; ++k) {
        double w = at(i, k);
        if (w < 0.0 || w > 1.0) throw ShapeMismatch("weight outside [0,1]");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-9)
        throw ShapeMismatch("weight row off the simplex at pixel " +
                            std::to_string(i));
    }
  }
};

}  // namespace hsseg
