#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "hsseg/core.hpp"
#include "hsseg/io.hpp"
#include "hsseg/rng.hpp"

using namespace hsseg;

TEST_CASE("geometry construction") {
  auto g = GridGeometry::make(2, 16);
  CHECK(g.N == 256);
  CHECK_THROWS_AS(GridGeometry::make(2, 3), NonPowerOfTwoSide);
  CHECK_THROWS_AS(GridGeometry::make(0, 4), InvalidArguments);
  auto g3 = GridGeometry::make(3, 4);
  CHECK(g3.N == 64);
}

TEST_CASE("validate_cube") {
  HyperCube cube;
  cube.geom = GridGeometry::make(2, 16);
  cube.p = 4;
  cube.data.assign(1024, 1.0);
  CHECK_NOTHROW(validate_cube(cube));

  cube.data.pop_back();
  CHECK_THROWS_AS(validate_cube(cube), ShapeMismatch);
  cube.data.push_back(std::nan(""));
  CHECK_THROWS_AS(validate_cube(cube), NonFiniteValue);

  HyperCube bad;
  bad.geom.d = 2;
  bad.geom.side = 3;
  bad.geom.N = 9;
  bad.p = 1;
  bad.data.assign(9, 0.0);
  CHECK_THROWS_AS(validate_cube(bad), NonPowerOfTwoSide);
}

TEST_CASE("pixel_center examples") {
  auto g = GridGeometry::make(2, 2);
  auto c0 = pixel_center(g, 0);
  CHECK(c0[0] == doctest::Approx(0.25));
  CHECK(c0[1] == doctest::Approx(0.25));
  auto c3 = pixel_center(g, 3);
  CHECK(c3[0] == doctest::Approx(0.75));
  CHECK(c3[1] == doctest::Approx(0.75));

  auto g1 = GridGeometry::make(1, 4);
  CHECK(pixel_center(g1, 1)[0] == doctest::Approx(0.375));

  CHECK_THROWS_AS(pixel_center(g, 4), IndexOutOfRange);
  CHECK_THROWS_AS(pixel_center(g, -1), IndexOutOfRange);
}

TEST_CASE("pixel_center is a bijection onto interior points") {
  auto g = GridGeometry::make(2, 8);
  std::set<std::pair<double, double>> seen;
  for (std::int64_t i = 0; i < g.N; ++i) {
    auto t = pixel_center(g, i);
    for (double c : t) {
      CHECK(c > 0.0);
      CHECK(c < 1.0);
    }
    seen.insert({t[0], t[1]});
  }
  CHECK(seen.size() == static_cast<std::size_t>(g.N));
}

TEST_CASE("weight field simplex validation") {
  WeightField wf;
  wf.geom = GridGeometry::make(1, 2);
  wf.K = 2;
  wf.weights = {0.25, 0.75, 1.0, 0.0};
  CHECK_NOTHROW(wf.validate());
  wf.weights[0] = 0.3;
  CHECK_THROWS_AS(wf.validate(), ShapeMismatch);
}

TEST_CASE("HSC1 round trip") {
  HyperCube cube;
  cube.geom = GridGeometry::make(2, 4);
  cube.p = 3;
  CounterRng rng(9, 0);
  cube.data.resize(48);
  for (auto& v : cube.data) v = rng.next_gaussian();
  // float32 payload: quantize so the round trip is exact
  for (auto& v : cube.data) v = static_cast<float>(v);

  auto path = std::string("/tmp/hsseg_test_cube.hsc");
  io::write_cube(cube, path);

  std::ifstream is(path, std::ios::binary);
  char magic[4];
  is.read(magic, 4);
  CHECK(std::string(magic, 4) == "HSC1");
  is.close();

  auto back = io::read_cube(path);
  CHECK(back.geom == cube.geom);
  CHECK(back.p == cube.p);
  CHECK(back.data == cube.data);
}

TEST_CASE("label and weight CSV round trips") {
  auto g = GridGeometry::make(2, 2);
  LabelMap lm{g, 3, {0, 2, 1, 0}};
  io::write_labels_csv(lm, "/tmp/hsseg_test_labels.csv");
  auto lm2 = io::read_labels_csv("/tmp/hsseg_test_labels.csv", g, 3);
  CHECK(lm2.labels == lm.labels);

  WeightField wf{g, 2, {0.5, 0.5, 1.0, 0.0, 0.0, 1.0, 0.125, 0.875}};
  io::write_weights_csv(wf, "/tmp/hsseg_test_weights.csv");
  auto wf2 = io::read_weights_csv("/tmp/hsseg_test_weights.csv", g);
  CHECK(wf2.K == 2);
  CHECK(wf2.weights == wf.weights);
}

TEST_CASE("counter rng determinism and splitting") {
  CounterRng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  bool differs = false;
  CounterRng a2(42, 7);
  for (int i = 0; i < 100; ++i)
    if (a2.next_u64() != c.next_u64()) differs = true;
  CHECK(differs);
}
