#pragma once

// File formats:
//   HSC1   binary cube: magic "HSC1", little-endian u32 d, side, p,
//          then N*p float32 values, pixel-major.
//   CSV    label maps ("label" header) and weight fields ("w0,w1,..."),
//          one row per pixel in linearization order; training sets as
//          "class,b0,...".
//   JSON   class models, mixlet fits and metric reports.

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsseg/core.hpp"
#include "hsseg/divergence.hpp"
#include "hsseg/errors.hpp"
#include "hsseg/learn.hpp"
#include "hsseg/mixlet.hpp"

namespace hsseg::io {

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("truncated HSC1 header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

static_assert(std::endian::native == std::endian::little,
              "HSC1 float I/O assumes a little-endian host");

}  // namespace detail

inline void write_cube(const HyperCube& cube, const std::string& path) {
  validate_cube(cube);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path);
  os.write("HSC1", 4);
  detail::put_u32(os, static_cast<std::uint32_t>(cube.geom.d));
  detail::put_u32(os, static_cast<std::uint32_t>(cube.geom.side));
  detail::put_u32(os, static_cast<std::uint32_t>(cube.p));
  std::vector<float> buf(cube.data.begin(), cube.data.end());
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!os) throw IoError("write failed: " + path);
}

inline HyperCube read_cube(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "HSC1", 4) != 0)
    throw IoError("bad HSC1 magic in " + path);
  int d = static_cast<int>(detail::get_u32(is));
  int side = static_cast<int>(detail::get_u32(is));
  int p = static_cast<int>(detail::get_u32(is));
  HyperCube cube;
  cube.geom = GridGeometry::make(d, side);
  cube.p = p;
  std::vector<float> buf(cube.geom.N * p);
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!is) throw IoError("truncated HSC1 payload in " + path);
  cube.data.assign(buf.begin(), buf.end());
  validate_cube(cube);
  return cube;
}

inline void write_labels_csv(const LabelMap& lm, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os << "label\n";
  for (int v : lm.labels) os << v << "\n";
}

inline LabelMap read_labels_csv(const std::string& path,
                                const GridGeometry& geom, int K) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  LabelMap lm;
  lm.geom = geom;
  lm.K = K;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    lm.labels.push_back(std::stoi(line));
  }
  lm.validate();
  return lm;
}

inline void write_weights_csv(const WeightField& wf, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  for (int k = 0; k < wf.K; ++k) os << (k ? "," : "") << "w" << k;
  os << "\n";
  os.precision(17);
  for (std::int64_t i = 0; i < wf.geom.N; ++i) {
    for (int k = 0; k < wf.K; ++k) os << (k ? "," : "") << wf.at(i, k);
    os << "\n";
  }
}

inline WeightField read_weights_csv(const std::string& path,
                                    const GridGeometry& geom) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty weights csv");
  int K = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
  WeightField wf;
  wf.geom = geom;
  wf.K = K;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) wf.weights.push_back(std::stod(tok));
  }
  wf.validate();
  return wf;
}

inline void write_training_csv(const learn::TrainingSet& ts,
                               const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path);
  os << "class";
  for (int j = 0; j < ts.p; ++j) os << ",b" << j;
  os << "\n";
  os.precision(17);
  for (int s = 0; s < ts.n(); ++s) {
    os << ts.labels[s];
    for (double v : ts.spectra[s]) os << "," << v;
    os << "\n";
  }
}

inline learn::TrainingSet read_training_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  learn::TrainingSet ts;
  ts.K = 0;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      // Optional header starting with a non-numeric token.
      if (!line.empty() && !(std::isdigit(line[0]) || line[0] == '-')) continue;
    }
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    int y = std::stoi(tok);
    std::vector<double> z;
    while (std::getline(ss, tok, ',')) z.push_back(std::stod(tok));
    ts.K = std::max(ts.K, y + 1);
    ts.p = static_cast<int>(z.size());
    ts.labels.push_back(y);
    ts.spectra.push_back(std::move(z));
  }
  ts.K = std::max(ts.K, 2);
  ts.validate();
  return ts;
}

inline nlohmann::json model_to_json(const learn::ClassModel& m) {
  return {{"K", m.K},        {"p", m.p},          {"support", m.support},
          {"threshold", m.threshold_used}, {"means", m.means}, {"var", m.var}};
}

inline learn::ClassModel model_from_json(const nlohmann::json& j) {
  learn::ClassModel m;
  m.K = j.at("K");
  m.p = j.at("p");
  m.support = j.at("support").get<std::vector<int>>();
  m.threshold_used = j.at("threshold");
  m.means = j.at("means").get<std::vector<std::vector<double>>>();
  m.var = j.at("var").get<std::vector<double>>();
  return m;
}

inline nlohmann::json tree_node_to_json(const mixlet::RdpTree& tree, int idx) {
  const auto& n = tree.nodes[idx];
  if (n.is_leaf) return {{"leaf", {{"weights", n.weights}}}};
  nlohmann::json kids = nlohmann::json::array();
  for (int c : n.children) kids.push_back(tree_node_to_json(tree, c));
  return {{"split", kids}};
}

inline nlohmann::json fit_to_json(const mixlet::MixletFit& fit) {
  return {{"objective", fit.objective},
          {"loglik", fit.loglik},
          {"penalty", fit.penalty},
          {"leaf_count", fit.tree.leaf_count()},
          {"tree", tree_node_to_json(fit.tree, 0)}};
}

inline nlohmann::json report_to_json(const divergence::MetricReport& r) {
  return {{"hamming", r.hamming},
          {"confusion", r.confusion},
          {"n_pixels", r.n_pixels}};
}

}  // namespace hsseg::io
