#pragma once

// Command implementations behind the hsseg CLI: gen, learn, segment,
// eval and sweep. Kept header-side so the test suite can drive them
// in-process; tools/hsseg.cpp only parses arguments.
//
// Exit codes: 0 success, 2 validation/config error, 1 internal error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsseg/core.hpp"
#include "hsseg/divergence.hpp"
#include "hsseg/errors.hpp"
#include "hsseg/io.hpp"
#include "hsseg/learn.hpp"
#include "hsseg/mixlet.hpp"
#include "hsseg/plugin.hpp"
#include "hsseg/synth.hpp"

namespace hsseg::cli {

struct ExperimentConfig {
  synth::SceneSpec scene;
  synth::SignalSpec signal;
  std::vector<int> train_counts;  // empty: use the true model, no learning
  std::vector<std::uint64_t> seeds;
  std::string sweep_axis;          // "", "N", "n" or "p"
  std::vector<std::int64_t> sweep_values;
};

inline synth::SceneKind scene_kind_from(const std::string& s) {
  if (s == "constant") return synth::SceneKind::Constant;
  if (s == "half-plane") return synth::SceneKind::HalfPlane;
  if (s == "boundary-fragment") return synth::SceneKind::BoundaryFragment;
  if (s == "nested-squares") return synth::SceneKind::NestedSquares;
  throw ConfigParse("unknown scene kind '" + s + "'");
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    if (j.value("schema", 1) != 1) throw ConfigParse("unsupported schema");
    int d = j.at("geom").value("d", 2);
    int side = j.at("geom").at("side");
    if (side < 1 || (side & (side - 1)) != 0)
      throw ConfigParse("geom.side must be a power of two (got " +
                        std::to_string(side) + ")");
    cfg.scene.geom = GridGeometry::make(d, side);
    cfg.scene.K = j.value("K", 2);
    const auto& sc = j.at("scene");
    cfg.scene.kind = scene_kind_from(sc.value("kind", "half-plane"));
    cfg.scene.lipschitz = sc.value("lipschitz", 1.0);
    cfg.scene.mixing = sc.value("mixing", "pure") == std::string("soft")
                           ? synth::Mixing::Soft
                           : synth::Mixing::Pure;
    cfg.scene.soft_min = sc.value("soft_min", 0.0);
    cfg.scene.soft_max = sc.value("soft_max", 1.0);
    const auto& sig = j.at("signal");
    cfg.signal.p = sig.at("p");
    cfg.signal.p0 = sig.at("p0");
    cfg.signal.separation = sig.value("separation", 1.0);
    cfg.signal.var = sig.value("var", 1.0);
    if (j.contains("train"))
      cfg.train_counts = j.at("train").at("counts").get<std::vector<int>>();
    if (j.contains("seeds"))
      cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    else
      cfg.seeds = {j.value("seed", std::uint64_t{0})};
    if (cfg.seeds.empty()) throw ConfigParse("seeds must be non-empty");
    if (j.contains("sweep")) {
      cfg.sweep_axis = j.at("sweep").at("axis");
      cfg.sweep_values =
          j.at("sweep").at("values").get<std::vector<std::int64_t>>();
      if (cfg.sweep_axis != "N" && cfg.sweep_axis != "n" &&
          cfg.sweep_axis != "p")
        throw ConfigParse("sweep.axis must be one of N, n, p");
    }
    cfg.scene.seed = cfg.seeds[0];
    cfg.scene.validate();
    cfg.signal.validate(cfg.scene.K);
  } catch (const ConfigParse&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParse(e.what());
  } catch (const Error& e) {
    throw ConfigParse(e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigParse(e.what());
  }
  return parse_config(j);
}

inline int run_gen(const std::string& config_path, const std::string& out_dir) {
  auto cfg = load_config(config_path);
  std::filesystem::create_directories(out_dir);
  auto wf = synth::make_weight_field(cfg.scene);
  auto [cube, labels] = synth::sample_cube(wf, cfg.signal, cfg.scene.seed);
  io::write_cube(cube, out_dir + "/cube.hsc");
  io::write_labels_csv(labels, out_dir + "/truth_labels.csv");
  io::write_weights_csv(wf, out_dir + "/truth_weights.csv");
  if (!cfg.train_counts.empty()) {
    auto ts = synth::sample_training_set(cfg.signal, cfg.train_counts,
                                         cfg.scene.seed);
    io::write_training_csv(ts, out_dir + "/train.csv");
  }
  std::ifstream is(config_path);
  nlohmann::json j;
  is >> j;
  j["seed_used"] = cfg.scene.seed;
  std::ofstream os(out_dir + "/spec.json");
  os << j.dump(2) << "\n";
  return 0;
}

inline int run_learn(const std::string& train_path, const std::string& out_model) {
  std::string csv = train_path;
  if (std::filesystem::is_directory(train_path)) csv = train_path + "/train.csv";
  auto ts = io::read_training_csv(csv);
  auto model = learn::fit(ts);
  std::ofstream os(out_model);
  if (!os) throw IoError("cannot open " + out_model);
  os << io::model_to_json(model).dump(2) << "\n";
  return 0;
}

inline int run_segment(const std::string& cube_path,
                       const std::string& model_path,
                       const std::string& out_dir, bool exact_scan,
                       double penalty_scale) {
  auto cube = io::read_cube(cube_path);
  std::ifstream is(model_path);
  if (!is) throw IoError("cannot open " + model_path);
  nlohmann::json j;
  is >> j;
  auto model = io::model_from_json(j);
  std::filesystem::create_directories(out_dir);

  auto grid = mixlet::WeightGrid::for_image(cube.geom.N);
  mixlet::FitOptions opt;
  opt.exact_scan = exact_scan;
  opt.penalty_scale = penalty_scale;
  auto t0 = std::chrono::steady_clock::now();
  auto fit = mixlet::fit(cube, model, grid, opt);
  auto labels = plugin::decide(cube, model, fit.weights);
  auto t1 = std::chrono::steady_clock::now();

  io::write_weights_csv(fit.weights, out_dir + "/weights.csv");
  io::write_labels_csv(labels, out_dir + "/labels.csv");
  nlohmann::json fj = io::fit_to_json(fit);
  fj["runtime_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
  std::ofstream os(out_dir + "/fit.json");
  os << fj.dump(2) << "\n";
  return 0;
}

namespace detail {

// Label CSVs carry no geometry; recover side from the row count for the
// given spatial dimension.
inline std::vector<int> read_label_column(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  std::getline(is, line);  // header
  std::vector<int> labels;
  while (std::getline(is, line))
    if (!line.empty()) labels.push_back(std::stoi(line));
  return labels;
}

inline GridGeometry geom_for_rows(std::size_t n, int d) {
  double side = std::pow(static_cast<double>(n), 1.0 / d);
  int s = static_cast<int>(std::llround(side));
  auto geom = GridGeometry::make(d, s);
  if (geom.N != static_cast<std::int64_t>(n))
    throw GeometryMismatch("row count " + std::to_string(n) +
                           " is not side^d for d=" + std::to_string(d));
  return geom;
}

}  // namespace detail

inline int run_eval(const std::string& pred_path, const std::string& truth_path,
                    const std::string& oracle_path, const std::string& out_path,
                    int d = 2) {
  auto pred_col = detail::read_label_column(pred_path);
  auto truth_col = detail::read_label_column(truth_path);
  auto geom = detail::geom_for_rows(truth_col.size(), d);
  int K = 2;
  for (int v : pred_col) K = std::max(K, v + 1);
  for (int v : truth_col) K = std::max(K, v + 1);
  if (!oracle_path.empty())
    for (int v : detail::read_label_column(oracle_path)) K = std::max(K, v + 1);
  LabelMap pred{geom, K, pred_col};
  LabelMap truth{geom, K, truth_col};
  pred.validate();
  truth.validate();
  auto report = divergence::confusion_report(pred, truth);
  nlohmann::json j = io::report_to_json(report);
  if (!oracle_path.empty()) {
    LabelMap oracle{geom, K, detail::read_label_column(oracle_path)};
    oracle.validate();
    j["excess_risk"] = plugin::excess_risk(pred, oracle, truth);
  }
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream os(out_path);
    os << j.dump(2) << "\n";
  }
  return 0;
}

struct SweepRow {
  std::int64_t axis_value = 0;
  std::uint64_t seed = 0;
  double hamming = 0.0;
  double excess = 0.0;
  std::int64_t leaf_count = 0;
  std::size_t support_size = 0;
  double runtime_ms = 0.0;
};

// One gen -> learn -> segment -> eval pipeline cell. When no training
// counts are configured the true densities are used, isolating the
// segmentation step.
inline SweepRow run_cell(ExperimentConfig cfg, std::int64_t axis_value,
                         std::uint64_t seed) {
  if (cfg.sweep_axis == "N") {
    int side = static_cast<int>(std::llround(
        std::sqrt(static_cast<double>(axis_value))));
    cfg.scene.geom = GridGeometry::make(cfg.scene.geom.d, side);
  } else if (cfg.sweep_axis == "p") {
    cfg.signal.p = static_cast<int>(axis_value);
  }
  cfg.scene.seed = seed;
  auto wf = synth::make_weight_field(cfg.scene);
  auto [cube, truth] = synth::sample_cube(wf, cfg.signal, seed);
  auto true_model = synth::true_class_model(cfg.signal, cfg.scene.K);

  learn::ClassModel model = true_model;
  if (!cfg.train_counts.empty() || cfg.sweep_axis == "n") {
    std::vector<int> counts = cfg.train_counts;
    if (cfg.sweep_axis == "n") {
      int per = static_cast<int>(axis_value) / cfg.scene.K;
      counts.assign(cfg.scene.K, std::max(2, per));
    }
    auto ts = synth::sample_training_set(cfg.signal, counts, seed ^ 0x7261696EULL);
    model = learn::fit(ts);
  }

  auto t0 = std::chrono::steady_clock::now();
  auto grid = mixlet::WeightGrid::for_image(cube.geom.N);
  auto fit = mixlet::fit(cube, model, grid);
  auto pred = plugin::decide(cube, model, fit.weights);
  auto t1 = std::chrono::steady_clock::now();
  auto oracle = plugin::oracle_decide(cube, true_model, wf);

  SweepRow row;
  row.axis_value = axis_value;
  row.seed = seed;
  row.hamming = divergence::hamming(pred, truth);
  row.excess = plugin::excess_risk(pred, oracle, truth);
  row.leaf_count = fit.tree.leaf_count();
  row.support_size = model.support.size();
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return row;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Least-squares slope of log(median metric) against log(axis transform).
inline double loglog_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= lx.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

inline int run_sweep(const std::string& config_path, const std::string& out_dir) {
  auto cfg = load_config(config_path);
  if (cfg.sweep_axis.empty()) throw ConfigParse("sweep requires a sweep block");
  std::filesystem::create_directories(out_dir);
  std::ofstream os(out_dir + "/results.csv");
  os << "axis,seed,hamming,excess_risk,leaf_count,support_size,runtime_ms\n";
  os.precision(17);

  std::vector<double> axis_medians_x, axis_medians_y;
  nlohmann::json summary;
  for (std::int64_t v : cfg.sweep_values) {
    std::vector<double> ham, exc;
    for (std::uint64_t seed : cfg.seeds) {
      SweepRow row = run_cell(cfg, v, seed);
      os << row.axis_value << "," << row.seed << "," << row.hamming << ","
         << row.excess << "," << row.leaf_count << "," << row.support_size
         << "," << row.runtime_ms << "\n";
      ham.push_back(row.hamming);
      exc.push_back(row.excess);
    }
    nlohmann::json m = {{"axis", v},
                        {"median_hamming", median(ham)},
                        {"median_excess", median(exc)}};
    summary["per_axis"].push_back(m);
    double x = v;
    if (cfg.sweep_axis == "N")
      x = std::log(static_cast<double>(v)) / static_cast<double>(v);
    axis_medians_x.push_back(x);
    axis_medians_y.push_back(std::max(median(exc), 0.0));
  }
  summary["loglog_slope"] = loglog_slope(axis_medians_x, axis_medians_y);
  std::ofstream ss(out_dir + "/summary.json");
  ss << summary.dump(2) << "\n";
  return 0;
}

}  // namespace hsseg::cli
