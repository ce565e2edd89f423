// hsseg: generate, learn, segment, evaluate and sweep hyperspectral
// segmentation experiments. See README.md for the config schema.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hsseg/cli.hpp"
#include "hsseg/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"hyperspectral segmentation toolkit"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (env HSSEG_THREADS)");

  std::string config, out, train, model, cube, pred, truth, oracle, report;
  bool exact_scan = false;
  double penalty_scale = 1.0;
  int eval_d = 2;

  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--config", config, "experiment config JSON")->required();
  gen->add_option("--out", out, "output directory")->required();

  auto* lrn = app.add_subcommand("learn", "fit class densities from a training set");
  lrn->add_option("--train", train, "training CSV (or directory with train.csv)")
      ->required();
  lrn->add_option("--out", model, "output model JSON")->required();

  auto* seg = app.add_subcommand("segment", "estimate weights and labels");
  seg->add_option("--cube", cube, "HSC1 cube")->required();
  seg->add_option("--model", model, "class model JSON")->required();
  seg->add_option("--out", out, "output directory")->required();
  seg->add_flag("--exact-scan", exact_scan,
                "exhaustive per-cell grid scan instead of ternary search");
  seg->add_option("--penalty-scale", penalty_scale,
                  "multiplier on the 4*pen term");

  auto* ev = app.add_subcommand("eval", "compare predicted labels against truth");
  ev->add_option("--pred", pred, "predicted labels CSV")->required();
  ev->add_option("--truth", truth, "true labels CSV")->required();
  ev->add_option("--oracle", oracle, "oracle labels CSV (adds excess risk)");
  ev->add_option("--out", report, "report JSON path (default stdout)");
  ev->add_option("--dim", eval_d, "spatial dimension d")->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "run a one-axis experiment sweep");
  sw->add_option("--config", config, "sweep config JSON")->required();
  sw->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);
  if (threads >= 1) hsseg::set_threads(threads);

  try {
    if (gen->parsed()) return hsseg::cli::run_gen(config, out);
    if (lrn->parsed()) return hsseg::cli::run_learn(train, model);
    if (seg->parsed())
      return hsseg::cli::run_segment(cube, model, out, exact_scan, penalty_scale);
    if (ev->parsed())
      return hsseg::cli::run_eval(pred, truth, oracle, report, eval_d);
    if (sw->parsed()) return hsseg::cli::run_sweep(config, out);
  } catch (const hsseg::IoError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  } catch (const hsseg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
