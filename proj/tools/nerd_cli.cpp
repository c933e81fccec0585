#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "nerd/evaluation.hpp"
#include "nerd/image.hpp"
#include "nerd/pipeline.hpp"
#include "nerd/rng.hpp"
#include "nerd/slic.hpp"

namespace {

struct GlobalArgs {
  uint64_t seed = 1;
  std::string config;
  bool verbose = false;
};

void add_pipeline_flags(CLI::App* cmd, nerd::PipelineConfig& cfg) {
  cmd->add_option("--bank", cfg.bank_path, "NERD-FB filter bank file");
  cmd->add_option("--filters", cfg.filter_count, "generated filter count");
  cmd->add_option("--kernel", cfg.kernel_size, "generated kernel size");
  cmd->add_option("--connectivity", cfg.connectivity, "synaptic connectivity p")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--stride", cfg.block.conv_stride, "convolution stride");
  cmd->add_option("--superpixels", cfg.hierarchy.superpixels,
                  "SLIC element count per layer");
  cmd->add_option("--compactness", cfg.hierarchy.slic_compactness,
                  "SLIC compactness");
  cmd->add_option("--sigma2", cfg.hierarchy.fixed_sigma2,
                  "fixed divergence sigma^2 (0 = auto)");
  cmd->add_option("--atoms", cfg.hierarchy.atom_counts,
                  "hierarchy atom counts (increasing)");
  std::map<std::string, nerd::FilterKind> kinds{
      {"gabor", nerd::FilterKind::kGabor},
      {"random", nerd::FilterKind::kRandom}};
  cmd->add_option("--kind", cfg.bank_kind, "generated bank kind")
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
}

// Config file first, then flags override.
void finalize_config(const GlobalArgs& global, const CLI::App* cmd,
                     nerd::PipelineConfig& cfg) {
  if (global.config.empty()) return;
  nerd::PipelineConfig from_file = cfg;
  nerd::apply_config_file(from_file, global.config);
  // re-apply any flag the user actually passed
  nerd::PipelineConfig flags = cfg;
  cfg = from_file;
  auto passed = [&](const std::string& name) {
    auto* opt = cmd->get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  if (passed("--bank")) cfg.bank_path = flags.bank_path;
  if (passed("--filters")) cfg.filter_count = flags.filter_count;
  if (passed("--kernel")) cfg.kernel_size = flags.kernel_size;
  if (passed("--connectivity")) cfg.connectivity = flags.connectivity;
  if (passed("--stride")) cfg.block.conv_stride = flags.block.conv_stride;
  if (passed("--superpixels"))
    cfg.hierarchy.superpixels = flags.hierarchy.superpixels;
  if (passed("--compactness"))
    cfg.hierarchy.slic_compactness = flags.hierarchy.slic_compactness;
  if (passed("--sigma2"))
    cfg.hierarchy.fixed_sigma2 = flags.hierarchy.fixed_sigma2;
  if (passed("--atoms")) cfg.hierarchy.atom_counts = flags.hierarchy.atom_counts;
  if (passed("--kind")) cfg.bank_kind = flags.bank_kind;
}

int cmd_detect(const GlobalArgs& global, const nerd::PipelineConfig& cfg,
               const std::string& input, const std::string& output,
               const std::string& dump_seg) {
  nerd::Image img = nerd::load_image(input);
  nerd::FilterBank bank = nerd::make_filter_bank(cfg);
  nerd::StageTimes times;
  nerd::SaliencyMap map = nerd::run_pipeline(img, bank, cfg, &times);
  nerd::save_gray(map.values, map.width, map.height, output);

  if (!dump_seg.empty()) {
    nerd::LabImage lab = nerd::rgb_to_lab(nerd::ensure_rgb(img));
    nerd::SuperpixelSegmentation seg =
        nerd::slic(lab, cfg.hierarchy.superpixels,
                   cfg.hierarchy.slic_compactness, cfg.hierarchy.slic_iterations);
    nerd::save_labels_pgm16(seg.labels, seg.width, seg.height, dump_seg);
  }

  std::printf("features      %.3fs\n", times.features);
  std::printf("segmentation  %.3fs\n", times.segmentation);
  std::printf("salience      %.3fs\n", times.salience);
  std::printf("total         %.3fs\n", times.total);
  if (global.verbose)
    std::printf("bank: l=%d %dx%d p=%.2f seed=%llu\n", bank.count, bank.kh,
                bank.kw, bank.connectivity,
                static_cast<unsigned long long>(bank.seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NeRD saliency detection"};
  app.require_subcommand(1);

  GlobalArgs global;
  app.add_option("--seed", global.seed, "root seed for all stochastic stages");
  app.add_option("--config", global.config, "key=value config file");
  app.add_flag("--verbose", global.verbose, "extra diagnostics");

  nerd::PipelineConfig cfg;

  // detect
  std::string in_path, out_path = "saliency.png", dump_seg;
  auto* detect = app.add_subcommand("detect", "compute a saliency map");
  detect->add_option("input", in_path, "input image (PNG/PPM/PGM)")->required();
  detect->add_option("--out", out_path, "output saliency image");
  detect->add_option("--dump-segmentation", dump_seg, "label map as 16-bit PGM");
  add_pipeline_flags(detect, cfg);

  // eval
  std::string img_dir, gt_dir, report_path = "report.csv", pr_path;
  int jobs = 1;
  auto* eval = app.add_subcommand("eval", "evaluate over a dataset");
  eval->add_option("images", img_dir, "image directory")->required();
  eval->add_option("gts", gt_dir, "ground-truth directory")->required();
  eval->add_option("--report", report_path, "per-image report CSV");
  eval->add_option("--pr", pr_path, "dataset-mean PR curve CSV");
  eval->add_option("--jobs", jobs, "parallel image workers")
      ->check(CLI::PositiveNumber);
  add_pipeline_flags(eval, cfg);

  // bench
  std::string bench_in, bench_csv = "bench.csv";
  std::vector<double> sweep = {0.25, 0.75, 1.0};
  int reps = 5;
  auto* bench = app.add_subcommand("bench", "benchmark connectivity levels");
  bench->add_option("input", bench_in, "input image")->required();
  bench->add_option("--out", bench_csv, "bench report CSV");
  bench->add_option("--connectivity-sweep", sweep, "connectivity levels");
  bench->add_option("--reps", reps, "timing repetitions (min 5)");
  add_pipeline_flags(bench, cfg);

  // genfilters
  std::string gen_out = "bank.nerdfb";
  int gen_count = 96, gen_size = 11;
  nerd::FilterKind gen_kind = nerd::FilterKind::kGabor;
  auto* gen = app.add_subcommand("genfilters", "write a NERD-FB filter bank");
  gen->add_option("--out", gen_out, "output file");
  gen->add_option("--count", gen_count, "filter count")->check(CLI::PositiveNumber);
  gen->add_option("--size", gen_size, "kernel size")->check(CLI::PositiveNumber);
  std::map<std::string, nerd::FilterKind> kinds{
      {"gabor", nerd::FilterKind::kGabor},
      {"random", nerd::FilterKind::kRandom}};
  gen->add_option("--kind", gen_kind, "filter kind")
      ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.seed = global.seed;

    if (detect->parsed()) {
      finalize_config(global, detect, cfg);
      return cmd_detect(global, cfg, in_path, out_path, dump_seg);
    }
    if (eval->parsed()) {
      finalize_config(global, eval, cfg);
      nerd::DatasetReport report =
          nerd::evaluate_dataset(img_dir, gt_dir, cfg, jobs);
      int valid = 0;
      for (const auto& r : report.images)
        if (r.error.empty())
          ++valid;
        else
          std::fprintf(stderr, "skipped %s: %s\n", r.name.c_str(),
                       r.error.c_str());
      if (valid == 0) {
        std::fprintf(stderr, "no valid image/ground-truth pairs\n");
        return 1;
      }
      nerd::write_report_csv(report, report_path);
      if (!pr_path.empty()) nerd::write_pr_csv(report.mean_curve, pr_path);
      std::printf("%d images  mean auc_pr=%.4f auc_roc=%.4f max_f=%.4f  %.3fs/img\n",
                  valid, report.mean_auc_pr, report.mean_auc_roc,
                  report.mean_max_f, report.mean_seconds);
      return 0;
    }
    if (bench->parsed()) {
      finalize_config(global, bench, cfg);
      nerd::Image img = nerd::load_image(bench_in);
      auto reports = nerd::bench_pipeline(img, cfg, sweep, reps);
      nerd::write_bench_csv(reports, bench_csv);
      for (const auto& r : reports)
        std::printf("p=%.2f  macs %llu/%llu (%.4f)  features %.3fs  total %.3fs\n",
                    r.connectivity,
                    static_cast<unsigned long long>(r.macs_actual),
                    static_cast<unsigned long long>(r.macs_dense),
                    static_cast<double>(r.macs_actual) / r.macs_dense,
                    r.median_times.features, r.median_times.total);
      return 0;
    }
    if (gen->parsed()) {
      nerd::FilterBank bank = nerd::generate_filter_bank(
          gen_count, gen_size, gen_size, gen_kind, 1.0,
          nerd::split_seed(global.seed, "filter-bank"));
      nerd::export_filter_bank(bank, gen_out);
      std::printf("wrote %s (l=%d c=%d %dx%d)\n", gen_out.c_str(), bank.count,
                  bank.in_channels, bank.kh, bank.kw);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
