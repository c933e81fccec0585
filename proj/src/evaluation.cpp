#include "nerd/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>

namespace nerd {

namespace fs = std::filesystem;

namespace {

bool supported_ext(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

// TP/FP counts per quantized byte value; cumulative sums from 255 downward
// give the confusion matrix at every threshold at once.
struct ByteHistogram {
  long tp[256] = {0};
  long fp[256] = {0};
  long positives = 0;
  long negatives = 0;
};

ByteHistogram histogram(const SaliencyMap& map, const GroundTruthMask& gt) {
  if (map.width != gt.width || map.height != gt.height)
    throw std::invalid_argument("pr_curve: dimension mismatch");
  ByteHistogram h;
  for (size_t i = 0; i < map.values.size(); ++i) {
    int byte = static_cast<int>(std::lround(map.values[i] * 255.0f));
    byte = std::clamp(byte, 0, 255);
    if (gt.labels[i]) {
      ++h.tp[byte];
      ++h.positives;
    } else {
      ++h.fp[byte];
      ++h.negatives;
    }
  }
  if (h.positives == 0)
    throw std::invalid_argument("pr_curve: ground truth has no positive pixel");
  return h;
}

}  // namespace

GroundTruthMask load_ground_truth(const std::string& path) {
  Image img = load_image(path);
  GroundTruthMask gt;
  gt.width = img.width;
  gt.height = img.height;
  gt.labels.resize(img.pixel_count());
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    float v = img.channels == 1
                  ? img.data[i]
                  : (img.data[3 * i] + img.data[3 * i + 1] + img.data[3 * i + 2]) / 3.0f;
    gt.labels[i] = v > 0.5f ? 1 : 0;
  }
  return gt;
}

PRCurve pr_curve(const SaliencyMap& map, const GroundTruthMask& gt) {
  ByteHistogram h = histogram(map, gt);
  PRCurve curve;
  curve.points.resize(256);
  long tp = 0, fp = 0;
  for (int t = 255; t >= 0; --t) {
    tp += h.tp[t];
    fp += h.fp[t];
    double precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    double recall = static_cast<double>(tp) / h.positives;
    curve.points[t] = {t, precision, recall};
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const PRPoint& a, const PRPoint& b) { return a.threshold < b.threshold; });
  return curve;
}

std::vector<RocPoint> roc_curve(const SaliencyMap& map,
                                const GroundTruthMask& gt) {
  ByteHistogram h = histogram(map, gt);
  std::vector<RocPoint> curve(256);
  long tp = 0, fp = 0;
  for (int t = 255; t >= 0; --t) {
    tp += h.tp[t];
    fp += h.fp[t];
    curve[255 - t] = {
        h.negatives == 0 ? 0.0 : static_cast<double>(fp) / h.negatives,
        static_cast<double>(tp) / h.positives};
  }
  return curve;
}

double auc(const PRCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("auc: empty curve");
  // Max precision per distinct recall, plus the recall-0 extension.
  std::map<double, double> best;
  double max_precision = 0.0;
  for (const auto& p : curve.points) {
    auto [it, inserted] = best.emplace(p.recall, p.precision);
    if (!inserted) it->second = std::max(it->second, p.precision);
    max_precision = std::max(max_precision, p.precision);
  }
  best.emplace(0.0, max_precision);

  double area = 0.0;
  auto prev = best.begin();
  for (auto it = std::next(best.begin()); it != best.end(); ++it) {
    area += (it->first - prev->first) * (it->second + prev->second) / 2.0;
    prev = it;
  }
  return area;
}

double auc_roc(const std::vector<RocPoint>& curve) {
  std::vector<RocPoint> pts = curve;
  pts.push_back({0.0, 0.0});
  pts.push_back({1.0, 1.0});
  std::sort(pts.begin(), pts.end(), [](const RocPoint& a, const RocPoint& b) {
    return a.fpr != b.fpr ? a.fpr < b.fpr : a.tpr < b.tpr;
  });
  double area = 0.0;
  for (size_t i = 1; i < pts.size(); ++i)
    area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2.0;
  return area;
}

double f_measure(double precision, double recall, double beta2) {
  double denom = beta2 * precision + recall;
  if (denom == 0.0) return 0.0;
  return (1.0 + beta2) * precision * recall / denom;
}

DatasetReport evaluate_dataset(const std::string& image_dir,
                               const std::string& gt_dir,
                               const PipelineConfig& cfg, int jobs) {
  if (!fs::is_directory(image_dir))
    throw std::runtime_error("image directory not found: " + image_dir);
  if (!fs::is_directory(gt_dir))
    throw std::runtime_error("ground-truth directory not found: " + gt_dir);

  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(image_dir))
    if (entry.is_regular_file() && supported_ext(entry.path()))
      images.push_back(entry.path());
  std::sort(images.begin(), images.end());

  FilterBank bank = make_filter_bank(cfg);

  DatasetReport report;
  report.images.resize(images.size());

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t i = next.fetch_add(1); i < images.size(); i = next.fetch_add(1)) {
      ImageResult& r = report.images[i];
      r.name = images[i].filename().string();
      try {
        fs::path gt_path;
        std::string stem = images[i].stem().string();
        for (const char* ext : {".png", ".pgm", ".ppm", ".pnm"}) {
          fs::path cand = fs::path(gt_dir) / (stem + ext);
          if (fs::exists(cand)) {
            gt_path = cand;
            break;
          }
        }
        if (gt_path.empty())
          throw std::runtime_error("no ground-truth mask for " + stem);

        Image img = load_image(images[i].string());
        GroundTruthMask gt = load_ground_truth(gt_path.string());
        if (gt.width != img.width || gt.height != img.height)
          throw std::runtime_error("ground-truth dimensions mismatch for " + stem);

        StageTimes times;
        SaliencyMap map = run_pipeline(img, bank, cfg, &times);
        r.curve = pr_curve(map, gt);
        r.auc_pr = auc(r.curve);
        r.auc_roc = auc_roc(roc_curve(map, gt));
        for (const auto& p : r.curve.points)
          r.max_f = std::max(r.max_f, f_measure(p.precision, p.recall));
        r.seconds = times.total;
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregate over valid images, per threshold, in filename order.
  int valid = 0;
  report.mean_curve.points.resize(256);
  for (int t = 0; t < 256; ++t) report.mean_curve.points[t] = {t, 0.0, 0.0};
  for (const auto& r : report.images) {
    if (!r.error.empty()) continue;
    ++valid;
    report.mean_auc_pr += r.auc_pr;
    report.mean_auc_roc += r.auc_roc;
    report.mean_max_f += r.max_f;
    report.mean_seconds += r.seconds;
    for (int t = 0; t < 256; ++t) {
      report.mean_curve.points[t].precision += r.curve.points[t].precision;
      report.mean_curve.points[t].recall += r.curve.points[t].recall;
    }
  }
  if (valid > 0) {
    report.mean_auc_pr /= valid;
    report.mean_auc_roc /= valid;
    report.mean_max_f /= valid;
    report.mean_seconds /= valid;
    for (auto& p : report.mean_curve.points) {
      p.precision /= valid;
      p.recall /= valid;
    }
  }
  return report;
}

std::vector<BenchReport> bench_pipeline(const Image& img,
                                        const PipelineConfig& cfg,
                                        const std::vector<double>& connectivities,
                                        int reps) {
  if (connectivities.empty())
    throw std::invalid_argument("bench_pipeline: need at least one connectivity");
  for (double p : connectivities)
    if (p < 0.0 || p > 1.0)
      throw std::invalid_argument("bench_pipeline: connectivity outside [0,1]");
  reps = std::max(5, reps);

  Image rgb = ensure_rgb(img);
  std::vector<BenchReport> reports;
  for (double p : connectivities) {
    PipelineConfig level = cfg;
    level.connectivity = p;
    FilterBank bank = make_filter_bank(level);

    MacCounts macs;
    forward_block(rgb, bank, level.block, &macs);  // warmup + MAC census

    std::vector<StageTimes> runs(reps);
    for (int r = 0; r < reps; ++r) run_pipeline(rgb, bank, level, &runs[r]);

    auto median_of = [&](auto field) {
      std::vector<double> v(runs.size());
      for (size_t i = 0; i < runs.size(); ++i) v[i] = runs[i].*field;
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };

    BenchReport rep;
    rep.connectivity = p;
    rep.macs_actual = macs.actual;
    rep.macs_dense = macs.dense;
    rep.median_times.features = median_of(&StageTimes::features);
    rep.median_times.segmentation = median_of(&StageTimes::segmentation);
    rep.median_times.salience = median_of(&StageTimes::salience);
    rep.median_times.total = median_of(&StageTimes::total);
    reports.push_back(rep);
  }
  return reports;
}

void write_report_csv(const DatasetReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << "file,auc_pr,auc_roc,max_f,seconds,error\n";
  out.precision(9);
  for (const auto& r : report.images) {
    if (r.error.empty())
      out << r.name << "," << r.auc_pr << "," << r.auc_roc << "," << r.max_f
          << "," << r.seconds << ",\n";
    else
      out << r.name << ",,,,," << r.error << "\n";
  }
  out << "aggregate," << report.mean_auc_pr << "," << report.mean_auc_roc
      << "," << report.mean_max_f << "," << report.mean_seconds << ",\n";
}

void write_pr_csv(const PRCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write PR curve: " + path);
  out << "threshold,precision,recall\n";
  out.precision(9);
  for (const auto& p : curve.points)
    out << p.threshold << "," << p.precision << "," << p.recall << "\n";
}

void write_bench_csv(const std::vector<BenchReport>& reports,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write bench report: " + path);
  out << "p,stage,macs_actual,macs_dense,seconds_median\n";
  out.precision(9);
  for (const auto& r : reports) {
    out << r.connectivity << ",features," << r.macs_actual << ","
        << r.macs_dense << "," << r.median_times.features << "\n";
    out << r.connectivity << ",segmentation,,," << r.median_times.segmentation
        << "\n";
    out << r.connectivity << ",salience,,," << r.median_times.salience << "\n";
    out << r.connectivity << ",total,,," << r.median_times.total << "\n";
  }
}

}  // namespace nerd
