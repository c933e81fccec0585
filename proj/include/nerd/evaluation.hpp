#pragma once

#include <string>
#include <vector>

#include "nerd/pipeline.hpp"
#include "nerd/salience.hpp"

namespace nerd {

struct GroundTruthMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> labels;  // 0 or 1
};

struct PRPoint {
  int threshold;
  double precision;
  double recall;
};

// 256 points, one per integer threshold in [0,255].
struct PRCurve {
  std::vector<PRPoint> points;
};

struct RocPoint {
  double fpr;
  double tpr;
};

struct ImageResult {
  std::string name;
  double auc_pr = 0.0;
  double auc_roc = 0.0;
  double max_f = 0.0;
  double seconds = 0.0;
  PRCurve curve;
  std::string error;  // non-empty when the pair failed
};

struct DatasetReport {
  std::vector<ImageResult> images;
  PRCurve mean_curve;  // per-threshold mean over valid images
  double mean_auc_pr = 0.0;
  double mean_auc_roc = 0.0;
  double mean_max_f = 0.0;
  double mean_seconds = 0.0;
};

struct BenchReport {
  double connectivity = 0.0;
  uint64_t macs_actual = 0;
  uint64_t macs_dense = 0;
  StageTimes median_times;
};

// Loads a binary ground-truth mask (pixels > 127 are positive).
GroundTruthMask load_ground_truth(const std::string& path);

// The map is quantized to bytes via round(v*255); a pixel is predicted
// positive at threshold t iff its byte >= t. precision = 1 when nothing is
// predicted positive.
PRCurve pr_curve(const SaliencyMap& map, const GroundTruthMask& gt);
std::vector<RocPoint> roc_curve(const SaliencyMap& map,
                                const GroundTruthMask& gt);

// Trapezoidal area of precision over recall; for duplicate recall values the
// maximum precision is kept and the curve extends to recall 0 at its maximum
// precision.
double auc(const PRCurve& curve);
double auc_roc(const std::vector<RocPoint>& curve);

// (1+β²)PR / (β²P + R); 0 when the denominator vanishes.
double f_measure(double precision, double recall, double beta2 = 0.3);

// Runs the pipeline on every image with a same-stem mask in gt_dir. Failures
// are recorded per file and the run continues. jobs > 1 evaluates images in
// parallel; aggregation order is always sorted by filename.
DatasetReport evaluate_dataset(const std::string& image_dir,
                               const std::string& gt_dir,
                               const PipelineConfig& cfg, int jobs = 1);

// One report per connectivity level; stage times are medians over `reps`
// warm repetitions.
std::vector<BenchReport> bench_pipeline(const Image& img,
                                        const PipelineConfig& cfg,
                                        const std::vector<double>& connectivities,
                                        int reps = 5);

void write_report_csv(const DatasetReport& report, const std::string& path);
void write_pr_csv(const PRCurve& curve, const std::string& path);
void write_bench_csv(const std::vector<BenchReport>& reports,
                     const std::string& path);

}  // namespace nerd
