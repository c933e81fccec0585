// Acceptance suite: one pass/fail line per criterion. Exits nonzero if any
// criterion fails. argv[1] must be the path to the nerd CLI binary.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nerd/atoms.hpp"
#include "nerd/divergence.hpp"
#include "nerd/evaluation.hpp"
#include "nerd/filter_bank.hpp"
#include "nerd/forward.hpp"
#include "nerd/pipeline.hpp"
#include "nerd/rng.hpp"
#include "nerd/salience.hpp"
#include "test_util.hpp"

namespace {

int g_failures = 0;

void report(int id, const char* what, bool ok, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", id, what,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++g_failures;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_ppm(const nerd::Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  for (float v : img.data) out.put(static_cast<char>(std::lround(v * 255.0f)));
}

// 1. Sparse forward pass equals dense pass on pre-masked weights, bit-exact.
void criterion_sparse_dense() {
  nerd::SplitMix64 rng(2024);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    int w = 12 + static_cast<int>(rng.next() % 24);
    int h = 12 + static_cast<int>(rng.next() % 24);
    int l = 2 + static_cast<int>(rng.next() % 8);
    int k = 3 + 2 * static_cast<int>(rng.next() % 3);  // 3,5,7
    double p = rng.next_double();
    nerd::Image img = testutil::random_image(w, h, 3, rng.next());
    nerd::FilterBank sparse = nerd::generate_filter_bank(
        l, k, k, nerd::FilterKind::kRandom, p, rng.next());
    nerd::FilterBank dense = sparse;
    for (size_t i = 0; i < dense.weights.size(); ++i)
      dense.weights[i] *= dense.mask[i];
    std::fill(dense.mask.begin(), dense.mask.end(), 1);

    nerd::BlockConfig cfg;
    cfg.conv_stride = 1 + static_cast<int>(rng.next() % 3);
    nerd::ResponseTensor a = nerd::forward_block(img, sparse, cfg);
    nerd::ResponseTensor b = nerd::forward_block(img, dense, cfg);
    ok = a.data.size() == b.data.size() &&
         std::memcmp(a.data.data(), b.data.data(),
                     a.data.size() * sizeof(float)) == 0;
  }
  report(1, "sparse-dense exactness over 100 random instances", ok);
}

// 2. MAC ratio at p=0.25 and conv-stage timing direction on 400x300.
void criterion_mac_timing() {
  nerd::Image img = testutil::random_image(400, 300, 3, 7);
  nerd::BlockConfig cfg;

  nerd::FilterBank sparse = nerd::generate_filter_bank(
      96, 11, 11, nerd::FilterKind::kGabor, 0.25, 5);
  nerd::FilterBank full = nerd::generate_filter_bank(
      96, 11, 11, nerd::FilterKind::kGabor, 1.0, 5);

  nerd::MacCounts macs;
  nerd::forward_block(img, sparse, cfg, &macs);
  double ratio = static_cast<double>(macs.actual) / macs.dense;
  bool ratio_ok = ratio >= 0.24 && ratio <= 0.26;

  auto median_conv_time = [&](const nerd::FilterBank& bank) {
    std::vector<double> times;
    nerd::forward_block(img, bank, cfg);  // warm
    for (int r = 0; r < 5; ++r) {
      auto t0 = std::chrono::steady_clock::now();
      nerd::forward_block(img, bank, cfg);
      times.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
  };
  double t_sparse = median_conv_time(sparse);
  double t_full = median_conv_time(full);
  bool time_ok = t_sparse < t_full;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "MAC ratio %.4f; conv median %.3fs (p=0.25) vs %.3fs (p=1.0), "
                "measured reduction %.1f%%",
                ratio, t_sparse, t_full, 100.0 * (1.0 - t_sparse / t_full));
  report(2, "MAC proportionality and timing direction", ratio_ok && time_ok,
         detail);
}

// 3. build_atoms equals a brute-force per-element mean.
void criterion_atom_oracle() {
  nerd::SplitMix64 rng(31);
  bool ok = true;
  for (int trial = 0; trial < 100 && ok; ++trial) {
    int dim = 1 + static_cast<int>(rng.next() % 8);
    int m = 2 + static_cast<int>(rng.next() % 20);
    nerd::PixelFeatures f;
    f.width = f.height = 16;
    f.dim = dim;
    f.data.resize(256 * static_cast<size_t>(dim));
    for (auto& v : f.data) v = static_cast<float>(rng.next_double());

    nerd::SuperpixelSegmentation seg;
    seg.width = seg.height = 16;
    seg.count = m;
    seg.labels.resize(256);
    for (int i = 0; i < m; ++i) seg.labels[i] = i;
    for (int i = m; i < 256; ++i)
      seg.labels[i] = static_cast<int>(rng.next() % m);
    seg.pixel_count.assign(m, 0);
    for (int lbl : seg.labels) ++seg.pixel_count[lbl];

    nerd::AtomSet atoms = nerd::build_atoms(f, seg);
    for (int e = 0; e < m && ok; ++e) {
      std::vector<double> sum(dim, 0.0);
      for (int pIdx = 0; pIdx < 256; ++pIdx)
        if (seg.labels[pIdx] == e)
          for (int c = 0; c < dim; ++c) sum[c] += f.data[pIdx * dim + c];
      for (int c = 0; c < dim; ++c)
        if (std::abs(atoms.atoms[e][c] - sum[c] / seg.pixel_count[e]) >= 1e-9)
          ok = false;
    }
  }
  report(3, "element-mean oracle over 100 random feature maps", ok);
}

// 4. Divergence matrix properties over 1000 random atom sets.
void criterion_divergence_properties() {
  nerd::SplitMix64 rng(47);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    int n = 2 + static_cast<int>(rng.next() % 10);
    int dim = 1 + static_cast<int>(rng.next() % 8);
    nerd::SparseAtomSet s;
    s.dim = dim;
    for (int i = 0; i < n; ++i) {
      std::vector<double> v(dim);
      for (auto& x : v) x = static_cast<float>(rng.next_double() * 10.0 - 5.0);
      s.atoms.push_back(std::move(v));
      s.region_elements.push_back({i});
      s.region_pixels.push_back(1);
    }
    nerd::DivergenceParams params = nerd::estimate_sigma(s);
    nerd::DivergenceMatrix d = nerd::divergence_matrix(s, params);

    for (int i = 0; i < n && ok; ++i) {
      if (d.at(i, i) != 0.0) ok = false;
      for (int j = 0; j < n && ok; ++j) {
        if (d.at(i, j) != d.at(j, i)) ok = false;
        if (d.at(i, j) < 0.0 || d.at(i, j) >= 1.0) ok = false;
      }
    }
    if (!ok) break;

    // monotonicity: larger pair distance, larger beta
    for (int a = 0; a < n && ok; ++a)
      for (int b = a + 1; b < n && ok; ++b)
        for (int c = b + 1; c < n && ok; ++c) {
          auto dist = [&](int i, int j) {
            double t = 0.0;
            for (int q = 0; q < dim; ++q) {
              double diff = double(s.atoms[i][q]) - s.atoms[j][q];
              t += diff * diff;
            }
            return std::sqrt(t);
          };
          if (dist(a, b) < dist(a, c) && d.at(a, b) >= d.at(a, c)) ok = false;
        }

    // scale covariance of auto-sigma
    nerd::SparseAtomSet scaled = s;
    for (auto& v : scaled.atoms)
      for (auto& x : v) x *= 13.0f;
    nerd::DivergenceMatrix d2 =
        nerd::divergence_matrix(scaled, nerd::estimate_sigma(scaled));
    for (size_t i = 0; i < d.beta.size() && ok; ++i)
      if (std::abs(d.beta[i] - d2.beta[i]) > 1e-6) ok = false;
  }
  report(4, "divergence properties over 1000 random atom sets", ok);
}

// 5. layer_salience equals the direct double loop; size-weighting direction.
void criterion_salience_oracle() {
  nerd::SplitMix64 rng(59);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    int n = 2 + static_cast<int>(rng.next() % 49);
    nerd::SparseAtomSet s;
    s.dim = 3;
    for (int i = 0; i < n; ++i) {
      s.atoms.push_back({static_cast<float>(rng.next_double()),
                         static_cast<float>(rng.next_double()),
                         static_cast<float>(rng.next_double())});
      s.region_elements.push_back({i});
      s.region_pixels.push_back(1 + static_cast<long>(rng.next() % 999));
    }
    nerd::DivergenceMatrix d =
        nerd::divergence_matrix(s, nerd::estimate_sigma(s));
    nerd::SalienceScores scores = nerd::layer_salience(s, d);
    for (int i = 0; i < n && ok; ++i) {
      double expect = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) expect += static_cast<double>(s.region_pixels[j]) * d.at(i, j);
      if (scores.alpha[i] != expect) ok = false;  // exact, same accumulation
    }
  }

  // two-atom direction: smaller region scores higher for fixed beta
  bool direction = true;
  nerd::SplitMix64 rng2(61);
  for (int trial = 0; trial < 100 && direction; ++trial) {
    long small = 1 + static_cast<long>(rng2.next() % 100);
    long large = small + 1 + static_cast<long>(rng2.next() % 1000);
    nerd::SparseAtomSet s;
    s.dim = 1;
    s.atoms = {{0.0f}, {1.0f}};
    s.region_elements = {{0}, {1}};
    s.region_pixels = {small, large};
    nerd::DivergenceMatrix d =
        nerd::divergence_matrix(s, nerd::estimate_sigma(s));
    nerd::SalienceScores scores = nerd::layer_salience(s, d);
    if (!(scores.alpha[0] > scores.alpha[1])) direction = false;
  }
  report(5, "salience double-loop oracle and size-weighting direction",
         ok && direction);
}

// 6. Pipeline sanity on a 20-image textured-square corpus, default config.
void criterion_pipeline_sanity() {
  nerd::PipelineConfig cfg;  // defaults: gabor 96x11x11, p=0.25, {5..85}
  cfg.seed = 9;
  nerd::FilterBank bank = nerd::make_filter_bank(cfg);

  double auc_sum = 0.0;
  bool contrast_ok = true;
  const int images = 20;
  for (int i = 0; i < images; ++i) {
    nerd::Image mask;
    nerd::Image img = testutil::textured_square_image(1000 + i, &mask);
    nerd::SaliencyMap map = nerd::run_pipeline(img, bank, cfg);

    nerd::GroundTruthMask gt;
    gt.width = gt.height = 128;
    gt.labels.resize(mask.data.size());
    for (size_t p = 0; p < mask.data.size(); ++p)
      gt.labels[p] = mask.data[p] > 0.5f ? 1 : 0;
    auc_sum += nerd::auc(nerd::pr_curve(map, gt));

    double in_sum = 0.0, out_sum = 0.0;
    long in_n = 0, out_n = 0;
    for (size_t p = 0; p < map.values.size(); ++p) {
      if (gt.labels[p]) {
        in_sum += map.values[p];
        ++in_n;
      } else {
        out_sum += map.values[p];
        ++out_n;
      }
    }
    if (in_sum / in_n < 2.0 * (out_sum / out_n)) contrast_ok = false;
  }
  double mean_auc = auc_sum / images;
  char detail[96];
  std::snprintf(detail, sizeof(detail), "mean PR-AUC %.4f over %d images",
                mean_auc, images);
  report(6, "textured-square corpus: AUC >= 0.85 and 2x in-square salience",
         mean_auc >= 0.85 && contrast_ok, detail);
}

// 7. PR curve vs exhaustive confusion-matrix oracle; constant-map AUC.
void criterion_pr_oracle() {
  nerd::SplitMix64 rng(73);
  bool ok = true;
  for (int trial = 0; trial < 200 && ok; ++trial) {
    nerd::SaliencyMap map;
    map.width = map.height = 16;
    map.values.resize(256);
    for (auto& v : map.values) v = static_cast<float>(rng.next_double());
    nerd::GroundTruthMask gt;
    gt.width = gt.height = 16;
    gt.labels.resize(256);
    bool any = false;
    for (auto& g : gt.labels) {
      g = rng.next() % 2;
      any |= g;
    }
    if (!any) gt.labels[0] = 1;

    nerd::PRCurve curve = nerd::pr_curve(map, gt);
    for (int tau = 0; tau < 256 && ok; ++tau) {
      long tp = 0, fp = 0, fn = 0;
      for (size_t p = 0; p < map.values.size(); ++p) {
        bool pred = std::lround(map.values[p] * 255.0f) >= tau;
        if (pred && gt.labels[p]) ++tp;
        if (pred && !gt.labels[p]) ++fp;
        if (!pred && gt.labels[p]) ++fn;
      }
      double precision = (tp + fp) == 0 ? 1.0 : double(tp) / (tp + fp);
      double recall = double(tp) / (tp + fn);
      if (curve.points[tau].precision != precision) ok = false;
      if (curve.points[tau].recall != recall) ok = false;
    }
  }

  // constant map: AUC equals positive fraction within 1e-9
  nerd::SaliencyMap flat;
  flat.width = flat.height = 10;
  flat.values.assign(100, 1.0f);
  nerd::GroundTruthMask gt;
  gt.width = gt.height = 10;
  gt.labels.assign(100, 0);
  for (int i = 0; i < 37; ++i) gt.labels[i] = 1;
  double a = nerd::auc(nerd::pr_curve(flat, gt));
  bool const_ok = std::abs(a - 0.37) < 1e-9;

  report(7, "PR/AUC confusion-matrix oracle over 200 random pairs",
         ok && const_ok);
}

// 8. CLI determinism: detect maps bit-identical, eval CSVs identical
// across runs and across --jobs.
void criterion_cli_determinism(const std::string& cli) {
  testutil::TempDir tmp;
  nerd::Image mask;
  nerd::Image img = testutil::textured_square_image(5, &mask);
  write_ppm(img, tmp.file("in.ppm"));

  auto run = [&](const std::string& args) {
    std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  // small bank keeps the acceptance run quick; determinism is seed-driven
  std::string common = " --filters 16 --superpixels 100 --atoms 3 6 9";
  bool ran = run("--seed 5 detect " + tmp.file("in.ppm") + " --out " +
                 tmp.file("a.png") + common) &&
             run("--seed 5 detect " + tmp.file("in.ppm") + " --out " +
                 tmp.file("b.png") + common);
  bool detect_ok =
      ran && read_file(tmp.file("a.png")) == read_file(tmp.file("b.png")) &&
      !read_file(tmp.file("a.png")).empty();

  std::filesystem::create_directories(tmp.path / "img");
  std::filesystem::create_directories(tmp.path / "gt");
  for (int i = 0; i < 3; ++i) {
    nerd::Image m;
    nerd::Image im = testutil::textured_square_image(40 + i, &m);
    write_ppm(im, (tmp.path / "img" / ("x" + std::to_string(i) + ".ppm")).string());
    nerd::save_gray(m.data, 128, 128,
                    (tmp.path / "gt" / ("x" + std::to_string(i) + ".png")).string());
  }
  std::string eval_base = "--seed 7 eval " + (tmp.path / "img").string() + " " +
                          (tmp.path / "gt").string() + common;
  bool eval_ran =
      run(eval_base + " --jobs 1 --report " + tmp.file("r1.csv")) &&
      run(eval_base + " --jobs 1 --report " + tmp.file("r2.csv")) &&
      run(eval_base + " --jobs 4 --report " + tmp.file("r4.csv"));
  // Wall-clock column varies run to run; everything else must match exactly.
  auto strip_seconds = [](const std::string& csv) {
    std::string out;
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
      int commas = 0;
      std::size_t begin = std::string::npos, end = std::string::npos;
      for (std::size_t i = 0; i < line.size(); ++i)
        if (line[i] == ',' && ++commas == 4) begin = i;
        else if (line[i] == ',' && commas == 5) { end = i; break; }
      if (begin != std::string::npos && end != std::string::npos)
        line.erase(begin, end - begin);
      out += line + "\n";
    }
    return out;
  };
  std::string r1 = strip_seconds(read_file(tmp.file("r1.csv")));
  bool eval_ok = eval_ran && !r1.empty() &&
                 r1 == strip_seconds(read_file(tmp.file("r2.csv"))) &&
                 r1 == strip_seconds(read_file(tmp.file("r4.csv")));

  report(8, "CLI determinism (detect bit-identical, eval stable across jobs)",
         detect_ok && eval_ok);
}

// 9. Constant-color image yields the all-zero saliency map.
void criterion_uniform_degeneracy() {
  nerd::Image img;
  img.width = 96;
  img.height = 80;
  img.channels = 3;
  img.data.resize(img.pixel_count() * 3);
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    img.data[3 * i] = 0.3f;
    img.data[3 * i + 1] = 0.6f;
    img.data[3 * i + 2] = 0.2f;
  }
  nerd::PipelineConfig cfg;
  cfg.filter_count = 32;
  cfg.seed = 3;
  nerd::FilterBank bank = nerd::make_filter_bank(cfg);
  nerd::SaliencyMap map = nerd::run_pipeline(img, bank, cfg);
  bool ok = true;
  for (float v : map.values)
    if (v != 0.0f) ok = false;
  report(9, "uniform input yields the all-zero map", ok);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <path-to-nerd-cli>\n", argv[0]);
    return 2;
  }
  criterion_sparse_dense();
  criterion_mac_timing();
  criterion_atom_oracle();
  criterion_divergence_properties();
  criterion_salience_oracle();
  criterion_pipeline_sanity();
  criterion_pr_oracle();
  criterion_cli_determinism(argv[1]);
  criterion_uniform_degeneracy();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
