#include "nerd/slic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nerd {

namespace {

struct Center {
  double l, a, b, x, y;
  double sum_l, sum_a, sum_b, sum_x, sum_y;
  long size;
};

// Grid layout whose product best matches target_m; prefers more columns on
// ties so elongated targets split along the wider axis first.
std::pair<int, int> grid_dims(int w, int h, int target_m) {
  const double s = std::sqrt(static_cast<double>(w) * h / target_m);
  const auto candidates = [](int dim, double spacing) {
    int lo = std::max(1, static_cast<int>(std::floor(dim / spacing)));
    int hi = std::max(1, static_cast<int>(std::ceil(dim / spacing)));
    return std::pair<int, int>{std::min(lo, dim), std::min(hi, dim)};
  };
  auto [nx_lo, nx_hi] = candidates(w, s);
  auto [ny_lo, ny_hi] = candidates(h, s);
  int best_nx = nx_lo, best_ny = ny_lo;
  long best_err = std::numeric_limits<long>::max();
  for (int nx : {nx_lo, nx_hi}) {
    for (int ny : {ny_lo, ny_hi}) {
      long err = std::labs(static_cast<long>(nx) * ny - target_m);
      if (err < best_err || (err == best_err && nx > best_nx)) {
        best_err = err;
        best_nx = nx;
        best_ny = ny;
      }
    }
  }
  return {best_nx, best_ny};
}

// Reassigns every 4-connected fragment that is not the largest component of
// its label to the largest adjacent element.
void enforce_connectivity(SuperpixelSegmentation& seg) {
  const int w = seg.width, h = seg.height;
  const size_t n = static_cast<size_t>(w) * h;
  std::vector<int> comp(n, -1);
  std::vector<long> comp_size;
  std::vector<int> comp_label;
  std::vector<size_t> stack, members;

  for (size_t start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    const int cid = static_cast<int>(comp_size.size());
    const int lbl = seg.labels[start];
    long size = 0;
    stack.assign(1, start);
    comp[start] = cid;
    while (!stack.empty()) {
      size_t p = stack.back();
      stack.pop_back();
      ++size;
      const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
      const int nbs[4][2] = {{px - 1, py}, {px + 1, py}, {px, py - 1}, {px, py + 1}};
      for (auto& nb : nbs) {
        if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
        size_t q = static_cast<size_t>(nb[1]) * w + nb[0];
        if (comp[q] < 0 && seg.labels[q] == lbl) {
          comp[q] = cid;
          stack.push_back(q);
        }
      }
    }
    comp_size.push_back(size);
    comp_label.push_back(lbl);
  }

  // Keep the largest component per label.
  std::vector<int> keeper(seg.count, -1);
  for (size_t c = 0; c < comp_size.size(); ++c) {
    int lbl = comp_label[c];
    if (keeper[lbl] < 0 || comp_size[c] > comp_size[keeper[lbl]])
      keeper[lbl] = static_cast<int>(c);
  }

  // A pixel is settled once it belongs to a keeper or a merged fragment.
  std::vector<char> settled(n, 0);
  std::vector<long> label_pixels(seg.count, 0);
  for (size_t p = 0; p < n; ++p) {
    if (keeper[seg.labels[p]] == comp[p]) {
      settled[p] = 1;
      ++label_pixels[seg.labels[p]];
    }
  }

  // Orphan fragments merge into the largest adjacent settled element. A
  // fragment surrounded only by other orphans waits until a neighbor
  // settles; the grid is connected, so every pass settles at least one.
  std::vector<int> pending;
  for (size_t c = 0; c < comp_size.size(); ++c)
    if (keeper[comp_label[c]] != static_cast<int>(c))
      pending.push_back(static_cast<int>(c));

  std::vector<std::vector<size_t>> comp_members(comp_size.size());
  if (!pending.empty())
    for (size_t p = 0; p < n; ++p)
      if (!settled[p]) comp_members[comp[p]].push_back(p);

  while (!pending.empty()) {
    bool progressed = false;
    std::vector<int> still_pending;
    for (int c : pending) {
      members = comp_members[c];
      int best = -1;
      long best_size = -1;
      for (size_t p : members) {
        const int px = static_cast<int>(p % w), py = static_cast<int>(p / w);
        const int nbs[4][2] = {
            {px - 1, py}, {px + 1, py}, {px, py - 1}, {px, py + 1}};
        for (auto& nb : nbs) {
          if (nb[0] < 0 || nb[0] >= w || nb[1] < 0 || nb[1] >= h) continue;
          size_t q = static_cast<size_t>(nb[1]) * w + nb[0];
          if (!settled[q]) continue;
          int lbl = seg.labels[q];
          if (label_pixels[lbl] > best_size ||
              (label_pixels[lbl] == best_size && lbl < best)) {
            best = lbl;
            best_size = label_pixels[lbl];
          }
        }
      }
      if (best < 0) {
        still_pending.push_back(c);
        continue;
      }
      for (size_t p : members) {
        seg.labels[p] = best;
        settled[p] = 1;
      }
      label_pixels[best] += comp_size[c];
      progressed = true;
    }
    if (!progressed) break;  // single-component image, nothing settled
    pending = std::move(still_pending);
  }

  // Compact labels and recount.
  std::vector<int> remap(seg.count, -1);
  int next = 0;
  for (size_t p = 0; p < n; ++p) {
    int& lbl = seg.labels[p];
    if (remap[lbl] < 0) remap[lbl] = next++;
    lbl = remap[lbl];
  }
  seg.count = next;
  seg.pixel_count.assign(next, 0);
  for (size_t p = 0; p < n; ++p) ++seg.pixel_count[seg.labels[p]];
}

}  // namespace

SuperpixelSegmentation slic(const LabImage& img, int target_m,
                            double compactness, int iterations) {
  const int w = img.width, h = img.height;
  const long pixels = static_cast<long>(w) * h;
  if (target_m < 1 || target_m > pixels)
    throw std::invalid_argument("slic: target_m must lie in [1, pixel count]");
  if (iterations < 1) throw std::invalid_argument("slic: iterations must be >= 1");

  auto [nx, ny] = grid_dims(w, h, target_m);
  const int m = nx * ny;
  const double spacing = std::sqrt(static_cast<double>(pixels) / m);
  const double spatial_w = compactness / spacing;
  const int window = std::max(1, static_cast<int>(std::lround(2.0 * spacing)));

  std::vector<Center> centers(m);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double cx = (i + 0.5) * w / nx - 0.5;
      double cy = (j + 0.5) * h / ny - 0.5;
      int px = std::clamp(static_cast<int>(std::lround(cx)), 0, w - 1);
      int py = std::clamp(static_cast<int>(std::lround(cy)), 0, h - 1);
      const float* lab = img.lab(px, py);
      centers[j * nx + i] = {lab[0], lab[1], lab[2],
                             static_cast<double>(px), static_cast<double>(py),
                             0, 0, 0, 0, 0, 0};
    }
  }

  SuperpixelSegmentation seg;
  seg.width = w;
  seg.height = h;
  seg.count = m;
  seg.labels.assign(pixels, -1);
  std::vector<double> best_dist(pixels);

  for (int it = 0; it < iterations; ++it) {
    std::fill(best_dist.begin(), best_dist.end(),
              std::numeric_limits<double>::max());
    std::fill(seg.labels.begin(), seg.labels.end(), -1);

    for (int ci = 0; ci < m; ++ci) {
      const Center& c = centers[ci];
      const int x0 = std::max(0, static_cast<int>(c.x) - window);
      const int x1 = std::min(w - 1, static_cast<int>(c.x) + window);
      const int y0 = std::max(0, static_cast<int>(c.y) - window);
      const int y1 = std::min(h - 1, static_cast<int>(c.y) + window);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          const float* lab = img.lab(x, y);
          const double dl = lab[0] - c.l, da = lab[1] - c.a, db = lab[2] - c.b;
          const double dx = (x - c.x) * spatial_w, dy = (y - c.y) * spatial_w;
          const double d = dl * dl + da * da + db * db + dx * dx + dy * dy;
          size_t p = static_cast<size_t>(y) * w + x;
          if (d < best_dist[p]) {  // lowest center index wins ties
            best_dist[p] = d;
            seg.labels[p] = ci;
          }
        }
      }
    }

    // Pixels outside every search window attach to the nearest center
    // spatially; keeps the labeling total on extreme aspect ratios.
    for (size_t p = 0; p < static_cast<size_t>(pixels); ++p) {
      if (seg.labels[p] >= 0) continue;
      const int x = static_cast<int>(p % w), y = static_cast<int>(p / w);
      double best = std::numeric_limits<double>::max();
      for (int ci = 0; ci < m; ++ci) {
        double dx = x - centers[ci].x, dy = y - centers[ci].y;
        double d = dx * dx + dy * dy;
        if (d < best) {
          best = d;
          seg.labels[p] = ci;
        }
      }
    }

    for (auto& c : centers) {
      c.sum_l = c.sum_a = c.sum_b = c.sum_x = c.sum_y = 0.0;
      c.size = 0;
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        Center& c = centers[seg.label(x, y)];
        const float* lab = img.lab(x, y);
        c.sum_l += lab[0];
        c.sum_a += lab[1];
        c.sum_b += lab[2];
        c.sum_x += x;
        c.sum_y += y;
        ++c.size;
      }
    }
    for (auto& c : centers) {
      if (c.size == 0) continue;
      c.l = c.sum_l / c.size;
      c.a = c.sum_a / c.size;
      c.b = c.sum_b / c.size;
      c.x = c.sum_x / c.size;
      c.y = c.sum_y / c.size;
    }
  }

  // Drop centers that ended up empty before connectivity cleanup.
  std::vector<int> remap(m, -1);
  int next = 0;
  for (size_t p = 0; p < static_cast<size_t>(pixels); ++p) {
    int& lbl = seg.labels[p];
    if (remap[lbl] < 0) remap[lbl] = next++;
    lbl = remap[lbl];
  }
  seg.count = next;
  seg.pixel_count.assign(next, 0);
  for (int lbl : seg.labels) ++seg.pixel_count[lbl];

  enforce_connectivity(seg);
  return seg;
}

}  // namespace nerd
