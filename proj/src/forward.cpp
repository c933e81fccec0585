#include "nerd/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nerd {

namespace {

struct Synapse {
  int channel;
  int ky;
  int kx;
  float weight;
};

int conv_out_dim(int in, int kernel, int pad, int stride) {
  return (in + 2 * pad - kernel) / stride + 1;
}

}  // namespace

ResponseTensor forward_block(const Image& img, const FilterBank& bank,
                             const BlockConfig& cfg, MacCounts* macs) {
  if (img.channels != bank.in_channels)
    throw std::invalid_argument("forward_block: channel count mismatch");
  if (img.width < bank.kw || img.height < bank.kh)
    throw std::invalid_argument("forward_block: image smaller than kernel");
  if (cfg.conv_stride < 1 || cfg.pool_stride < 1 || cfg.pool_window < 1)
    throw std::invalid_argument("forward_block: strides and window must be >= 1");
  if (cfg.lrn_depth % 2 == 0)
    throw std::invalid_argument("forward_block: LRN depth must be odd");

  const int pad_y = bank.kh / 2, pad_x = bank.kw / 2;
  const int cw = conv_out_dim(img.width, bank.kw, pad_x, cfg.conv_stride);
  const int ch = conv_out_dim(img.height, bank.kh, pad_y, cfg.conv_stride);
  const int l = bank.count;

  // Active synapses per filter, in dense (c,ky,kx) order so the sparse and
  // dense accumulation orders coincide.
  std::vector<std::vector<Synapse>> active(l);
  for (int f = 0; f < l; ++f) {
    active[f].reserve(bank.synapses_per_filter());
    for (int c = 0; c < bank.in_channels; ++c)
      for (int ky = 0; ky < bank.kh; ++ky)
        for (int kx = 0; kx < bank.kw; ++kx)
          if (bank.mask_at(f, c, ky, kx))
            active[f].push_back({c, ky, kx, bank.weight_at(f, c, ky, kx)});
  }

  ResponseTensor conv;
  conv.width = cw;
  conv.height = ch;
  conv.channels = l;
  conv.origin_x = (bank.kw - 1) / 2.0 - pad_x;
  conv.origin_y = (bank.kh - 1) / 2.0 - pad_y;
  conv.step_x = conv.step_y = cfg.conv_stride;
  conv.data.resize(static_cast<size_t>(cw) * ch * l);

  for (int f = 0; f < l; ++f) {
    const auto& syn = active[f];
    float* out = &conv.data[static_cast<size_t>(f) * ch * cw];
    for (int oy = 0; oy < ch; ++oy) {
      const int iy0 = oy * cfg.conv_stride - pad_y;
      for (int ox = 0; ox < cw; ++ox) {
        const int ix0 = ox * cfg.conv_stride - pad_x;
        float acc = bank.biases[f];
        // Edge-replicate padding keeps constant inputs constant end to end.
        for (const Synapse& s : syn) {
          const int iy = std::clamp(iy0 + s.ky, 0, img.height - 1);
          const int ix = std::clamp(ix0 + s.kx, 0, img.width - 1);
          acc += s.weight * img.at(ix, iy, s.channel);
        }
        out[oy * cw + ox] = std::max(0.0f, acc);  // half-wave rectifier
      }
    }
  }

  if (macs) {
    const uint64_t positions = static_cast<uint64_t>(cw) * ch;
    macs->dense = positions * bank.total_synapses();
    macs->actual = 0;
    for (int f = 0; f < l; ++f)
      macs->actual += positions * active[f].size();
  }

  // Cross-channel local response normalization; alpha == 0 bypasses it.
  if (cfg.lrn_alpha != 0.0f) {
    ResponseTensor norm = conv;
    const int half = cfg.lrn_depth / 2;
    for (int y = 0; y < ch; ++y) {
      for (int x = 0; x < cw; ++x) {
        for (int f = 0; f < l; ++f) {
          const int lo = std::max(0, f - half), hi = std::min(l - 1, f + half);
          double sumsq = 0.0;
          for (int j = lo; j <= hi; ++j) {
            double v = conv.at(x, y, j);
            sumsq += v * v;
          }
          double scale =
              std::pow(cfg.lrn_k + cfg.lrn_alpha * sumsq, cfg.lrn_beta);
          norm.data[(static_cast<size_t>(f) * ch + y) * cw + x] =
              static_cast<float>(conv.at(x, y, f) / scale);
        }
      }
    }
    conv = std::move(norm);
  }

  if (cfg.pool_window == 1 && cfg.pool_stride == 1) return conv;

  const int win = std::min({cfg.pool_window, cw, ch});
  const int pw = (cw - win) / cfg.pool_stride + 1;
  const int ph = (ch - win) / cfg.pool_stride + 1;

  ResponseTensor pooled;
  pooled.width = pw;
  pooled.height = ph;
  pooled.channels = l;
  pooled.origin_x = conv.origin_x + conv.step_x * (win - 1) / 2.0;
  pooled.origin_y = conv.origin_y + conv.step_y * (win - 1) / 2.0;
  pooled.step_x = conv.step_x * cfg.pool_stride;
  pooled.step_y = conv.step_y * cfg.pool_stride;
  pooled.data.resize(static_cast<size_t>(pw) * ph * l);
  for (int f = 0; f < l; ++f) {
    for (int oy = 0; oy < ph; ++oy) {
      for (int ox = 0; ox < pw; ++ox) {
        float best = 0.0f;
        for (int dy = 0; dy < win; ++dy)
          for (int dx = 0; dx < win; ++dx)
            best = std::max(best, conv.at(ox * cfg.pool_stride + dx,
                                          oy * cfg.pool_stride + dy, f));
        pooled.data[(static_cast<size_t>(f) * ph + oy) * pw + ox] = best;
      }
    }
  }
  return pooled;
}

PixelFeatures upsample_features(const ResponseTensor& responses, int width,
                                int height) {
  PixelFeatures out;
  out.width = width;
  out.height = height;
  out.dim = responses.channels;
  out.data.resize(static_cast<size_t>(width) * height * out.dim);

  const bool placed = responses.step_x > 0.0 && responses.step_y > 0.0;
  const double sx = static_cast<double>(responses.width) / width;
  const double sy = static_cast<double>(responses.height) / height;
  for (int y = 0; y < height; ++y) {
    double fy = placed ? (y - responses.origin_y) / responses.step_y
                       : (y + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(responses.height - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, responses.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      double fx = placed ? (x - responses.origin_x) / responses.step_x
                         : (x + 0.5) * sx - 0.5;
      fx = std::clamp(fx, 0.0, static_cast<double>(responses.width - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, responses.width - 1);
      const double wx = fx - x0;
      float* dst = &out.data[(static_cast<size_t>(y) * width + x) * out.dim];
      for (int c = 0; c < out.dim; ++c) {
        const double top = responses.at(x0, y0, c) * (1.0 - wx) +
                           responses.at(x1, y0, c) * wx;
        const double bot = responses.at(x0, y1, c) * (1.0 - wx) +
                           responses.at(x1, y1, c) * wx;
        dst[c] = static_cast<float>(top * (1.0 - wy) + bot * wy);
      }
    }
  }
  return out;
}

}  // namespace nerd
