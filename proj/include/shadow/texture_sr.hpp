#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "shadow/image.hpp"

namespace shadow {

struct GaborKernel {
  int size = 9;
  double orientation = 0.0;  // radians
  double wavelength = 4.0;   // pixels
  double phase = 0.0;        // radians
  double sigma = 2.24;       // envelope, pixels
  std::vector<double> weights;  // size*size, row-major, zero mean, unit norm
};

struct GaborBankConfig {
  int size = 9;
  std::vector<double> wavelengths{3.0, 4.0, 6.0, 8.0};
  int orientations = 6;
  std::vector<double> phases{0.0, std::numbers::pi / 2.0};
  double sigma_ratio = 0.56;  // envelope sigma / wavelength
  double aspect = 1.0;

  static GaborBankConfig full() { return {}; }

  /// 2 wavelengths x 4 orientations x 2 phases.
  static GaborBankConfig reduced() {
    GaborBankConfig c;
    c.wavelengths = {4.0, 8.0};
    c.orientations = 4;
    return c;
  }

  std::size_t kernel_count() const { return wavelengths.size() * static_cast<std::size_t>(orientations) * phases.size(); }

  void validate() const {
    if (size < 1 || size % 2 == 0) throw std::invalid_argument("gabor kernel size must be odd and >= 1");
    if (wavelengths.empty() || phases.empty() || orientations < 1)
      throw std::invalid_argument("gabor bank needs at least one wavelength, orientation and phase");
    for (double w : wavelengths) {
      if (!(w >= 2.0)) throw std::invalid_argument("gabor wavelengths must be >= 2 pixels");
    }
    if (!(sigma_ratio > 0.0)) throw std::invalid_argument("gabor sigma_ratio must be > 0");
    if (!(aspect > 0.0)) throw std::invalid_argument("gabor aspect must be > 0");
  }
};

struct GaborBank {
  int size = 9;
  std::vector<GaborKernel> kernels;

  std::size_t count() const { return kernels.size(); }
};

inline GaborKernel make_gabor_kernel(int size, double orientation, double wavelength, double phase,
                                     double sigma, double aspect) {
  GaborKernel k{size, orientation, wavelength, phase, sigma, {}};
  const int r = size / 2;
  const double c = std::cos(orientation), s = std::sin(orientation);
  k.weights.reserve(static_cast<std::size_t>(size) * size);
  for (int y = -r; y <= r; ++y) {
    for (int x = -r; x <= r; ++x) {
      const double xr = x * c + y * s;
      const double yr = -x * s + y * c;
      const double envelope = std::exp(-(xr * xr + aspect * aspect * yr * yr) / (2.0 * sigma * sigma));
      k.weights.push_back(envelope * std::cos(2.0 * std::numbers::pi * xr / wavelength + phase));
    }
  }
  const double mean = std::accumulate(k.weights.begin(), k.weights.end(), 0.0) / k.weights.size();
  double norm2 = 0.0;
  for (double& w : k.weights) {
    w -= mean;
    norm2 += w * w;
  }
  if (norm2 <= 0.0) throw std::invalid_argument("gabor kernel vanishes after removing its mean");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& w : k.weights) w *= inv;
  return k;
}

/// Kernels ordered by wavelength, then orientation, then phase.
inline GaborBank build_bank(const GaborBankConfig& config = {}) {
  config.validate();
  GaborBank bank;
  bank.size = config.size;
  for (double wavelength : config.wavelengths) {
    for (int o = 0; o < config.orientations; ++o) {
      const double orientation = std::numbers::pi * o / config.orientations;
      for (double phase : config.phases) {
        bank.kernels.push_back(make_gabor_kernel(config.size, orientation, wavelength, phase,
                                                 config.sigma_ratio * wavelength, config.aspect));
      }
    }
  }
  return bank;
}

/// Projections of the neighbourhood centred at (cx, cy) onto every kernel.
/// The neighbourhood must lie inside the image.
inline void project_patch(const GreyImage& img, int cx, int cy, const GaborBank& bank,
                          std::vector<double>& patch, std::vector<double>& out) {
  const int r = bank.size / 2;
  patch.resize(static_cast<std::size_t>(bank.size) * bank.size);
  std::size_t n = 0;
  for (int y = cy - r; y <= cy + r; ++y) {
    for (int x = cx - r; x <= cx + r; ++x) patch[n++] = img(x, y);
  }
  out.resize(bank.count());
  for (std::size_t k = 0; k < bank.count(); ++k) {
    const std::vector<double>& w = bank.kernels[k].weights;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) acc += w[i] * patch[i];
    out[k] = acc;
  }
}

inline std::vector<double> project_patch(const GreyImage& img, int cx, int cy, const GaborBank& bank) {
  std::vector<double> patch, out;
  project_patch(img, cx, cy, bank, patch, out);
  return out;
}

/// Keeps the `count` kernels with the largest mean squared response over the
/// non-zero pixels of `mask` on a calibration image (ties keep bank order).
inline GaborBank select_kernels(const GaborBank& bank, const GreyImage& calibration,
                                const BinaryMask& mask, std::size_t count) {
  require_same_shape(calibration, mask, "select_kernels");
  const int r = bank.size / 2;
  std::vector<double> energy(bank.count(), 0.0);
  std::vector<double> patch, feat;
  for (int y = r; y + r < calibration.height(); ++y) {
    for (int x = r; x + r < calibration.width(); ++x) {
      if (!mask(x, y)) continue;
      project_patch(calibration, x, y, bank, patch, feat);
      for (std::size_t k = 0; k < feat.size(); ++k) energy[k] += feat[k] * feat[k];
    }
  }
  std::vector<std::size_t> order(bank.count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energy[a] > energy[b]; });
  order.resize(std::min(count, order.size()));
  std::sort(order.begin(), order.end());
  GaborBank out;
  out.size = bank.size;
  for (std::size_t k : order) out.kernels.push_back(bank.kernels[k]);
  return out;
}

struct SrTextureParams {
  double gain_low = 0.1;   // g_lo
  double distance = 0.35;  // tau_d
  double epsilon = 1e-6;

  void validate() const {
    if (!(gain_low >= 0.0 && gain_low < 1.0)) throw std::invalid_argument("sr_texture.gain_low must lie in [0, 1)");
    if (!(distance >= 0.0)) throw std::invalid_argument("sr_texture.distance must be >= 0");
    if (!(epsilon > 0.0)) throw std::invalid_argument("sr_texture.epsilon must be > 0");
  }
};

/// Foreground pixels darker than the background: F / B in (g_lo, 1).
inline BinaryMask photometric_gain_candidates(const GreyImage& f, const GreyImage& b, const BinaryMask& fg,
                                              double gain_low) {
  require_same_shape(f, b, "photometric_gain_candidates");
  require_same_shape(f, fg, "photometric_gain_candidates");
  BinaryMask out(f.width(), f.height(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!fg[i] || b[i] == 0) continue;
    const double gain = static_cast<double>(f[i]) / b[i];
    if (gain > gain_low && gain < 1.0) out[i] = 1;
  }
  return out;
}

/// |feat_F - feat_B| / (|feat_B| + eps).
inline double texture_distance(const std::vector<double>& feat_f, const std::vector<double>& feat_b,
                               double epsilon) {
  double diff = 0.0, norm = 0.0;
  for (std::size_t k = 0; k < feat_f.size(); ++k) {
    const double d = feat_f[k] - feat_b[k];
    diff += d * d;
    norm += feat_b[k] * feat_b[k];
  }
  return std::sqrt(diff) / (std::sqrt(norm) + epsilon);
}

/// Candidate pixels whose neighbourhood texture matches the background's are
/// Shadow; every other foreground pixel, including candidates whose
/// neighbourhood crosses the border, is Object.
inline TriMask classify_texture_sr(const GreyImage& f, const GreyImage& b, const BinaryMask& fg,
                                   const GaborBank& bank, const SrTextureParams& p) {
  p.validate();
  if (f.width() < bank.size || f.height() < bank.size) {
    throw std::invalid_argument("classify_texture_sr: frame smaller than the kernel size");
  }
  const BinaryMask candidates = photometric_gain_candidates(f, b, fg, p.gain_low);
  const int r = bank.size / 2;
  TriMask out(f.width(), f.height(), Label::Background);
  std::vector<double> patch, feat_f, feat_b;
  for (int y = 0; y < f.height(); ++y) {
    for (int x = 0; x < f.width(); ++x) {
      if (!fg(x, y)) continue;
      out(x, y) = Label::Object;
      if (!candidates(x, y)) continue;
      if (x < r || y < r || x + r >= f.width() || y + r >= f.height()) continue;
      project_patch(f, x, y, bank, patch, feat_f);
      project_patch(b, x, y, bank, patch, feat_b);
      if (texture_distance(feat_f, feat_b, p.epsilon) <= p.distance) out(x, y) = Label::Shadow;
    }
  }
  return out;
}

}  // namespace shadow
