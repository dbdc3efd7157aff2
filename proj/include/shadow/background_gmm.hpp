#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shadow/color.hpp"
#include "shadow/image.hpp"
#include "shadow/morphology.hpp"

namespace shadow {

struct BackgroundConfig {
  int components = 5;             // K
  double learning_rate = 0.01;    // rho_bg
  double match_sigmas = 2.5;      // match gate in standard deviations
  double background_ratio = 0.7;  // T_bg
  double min_variance = 15.0;     // sigma^2 floor, intensity^2
  double initial_variance = 225.0;
  bool cleanup = true;            // 3x3 open-close on the foreground mask

  void validate() const {
    if (components < 1 || components > 16)
      throw std::invalid_argument("background.components must lie in [1, 16]");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw std::invalid_argument("background.learning_rate must lie in (0, 1]");
    if (!(match_sigmas > 0.0)) throw std::invalid_argument("background.match_sigmas must be > 0");
    if (!(background_ratio > 0.0 && background_ratio <= 1.0))
      throw std::invalid_argument("background.background_ratio must lie in (0, 1]");
    if (!(min_variance > 0.0)) throw std::invalid_argument("background.min_variance must be > 0");
    if (!(initial_variance >= min_variance))
      throw std::invalid_argument("background.initial_variance must be >= min_variance");
  }
};

/// One mixture component: weight, RGB mean and an isotropic variance shared by
/// the three channels.
struct MixtureComponent {
  double weight = 0.0;
  std::array<double, 3> mean{};
  double variance = 0.0;
};

/// Per-pixel Stauffer-Grimson mixture. Produces a foreground mask per frame
/// and a background reference image.
///
/// The first observed frame initializes one component per pixel and yields an
/// empty mask. A model built with `from_background` is seeded from a supplied
/// clean background; its `background_image` then returns that image verbatim.
class BackgroundModel {
 public:
  explicit BackgroundModel(BackgroundConfig config = {}) : config_(config) { config_.validate(); }

  static BackgroundModel from_background(const Frame& background, BackgroundConfig config = {}) {
    BackgroundModel model(config);
    model.seed(background);
    model.pinned_ = background;
    return model;
  }

  const BackgroundConfig& config() const { return config_; }
  bool initialized() const { return width_ > 0; }
  bool bypass() const { return pinned_.has_value(); }
  int width() const { return width_; }
  int height() const { return height_; }

  BinaryMask observe(const Frame& frame) {
    if (!initialized()) {
      seed(frame);
      return BinaryMask(frame.width(), frame.height(), 0);
    }
    if (frame.width() != width_ || frame.height() != height_) {
      throw std::invalid_argument("BackgroundModel::observe: frame dimension mismatch");
    }
    BinaryMask fg(width_, height_, 0);
    for (std::size_t i = 0; i < frame.size(); ++i) fg[i] = update_pixel(i, frame[i]) ? 1 : 0;
    return config_.cleanup ? open_close3(fg) : fg;
  }

  Frame background_image() const {
    if (!initialized()) throw std::logic_error("background_image: model has not observed a frame");
    if (pinned_) return *pinned_;
    Frame out(width_, height_);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const MixtureComponent* best = nullptr;
      for (const MixtureComponent& c : pixel(i)) {
        if (c.weight > 0.0 && (!best || c.weight > best->weight)) best = &c;
      }
      out[i] = {to_u8(best->mean[0]), to_u8(best->mean[1]), to_u8(best->mean[2])};
    }
    return out;
  }

  /// Components of pixel `i`; unused slots have zero weight.
  std::span<const MixtureComponent> pixel(std::size_t i) const {
    return {components_.data() + i * stride(), stride()};
  }

 private:
  std::size_t stride() const { return static_cast<std::size_t>(config_.components); }

  std::span<MixtureComponent> mutable_pixel(std::size_t i) {
    return {components_.data() + i * stride(), stride()};
  }

  void seed(const Frame& frame) {
    width_ = frame.width();
    height_ = frame.height();
    components_.assign(frame.size() * stride(), MixtureComponent{});
    for (std::size_t i = 0; i < frame.size(); ++i) {
      MixtureComponent& c = components_[i * stride()];
      c.weight = 1.0;
      c.mean = {double(frame[i].r), double(frame[i].g), double(frame[i].b)};
      c.variance = config_.initial_variance;
    }
  }

  static double fitness(const MixtureComponent& c) {
    return c.weight > 0.0 ? c.weight / std::sqrt(c.variance) : -1.0;
  }

  // Returns true when the pixel is foreground.
  bool update_pixel(std::size_t i, Rgb p) {
    const std::span<MixtureComponent> comps = mutable_pixel(i);
    const std::size_t k = comps.size();
    const std::array<double, 3> x{double(p.r), double(p.g), double(p.b)};
    const double rho = config_.learning_rate;
    const double gate2 = config_.match_sigmas * config_.match_sigmas;

    // Visit components by decreasing weight / sigma; the first few covering
    // background_ratio of the weight model the background.
    std::array<std::size_t, 16> order{};
    std::iota(order.begin(), order.begin() + k, std::size_t{0});
    std::stable_sort(order.begin(), order.begin() + k,
                     [&](std::size_t a, std::size_t b) { return fitness(comps[a]) > fitness(comps[b]); });

    std::optional<std::size_t> matched;
    bool matched_is_background = false;
    double cumulative = 0.0;
    bool in_background = true;
    for (std::size_t r = 0; r < k; ++r) {
      const MixtureComponent& c = comps[order[r]];
      if (c.weight <= 0.0) break;
      double d2 = 0.0;
      for (int ch = 0; ch < 3; ++ch) d2 += (x[ch] - c.mean[ch]) * (x[ch] - c.mean[ch]);
      if (d2 <= gate2 * c.variance) {
        matched = order[r];
        matched_is_background = in_background;
        break;
      }
      cumulative += c.weight;
      if (cumulative > config_.background_ratio) in_background = false;
    }

    for (MixtureComponent& c : comps) c.weight *= (1.0 - rho);
    if (matched) {
      MixtureComponent& c = comps[*matched];
      c.weight += rho;
      double d2 = 0.0;
      for (int ch = 0; ch < 3; ++ch) {
        c.mean[ch] += rho * (x[ch] - c.mean[ch]);
        d2 += (x[ch] - c.mean[ch]) * (x[ch] - c.mean[ch]);
      }
      c.variance = std::max(config_.min_variance, (1.0 - rho) * c.variance + rho * d2 / 3.0);
    } else {
      std::size_t victim = 0;
      for (std::size_t j = 1; j < k; ++j) {
        if (fitness(comps[j]) < fitness(comps[victim])) victim = j;
      }
      comps[victim] = MixtureComponent{rho, x, config_.initial_variance};
    }
    double total = 0.0;
    for (const MixtureComponent& c : comps) total += c.weight;
    for (MixtureComponent& c : comps) c.weight /= total;

    return !(matched && matched_is_background);
  }

  BackgroundConfig config_;
  int width_ = 0;
  int height_ = 0;
  std::vector<MixtureComponent> components_;
  std::optional<Frame> pinned_;
};

}  // namespace shadow
