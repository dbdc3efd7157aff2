#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadow/color.hpp"
#include "shadow/gradient.hpp"
#include "shadow/image.hpp"

namespace shadow {

/// Attenuation and direction of the shadow-to-background colour vector
/// v = BG - F: alpha = |v| / |BG|, theta = atan2(v_G, v_R),
/// phi = acos(v_B / |v|).
struct ColourFeature {
  double alpha = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  std::array<double, 3> as_array() const { return {alpha, theta, phi}; }
};

/// Undefined (nullopt) when the background is black or the pixel equals the
/// background.
inline std::optional<ColourFeature> colour_feature(Rgb frame_px, Rgb background_px) {
  const double br = background_px.r, bgc = background_px.g, bb = background_px.b;
  const double vr = br - frame_px.r, vg = bgc - frame_px.g, vb = bb - frame_px.b;
  const double bg_norm = std::sqrt(br * br + bgc * bgc + bb * bb);
  const double v_norm = std::sqrt(vr * vr + vg * vg + vb * vb);
  if (bg_norm == 0.0 || v_norm == 0.0) return std::nullopt;
  ColourFeature x;
  x.alpha = v_norm / bg_norm;
  x.theta = std::atan2(vg, vr);
  x.phi = std::acos(std::clamp(vb / v_norm, -1.0, 1.0));
  return x;
}

struct PhysicalParams {
  int components = 5;                 // M
  double learning_rate = 0.05;        // rho
  double gradient_scale = 10.0;       // sigma_g, intensity units
  double posterior_threshold = 0.5;   // tau_post
  double confident_weight = 0.1;      // w_min
  int warmup_frames = 25;
  double weak_ratio_low = 0.1;
  double weak_ratio_high = 0.95;
  double weak_saturation = 0.2;       // s_max
  double match_sigmas = 2.5;
  std::array<double, 3> initial_variance{0.01, 0.05, 0.05};
  std::array<double, 3> min_variance{1e-4, 1e-4, 1e-4};

  void validate() const {
    if (components < 1) throw std::invalid_argument("physical.components must be >= 1");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0))
      throw std::invalid_argument("physical.learning_rate must lie in (0, 1]");
    if (!(gradient_scale > 0.0)) throw std::invalid_argument("physical.gradient_scale must be > 0");
    if (!(posterior_threshold >= 0.0 && posterior_threshold <= 1.0))
      throw std::invalid_argument("physical.posterior_threshold must lie in [0, 1]");
    if (!(confident_weight >= 0.0 && confident_weight <= 1.0))
      throw std::invalid_argument("physical.confident_weight must lie in [0, 1]");
    if (warmup_frames < 0) throw std::invalid_argument("physical.warmup_frames must be >= 0");
    if (!(weak_ratio_low >= 0.0 && weak_ratio_low < weak_ratio_high && weak_ratio_high <= 1.0))
      throw std::invalid_argument("physical: need 0 <= weak_ratio_low < weak_ratio_high <= 1");
    if (!(weak_saturation >= 0.0 && weak_saturation <= 1.0))
      throw std::invalid_argument("physical.weak_saturation must lie in [0, 1]");
    if (!(match_sigmas > 0.0)) throw std::invalid_argument("physical.match_sigmas must be > 0");
    for (int d = 0; d < 3; ++d) {
      if (!(min_variance[d] > 0.0 && initial_variance[d] >= min_variance[d]))
        throw std::invalid_argument("physical: variances must satisfy 0 < min <= initial");
    }
  }
};

namespace detail {
// theta lives on the circle; the other two coordinates are plain.
inline double feature_delta(int dim, double x, double mean) {
  const double d = x - mean;
  return dim == 1 ? std::remainder(d, 2.0 * std::numbers::pi) : d;
}
}  // namespace detail

/// Weak detector: foreground pixels that got darker by a bounded factor and
/// whose saturation moved by at most s_max.
inline bool weak_physical_candidate(Rgb frame_px, Rgb background_px, const PhysicalParams& p) {
  const Hsv f = rgb_to_hsv(frame_px);
  const Hsv b = rgb_to_hsv(background_px);
  if (b.v <= 0.0) return false;
  const double ratio = f.v / b.v;
  return ratio > p.weak_ratio_low && ratio < p.weak_ratio_high &&
         std::abs(f.s - b.s) <= p.weak_saturation;
}

inline BinaryMask weak_shadow_candidates(const Frame& f, const Frame& b, const BinaryMask& fg,
                                         const PhysicalParams& p) {
  require_same_shape(f, b, "weak_shadow_candidates");
  require_same_shape(f, fg, "weak_shadow_candidates");
  BinaryMask out(f.width(), f.height(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (fg[i] && weak_physical_candidate(f[i], b[i], p)) out[i] = 1;
  }
  return out;
}

/// Global Gaussian mixture over colour features of shadow candidates, with
/// diagonal covariance. Slots with zero weight are unused.
class ShadowAppearanceModel {
 public:
  struct Component {
    double weight = 0.0;
    std::array<double, 3> mean{};
    std::array<double, 3> variance{};
  };

  explicit ShadowAppearanceModel(PhysicalParams params = {}) : params_(params) {
    params_.validate();
    components_.resize(static_cast<std::size_t>(params_.components));
  }

  const PhysicalParams& params() const { return params_; }
  const std::vector<Component>& components() const { return components_; }
  int frames_seen() const { return frames_seen_; }
  bool warmed_up() const { return frames_seen_ >= params_.warmup_frames; }

  /// Learning rate for a pixel whose frame gradient exceeds the background's:
  /// rho * exp(-max(0, |grad F| - |grad B|) / sigma_g).
  double penalised_rate(double frame_gradient, double background_gradient) const {
    const double excess = std::max(0.0, frame_gradient - background_gradient);
    return params_.learning_rate * std::exp(-excess / params_.gradient_scale);
  }

  /// One online update with the given rate. The nearest component within the
  /// match gate absorbs the sample; otherwise the weakest slot is replaced.
  void learn(const ColourFeature& feature, double rate) {
    const std::array<double, 3> x = feature.as_array();
    std::optional<std::size_t> matched;
    double best = params_.match_sigmas * params_.match_sigmas;
    bool any_active = false;
    for (std::size_t k = 0; k < components_.size(); ++k) {
      const Component& c = components_[k];
      if (c.weight <= 0.0) continue;
      any_active = true;
      const double d2 = mahalanobis2(c, x);
      if (d2 <= best) {
        best = d2;
        matched = k;
      }
    }

    if (!any_active) {
      components_[0] = Component{1.0, x, params_.initial_variance};
      return;
    }
    for (Component& c : components_) c.weight *= (1.0 - rate);
    if (matched) {
      Component& c = components_[*matched];
      c.weight += rate;
      for (int d = 0; d < 3; ++d) {
        const double delta = detail::feature_delta(d, x[d], c.mean[d]);
        c.mean[d] += rate * delta;
        if (d == 1) c.mean[d] = std::remainder(c.mean[d], 2.0 * std::numbers::pi);
        c.variance[d] =
            std::max(params_.min_variance[d], (1.0 - rate) * c.variance[d] + rate * delta * delta);
      }
    } else {
      std::size_t victim = 0;
      for (std::size_t k = 1; k < components_.size(); ++k) {
        if (components_[k].weight < components_[victim].weight) victim = k;
      }
      components_[victim] = Component{rate, x, params_.initial_variance};
    }
    normalize();
  }

  /// Learns from every candidate pixel with a defined feature, in raster order.
  void update(const Frame& f, const Frame& b, const BinaryMask& candidates,
              const GradientField& grads_f, const GradientField& grads_b) {
    require_same_shape(f, b, "ShadowAppearanceModel::update");
    require_same_shape(f, candidates, "ShadowAppearanceModel::update");
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (!candidates[i]) continue;
      const std::optional<ColourFeature> x = colour_feature(f[i], b[i]);
      if (!x) continue;
      learn(*x, penalised_rate(grads_f.magnitude(i), grads_b.magnitude(i)));
    }
    ++frames_seen_;
  }

  /// Share of the posterior held by confident components (weight >= w_min),
  /// among the components whose match gate contains the feature. A feature
  /// outside every gate has posterior 0.
  double shadow_posterior(const ColourFeature& feature) const {
    const std::array<double, 3> x = feature.as_array();
    const double gate2 = params_.match_sigmas * params_.match_sigmas;
    double confident = 0.0;
    double total = 0.0;
    for (const Component& c : components_) {
      if (c.weight <= 0.0) continue;
      const double d2 = mahalanobis2(c, x);
      if (d2 > gate2) continue;
      const double density =
          c.weight * std::exp(-0.5 * d2) / std::sqrt(c.variance[0] * c.variance[1] * c.variance[2]);
      total += density;
      if (c.weight >= params_.confident_weight) confident += density;
    }
    return total > 0.0 ? confident / total : 0.0;
  }

  void mark_frames_seen(int n) { frames_seen_ = n; }

  /// Flat text format: one line per component slot,
  /// `weight mean_alpha mean_theta mean_phi var_alpha var_theta var_phi`.
  void save(std::ostream& os) const {
    os.precision(17);
    for (const Component& c : components_) {
      os << c.weight << ' ' << c.mean[0] << ' ' << c.mean[1] << ' ' << c.mean[2] << ' '
         << c.variance[0] << ' ' << c.variance[1] << ' ' << c.variance[2] << '\n';
    }
  }

  /// Reads M records written by `save`. The loaded model counts as warmed up.
  static ShadowAppearanceModel load(std::istream& is, PhysicalParams params = {}) {
    ShadowAppearanceModel model(params);
    for (Component& c : model.components_) {
      if (!(is >> c.weight >> c.mean[0] >> c.mean[1] >> c.mean[2] >> c.variance[0] >>
            c.variance[1] >> c.variance[2])) {
        throw std::runtime_error("physical model file: expected " +
                                 std::to_string(params.components) + " records of 7 numbers");
      }
    }
    model.frames_seen_ = params.warmup_frames;
    return model;
  }

 private:
  double mahalanobis2(const Component& c, const std::array<double, 3>& x) const {
    double d2 = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double delta = detail::feature_delta(d, x[d], c.mean[d]);
      d2 += delta * delta / c.variance[d];
    }
    return d2;
  }

  void normalize() {
    double total = 0.0;
    for (const Component& c : components_) total += c.weight;
    for (Component& c : components_) c.weight /= total;
  }

  PhysicalParams params_;
  std::vector<Component> components_;
  int frames_seen_ = 0;
};

/// Shadow iff the pixel is a weak candidate with a defined feature whose
/// confident posterior exceeds tau_post. Requires a warmed-up model.
inline TriMask classify_physical(const Frame& f, const Frame& b, const BinaryMask& fg,
                                 const ShadowAppearanceModel& model) {
  if (!model.warmed_up()) {
    throw std::logic_error("classify_physical: model has not finished its warm-up frames");
  }
  require_same_shape(f, b, "classify_physical");
  require_same_shape(f, fg, "classify_physical");
  const PhysicalParams& p = model.params();
  TriMask out(f.width(), f.height(), Label::Background);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!fg[i]) continue;
    out[i] = Label::Object;
    if (!weak_physical_candidate(f[i], b[i], p)) continue;
    const std::optional<ColourFeature> x = colour_feature(f[i], b[i]);
    if (x && model.shadow_posterior(*x) > p.posterior_threshold) out[i] = Label::Shadow;
  }
  return out;
}

}  // namespace shadow
