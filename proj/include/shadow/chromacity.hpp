#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "shadow/color.hpp"
#include "shadow/image.hpp"

namespace shadow {

/// Thresholds of the HSV shadow test. A foreground pixel votes shadow when its
/// value drops to a bounded fraction of the background's, its saturation does
/// not rise by more than tau_s, and its hue stays within tau_h degrees.
struct ChromacityParams {
  double beta1 = 0.4;
  double beta2 = 0.9;
  double tau_s = 0.1;
  double tau_h = 60.0;
  int window = 5;

  void validate() const {
    if (!(beta1 > 0.0 && beta1 < beta2 && beta2 <= 1.0))
      throw std::invalid_argument("chromacity: need 0 < beta1 < beta2 <= 1");
    if (!(tau_s >= -1.0 && tau_s <= 1.0)) throw std::invalid_argument("chromacity: tau_s must lie in [-1, 1]");
    if (!(tau_h >= 0.0 && tau_h <= 180.0)) throw std::invalid_argument("chromacity: tau_h must lie in [0, 180]");
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("chromacity: window must be odd and >= 1");
  }
};

/// The three-condition per-pixel test. A black background pixel cannot form
/// the value ratio and never votes shadow.
inline bool chromacity_vote(Rgb frame_px, Rgb background_px, const ChromacityParams& p) {
  const Hsv f = rgb_to_hsv(frame_px);
  const Hsv b = rgb_to_hsv(background_px);
  if (b.v <= 0.0) return false;
  const double ratio = f.v / b.v;
  return ratio >= p.beta1 && ratio <= p.beta2 && (f.s - b.s) <= p.tau_s &&
         hue_distance(f.h, b.h) <= p.tau_h;
}

/// Per-pixel shadow votes of the foreground (1 = shadow vote).
inline BinaryMask chromacity_votes(const Frame& f, const Frame& b, const BinaryMask& fg,
                                   const ChromacityParams& p) {
  require_same_shape(f, b, "chromacity");
  require_same_shape(f, fg, "chromacity");
  BinaryMask votes(f.width(), f.height(), 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (fg[i] && chromacity_vote(f[i], b[i], p)) votes[i] = 1;
  }
  return votes;
}

/// Summed-area table with a zero guard row and column.
class IntegralCount {
 public:
  explicit IntegralCount(const BinaryMask& m)
      : w_(m.width() + 1), sums_(static_cast<std::size_t>(w_) * (m.height() + 1), 0) {
    for (int y = 0; y < m.height(); ++y) {
      int row = 0;
      for (int x = 0; x < m.width(); ++x) {
        row += m(x, y) ? 1 : 0;
        at(x + 1, y + 1) = at(x + 1, y) + row;
      }
    }
  }

  /// Count over the inclusive rectangle [x0, x1] x [y0, y1].
  int sum(int x0, int y0, int x1, int y1) const {
    return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0);
  }

 private:
  int& at(int x, int y) { return sums_[static_cast<std::size_t>(y) * w_ + x]; }
  int at(int x, int y) const { return sums_[static_cast<std::size_t>(y) * w_ + x]; }

  int w_;
  std::vector<int> sums_;
};

/// Shadow iff a strict majority of the foreground pixels in the window around
/// a pixel voted shadow. Background pixels stay Background.
inline TriMask majority_filter(const BinaryMask& votes, const BinaryMask& fg, int window) {
  TriMask out(fg.width(), fg.height(), Label::Background);
  if (window == 1) {
    for (std::size_t i = 0; i < fg.size(); ++i) {
      if (fg[i]) out[i] = votes[i] ? Label::Shadow : Label::Object;
    }
    return out;
  }
  const IntegralCount vote_sum(votes);
  const IntegralCount fg_sum(fg);
  const int r = window / 2;
  for (int y = 0; y < fg.height(); ++y) {
    const int y0 = std::max(0, y - r);
    const int y1 = std::min(fg.height() - 1, y + r);
    for (int x = 0; x < fg.width(); ++x) {
      if (!fg(x, y)) continue;
      const int x0 = std::max(0, x - r);
      const int x1 = std::min(fg.width() - 1, x + r);
      const int v = vote_sum.sum(x0, y0, x1, y1);
      const int n = fg_sum.sum(x0, y0, x1, y1);
      out(x, y) = 2 * v > n ? Label::Shadow : Label::Object;
    }
  }
  return out;
}

inline TriMask classify_chromacity(const Frame& f, const Frame& b, const BinaryMask& fg,
                                   const ChromacityParams& p) {
  p.validate();
  return majority_filter(chromacity_votes(f, b, fg, p), fg, p.window);
}

}  // namespace shadow
