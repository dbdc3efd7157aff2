#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "shadow/chromacity.hpp"
#include "shadow/color.hpp"
#include "shadow/components.hpp"
#include "shadow/gradient.hpp"
#include "shadow/image.hpp"
#include "shadow/morphology.hpp"

namespace shadow {

/// What a candidate region with no pixel of significant gradient becomes.
enum class FlatRegionPolicy { TrustWeakDetector, Object };

struct LrParams {
  ChromacityParams weak{0.3, 0.99, 0.15, 90.0, 1};
  double magnitude_floor = 5.0;                  // tau_m
  double angle = std::numbers::pi / 6.0;         // tau_a
  double correlation = 0.6;                      // tau_c; 0 disables texture verification
  bool edge_split = true;
  double edge_threshold = 25.0;
  int min_region = 16;
  FlatRegionPolicy flat_policy = FlatRegionPolicy::TrustWeakDetector;

  void validate() const {
    weak.validate();
    if (weak.window != 1) throw std::invalid_argument("lr_texture: the weak detector works per pixel (window 1)");
    if (!(magnitude_floor >= 0.0)) throw std::invalid_argument("lr_texture.magnitude_floor must be >= 0");
    if (!(angle > 0.0 && angle < std::numbers::pi))
      throw std::invalid_argument("lr_texture.angle must lie in (0, pi)");
    if (!(correlation >= 0.0 && correlation <= 1.0))
      throw std::invalid_argument("lr_texture.correlation must lie in [0, 1]");
    if (!(edge_threshold > 0.0)) throw std::invalid_argument("lr_texture.edge_threshold must be > 0");
    if (min_region < 1) throw std::invalid_argument("lr_texture.min_region must be >= 1");
  }
};

/// Angle between two gradient vectors, in [0, pi].
inline double direction_difference(double fx, double fy, double bx, double by) {
  const double norm = std::sqrt((fx * fx + fy * fy) * (bx * bx + by * by));
  return std::acos(std::clamp((fx * bx + fy * by) / norm, -1.0, 1.0));
}

/// Direction difference at pixel `i`, or nullopt when either gradient is not
/// above the magnitude floor.
inline std::optional<double> direction_difference(const GradientField& gf, const GradientField& gb,
                                                  std::size_t i, double magnitude_floor) {
  if (gf.magnitude(i) <= magnitude_floor || gb.magnitude(i) <= magnitude_floor) return std::nullopt;
  return direction_difference(gf.dx[i], gf.dy[i], gb.dx[i], gb.dy[i]);
}

struct RegionCorrelation {
  std::optional<double> c;  // nullopt when n == 0
  int n = 0;
};

/// Fraction of the region's selected pixels whose direction difference is at
/// most tau_a.
inline RegionCorrelation region_correlation(const std::vector<Point>& pixels, const GradientField& gf,
                                            const GradientField& gb, double magnitude_floor, double angle) {
  int n = 0, agree = 0;
  for (const Point& q : pixels) {
    const std::optional<double> d = direction_difference(gf, gb, gf.index(q.x, q.y), magnitude_floor);
    if (!d) continue;
    ++n;
    if (*d <= angle) ++agree;
  }
  RegionCorrelation out;
  out.n = n;
  if (n > 0) out.c = static_cast<double>(agree) / n;
  return out;
}

inline RegionCorrelation region_correlation(const Region& r, const GradientField& gf, const GradientField& gb,
                                            const LrParams& p) {
  return region_correlation(r.pixels, gf, gb, p.magnitude_floor, p.angle);
}

/// Thresholded gradient magnitude thinned by non-maximum suppression along
/// the gradient direction quantized to 45 degrees.
inline BinaryMask thin_edges(const GradientField& g, double threshold) {
  BinaryMask out(g.width, g.height, 0);
  const auto mag = [&](int x, int y) {
    return (x < 0 || y < 0 || x >= g.width || y >= g.height) ? 0.0 : g.magnitude(x, y);
  };
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const double m = g.magnitude(x, y);
      if (m <= threshold) continue;
      double a = g.direction(x, y);
      if (a < 0) a += std::numbers::pi;
      const int sector = static_cast<int>(std::lround(a / (std::numbers::pi / 4.0))) % 4;
      static constexpr int kStep[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
      const int sx = kStep[sector][0], sy = kStep[sector][1];
      if (m >= mag(x + sx, y + sy) && m >= mag(x - sx, y - sy)) out(x, y) = 1;
    }
  }
  return out;
}

/// Edge pixels of the frame that are not edge pixels of the background.
inline BinaryMask frame_only_edges(const GradientField& gf, const GradientField& gb, double threshold) {
  const BinaryMask frame_edges = thin_edges(gf, threshold);
  const BinaryMask background_edges = thin_edges(gb, threshold);
  BinaryMask out(gf.width, gf.height, 0);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = frame_edges[i] && !background_edges[i] ? 1 : 0;
  return out;
}

/// Shared per-frame inputs of the large-region method.
struct LrInputs {
  GreyImage grey_f;
  GreyImage grey_b;
  GradientField grads_f;
  GradientField grads_b;

  LrInputs(const Frame& f, const Frame& b)
      : grey_f(to_grey(f)), grey_b(to_grey(b)), grads_f(gradient_field(grey_f)), grads_b(gradient_field(grey_b)) {}
};

namespace detail {

/// Splits `candidates` along `cuts`, then hands each cut pixel back to the
/// region that reaches it first (breadth-first, 8-connected). Cut pixels no
/// region reaches form regions of their own.
inline Raster<int> split_regions(const BinaryMask& candidates, const BinaryMask& cuts, int* count) {
  BinaryMask core(candidates.width(), candidates.height(), 0);
  for (std::size_t i = 0; i < core.size(); ++i) core[i] = candidates[i] && !cuts[i] ? 1 : 0;
  int n = 0;
  Raster<int> labels = label_components(core, &n);

  std::deque<Point> queue;
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (labels(x, y) > 0) queue.push_back({x, y});
    }
  }
  while (!queue.empty()) {
    const Point q = queue.front();
    queue.pop_front();
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = q.x + dx, ny = q.y + dy;
        if (!labels.contains(nx, ny) || !candidates(nx, ny) || labels(nx, ny) != 0) continue;
        labels(nx, ny) = labels(q.x, q.y);
        queue.push_back({nx, ny});
      }
    }
  }

  BinaryMask orphans(candidates.width(), candidates.height(), 0);
  bool any = false;
  for (std::size_t i = 0; i < orphans.size(); ++i) {
    if (candidates[i] && labels[i] == 0) orphans[i] = 1, any = true;
  }
  if (any) {
    int m = 0;
    const Raster<int> extra = label_components(orphans, &m);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (extra[i] > 0) labels[i] = n + extra[i];
    }
    n += m;
  }
  *count = n;
  return labels;
}

}  // namespace detail

/// Candidate shadow regions: connected components of the weak chromacity
/// test, optionally split along frame-only edges, keeping regions of at
/// least min_region pixels.
inline std::vector<Region> candidate_regions(const Frame& f, const Frame& b, const BinaryMask& fg,
                                             const LrInputs& in, const LrParams& p) {
  const BinaryMask weak = chromacity_votes(f, b, fg, p.weak);
  int count = 0;
  Raster<int> labels;
  if (p.edge_split) {
    const BinaryMask cuts = dilate3(frame_only_edges(in.grads_f, in.grads_b, p.edge_threshold));
    labels = detail::split_regions(weak, cuts, &count);
  } else {
    labels = label_components(weak, &count);
  }
  std::vector<Region> regions = regions_from_labels(labels, count);
  std::erase_if(regions, [&](const Region& r) { return static_cast<int>(r.size()) < p.min_region; });
  return regions;
}

inline std::vector<Region> candidate_regions(const Frame& f, const Frame& b, const BinaryMask& fg,
                                             const LrParams& p) {
  p.validate();
  require_same_shape(f, b, "candidate_regions");
  require_same_shape(f, fg, "candidate_regions");
  return candidate_regions(f, b, fg, LrInputs(f, b), p);
}

/// Regions decided as a whole: Shadow when c > tau_c (or the flat-region
/// policy trusts the weak detector), all other foreground pixels Object.
inline TriMask classify_texture_lr(const Frame& f, const Frame& b, const BinaryMask& fg, const LrParams& p) {
  p.validate();
  require_same_shape(f, b, "classify_texture_lr");
  require_same_shape(f, fg, "classify_texture_lr");
  const LrInputs in(f, b);
  TriMask out = all_object(fg);
  for (const Region& r : candidate_regions(f, b, fg, in, p)) {
    bool is_shadow;
    if (p.correlation == 0.0) {
      is_shadow = true;
    } else {
      const RegionCorrelation rc = region_correlation(r, in.grads_f, in.grads_b, p);
      is_shadow = rc.c ? *rc.c > p.correlation : p.flat_policy == FlatRegionPolicy::TrustWeakDetector;
    }
    if (is_shadow) {
      for (const Point& q : r.pixels) out(q.x, q.y) = Label::Shadow;
    }
  }
  return out;
}

}  // namespace shadow
