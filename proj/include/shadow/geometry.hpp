#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "shadow/components.hpp"
#include "shadow/image.hpp"

namespace shadow {

/// Centroid and orientation of a region from its central moments.
struct GeometryStats {
  double cx = 0.0;
  double cy = 0.0;
  double theta = 0.0;  // radians, (-pi/2, pi/2]
  double mu11 = 0.0;
  double mu20 = 0.0;
  double mu02 = 0.0;
};

/// theta = atan2(2 mu11, mu20 - mu02) / 2. Moments are unnormalized sums; a
/// region with mu11 = 0 and mu20 = mu02 has no preferred axis and gets 0.
inline GeometryStats region_stats(const std::vector<Point>& pixels) {
  if (pixels.size() < 2) throw std::invalid_argument("region_stats needs at least two pixels");
  GeometryStats s;
  for (const Point& p : pixels) {
    s.cx += p.x;
    s.cy += p.y;
  }
  s.cx /= static_cast<double>(pixels.size());
  s.cy /= static_cast<double>(pixels.size());
  for (const Point& p : pixels) {
    const double dx = p.x - s.cx;
    const double dy = p.y - s.cy;
    s.mu11 += dx * dy;
    s.mu20 += dx * dx;
    s.mu02 += dy * dy;
  }
  const double num = 2.0 * s.mu11;
  const double den = s.mu20 - s.mu02;
  s.theta = (num == 0.0 && den == 0.0) ? 0.0 : 0.5 * std::atan2(num, den);
  return s;
}

inline GeometryStats region_stats(const Region& r) { return region_stats(r.pixels); }

struct GeometryParams {
  double head_prominence = 0.3;  // fraction of the blob height
  int projection_smoothing = 5;  // odd box width for the column projection
  int min_row_change = 3;        // pixels; smaller widenings do not start a shadow
  int min_shadow_pixels = 8;
  int min_blob_pixels = 20;
  double weight_s = 0.25;
  double weight_t = 0.25;
  double weight_g = 0.25;
  double threshold = 0.2;  // tau_G
  double min_intensity_variance = 1.0;

  void validate() const {
    if (!(head_prominence > 0.0 && head_prominence <= 1.0))
      throw std::invalid_argument("geometry.head_prominence must lie in (0, 1]");
    if (projection_smoothing < 1 || projection_smoothing % 2 == 0)
      throw std::invalid_argument("geometry.projection_smoothing must be odd and >= 1");
    if (min_row_change < 1) throw std::invalid_argument("geometry.min_row_change must be >= 1");
    if (min_shadow_pixels < 2) throw std::invalid_argument("geometry.min_shadow_pixels must be >= 2");
    if (min_blob_pixels < 1) throw std::invalid_argument("geometry.min_blob_pixels must be >= 1");
    if (!(weight_s >= 0.0 && weight_t >= 0.0 && weight_g >= 0.0))
      throw std::invalid_argument("geometry weights must be >= 0");
    if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("geometry.threshold must lie in (0, 1]");
    if (!(min_intensity_variance > 0.0))
      throw std::invalid_argument("geometry.min_intensity_variance must be > 0");
  }
};

/// One person candidate and the candidate shadow region split off below it.
struct PersonShadowPair {
  std::vector<Point> region;  // the whole person-shadow region R
  std::vector<Point> shadow;  // R2, possibly empty
};

namespace detail {

/// Peaks of a profile whose topographic prominence reaches `min_prominence`.
/// Values outside the profile count as zero.
inline std::vector<int> prominent_peaks(const std::vector<double>& v, double min_prominence) {
  std::vector<int> peaks;
  const int n = static_cast<int>(v.size());
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;  // plateau [i, j]
    const double left = i > 0 ? v[i - 1] : 0.0;
    const double right = j + 1 < n ? v[j + 1] : 0.0;
    if (v[i] > left && v[i] > right) {
      double left_min = v[i];
      int k = i - 1;
      for (; k >= 0 && v[k] <= v[i]; --k) left_min = std::min(left_min, v[k]);
      if (k < 0) left_min = 0.0;
      double right_min = v[i];
      k = j + 1;
      for (; k < n && v[k] <= v[i]; ++k) right_min = std::min(right_min, v[k]);
      if (k >= n) right_min = 0.0;
      if (v[i] - std::max(left_min, right_min) >= min_prominence) peaks.push_back((i + j) / 2);
    }
    i = j + 1;
  }
  return peaks;
}

inline PersonShadowPair split_at_widening(std::vector<Point> pixels, const GeometryParams& p) {
  PersonShadowPair pair;
  const BoundingBox box = bounding_box(pixels);
  double cy = 0.0;
  for (const Point& q : pixels) cy += q.y;
  cy /= static_cast<double>(pixels.size());

  std::vector<int> rows(static_cast<std::size_t>(box.height()), 0);
  for (const Point& q : pixels) ++rows[static_cast<std::size_t>(q.y - box.y0)];

  // Row below the centroid with the largest increase in width.
  int start_row = -1;
  int best_change = p.min_row_change - 1;
  for (int y = static_cast<int>(std::ceil(cy)); y < box.y1; ++y) {
    const int change = rows[static_cast<std::size_t>(y + 1 - box.y0)] - rows[static_cast<std::size_t>(y - box.y0)];
    if (change > best_change) {
      best_change = change;
      start_row = y + 1;
    }
  }
  if (start_row >= 0) {
    // Columns the legs occupy just above the shadow stay with the person.
    int leg_x0 = box.x1, leg_x1 = box.x0;
    for (const Point& q : pixels) {
      if (q.y < start_row && q.y >= cy) {
        leg_x0 = std::min(leg_x0, q.x);
        leg_x1 = std::max(leg_x1, q.x);
      }
    }
    for (const Point& q : pixels) {
      if (q.y >= start_row && (q.x < leg_x0 || q.x > leg_x1)) pair.shadow.push_back(q);
    }
  }
  pair.region = std::move(pixels);
  return pair;
}

}  // namespace detail

/// Splits a blob into person-shadow pairs: columns of the blob projection
/// that peak (heads) each own the columns up to the projection minimum
/// between neighbouring peaks. Within each part the shadow starts at the row
/// below the centroid where the row width grows most, and R2 is the part of
/// the blob from that row down that lies outside the leg columns.
inline std::vector<PersonShadowPair> split_person_shadow(const Region& blob,
                                                         const GeometryParams& p = {}) {
  if (blob.pixels.empty()) throw std::invalid_argument("split_person_shadow: empty blob");
  const BoundingBox& box = blob.box;
  const int w = box.width();
  std::vector<double> columns(static_cast<std::size_t>(w), 0.0);
  for (const Point& q : blob.pixels) columns[static_cast<std::size_t>(q.x - box.x0)] += 1.0;

  std::vector<double> smooth(columns.size(), 0.0);
  const int r = p.projection_smoothing / 2;
  for (int x = 0; x < w; ++x) {
    double sum = 0.0;
    int n = 0;
    for (int k = std::max(0, x - r); k <= std::min(w - 1, x + r); ++k, ++n) sum += columns[static_cast<std::size_t>(k)];
    smooth[static_cast<std::size_t>(x)] = sum / n;
  }

  const std::vector<int> peaks = detail::prominent_peaks(smooth, p.head_prominence * box.height());
  if (peaks.empty()) return {PersonShadowPair{blob.pixels, {}}};

  // Cut columns at the lowest projection between consecutive heads.
  std::vector<int> cuts;
  for (std::size_t k = 0; k + 1 < peaks.size(); ++k) {
    int best = peaks[k];
    for (int x = peaks[k]; x <= peaks[k + 1]; ++x) {
      if (smooth[static_cast<std::size_t>(x)] < smooth[static_cast<std::size_t>(best)]) best = x;
    }
    cuts.push_back(best);
  }
  std::vector<std::vector<Point>> parts(peaks.size());
  for (const Point& q : blob.pixels) {
    const int cx = q.x - box.x0;
    std::size_t part = 0;
    while (part < cuts.size() && cx > cuts[part]) ++part;
    parts[part].push_back(q);
  }

  std::vector<PersonShadowPair> pairs;
  for (std::vector<Point>& part : parts) {
    if (!part.empty()) pairs.push_back(detail::split_at_widening(std::move(part), p));
  }
  return pairs;
}

/// Gaussian model of a candidate shadow region over its elliptical
/// coordinates (s along the region's axis, t across it) and grey level g.
struct ShadowGaussianModel {
  double weight_s = 0.25, weight_t = 0.25, weight_g = 0.25;
  double var_s = 1.0, var_t = 1.0, var_g = 1.0;
  double mean_g = 0.0;
  double cx = 0.0, cy = 0.0, theta = 0.0;

  double s(double x, double y) const { return (x - cx) * std::cos(theta) + (y - cy) * std::sin(theta); }
  double t(double x, double y) const { return -(x - cx) * std::sin(theta) + (y - cy) * std::cos(theta); }

  double evaluate(double s_coord, double t_coord, double g) const {
    const double dg = g - mean_g;
    return std::exp(-(weight_s * s_coord * s_coord / var_s + weight_t * t_coord * t_coord / var_t +
                      weight_g * dg * dg / var_g));
  }

  double at_pixel(const Point& q, double g) const { return evaluate(s(q.x, q.y), t(q.x, q.y), g); }
};

inline ShadowGaussianModel fit_shadow_model(const std::vector<Point>& shadow, const GreyImage& grey,
                                            const GeometryParams& p = {}) {
  const GeometryStats st = region_stats(shadow);
  ShadowGaussianModel m;
  m.weight_s = p.weight_s;
  m.weight_t = p.weight_t;
  m.weight_g = p.weight_g;
  m.cx = st.cx;
  m.cy = st.cy;
  m.theta = st.theta;
  double ss = 0.0, tt = 0.0, g = 0.0, gg = 0.0;
  for (const Point& q : shadow) {
    const double s = m.s(q.x, q.y), t = m.t(q.x, q.y);
    ss += s * s;
    tt += t * t;
    const double v = grey(q.x, q.y);
    g += v;
    gg += v * v;
  }
  const double n = static_cast<double>(shadow.size());
  // A one-pixel-thick region still has an extent of one pixel across.
  m.var_s = std::max(ss / n, 1.0 / 12.0);
  m.var_t = std::max(tt / n, 1.0 / 12.0);
  m.mean_g = g / n;
  m.var_g = std::max(gg / n - m.mean_g * m.mean_g, p.min_intensity_variance);
  return m;
}

/// Labels every pixel of each pair's region Shadow when the pair's Gaussian
/// model scores it at least tau_G, else Object. Pairs whose R2 is too small
/// to fit a model leave their whole region Object.
inline void classify_geometry(const std::vector<PersonShadowPair>& pairs, const GreyImage& grey,
                              const GeometryParams& p, TriMask& out) {
  for (const PersonShadowPair& pair : pairs) {
    if (static_cast<int>(pair.shadow.size()) < p.min_shadow_pixels) {
      for (const Point& q : pair.region) out(q.x, q.y) = Label::Object;
      continue;
    }
    const ShadowGaussianModel model = fit_shadow_model(pair.shadow, grey, p);
    for (const Point& q : pair.region) {
      out(q.x, q.y) = model.at_pixel(q, grey(q.x, q.y)) >= p.threshold ? Label::Shadow : Label::Object;
    }
  }
}

/// Whole-frame geometry detector over the blobs of the foreground mask.
inline TriMask detect_geometry(const GreyImage& grey, const BinaryMask& fg, const GeometryParams& p) {
  p.validate();
  require_same_shape(grey, fg, "detect_geometry");
  TriMask out(fg.width(), fg.height(), Label::Background);
  for (const Region& blob : connected_components(fg)) {
    if (static_cast<int>(blob.size()) < p.min_blob_pixels) {
      for (const Point& q : blob.pixels) out(q.x, q.y) = Label::Object;
      continue;
    }
    classify_geometry(split_person_shadow(blob, p), grey, p, out);
  }
  return out;
}

}  // namespace shadow
