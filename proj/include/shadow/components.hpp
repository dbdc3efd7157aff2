#pragma once

#include <algorithm>
#include <vector>

#include "shadow/image.hpp"

namespace shadow {

struct BoundingBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;  // inclusive
  int y1 = 0;  // inclusive

  int width() const { return x1 - x0 + 1; }
  int height() const { return y1 - y0 + 1; }
};

/// An 8-connected set of pixels with its tight bounding box.
struct Region {
  int id = 0;
  std::vector<Point> pixels;
  BoundingBox box;

  std::size_t size() const { return pixels.size(); }
};

inline BoundingBox bounding_box(const std::vector<Point>& pixels) {
  BoundingBox b{pixels.front().x, pixels.front().y, pixels.front().x, pixels.front().y};
  for (const Point& p : pixels) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

inline Region make_region(int id, std::vector<Point> pixels) {
  Region r;
  r.id = id;
  r.box = bounding_box(pixels);
  r.pixels = std::move(pixels);
  return r;
}

/// Labels the 8-connected components of the non-zero pixels of `mask`.
/// Labels start at 1 in raster order of each component's first pixel; 0 marks
/// pixels outside the mask.
inline Raster<int> label_components(const BinaryMask& mask, int* count = nullptr) {
  Raster<int> labels(mask.width(), mask.height(), 0);
  std::vector<Point> stack;
  int next = 0;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask(x, y) || labels(x, y) != 0) continue;
      ++next;
      labels(x, y) = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Point p = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = p.x + dx;
            const int ny = p.y + dy;
            if (!mask.contains(nx, ny) || !mask(nx, ny) || labels(nx, ny) != 0) continue;
            labels(nx, ny) = next;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  if (count) *count = next;
  return labels;
}

/// Regions of a label image, ordered by label. Pixels within a region are in
/// raster order.
inline std::vector<Region> regions_from_labels(const Raster<int>& labels, int count) {
  std::vector<std::vector<Point>> buckets(static_cast<std::size_t>(count));
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      const int l = labels(x, y);
      if (l > 0) buckets[static_cast<std::size_t>(l - 1)].push_back({x, y});
    }
  }
  std::vector<Region> out;
  out.reserve(buckets.size());
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (!buckets[i].empty()) out.push_back(make_region(static_cast<int>(i) + 1, std::move(buckets[i])));
  }
  return out;
}

inline std::vector<Region> connected_components(const BinaryMask& mask) {
  int count = 0;
  const Raster<int> labels = label_components(mask, &count);
  return regions_from_labels(labels, count);
}

}  // namespace shadow
