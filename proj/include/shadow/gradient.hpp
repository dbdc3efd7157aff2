#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "shadow/image.hpp"

namespace shadow {

/// Forward-difference gradients of a grey image. Components are kept so that
/// direction comparisons can use the dot product directly.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  double magnitude(std::size_t i) const { return std::hypot(dx[i], dy[i]); }
  double magnitude(int x, int y) const { return magnitude(index(x, y)); }
  /// Radians in [-pi, pi]; meaningful only where magnitude > 0.
  double direction(std::size_t i) const { return std::atan2(dy[i], dx[i]); }
  double direction(int x, int y) const { return direction(index(x, y)); }
};

/// dx(x,y) = I(x+1,y) - I(x,y), dy(x,y) = I(x,y+1) - I(x,y). The last row and
/// last column have no forward neighbour and get a zero gradient.
inline GradientField gradient_field(const GreyImage& grey) {
  if (grey.width() < 2 || grey.height() < 2) {
    throw std::invalid_argument("gradient_field needs an image of at least 2x2 pixels");
  }
  GradientField g;
  g.width = grey.width();
  g.height = grey.height();
  g.dx.assign(grey.size(), 0.0);
  g.dy.assign(grey.size(), 0.0);
  for (int y = 0; y + 1 < g.height; ++y) {
    for (int x = 0; x + 1 < g.width; ++x) {
      const std::size_t i = g.index(x, y);
      const double c = grey(x, y);
      g.dx[i] = grey(x + 1, y) - c;
      g.dy[i] = grey(x, y + 1) - c;
    }
  }
  return g;
}

}  // namespace shadow
