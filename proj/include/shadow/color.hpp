#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "shadow/image.hpp"

namespace shadow {

struct Hsv {
  double h = 0.0;  // degrees, [0, 360)
  double s = 0.0;  // [0, 1]
  double v = 0.0;  // [0, 1]
};

/// Round half away from zero and clamp to the 8-bit range.
inline std::uint8_t to_u8(double value) {
  if (!(value > 0.0)) return 0;
  if (value >= 255.0) return 255;
  // value - whole is exact here, so this is lround without the libm call
  const int whole = static_cast<int>(value);
  return static_cast<std::uint8_t>(value - whole >= 0.5 ? whole + 1 : whole);
}

/// Hexcone conversion. Achromatic pixels get the canonical hue 0.
inline Hsv rgb_to_hsv(Rgb p) {
  const int r = p.r;
  const int g = p.g;
  const int b = p.b;
  const int mx = std::max({r, g, b});
  const int mn = std::min({r, g, b});
  const int d = mx - mn;

  Hsv out;
  out.v = mx / 255.0;
  if (mx == 0 || d == 0) {
    out.s = 0.0;
    out.h = 0.0;
    return out;
  }
  out.s = static_cast<double>(d) / mx;
  double h;
  if (mx == r) {
    h = 60.0 * static_cast<double>(g - b) / d;
  } else if (mx == g) {
    h = 60.0 * (static_cast<double>(b - r) / d + 2.0);
  } else {
    h = 60.0 * (static_cast<double>(r - g) / d + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

inline Rgb hsv_to_rgb(const Hsv& hsv) {
  const double c = hsv.v * hsv.s;
  const double hp = std::fmod(hsv.h, 360.0) / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c, g = x;
  } else if (hp < 2) {
    r = x, g = c;
  } else if (hp < 3) {
    g = c, b = x;
  } else if (hp < 4) {
    g = x, b = c;
  } else if (hp < 5) {
    r = x, b = c;
  } else {
    r = c, b = x;
  }
  const double m = hsv.v - c;
  return {to_u8((r + m) * 255.0), to_u8((g + m) * 255.0), to_u8((b + m) * 255.0)};
}

/// Circular distance between two hues in degrees, in [0, 180].
inline double hue_distance(double h1, double h2) {
  const double d = std::abs(h1 - h2);
  return std::min(d, 360.0 - d);
}

// BT.601 luma weights.
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

inline double luma(Rgb p) { return kLumaR * p.r + kLumaG * p.g + kLumaB * p.b; }

namespace detail {
// The per-channel products of luma(), tabulated. Summed in the same order
// they give bit-identical results.
struct LumaTables {
  std::array<double, 256> r, g, b;
  LumaTables() {
    for (int v = 0; v < 256; ++v) r[v] = kLumaR * v, g[v] = kLumaG * v, b[v] = kLumaB * v;
  }
};
inline const LumaTables& luma_tables() {
  static const LumaTables t;
  return t;
}
}  // namespace detail

inline GreyImage to_grey(const Frame& f) {
  const detail::LumaTables& t = detail::luma_tables();
  GreyImage out(f.width(), f.height());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Rgb p = f[i];
    out[i] = to_u8(t.r[p.r] + t.g[p.g] + t.b[p.b]);
  }
  return out;
}

inline Frame grey_to_frame(const GreyImage& g) {
  Frame out(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = {g[i], g[i], g[i]};
  return out;
}

/// Blend each pixel toward its own luma: out = (1 - lambda) * orig + lambda * grey.
inline Frame desaturate(const Frame& f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("desaturation rate must lie in [0, 1]");
  }
  if (lambda == 0.0) return f;
  Frame out(f.width(), f.height());
  const double keep = 1.0 - lambda;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Rgb p = f[i];
    const double grey = luma(p);
    out[i] = {to_u8(keep * p.r + lambda * grey), to_u8(keep * p.g + lambda * grey),
              to_u8(keep * p.b + lambda * grey)};
  }
  return out;
}

}  // namespace shadow
