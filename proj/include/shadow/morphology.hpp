#pragma once

#include "shadow/image.hpp"

namespace shadow {

// 3x3 binary morphology. Pixels outside the image count as off for dilation
// and as on for erosion, so borders are not eaten away.

inline BinaryMask dilate3(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height(), 0);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool on = false;
      for (int dy = -1; dy <= 1 && !on; ++dy) {
        for (int dx = -1; dx <= 1 && !on; ++dx) {
          on = m.contains(x + dx, y + dy) && m(x + dx, y + dy);
        }
      }
      out(x, y) = on ? 1 : 0;
    }
  }
  return out;
}

inline BinaryMask erode3(const BinaryMask& m) {
  BinaryMask out(m.width(), m.height(), 0);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool on = true;
      for (int dy = -1; dy <= 1 && on; ++dy) {
        for (int dx = -1; dx <= 1 && on; ++dx) {
          on = !m.contains(x + dx, y + dy) || m(x + dx, y + dy);
        }
      }
      out(x, y) = on ? 1 : 0;
    }
  }
  return out;
}

/// Opening followed by closing: drops isolated specks, then fills pinholes.
inline BinaryMask open_close3(const BinaryMask& m) {
  return erode3(dilate3(dilate3(erode3(m))));
}

}  // namespace shadow
