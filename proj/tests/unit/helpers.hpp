#pragma once

#include <cstdint>
#include <random>

#include "shadow/image.hpp"

namespace testing_support {

inline shadow::BinaryMask random_mask(std::mt19937& rng, int w, int h, double density) {
  std::bernoulli_distribution on(density);
  shadow::BinaryMask m(w, h, 0);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = on(rng) ? 1 : 0;
  return m;
}

inline shadow::TriMask random_trimask(std::mt19937& rng, int w, int h) {
  std::uniform_int_distribution<int> pick(0, 2);
  static constexpr shadow::Label kLabels[] = {shadow::Label::Background, shadow::Label::Shadow, shadow::Label::Object};
  shadow::TriMask m(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = kLabels[pick(rng)];
  return m;
}

inline shadow::Rgb random_rgb(std::mt19937& rng) {
  std::uniform_int_distribution<int> c(0, 255);
  return {static_cast<std::uint8_t>(c(rng)), static_cast<std::uint8_t>(c(rng)), static_cast<std::uint8_t>(c(rng))};
}

inline shadow::Frame random_frame(std::mt19937& rng, int w, int h) {
  shadow::Frame f(w, h);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = random_rgb(rng);
  return f;
}

inline shadow::Frame constant_frame(int w, int h, shadow::Rgb c) { return shadow::Frame(w, h, c); }

}  // namespace testing_support
