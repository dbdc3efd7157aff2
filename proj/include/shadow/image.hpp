#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shadow {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Per-pixel label. The numeric values double as the 8-bit PNG encoding of
/// mask files: background black, shadow grey, object white.
enum class Label : std::uint8_t { Background = 0, Shadow = 128, Object = 255 };

struct Point {
  int x = 0;
  int y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Dense row-major raster. Width and height are at least 1.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{}) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw std::invalid_argument("raster dimensions must be at least 1x1, got " +
                                  std::to_string(width) + "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Frame = Raster<Rgb>;
using GreyImage = Raster<std::uint8_t>;
/// Binary mask: 0 = off, anything else = on. Producers write 0/1.
using BinaryMask = Raster<std::uint8_t>;
using TriMask = Raster<Label>;

template <typename A, typename B>
void require_same_shape(const Raster<A>& a, const Raster<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
  }
}

/// Foreground (Object or Shadow) pixels of a labelled mask.
inline BinaryMask foreground_of(const TriMask& mask) {
  BinaryMask out(mask.width(), mask.height(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out[i] = mask[i] != Label::Background ? 1 : 0;
  }
  return out;
}

/// Pixels labelled Object; shadow removal sets shadow pixels to zero.
inline BinaryMask objects_of(const TriMask& mask) {
  BinaryMask out(mask.width(), mask.height(), 0);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    out[i] = mask[i] == Label::Object ? 1 : 0;
  }
  return out;
}

/// Labels every foreground pixel as Object, i.e. no shadow removal.
inline TriMask all_object(const BinaryMask& fg) {
  TriMask out(fg.width(), fg.height(), Label::Background);
  for (std::size_t i = 0; i < fg.size(); ++i) {
    if (fg[i]) out[i] = Label::Object;
  }
  return out;
}

}  // namespace shadow
