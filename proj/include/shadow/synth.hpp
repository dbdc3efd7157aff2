#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadow/image.hpp"
#include "shadow/io.hpp"
#include "shadow/pipeline.hpp"
#include "shadow/tracking.hpp"

// Deterministic synthetic sequences with exact labels. Everything random is
// drawn from raw mt19937 output, whose sequence is fixed by the standard, so
// the generated bytes are identical on every platform.
namespace shadow::synth {

class Noise {
 public:
  explicit Noise(std::uint32_t seed) : gen_(seed) {}
  // Uniform integer in [-2, 2].
  int pixel() { return static_cast<int>(gen_() % 5u) - 2; }
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(gen_() >> 8) / 16777216.0; }

 private:
  std::mt19937 gen_;
};

/// Multiplicative value noise: 1 + amplitude * u, u in [-1, 1], on a grid
/// of `cell` pixels with bilinear interpolation.
class Texture {
 public:
  Texture(int width, int height, int cell, double amplitude, std::uint32_t seed)
      : cell_(cell), gw_(width / cell + 2), gh_(height / cell + 2), amplitude_(amplitude) {
    Noise n(seed);
    grid_.resize(static_cast<std::size_t>(gw_) * gh_);
    for (double& v : grid_) v = 2.0 * n.unit() - 1.0;
  }

  double at(double x, double y) const {
    const double gx = std::clamp(x / cell_, 0.0, gw_ - 1.001);
    const double gy = std::clamp(y / cell_, 0.0, gh_ - 1.001);
    const int x0 = static_cast<int>(gx), y0 = static_cast<int>(gy);
    const double fx = gx - x0, fy = gy - y0;
    const auto g = [&](int i, int j) { return grid_[static_cast<std::size_t>(j) * gw_ + i]; };
    const double top = g(x0, y0) * (1 - fx) + g(x0 + 1, y0) * fx;
    const double bottom = g(x0, y0 + 1) * (1 - fx) + g(x0 + 1, y0 + 1) * fx;
    return 1.0 + amplitude_ * (top * (1 - fy) + bottom * fy);
  }

 private:
  int cell_, gw_, gh_;
  double amplitude_;
  std::vector<double> grid_;
};

/// Axis-aligned box or ellipse in actor-local coordinates. depth() is the
/// approximate distance inside the shape, negative outside.
struct Shape {
  enum Kind { Box, Ellipse } kind = Box;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // bounds

  static Shape box(double x, double y, double w, double h) { return {Box, x, y, x + w, y + h}; }
  static Shape ellipse(double cx, double cy, double rx, double ry) { return {Ellipse, cx - rx, cy - ry, cx + rx, cy + ry}; }

  double depth(double x, double y) const {
    if (kind == Box) return std::min({x - x0, x1 - x, y - y0, y1 - y});
    const double rx = (x1 - x0) / 2, ry = (y1 - y0) / 2;
    const double dx = (x - (x0 + rx)) / rx, dy = (y - (y0 + ry)) / ry;
    return (1.0 - std::sqrt(dx * dx + dy * dy)) * std::min(rx, ry);
  }
};

inline double union_depth(const std::vector<Shape>& shapes, double x, double y) {
  double d = -1e9;
  for (const Shape& s : shapes) d = std::max(d, s.depth(x, y));
  return d;
}

/// A moving object with its own texture and an attached cast shadow.
struct Actor {
  std::vector<Shape> body;
  std::vector<Shape> shadow;
  Rgb colour;
  Texture texture;
  double attenuation = 0.75;  // shadow darkening factor at full depth
  double penumbra = 2.0;      // pixels of linear ramp at the shadow border
  double x = 0, y = 0;        // position at frame 0
  double vx = 0, vy = 0;      // pixels per frame

  double ox(int t) const { return x + vx * t; }
  double oy(int t) const { return y + vy * t; }
};

struct Scene {
  std::string name;
  int width = 200;
  int height = 150;
  int frames = 40;
  Rgb ground;
  Texture ground_texture;
  std::vector<Actor> actors;
  std::uint32_t noise_seed = 1;
  bool labels = true;  // write ground-truth masks
  bool tracks = false; // write ground-truth tracks
};

struct SynthSequence {
  std::string name;
  std::vector<Frame> frames;
  Frame background;
  std::vector<TriMask> gt;
  bool write_labels = true;
  std::vector<Track> tracks;
};

namespace detail {
inline std::uint8_t channel(double v, int noise) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v) + noise, 0L, 255L));
}

inline Rgb shade(Rgb c, double factor, Noise& n) {
  const int nr = n.pixel(), ng = n.pixel(), nb = n.pixel();
  return {channel(c.r * factor, nr), channel(c.g * factor, ng), channel(c.b * factor, nb)};
}
}  // namespace detail

inline SynthSequence render(const Scene& scene) {
  SynthSequence out;
  out.name = scene.name;
  out.write_labels = scene.labels;
  Noise noise(scene.noise_seed);

  out.background = Frame(scene.width, scene.height);
  for (int y = 0; y < scene.height; ++y) {
    for (int x = 0; x < scene.width; ++x) {
      out.background(x, y) = detail::shade(scene.ground, scene.ground_texture.at(x + 0.5, y + 0.5), noise);
    }
  }

  std::vector<Track> tracks(scene.actors.size());
  for (int t = 0; t < scene.frames; ++t) {
    Frame f(scene.width, scene.height);
    TriMask gt(scene.width, scene.height, Label::Background);
    for (int y = 0; y < scene.height; ++y) {
      for (int x = 0; x < scene.width; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        double factor = scene.ground_texture.at(px, py);
        Rgb colour = scene.ground;
        Label label = Label::Background;
        double shadow = 1.0;
        for (const Actor& a : scene.actors) {
          const double d = union_depth(a.shadow, px - a.ox(t), py - a.oy(t));
          if (d <= 0) continue;
          shadow = std::min(shadow, 1.0 - (1.0 - a.attenuation) * std::min(1.0, d / a.penumbra));
          label = Label::Shadow;
        }
        factor *= shadow;
        for (const Actor& a : scene.actors) {
          const double lx = px - a.ox(t), ly = py - a.oy(t);
          if (union_depth(a.body, lx, ly) <= 0) continue;
          colour = a.colour;
          factor = a.texture.at(lx, ly);
          label = Label::Object;
        }
        f(x, y) = detail::shade(colour, factor, noise);
        gt(x, y) = label;
      }
    }

    for (std::size_t k = 0; k < scene.actors.size(); ++k) {
      const Actor& a = scene.actors[k];
      double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
      for (const Shape& s : a.body) {
        x0 = std::min(x0, s.x0 + a.ox(t));
        y0 = std::min(y0, s.y0 + a.oy(t));
        x1 = std::max(x1, s.x1 + a.ox(t));
        y1 = std::max(y1, s.y1 + a.oy(t));
      }
      x0 = std::max(x0, 0.0), y0 = std::max(y0, 0.0);
      x1 = std::min(x1, double(scene.width)), y1 = std::min(y1, double(scene.height));
      if (x1 - x0 < 1.0 || y1 - y0 < 1.0) continue;
      tracks[k].id = static_cast<int>(k) + 1;
      tracks[k].observations.push_back({t, (x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0});
    }
    out.frames.push_back(std::move(f));
    out.gt.push_back(std::move(gt));
  }
  if (scene.tracks) {
    for (Track& tr : tracks) {
      if (!tr.observations.empty()) out.tracks.push_back(std::move(tr));
    }
  }
  return out;
}

/// Upright figure in local coordinates: head, torso and two legs; feet at
/// local y = 45, centred on local x = 6.
inline std::vector<Shape> person_body() {
  return {Shape::ellipse(6, 5, 5, 5), Shape::box(0, 9, 12, 24), Shape::box(0.5, 33, 4.5, 12), Shape::box(7, 33, 4.5, 12)};
}

/// Hue is the only cue separating shadows from objects: the objects are
/// strongly saturated and brighter than the ground, yet their luma is about
/// half the ground's.
inline Scene hue_scene() {
  Scene s{"hue", 200, 150, 40, {150, 170, 120}, Texture(200, 150, 3, 0.3, 11), {}, 12};
  Actor blue{{Shape::box(0, 0, 26, 36)},
             {Shape::ellipse(36, 30, 30, 13)},
             {40, 70, 210}, Texture(40, 50, 3, 0.15, 12), 0.72, 2.0, 8, 18, 3.5, 0};
  Actor red{{Shape::box(0, 0, 22, 30)},
            {Shape::ellipse(-10, 24, 26, 12)},
            {200, 30, 40}, Texture(40, 50, 3, 0.15, 13), 0.72, 2.0, 168, 92, -3.5, 0};
  s.actors = {blue, red};
  return s;
}

/// Textured ground with three movers: a coloured object, a dark object with
/// the ground's own chromaticity, and a dark object of another hue.
inline Scene textured_scene() {
  Scene s{"textured", 320, 240, 40, {170, 150, 130}, Texture(320, 240, 2, 0.3, 21), {}, 22};
  Actor teal{{Shape::box(0, 0, 30, 44)},
             {Shape::ellipse(60, 44, 55, 24)},
             {50, 150, 160}, Texture(40, 50, 3, 0.2, 23), 0.8, 3.0, 10, 6, 4.0, 0};
  Actor mimic{{Shape::box(0, 0, 36, 28)},
              {Shape::ellipse(-30, 28, 50, 22)},
              {77, 68, 59}, Texture(40, 40, 2, 0.25, 24), 0.8, 3.0, 280, 86, -4.0, 0};
  Actor dark{{Shape::box(0, 0, 26, 36)},
             {Shape::ellipse(50, 34, 52, 24)},
             {60, 40, 90}, Texture(40, 40, 3, 0.2, 25), 0.8, 3.0, 20, 164, 3.5, 0};
  s.actors = {teal, mimic, dark};
  return s;
}

/// Two walking figures with short shadows cast sideways at their feet.
inline Scene people_scene() {
  Scene s{"people", 200, 150, 30, {160, 160, 150}, Texture(200, 150, 4, 0.15, 31), {}, 32};
  Actor a{person_body(), {Shape::ellipse(26, 43, 22, 4)}, {70, 90, 160}, Texture(20, 50, 3, 0.15, 33), 0.7, 1.5,
          20, 15, 2.0, 0};
  Actor b{person_body(), {Shape::ellipse(-14, 43, 22, 4)}, {160, 70, 60}, Texture(20, 50, 3, 0.15, 34), 0.7, 1.5,
          160, 85, -2.0, 0};
  s.actors = {a, b};
  return s;
}

/// Two figures walking past each other on parallel lanes. The upper figure's
/// long shadow reaches the lower lane, so while they pass their blobs merge
/// unless shadows are removed.
inline Scene crossing_scene() {
  Scene s{"crossing", 200, 150, 60, {165, 155, 140}, Texture(200, 150, 4, 0.22, 41), {}, 42};
  s.labels = false;
  s.tracks = true;
  Actor a{person_body(), {Shape::ellipse(14, 70, 9, 27)}, {60, 120, 200}, Texture(20, 50, 3, 0.15, 43), 0.72, 2.0,
          30, 12, 1.5, 0};
  Actor b{person_body(), {Shape::ellipse(14, 60, 8, 17)}, {200, 80, 60}, Texture(20, 50, 3, 0.15, 44), 0.72, 2.0,
          158, 78, -1.5, 0};
  s.actors = {a, b};
  return s;
}

inline std::vector<std::string> sequence_names() { return {"hue", "textured", "people", "crossing"}; }

inline Scene scene(const std::string& name) {
  if (name == "hue") return hue_scene();
  if (name == "textured") return textured_scene();
  if (name == "people") return people_scene();
  if (name == "crossing") return crossing_scene();
  throw std::invalid_argument("unknown synthetic sequence '" + name + "'");
}

inline SynthSequence generate(const std::string& name) { return render(scene(name)); }

inline std::string frame_name(int t) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d.png", t);
  return buf;
}

/// Writes the sequence in the standard directory layout under `dir`.
inline void write_sequence(const SynthSequence& seq, const fs::path& dir) {
  fs::create_directories(dir / "frames");
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    save_frame(dir / "frames" / frame_name(static_cast<int>(t)), seq.frames[t]);
    if (seq.write_labels) save_mask(dir / "gt" / frame_name(static_cast<int>(t)), seq.gt[t]);
  }
  save_frame(dir / "background.png", seq.background);
  if (!seq.tracks.empty()) {
    std::ofstream os(dir / "tracks.txt");
    os << "# frame_index track_id x y w h\n";
    write_tracks(os, seq.tracks);
  }
}

/// The same sequence as `load_sequence` would produce from disk.
inline SequenceData as_sequence_data(const SynthSequence& seq) {
  SequenceData data;
  data.spec.name = seq.name;
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    data.spec.frames.push_back(frame_name(static_cast<int>(t)));
    data.spec.frame_index.push_back(static_cast<long>(t));
    if (seq.write_labels) {
      data.gt.emplace_back(seq.gt[t]);
    } else {
      data.gt.emplace_back();
    }
  }
  data.frames = seq.frames;
  data.background = seq.background;
  return data;
}

}  // namespace shadow::synth
