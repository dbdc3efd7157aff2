#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "shadow/image.hpp"

namespace shadow {

/// Pixel tallies over ground-truth foreground. Ground-truth background pixels
/// are outside the score domain.
struct EvalCounts {
  std::int64_t tp_shadow = 0;
  std::int64_t fn_shadow = 0;
  std::int64_t tp_object = 0;
  std::int64_t fn_object = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    tp_shadow += o.tp_shadow;
    fn_shadow += o.fn_shadow;
    tp_object += o.tp_object;
    fn_object += o.fn_object;
    return *this;
  }
  friend EvalCounts operator+(EvalCounts a, const EvalCounts& b) { return a += b; }
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;

  bool has_shadow() const { return tp_shadow + fn_shadow > 0; }
  bool has_object() const { return tp_object + fn_object > 0; }
};

/// A ground-truth shadow pixel is a true positive only when predicted Shadow;
/// a ground-truth object pixel only when predicted Object.
inline EvalCounts score_masks(const TriMask& pred, const TriMask& gt) {
  require_same_shape(pred, gt, "score_masks");
  EvalCounts c;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    switch (gt[i]) {
      case Label::Shadow:
        (pred[i] == Label::Shadow ? c.tp_shadow : c.fn_shadow) += 1;
        break;
      case Label::Object:
        (pred[i] == Label::Object ? c.tp_object : c.fn_object) += 1;
        break;
      case Label::Background:
        break;
    }
  }
  return c;
}

/// Detection rate eta, discrimination rate xi and their mean. A rate with an
/// empty denominator is undefined; `avg` is defined only when both are.
struct MethodScore {
  std::optional<double> eta;
  std::optional<double> xi;
  std::optional<double> avg;
  double ms_per_frame = 0.0;
  int frames_scored = 0;
};

inline std::optional<double> detection_rate(const EvalCounts& c) {
  if (!c.has_shadow()) return std::nullopt;
  return static_cast<double>(c.tp_shadow) / static_cast<double>(c.tp_shadow + c.fn_shadow);
}

inline std::optional<double> discrimination_rate(const EvalCounts& c) {
  if (!c.has_object()) return std::nullopt;
  return static_cast<double>(c.tp_object) / static_cast<double>(c.tp_object + c.fn_object);
}

inline MethodScore score_of(const EvalCounts& c) {
  MethodScore s;
  s.eta = detection_rate(c);
  s.xi = discrimination_rate(c);
  if (s.eta && s.xi) s.avg = (*s.eta + *s.xi) / 2.0;
  return s;
}

/// Pixel-pooled rates over all frames.
inline MethodScore aggregate(std::span<const EvalCounts> frames) {
  if (frames.empty()) throw std::invalid_argument("aggregate: no labelled frames");
  EvalCounts total;
  for (const EvalCounts& c : frames) total += c;
  MethodScore s = score_of(total);
  s.frames_scored = static_cast<int>(frames.size());
  return s;
}

/// Per-frame rates averaged over the frames where each is defined.
inline MethodScore aggregate_macro(std::span<const EvalCounts> frames) {
  if (frames.empty()) throw std::invalid_argument("aggregate_macro: no labelled frames");
  double eta = 0.0, xi = 0.0;
  int n_eta = 0, n_xi = 0;
  for (const EvalCounts& c : frames) {
    if (auto e = detection_rate(c)) eta += *e, ++n_eta;
    if (auto x = discrimination_rate(c)) xi += *x, ++n_xi;
  }
  MethodScore s;
  if (n_eta > 0) s.eta = eta / n_eta;
  if (n_xi > 0) s.xi = xi / n_xi;
  if (s.eta && s.xi) s.avg = (*s.eta + *s.xi) / 2.0;
  s.frames_scored = static_cast<int>(frames.size());
  return s;
}

}  // namespace shadow
