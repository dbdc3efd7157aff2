#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shadow/background_gmm.hpp"
#include "shadow/chromacity.hpp"
#include "shadow/color.hpp"
#include "shadow/config.hpp"
#include "shadow/geometry.hpp"
#include "shadow/gradient.hpp"
#include "shadow/io.hpp"
#include "shadow/metrics.hpp"
#include "shadow/physical.hpp"
#include "shadow/texture_lr.hpp"
#include "shadow/texture_sr.hpp"
#include "shadow/tracking.hpp"

namespace shadow {

/// `None` keeps every foreground pixel as Object (no shadow removal).
/// `SrTextureFast` is the small-region method with the reduced kernel bank.
enum class Method { None, Chromacity, Physical, Geometry, SrTexture, SrTextureFast, LrTexture };

inline constexpr std::array kAllMethods{Method::None,      Method::Chromacity,    Method::Physical, Method::Geometry,
                                        Method::SrTexture, Method::SrTextureFast, Method::LrTexture};

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::None: return "none";
    case Method::Chromacity: return "chromacity";
    case Method::Physical: return "physical";
    case Method::Geometry: return "geometry";
    case Method::SrTexture: return "sr-texture";
    case Method::SrTextureFast: return "sr-texture-16";
    case Method::LrTexture: return "lr-texture";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

inline std::vector<Method> parse_method_list(const std::string& csv) {
  std::vector<Method> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    const Method m = parse_method(item);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) throw ConfigError("empty method list");
  return out;
}

/// The five detectors of the comparison.
inline std::vector<Method> detector_methods() {
  return {Method::Chromacity, Method::Physical, Method::Geometry, Method::SrTexture, Method::LrTexture};
}

/// A sequence held in memory.
struct SequenceData {
  SequenceSpec spec;
  std::vector<Frame> frames;
  std::optional<Frame> background;
  std::vector<std::optional<TriMask>> gt;  // one slot per frame

  int width() const { return frames.front().width(); }
  int height() const { return frames.front().height(); }
  std::size_t labelled_frames() const {
    return static_cast<std::size_t>(std::count_if(gt.begin(), gt.end(), [](const auto& m) { return m.has_value(); }));
  }
};

inline SequenceData load_sequence(const SequenceSpec& spec) {
  SequenceData data;
  data.spec = spec;
  for (const fs::path& p : spec.frames) {
    data.frames.push_back(load_frame(p));
    if (!data.frames.back().same_shape(data.frames.front())) {
      throw DatasetError("frame " + p.string() + " differs in size from the first frame");
    }
  }
  if (spec.background) {
    data.background = load_frame(*spec.background);
    if (!data.background->same_shape(data.frames.front())) {
      throw DatasetError("background image differs in size from the frames");
    }
  }
  for (std::size_t t = 0; t < spec.frames.size(); ++t) {
    const std::optional<fs::path> p = spec.gt_mask(t);
    if (!p) {
      data.gt.emplace_back();
      continue;
    }
    data.gt.push_back(load_mask(*p));
    if (!data.gt.back()->same_shape(data.frames.front())) {
      throw DatasetError("ground-truth mask " + p->string() + " differs in size from the frames");
    }
  }
  return data;
}

inline SequenceData load_sequence(const fs::path& root) { return load_sequence(open_sequence(root)); }

/// Per-sequence detector state: the physical method's learned model and the
/// small-region kernel bank.
class Detector {
 public:
  Detector(Method method, const BenchConfig& config) : method_(method), config_(config) {}

  Method method() const { return method_; }

  TriMask operator()(const Frame& f, const Frame& b, const BinaryMask& fg) {
    switch (method_) {
      case Method::None:
        return all_object(fg);
      case Method::Chromacity:
        return classify_chromacity(f, b, fg, config_.chromacity);
      case Method::Physical:
        return physical(f, b, fg);
      case Method::Geometry:
        return detect_geometry(to_grey(f), fg, config_.geometry);
      case Method::SrTexture:
      case Method::SrTextureFast: {
        const GreyImage& gb = grey_background(b);
        if (!bank_) bank_ = make_bank(gb);
        return classify_texture_sr(to_grey(f), gb, fg, *bank_, config_.sr_texture.params);
      }
      case Method::LrTexture:
        return classify_texture_lr(f, b, fg, config_.lr_texture);
    }
    throw std::logic_error("unhandled method");
  }

  const std::optional<ShadowAppearanceModel>& physical_model() const { return physical_; }

 private:
  // A pinned background repeats every frame; convert it once.
  const GreyImage& grey_background(const Frame& b) {
    if (!grey_bg_ || grey_bg_->first != b) grey_bg_.emplace(b, to_grey(b));
    return grey_bg_->second;
  }

  GaborBank make_bank(const GreyImage& calibration) const {
    const SrTextureConfig& c = config_.sr_texture;
    if (method_ == Method::SrTexture) return build_bank(c.bank);
    if (c.selection == KernelSelection::Grid) return build_bank(c.fast_bank);
    const BinaryMask everywhere(calibration.width(), calibration.height(), 1);
    return select_kernels(build_bank(c.bank), calibration, everywhere, c.fast_bank.kernel_count());
  }

  // Learns from this frame's weak candidates, then classifies. Until the
  // model is warmed up the weak detector's verdict stands.
  TriMask physical(const Frame& f, const Frame& b, const BinaryMask& fg) {
    if (!physical_) physical_.emplace(config_.physical);
    const BinaryMask candidates = weak_shadow_candidates(f, b, fg, config_.physical);
    const GradientField gf = gradient_field(to_grey(f));
    const GradientField gb = gradient_field(to_grey(b));
    physical_->update(f, b, candidates, gf, gb);
    if (physical_->warmed_up()) return classify_physical(f, b, fg, *physical_);
    TriMask out = all_object(fg);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (candidates[i]) out[i] = Label::Shadow;
    }
    return out;
  }

  Method method_;
  const BenchConfig& config_;
  std::optional<GaborBank> bank_;
  std::optional<std::pair<Frame, GreyImage>> grey_bg_;
  std::optional<ShadowAppearanceModel> physical_;
};

/// Output of one method over one sequence.
struct MethodRun {
  std::vector<TriMask> masks;
  std::vector<double> detect_ms;  // detector step only, per frame
};

/// Background reference and foreground mask for every frame of a sequence,
/// at one desaturation rate. With a clean background image the model runs
/// in bypass mode. Ground-truth foreground replaces the model's mask on
/// labelled frames when the configuration asks for it.
struct PreparedSequence {
  std::vector<Frame> frames;
  std::vector<Frame> backgrounds;
  std::vector<BinaryMask> foreground;
};

inline PreparedSequence prepare(const SequenceData& data, const BenchConfig& config, double lambda = 0.0) {
  PreparedSequence out;
  std::optional<BackgroundModel> model;
  std::optional<Frame> pinned;
  if (data.background) {
    pinned = lambda == 0.0 ? *data.background : desaturate(*data.background, lambda);
    model = BackgroundModel::from_background(*pinned, config.background);
  } else {
    model.emplace(config.background);
  }
  for (std::size_t t = 0; t < data.frames.size(); ++t) {
    Frame f = lambda == 0.0 ? data.frames[t] : desaturate(data.frames[t], lambda);
    BinaryMask fg = model->observe(f);
    if (config.foreground == ForegroundSource::GroundTruth && data.gt[t]) fg = foreground_of(*data.gt[t]);
    out.backgrounds.push_back(pinned ? *pinned : model->background_image());
    out.foreground.push_back(std::move(fg));
    out.frames.push_back(std::move(f));
  }
  return out;
}

inline MethodRun run_method(const PreparedSequence& seq, Method method, const BenchConfig& config) {
  MethodRun run;
  Detector detect(method, config);
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const auto start = std::chrono::steady_clock::now();
    run.masks.push_back(detect(seq.frames[t], seq.backgrounds[t], seq.foreground[t]));
    const auto stop = std::chrono::steady_clock::now();
    run.detect_ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return run;
}

/// Per-frame counts on the labelled frames.
inline std::vector<EvalCounts> score_run(const SequenceData& data, const MethodRun& run) {
  std::vector<EvalCounts> counts;
  for (std::size_t t = 0; t < data.frames.size(); ++t) {
    if (data.gt[t]) counts.push_back(score_masks(run.masks[t], *data.gt[t]));
  }
  return counts;
}

inline double mean_ms(const std::vector<double>& ms, int warmup) {
  const std::size_t skip = std::min(ms.size(), static_cast<std::size_t>(std::max(warmup, 0)));
  if (skip == ms.size()) return 0.0;
  double total = 0.0;
  for (std::size_t i = skip; i < ms.size(); ++i) total += ms[i];
  return total / static_cast<double>(ms.size() - skip);
}

/// Folds one more repeat into per-frame best times.
inline void keep_fastest(std::vector<double>& best, const std::vector<double>& ms) {
  if (best.empty()) {
    best = ms;
    return;
  }
  for (std::size_t i = 0; i < best.size(); ++i) best[i] = std::min(best[i], ms[i]);
}

/// Mean per-frame detector time, warm-up frames excluded. Each frame counts
/// with its fastest time over the configured repeats, which filters bursts
/// of interference from other load.
inline double time_method(const PreparedSequence& seq, Method method, const BenchConfig& config) {
  std::vector<double> best;
  for (int r = 0; r < config.timing_repeats; ++r) keep_fastest(best, run_method(seq, method, config).detect_ms);
  return mean_ms(best, config.timing_warmup);
}

struct EvalResult {
  MethodScore micro;
  MethodScore macro;
  MethodRun run;
};

/// Runs and scores one method at one desaturation rate. Throws when the
/// sequence has no labelled frames.
inline EvalResult evaluate(const SequenceData& data, Method method, const BenchConfig& config, double lambda = 0.0) {
  const PreparedSequence prepared = prepare(data, config, lambda);
  EvalResult r;
  r.run = run_method(prepared, method, config);
  const std::vector<EvalCounts> counts = score_run(data, r.run);
  r.micro = aggregate(counts);
  r.macro = aggregate_macro(counts);
  r.micro.ms_per_frame = r.macro.ms_per_frame = mean_ms(r.run.detect_ms, config.timing_warmup);
  return r;
}

/// Gate for MOT scoring: configured value, else 10% of the frame diagonal.
inline double mot_gate(const BenchConfig& config, int width, int height) {
  if (config.mot_gate > 0.0) return config.mot_gate;
  return 0.1 * std::hypot(static_cast<double>(width), static_cast<double>(height));
}

struct TrackingRun {
  std::vector<Track> tracks;
  MotResult mot;
};

/// Tracks the Object pixels left after shadow removal and scores the
/// result against ground-truth tracks. Frame numbers are the numeric frame
/// file names.
inline TrackingRun evaluate_tracking(const SequenceData& data, Method method, const BenchConfig& config,
                                     const std::vector<Track>& truth) {
  const PreparedSequence prepared = prepare(data, config);
  const MethodRun run = run_method(prepared, method, config);
  std::vector<BinaryMask> objects;
  for (const TriMask& m : run.masks) objects.push_back(objects_of(m));
  TrackingRun out;
  out.tracks = track_blobs(objects, config.tracker);
  for (Track& t : out.tracks) {
    for (Observation& o : t.observations) o.frame = static_cast<int>(data.spec.frame_index[static_cast<std::size_t>(o.frame)]);
  }
  out.mot = score_mot(out.tracks, truth, mot_gate(config, data.width(), data.height()));
  return out;
}

}  // namespace shadow
