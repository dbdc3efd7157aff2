#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadow/background_gmm.hpp"
#include "shadow/chromacity.hpp"
#include "shadow/geometry.hpp"
#include "shadow/physical.hpp"
#include "shadow/texture_lr.hpp"
#include "shadow/texture_sr.hpp"
#include "shadow/tracking.hpp"

namespace shadow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ForegroundSource { GroundTruth, Model };
enum class KernelSelection { Grid, Greedy };

struct SrTextureConfig {
  SrTextureParams params;
  GaborBankConfig bank = GaborBankConfig::full();
  GaborBankConfig fast_bank = GaborBankConfig::reduced();
  KernelSelection selection = KernelSelection::Grid;
};

/// Every tunable of the benchmark. One setting applies to all sequences.
struct BenchConfig {
  BackgroundConfig background;
  ChromacityParams chromacity;
  PhysicalParams physical;
  GeometryParams geometry;
  SrTextureConfig sr_texture;
  LrParams lr_texture;
  TrackerParams tracker;
  double mot_gate = 0.0;               // pixels; 0 means 10% of the frame diagonal
  ForegroundSource foreground = ForegroundSource::GroundTruth;
  std::vector<double> eval_lambdas{0.0};
  std::vector<double> desat_lambdas{0.0, 0.25, 0.5, 0.75, 1.0};
  double sanity_band = 0.75;
  int timing_warmup = 2;
  int timing_repeats = 3;
  std::string output_dir = "out";

  void validate() const {
    background.validate();
    chromacity.validate();
    physical.validate();
    geometry.validate();
    sr_texture.params.validate();
    sr_texture.bank.validate();
    sr_texture.fast_bank.validate();
    lr_texture.validate();
    tracker.validate();
    if (mot_gate < 0.0) throw std::invalid_argument("eval.mot_gate must be >= 0");
    for (const auto* grid : {&eval_lambdas, &desat_lambdas}) {
      for (double l : *grid) {
        if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("desaturation rates must lie in [0, 1]");
      }
    }
    if (std::find(desat_lambdas.begin(), desat_lambdas.end(), 0.0) == desat_lambdas.end() ||
        std::find(desat_lambdas.begin(), desat_lambdas.end(), 1.0) == desat_lambdas.end()) {
      throw std::invalid_argument("desat.lambda_grid must include 0 and 1");
    }
    if (!(sanity_band >= 0.0 && sanity_band <= 1.0)) throw std::invalid_argument("eval.sanity_band must lie in [0, 1]");
    if (timing_warmup < 0) throw std::invalid_argument("timing.warmup_frames must be >= 0");
    if (timing_repeats < 1) throw std::invalid_argument("timing.repeats must be >= 1");
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("not a number: '" + s + "'");
  }
  return v;
}

inline int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1" || s == "on") return true;
  if (s == "false" || s == "0" || s == "off") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

struct Field {
  std::function<std::string(const BenchConfig&)> get;
  std::function<void(BenchConfig&, const std::string&)> set;
};

inline const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    const auto num = [&t](const std::string& key, auto member) {
      t[key] = {[member](const BenchConfig& c) { return format_double(member(c)); },
                [member](BenchConfig& c, const std::string& v) { member(c) = parse_double(v); }};
    };
    const auto integer = [&t](const std::string& key, auto member) {
      t[key] = {[member](const BenchConfig& c) { return std::to_string(member(c)); },
                [member](BenchConfig& c, const std::string& v) { member(c) = parse_int(v); }};
    };
    const auto boolean = [&t](const std::string& key, auto member) {
      t[key] = {[member](const BenchConfig& c) {
                  return std::string(member(c) ? "true" : "false");
                },
                [member](BenchConfig& c, const std::string& v) { member(c) = parse_bool(v); }};
    };
    const auto list = [&t](const std::string& key, auto member) {
      t[key] = {[member](const BenchConfig& c) { return format_list(member(c)); },
                [member](BenchConfig& c, const std::string& v) { member(c) = parse_list(v); }};
    };
#define SHADOW_REF(expr) [](auto& c) -> auto& { return c.expr; }
    integer("background.components", SHADOW_REF(background.components));
    num("background.learning_rate", SHADOW_REF(background.learning_rate));
    num("background.match_sigmas", SHADOW_REF(background.match_sigmas));
    num("background.background_ratio", SHADOW_REF(background.background_ratio));
    num("background.min_variance", SHADOW_REF(background.min_variance));
    num("background.initial_variance", SHADOW_REF(background.initial_variance));
    boolean("background.cleanup", SHADOW_REF(background.cleanup));

    num("chromacity.beta1", SHADOW_REF(chromacity.beta1));
    num("chromacity.beta2", SHADOW_REF(chromacity.beta2));
    num("chromacity.tau_s", SHADOW_REF(chromacity.tau_s));
    num("chromacity.tau_h", SHADOW_REF(chromacity.tau_h));
    integer("chromacity.window", SHADOW_REF(chromacity.window));

    integer("physical.components", SHADOW_REF(physical.components));
    num("physical.learning_rate", SHADOW_REF(physical.learning_rate));
    num("physical.gradient_scale", SHADOW_REF(physical.gradient_scale));
    num("physical.posterior_threshold", SHADOW_REF(physical.posterior_threshold));
    num("physical.confident_weight", SHADOW_REF(physical.confident_weight));
    integer("physical.warmup_frames", SHADOW_REF(physical.warmup_frames));
    num("physical.weak_ratio_low", SHADOW_REF(physical.weak_ratio_low));
    num("physical.weak_ratio_high", SHADOW_REF(physical.weak_ratio_high));
    num("physical.weak_saturation", SHADOW_REF(physical.weak_saturation));
    num("physical.match_sigmas", SHADOW_REF(physical.match_sigmas));

    num("geometry.head_prominence", SHADOW_REF(geometry.head_prominence));
    integer("geometry.projection_smoothing", SHADOW_REF(geometry.projection_smoothing));
    integer("geometry.min_row_change", SHADOW_REF(geometry.min_row_change));
    integer("geometry.min_shadow_pixels", SHADOW_REF(geometry.min_shadow_pixels));
    integer("geometry.min_blob_pixels", SHADOW_REF(geometry.min_blob_pixels));
    num("geometry.weight_s", SHADOW_REF(geometry.weight_s));
    num("geometry.weight_t", SHADOW_REF(geometry.weight_t));
    num("geometry.weight_g", SHADOW_REF(geometry.weight_g));
    num("geometry.threshold", SHADOW_REF(geometry.threshold));

    num("sr_texture.gain_low", SHADOW_REF(sr_texture.params.gain_low));
    num("sr_texture.distance", SHADOW_REF(sr_texture.params.distance));
    integer("sr_texture.kernel_size", SHADOW_REF(sr_texture.bank.size));
    list("sr_texture.wavelengths", SHADOW_REF(sr_texture.bank.wavelengths));
    integer("sr_texture.orientations", SHADOW_REF(sr_texture.bank.orientations));
    list("sr_texture.phases", SHADOW_REF(sr_texture.bank.phases));
    num("sr_texture.sigma_ratio", SHADOW_REF(sr_texture.bank.sigma_ratio));
    list("sr_texture.fast_wavelengths", SHADOW_REF(sr_texture.fast_bank.wavelengths));
    integer("sr_texture.fast_orientations", SHADOW_REF(sr_texture.fast_bank.orientations));
    t["sr_texture.selection"] = {
        [](const BenchConfig& c) {
          return std::string(c.sr_texture.selection == KernelSelection::Grid ? "grid" : "greedy");
        },
        [](BenchConfig& c, const std::string& v) {
          if (v == "grid") {
            c.sr_texture.selection = KernelSelection::Grid;
          } else if (v == "greedy") {
            c.sr_texture.selection = KernelSelection::Greedy;
          } else {
            throw ConfigError("expected grid or greedy, got '" + v + "'");
          }
        }};

    num("lr_texture.beta1", SHADOW_REF(lr_texture.weak.beta1));
    num("lr_texture.beta2", SHADOW_REF(lr_texture.weak.beta2));
    num("lr_texture.tau_s", SHADOW_REF(lr_texture.weak.tau_s));
    num("lr_texture.tau_h", SHADOW_REF(lr_texture.weak.tau_h));
    num("lr_texture.magnitude_floor", SHADOW_REF(lr_texture.magnitude_floor));
    num("lr_texture.angle", SHADOW_REF(lr_texture.angle));
    num("lr_texture.correlation", SHADOW_REF(lr_texture.correlation));
    boolean("lr_texture.edge_split", SHADOW_REF(lr_texture.edge_split));
    num("lr_texture.edge_threshold", SHADOW_REF(lr_texture.edge_threshold));
    integer("lr_texture.min_region", SHADOW_REF(lr_texture.min_region));
    t["lr_texture.flat_policy"] = {
        [](const BenchConfig& c) {
          return std::string(c.lr_texture.flat_policy == FlatRegionPolicy::TrustWeakDetector ? "weak" : "object");
        },
        [](BenchConfig& c, const std::string& v) {
          if (v == "weak") {
            c.lr_texture.flat_policy = FlatRegionPolicy::TrustWeakDetector;
          } else if (v == "object") {
            c.lr_texture.flat_policy = FlatRegionPolicy::Object;
          } else {
            throw ConfigError("expected weak or object, got '" + v + "'");
          }
        }};

    integer("tracker.min_area", SHADOW_REF(tracker.min_area));
    num("tracker.gate", SHADOW_REF(tracker.gate));
    integer("tracker.max_missed", SHADOW_REF(tracker.max_missed));
    num("eval.mot_gate", SHADOW_REF(mot_gate));

    t["eval.foreground"] = {
        [](const BenchConfig& c) {
          return std::string(c.foreground == ForegroundSource::GroundTruth ? "gt" : "model");
        },
        [](BenchConfig& c, const std::string& v) {
          if (v == "gt") {
            c.foreground = ForegroundSource::GroundTruth;
          } else if (v == "model") {
            c.foreground = ForegroundSource::Model;
          } else {
            throw ConfigError("expected gt or model, got '" + v + "'");
          }
        }};
    list("eval.lambda_grid", SHADOW_REF(eval_lambdas));
    list("desat.lambda_grid", SHADOW_REF(desat_lambdas));
    num("eval.sanity_band", SHADOW_REF(sanity_band));
    integer("timing.warmup_frames", SHADOW_REF(timing_warmup));
    integer("timing.repeats", SHADOW_REF(timing_repeats));
    t["output.dir"] = {[](const BenchConfig& c) { return c.output_dir; },
                       [](BenchConfig& c, const std::string& v) { c.output_dir = v; }};
#undef SHADOW_REF
    return t;
  }();
  return table;
}

}  // namespace detail

/// Sets one key. Unknown keys and malformed values throw ConfigError.
inline void set_config_value(BenchConfig& config, const std::string& key, const std::string& value) {
  const auto& table = detail::fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError("unknown configuration key '" + key + "'");
  try {
    it->second.set(config, value);
  } catch (const ConfigError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

/// Parses `key = value` lines over the defaults. '#' starts a comment.
inline BenchConfig parse_config(std::istream& is, BenchConfig config = {}) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected `key = value`");
    }
    try {
      set_config_value(config, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return config;
}

inline BenchConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

/// Writes every key with its effective value, sorted by key. Parsing the
/// output reproduces the configuration.
inline void write_config(std::ostream& os, const BenchConfig& config) {
  for (const auto& [key, field] : detail::fields()) os << key << " = " << field.get(config) << '\n';
}

inline std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, _] : detail::fields()) keys.push_back(key);
  return keys;
}

}  // namespace shadow
