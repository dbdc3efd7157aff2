// Benchmark harness: shadow detection, scoring, desaturation sweep, timing and
// tracking evaluation over sequence directories.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shadow/config.hpp"
#include "shadow/io.hpp"
#include "shadow/pipeline.hpp"
#include "shadow/report.hpp"
#include "shadow/synth.hpp"

namespace {

using namespace shadow;

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kDataset = 3,
  kImage = 4,
  kTracks = 5,
};

class MissingTracks : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string config;
  std::vector<std::string> seqs;
  std::string methods;
  std::string out;
  std::string lambda_grid;
  std::vector<std::string> synth_names;
};

BenchConfig base_config(const Options& o, const char* grid_key) {
  BenchConfig c;
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot open configuration file " + o.config);
    c = parse_config(in);
  }
  if (!o.out.empty()) c.output_dir = o.out;
  if (!o.lambda_grid.empty()) set_config_value(c, grid_key, o.lambda_grid);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

/// A sequence with the configuration that applies to it. A file
/// `overrides.cfg` in the sequence directory adjusts the global settings for
/// that sequence only; such sequences are reported as `name*`.
struct Job {
  SequenceData data;
  BenchConfig config;
  std::string label;
};

Job load_job(const std::string& dir, const BenchConfig& global) {
  Job job{load_sequence(open_sequence(dir)), global, {}};
  job.label = job.data.spec.name;
  const fs::path overrides = fs::path(dir) / "overrides.cfg";
  if (fs::exists(overrides)) {
    std::ifstream in(overrides);
    job.config = parse_config(in, global);
    job.label += '*';
  }
  return job;
}

std::vector<Method> methods_or(const Options& o, std::vector<Method> fallback) {
  return o.methods.empty() ? fallback : parse_method_list(o.methods);
}

void echo_config(const BenchConfig& c) {
  fs::create_directories(c.output_dir);
  std::ofstream os(fs::path(c.output_dir) / "config.txt");
  write_config(os, c);
}

std::string mask_dir_name(double lambda) { return lambda == 0.0 ? "masks" : "masks-lambda-" + format_lambda(lambda); }

void write_masks(const fs::path& dir, const SequenceData& data, const MethodRun& run) {
  for (std::size_t t = 0; t < run.masks.size(); ++t) save_mask(dir / data.spec.frames[t].filename(), run.masks[t]);
}

int cmd_synth(const Options& o) {
  const fs::path out = o.out.empty() ? fs::path("synthetic") : fs::path(o.out);
  const std::vector<std::string> names = o.synth_names.empty() ? synth::sequence_names() : o.synth_names;
  for (const std::string& name : names) {
    synth::write_sequence(synth::generate(name), out / name);
    std::cout << (out / name).string() << '\n';
  }
  return kOk;
}

int cmd_detect(const Options& o) {
  const BenchConfig global = base_config(o, "eval.lambda_grid");
  const std::vector<Method> methods = methods_or(o, detector_methods());
  echo_config(global);
  for (const std::string& dir : o.seqs) {
    const Job job = load_job(dir, global);
    const PreparedSequence prepared = prepare(job.data, job.config);
    for (Method m : methods) {
      const MethodRun run = run_method(prepared, m, job.config);
      const fs::path base = fs::path(global.output_dir) / job.data.spec.name / std::string(method_name(m));
      write_masks(base / "masks", job.data, run);
      std::ofstream timing(base / "timing.csv");
      timing << "frame,ms\n";
      for (std::size_t t = 0; t < run.detect_ms.size(); ++t) {
        timing << job.data.spec.frames[t].filename().string() << ',' << run.detect_ms[t] << '\n';
      }
    }
  }
  return kOk;
}

struct ScoreTables {
  std::vector<ScoreRow> micro;
  std::vector<ScoreRow> macro;
};

// Scores every (sequence, method, lambda). Summary rows per (method, lambda)
// follow the per-sequence rows.
ScoreTables score_all(const Options& o, const BenchConfig& global, const std::vector<double>& lambdas,
                      const std::vector<Method>& methods, bool keep_masks) {
  ScoreTables out;
  std::map<std::pair<int, double>, std::vector<MethodScore>> micro_by, macro_by;
  for (const std::string& dir : o.seqs) {
    const Job job = load_job(dir, global);
    for (Method m : methods) {
      for (double lambda : lambdas) {
        const std::string name(method_name(m));
        if (job.data.labelled_frames() == 0) {
          std::cerr << "warning: " << job.label << " has no labelled frames; skipped\n";
          out.micro.push_back({job.label, name, lambda, std::nullopt});
          out.macro.push_back({job.label, name, lambda, std::nullopt});
          continue;
        }
        const EvalResult r = evaluate(job.data, m, job.config, lambda);
        if (keep_masks) {
          write_masks(fs::path(global.output_dir) / job.data.spec.name / name / mask_dir_name(lambda), job.data, r.run);
        }
        out.micro.push_back({job.label, name, lambda, r.micro});
        out.macro.push_back({job.label, name, lambda, r.macro});
        micro_by[{static_cast<int>(m), lambda}].push_back(r.micro);
        macro_by[{static_cast<int>(m), lambda}].push_back(r.macro);
      }
    }
  }
  for (Method m : methods) {
    for (double lambda : lambdas) {
      const auto key = std::make_pair(static_cast<int>(m), lambda);
      const std::string name(method_name(m));
      out.micro.push_back({"ALL", name, lambda, summarize(micro_by[key])});
      out.macro.push_back({"ALL", name, lambda, summarize(macro_by[key])});
    }
  }
  return out;
}

void write_table(const fs::path& path, const std::vector<ScoreRow>& rows) {
  std::ofstream os(path);
  os << kScoreHeader << '\n';
  for (const ScoreRow& r : rows) write_score_row(os, r);
}

// Sanity band: good methods detect and discriminate
// above the band on real footage. A warning, never a failure.
void check_band(const std::vector<ScoreRow>& rows, double band) {
  for (const ScoreRow& r : rows) {
    if (r.sequence != "ALL" || !r.score || r.lambda != 0.0) continue;
    const auto low = [&](const std::optional<double>& v) { return v && *v < band; };
    if (low(r.score->eta) || low(r.score->xi)) {
      std::cerr << "warning: " << r.method << " scores below the sanity band " << band << " (eta "
                << format_score(r.score->eta) << ", xi " << format_score(r.score->xi) << ")\n";
    }
  }
}

int cmd_eval(const Options& o) {
  const BenchConfig global = base_config(o, "eval.lambda_grid");
  echo_config(global);
  const ScoreTables t = score_all(o, global, global.eval_lambdas, methods_or(o, detector_methods()), true);
  write_table(fs::path(global.output_dir) / "scores.csv", t.micro);
  write_table(fs::path(global.output_dir) / "scores_macro.csv", t.macro);
  check_band(t.micro, global.sanity_band);
  return kOk;
}

int cmd_desat(const Options& o) {
  const BenchConfig global = base_config(o, "desat.lambda_grid");
  echo_config(global);
  const ScoreTables t = score_all(o, global, global.desat_lambdas, methods_or(o, detector_methods()), false);
  write_table(fs::path(global.output_dir) / "desat.csv", t.micro);
  write_table(fs::path(global.output_dir) / "desat_macro.csv", t.macro);
  return kOk;
}

int cmd_track(const Options& o) {
  const BenchConfig global = base_config(o, "eval.lambda_grid");
  std::vector<Method> methods = methods_or(o, detector_methods());
  methods.erase(std::remove(methods.begin(), methods.end(), Method::None), methods.end());
  methods.insert(methods.begin(), Method::None);  // the no-removal baseline is always reported
  echo_config(global);
  std::ofstream csv(fs::path(global.output_dir) / "tracking.csv");
  csv << "sequence,shadow_method,tracker,mota,motp\n";
  for (const std::string& dir : o.seqs) {
    const Job job = load_job(dir, global);
    if (!job.data.spec.tracks) throw MissingTracks("no tracks.txt in " + dir);
    const std::vector<Track> truth = load_tracks(*job.data.spec.tracks);
    for (Method m : methods) {
      const std::string name(method_name(m));
      std::optional<TrackingRun> run;
      try {
        run = evaluate_tracking(job.data, m, job.config, truth);
      } catch (const std::exception& e) {
        if (m == Method::None) throw;
        std::cerr << "warning: " << name << " failed on " << job.label << ": " << e.what() << '\n';
      }
      csv << job.label << ',' << name << ",cc-blob," << (run ? format_score(run->mot.mota) : "NA") << ','
          << (run ? format_score(run->mot.motp) : "NA") << '\n';
      if (run) {
        const fs::path base = fs::path(global.output_dir) / job.data.spec.name / name;
        fs::create_directories(base);
        std::ofstream tracks(base / "tracks.txt");
        write_tracks(tracks, run->tracks);
      }
    }
  }
  return kOk;
}

int cmd_time(const Options& o) {
  const BenchConfig global = base_config(o, "eval.lambda_grid");
  std::vector<Method> methods = detector_methods();
  methods.insert(methods.begin() + 4, Method::SrTextureFast);
  methods = methods_or(o, methods);
  echo_config(global);
  std::ofstream csv(fs::path(global.output_dir) / "timing.csv");
  csv << "sequence,method,ms_per_frame,frames_timed\n";
  for (const std::string& dir : o.seqs) {
    const Job job = load_job(dir, global);
    const int timed = static_cast<int>(job.data.frames.size()) - job.config.timing_warmup;
    if (job.data.frames.size() < 10 || timed < 1) {
      std::cerr << "warning: " << job.label << " has fewer than 10 frames; not timed\n";
      continue;
    }
    const PreparedSequence prepared = prepare(job.data, job.config);
    for (Method m : methods) {
      char ms[32];
      std::snprintf(ms, sizeof ms, "%.3f", time_method(prepared, m, job.config));
      csv << job.label << ',' << method_name(m) << ',' << ms << ',' << timed << '\n';
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moving cast shadow detection benchmark"};
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub, bool needs_seq) {
    sub->add_option("--config", o.config, "Configuration file (key = value)");
    auto* seq = sub->add_option("--seq", o.seqs, "Sequence directory (repeatable)");
    if (needs_seq) seq->required();
    sub->add_option("--methods", o.methods, "Comma-separated methods");
    sub->add_option("--out", o.out, "Output directory");
  };

  CLI::App* detect = app.add_subcommand("detect", "Write per-frame masks and detector timings");
  common(detect, true);
  CLI::App* eval = app.add_subcommand("eval", "Score methods against ground-truth masks");
  common(eval, true);
  eval->add_option("--lambda-grid", o.lambda_grid, "Desaturation rates, comma-separated (default 0)");
  CLI::App* desat = app.add_subcommand("desat-sweep", "Score methods over a desaturation grid");
  common(desat, true);
  desat->add_option("--lambda-grid", o.lambda_grid, "Desaturation rates, comma-separated");
  CLI::App* track = app.add_subcommand("track-eval", "MOTA/MOTP of blob tracking after shadow removal");
  common(track, true);
  CLI::App* timing = app.add_subcommand("bench-time", "Mean detector time per frame");
  common(timing, true);
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate the bundled synthetic sequences");
  synth_cmd->add_option("--out", o.out, "Output directory (default: synthetic)");
  synth_cmd->add_option("--name", o.synth_names, "Sequence to generate (repeatable; default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(o);
    if (*detect) return cmd_detect(o);
    if (*eval) return cmd_eval(o);
    if (*desat) return cmd_desat(o);
    if (*track) return cmd_track(o);
    if (*timing) return cmd_time(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const MissingTracks& e) {
    std::cerr << "missing ground-truth tracks: " << e.what() << '\n';
    return kTracks;
  } catch (const DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << '\n';
    return kDataset;
  } catch (const ImageReadError& e) {
    std::cerr << "unreadable image: " << e.what() << '\n';
    return kImage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
