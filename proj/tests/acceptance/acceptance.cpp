// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Usage: acceptance <work-dir>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shadow/hungarian.hpp"
#include "shadow/io.hpp"
#include "shadow/pipeline.hpp"
#include "shadow/synth.hpp"

namespace {

using namespace shadow;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

bool close_rel(double got, double want, double tol = 1e-9) {
  return std::abs(got - want) <= tol * std::max(1.0, std::abs(want));
}

// Synthetic sequences are generated once and shared by the in-process checks.
const SequenceData& sequence(const std::string& name) {
  static std::map<std::string, SequenceData> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, synth::as_sequence_data(synth::generate(name))).first;
  return it->second;
}

std::mt19937& rng() {
  static std::mt19937 r(20240611);
  return r;
}

TriMask random_trimask(int w, int h) {
  static constexpr Label kLabels[] = {Label::Background, Label::Shadow, Label::Object};
  TriMask m(w, h);
  for (auto& l : m.data()) l = kLabels[rng()() % 3];
  return m;
}

// ---------------------------------------------------------------- criterion 1

Outcome metric_oracle() {
  Outcome o;
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const TriMask gt = random_trimask(16, 16), pred = random_trimask(16, 16);
    long tps = 0, fns = 0, tpo = 0, fno = 0;
    for (int y = 0; y < 16; ++y) {
      for (int x = 0; x < 16; ++x) {
        const Label g = gt(x, y), p = pred(x, y);
        if (g == Label::Shadow) (p == Label::Shadow ? tps : fns)++;
        if (g == Label::Object) (p == Label::Object ? tpo : fno)++;
      }
    }
    const EvalCounts c = score_masks(pred, gt);
    if (c.tp_shadow != tps || c.fn_shadow != fns || c.tp_object != tpo || c.fn_object != fno) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " of 1000 pairs differ");
  o.note("1000 random 16x16 pairs, " + std::to_string(mismatches) + " mismatches");
  return o;
}

// ---------------------------------------------------------------- criterion 2

Outcome formula_checks() {
  Outcome o;
  int checks = 0;
  const auto check = [&](bool ok, const std::string& what) {
    ++checks;
    o.require(ok, what);
  };

  // colour feature
  const auto x = colour_feature({50, 50, 50}, {100, 100, 100});
  check(x && close_rel(x->alpha, 0.5) && close_rel(x->theta, std::numbers::pi / 4) &&
            close_rel(x->phi, std::acos(1.0 / std::sqrt(3.0))),
        "colour feature of a halved grey pixel");
  const auto y = colour_feature({97, 100, 96}, {100, 100, 100});
  check(y && close_rel(y->phi, std::acos(0.8)), "phi for v = (3, 0, 4)");
  check(!colour_feature({5, 6, 7}, {5, 6, 7}), "undefined feature for F = B");

  // centroid and orientation
  std::vector<Point> rect;
  for (int yy = 0; yy < 4; ++yy) {
    for (int xx = 0; xx < 10; ++xx) rect.push_back({xx, yy});
  }
  const GeometryStats r = region_stats(rect);
  check(close_rel(r.cx, 4.5) && close_rel(r.cy, 1.5) && r.theta == 0.0, "10x4 rectangle moments");
  const GeometryStats d = region_stats(std::vector<Point>{{0, 0}, {1, 1}, {2, 2}});
  check(close_rel(d.mu11, 2.0) && close_rel(d.mu20, 2.0) && close_rel(d.mu02, 2.0) &&
            close_rel(d.theta, 0.5 * std::atan2(4.0, 0.0)),
        "diagonal orientation");

  // gradient direction difference and region correlation
  check(close_rel(direction_difference(1, 0, 1, 1), std::acos(1.0 / std::sqrt(2.0))), "direction difference pi/4");
  check(std::abs(direction_difference(2, 5, 2, 5)) <= 1e-7, "identical gradients");
  check(close_rel(direction_difference(1, 0, 0, 1), std::numbers::pi / 2), "orthogonal gradients");
  GradientField gf, gb;
  gf.width = gb.width = 12;
  gf.height = gb.height = 1;
  gf.dx.assign(12, 10.0);
  gf.dy.assign(12, 0.0);
  gb = gf;
  for (int i = 7; i < 10; ++i) gf.dx[i] = 0.0, gf.dy[i] = 10.0;
  for (int i = 10; i < 12; ++i) gf.dx[i] = 1.0;
  std::vector<Point> pts;
  for (int i = 0; i < 12; ++i) pts.push_back({i, 0});
  const RegionCorrelation rc = region_correlation(pts, gf, gb, 5.0, std::numbers::pi / 6);
  check(rc.n == 10 && rc.c && *rc.c == 0.7, "correlation 7 of 10");

  // desaturation
  const double grey = 0.299 * 100 + 0.587 * 200;
  const Rgb px = desaturate(Frame(1, 1, Rgb{100, 200, 0}), 0.5)[0];
  const auto round_half = [](double v) { return static_cast<int>(std::floor(v + 0.5)); };
  check(px.r == round_half(0.5 * 100 + 0.5 * grey) && px.g == round_half(0.5 * 200 + 0.5 * grey) &&
            px.b == round_half(0.5 * grey) && px == Rgb{124, 174, 74},
        "desaturation at 0.5");

  // detection and discrimination rates
  const MethodScore s = score_of({8, 2, 9, 1});
  check(s.eta && s.xi && s.avg && close_rel(*s.eta, 0.8) && close_rel(*s.xi, 0.9) && close_rel(*s.avg, 0.85),
        "rates from (8, 2, 9, 1)");

  // tracking accuracy and precision
  MotCounts mc;
  mc.objects = 10;
  mc.misses = 2;
  mc.false_positives = 1;
  mc.matches = 5;
  mc.distance_sum = 1 + 2 + 3 + 4 + 5;
  const MotResult mr = finish_mot(mc);
  check(mr.mota && close_rel(*mr.mota, 0.7) && mr.motp && close_rel(*mr.motp, 3.0), "MOTA 0.7 and MOTP 3.0");
  const CostMatrix cm{{4, 1, 3}, {2, 0, 5}, {3, 2, 2}};
  check(assignment_cost(cm, hungarian(cm)) == 5.0, "3x3 assignment cost 5");

  o.note(std::to_string(checks) + " spot checks");
  return o;
}

// ---------------------------------------------------------------- criterion 3

Outcome reduction_oracle() {
  Outcome o;
  LrParams p;
  p.correlation = 0.0;
  p.edge_split = false;
  p.min_region = 1;
  int frames = 0, differing = 0;
  for (const std::string& name : synth::sequence_names()) {
    const SequenceData& data = sequence(name);
    BenchConfig c;
    c.foreground = ForegroundSource::Model;  // unlabelled sequences too
    const PreparedSequence prep = prepare(data, c);
    for (std::size_t t = 0; t < data.frames.size(); ++t) {
      BinaryMask fg = data.gt[t] ? foreground_of(*data.gt[t]) : prep.foreground[t];
      const TriMask lr = classify_texture_lr(prep.frames[t], prep.backgrounds[t], fg, p);
      const TriMask weak = classify_chromacity(prep.frames[t], prep.backgrounds[t], fg, p.weak);
      ++frames;
      if (lr != weak) ++differing;
    }
  }
  o.require(differing == 0, std::to_string(differing) + " frames differ");
  o.note(std::to_string(frames) + " frames over all bundled sequences, " + std::to_string(differing) + " differ");
  return o;
}

// ---------------------------------------------------------------- criterion 4

double avg_or_zero(const MethodScore& s) { return s.avg ? *s.avg : 0.0; }

Outcome detection_quality() {
  Outcome o;
  const BenchConfig c;
  // Each detector on the scene class it targets.
  const std::vector<std::pair<Method, std::string>> targets{{Method::Chromacity, "hue"},
                                                            {Method::Physical, "hue"},
                                                            {Method::SrTexture, "textured"},
                                                            {Method::LrTexture, "textured"}};
  for (const auto& [m, name] : targets) {
    const MethodScore s = evaluate(sequence(name), m, c).micro;
    o.require(avg_or_zero(s) >= 0.80, std::string(method_name(m)) + " on " + name + " below 0.80");
    o.note(std::string(method_name(m)) + "@" + name + " " + fmt(s.avg));
  }
  const MethodScore geo = evaluate(sequence("people"), Method::Geometry, c).micro;
  o.note("geometry@people " + fmt(geo.avg) + " (exempt)");

  std::map<Method, double> on_textured;
  for (Method m : detector_methods()) on_textured[m] = avg_or_zero(evaluate(sequence("textured"), m, c).micro);
  const double lr = on_textured[Method::LrTexture];
  for (const auto& [m, v] : on_textured) {
    if (m != Method::LrTexture) o.require(lr > v, "lr-texture not above " + std::string(method_name(m)) + " on textured");
  }
  std::string ranking = "textured:";
  for (const auto& [m, v] : on_textured) ranking += " " + std::string(method_name(m)) + "=" + fmt(v);
  o.note(ranking);
  return o;
}

// ---------------------------------------------------------------- criterion 5

Outcome desaturation_ordering() {
  Outcome o;
  const BenchConfig c;
  const SequenceData& hue = sequence("hue");
  const double chroma0 = avg_or_zero(evaluate(hue, Method::Chromacity, c, 0.0).micro);
  const double chroma1 = avg_or_zero(evaluate(hue, Method::Chromacity, c, 1.0).micro);
  const double lr0 = avg_or_zero(evaluate(hue, Method::LrTexture, c, 0.0).micro);
  const double lr1 = avg_or_zero(evaluate(hue, Method::LrTexture, c, 1.0).micro);
  const double chroma_drop = chroma0 - chroma1, lr_drop = lr0 - lr1;
  o.require(chroma_drop >= 0.10, "chromacity drop below 0.10");
  o.require(lr_drop < chroma_drop, "lr-texture drops at least as much as chromacity");

  // lambda = 0 against the direct path, frame by frame
  const EvalResult r = evaluate(hue, Method::Chromacity, c, 0.0);
  bool exact = true;
  for (std::size_t t = 0; t < hue.frames.size(); ++t) {
    const TriMask direct = classify_chromacity(hue.frames[t], *hue.background, foreground_of(*hue.gt[t]), c.chromacity);
    exact = exact && direct == r.run.masks[t];
  }
  const PreparedSequence zero = prepare(hue, c, 0.0);
  for (std::size_t t = 0; t < hue.frames.size(); ++t) exact = exact && zero.frames[t] == desaturate(hue.frames[t], 0.0);
  o.require(exact, "lambda 0 differs from the direct path");
  o.note("chromacity " + fmt(chroma0) + " -> " + fmt(chroma1) + " (drop " + fmt(chroma_drop) + "), lr-texture " +
         fmt(lr0) + " -> " + fmt(lr1) + " (drop " + fmt(lr_drop) + "), lambda 0 bit-exact " + (exact ? "yes" : "no"));
  return o;
}

// ---------------------------------------------------------------- criterion 6

// Same estimator as time_method, with the methods interleaved round by
// round so that drift in machine load hits all of them alike.
std::map<Method, double> interleaved_times(const PreparedSequence& prep, const std::vector<Method>& methods,
                                           const BenchConfig& c, int rounds) {
  std::map<Method, std::vector<double>> fastest;
  for (int r = 0; r < rounds; ++r) {
    for (Method m : methods) keep_fastest(fastest[m], run_method(prep, m, c).detect_ms);
  }
  std::map<Method, double> ms;
  for (const auto& [m, frames] : fastest) ms[m] = mean_ms(frames, c.timing_warmup);
  return ms;
}

Outcome timing_ordering() {
  Outcome o;
  const BenchConfig c;
  for (const std::string& name : synth::sequence_names()) {
    const SequenceData& data = sequence(name);
    BenchConfig cs = c;
    cs.foreground = ForegroundSource::Model;
    const PreparedSequence prep = prepare(data, data.labelled_frames() ? c : cs);
    std::vector<Method> methods = detector_methods();
    methods.push_back(Method::SrTextureFast);
    std::map<Method, double> ms = interleaved_times(prep, methods, c, 5);
    const double sr16 = ms[Method::SrTextureFast];
    ms.erase(Method::SrTextureFast);
    const double chroma = ms[Method::Chromacity], sr48 = ms[Method::SrTexture];
    for (const auto& [m, v] : ms) {
      if (m != Method::Chromacity) o.require(chroma < v, name + ": " + std::string(method_name(m)) + " faster than chromacity");
      if (m != Method::SrTexture) o.require(sr48 > v, name + ": " + std::string(method_name(m)) + " slower than sr-texture");
    }
    o.require(sr48 >= 5.0 * chroma, name + ": sr-texture / chromacity below 5");
    o.require(sr16 <= 0.45 * sr48, name + ": sr-texture-16 above 0.45 x sr-texture");
    std::string line = name + " ms:";
    for (const auto& [m, v] : ms) line += " " + std::string(method_name(m)) + "=" + fmt(v, 3);
    line += " sr-texture-16=" + fmt(sr16, 3) + " ratio48/chroma=" + fmt(sr48 / chroma, 1) +
            " ratio16/48=" + fmt(sr16 / sr48, 3);
    o.note(line);
  }
  return o;
}

// ---------------------------------------------------------------- criterion 7

double brute_force_assignment(const CostMatrix& c) {
  const bool wide = c.rows <= c.cols;
  const int n = wide ? c.rows : c.cols, m = wide ? c.cols : c.rows;
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += wide ? c(i, perm[i]) : c(perm[i], i);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Outcome tracking_improvement() {
  Outcome o;
  const BenchConfig c;
  const synth::SynthSequence seq = synth::generate("crossing");
  const SequenceData data = synth::as_sequence_data(seq);
  BenchConfig cm = c;
  cm.foreground = ForegroundSource::Model;
  std::map<Method, std::optional<double>> mota;
  std::vector<Method> methods{Method::None};
  for (Method m : detector_methods()) methods.push_back(m);
  for (Method m : methods) {
    try {
      mota[m] = evaluate_tracking(data, m, cm, seq.tracks).mot.mota;
    } catch (const std::exception& e) {
      o.require(false, std::string(method_name(m)) + " crashed: " + e.what());
    }
  }
  const double none = mota[Method::None].value_or(-1e9), lr = mota[Method::LrTexture].value_or(-1e9);
  o.require(lr - none >= 0.15, "lr-texture MOTA gain below 0.15");
  std::string line = "MOTA:";
  for (const auto& [m, v] : mota) line += " " + std::string(method_name(m)) + "=" + fmt(v);
  o.note(line + " gain " + fmt(lr - none));

  std::uniform_int_distribution<int> dim(1, 7);
  std::uniform_real_distribution<double> val(0.0, 50.0);
  int wrong = 0;
  for (int trial = 0; trial < 200; ++trial) {
    CostMatrix m(dim(rng()), dim(rng()));
    for (double& v : m.values) v = val(rng());
    if (std::abs(assignment_cost(m, hungarian(m)) - brute_force_assignment(m)) > 1e-9) ++wrong;
  }
  o.require(wrong == 0, std::to_string(wrong) + " Hungarian results differ from exhaustive search");
  o.note("Hungarian vs exhaustive on 200 matrices: " + std::to_string(wrong) + " differ");
  return o;
}

// ---------------------------------------------------------------- CLI helpers

int run(const std::string& cmd, const fs::path& log) {
  const std::string full = cmd + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(full.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quote(const fs::path& p) { return "\"" + p.string() + "\""; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

// Every column except the timing one.
std::string score_columns(const fs::path& csv) {
  std::string out;
  for (auto row : read_csv(csv)) {
    if (row.size() > 6) row.erase(row.begin() + 6);
    for (const std::string& cell : row) out += cell + ",";
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------- criterion 8

Outcome determinism(const fs::path& work) {
  Outcome o;
  const std::string exe = quote(SHADOWBENCH_EXE);
  const fs::path data = work / "synthetic";
  fs::remove_all(data);
  if (run(exe + " synth --out " + quote(data) + " --name hue --name textured --name people", work / "synth.log") != 0) {
    o.require(false, "synth subcommand failed");
    return o;
  }
  const std::string seqs = " --seq " + quote(data / "hue") + " --seq " + quote(data / "textured") + " --seq " +
                           quote(data / "people");
  const fs::path a = work / "eval_a", b = work / "eval_b";
  fs::remove_all(a);
  fs::remove_all(b);
  o.require(run(exe + " eval" + seqs + " --out " + quote(a), work / "eval_a.log") == 0, "first eval run failed");
  o.require(run(exe + " eval" + seqs + " --out " + quote(b), work / "eval_b.log") == 0, "second eval run failed");
  if (!o.pass) return o;

  int masks = 0, differing = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
    ++masks;
    const fs::path other = b / fs::relative(entry.path(), a);
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) ++differing;
  }
  o.require(masks > 0, "no mask files written");
  o.require(differing == 0, std::to_string(differing) + " mask files differ");
  for (const char* csv : {"scores.csv", "scores_macro.csv"}) {
    o.require(score_columns(a / csv) == score_columns(b / csv), std::string(csv) + " score columns differ");
  }
  // the echo records each run's own output directory
  const auto echo = [](const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line, out;
    while (std::getline(in, line)) {
      if (line.rfind("output.dir", 0) != 0) out += line + "\n";
    }
    return out;
  };
  o.require(echo(a / "config.txt") == echo(b / "config.txt"), "config echo differs");
  o.note(std::to_string(masks) + " mask files compared, " + std::to_string(differing) + " differ; score columns " +
         (score_columns(a / "scores.csv") == score_columns(b / "scores.csv") ? "identical" : "differ"));
  return o;
}

// ---------------------------------------------------------------- criterion 9

Outcome dataset_run(const fs::path& work) {
  Outcome o;
  const std::string exe = quote(SHADOWBENCH_EXE);
  std::vector<fs::path> seqs;
  const char* env = std::getenv("SHADOW_DATASET_DIR");
  if (env && fs::is_directory(env)) {
    for (const auto& entry : fs::directory_iterator(env)) {
      if (entry.is_directory() && fs::is_directory(entry.path() / "frames")) seqs.push_back(entry.path());
    }
    std::sort(seqs.begin(), seqs.end());
    o.note("dataset " + std::string(env) + ", " + std::to_string(seqs.size()) + " sequences");
  } else {
    // No public data present: the synthetic suite in the same layout stands in.
    const fs::path data = work / "synthetic";
    if (!fs::is_directory(data / "hue")) {
      run(exe + " synth --out " + quote(data) + " --name hue --name textured --name people", work / "synth9.log");
    }
    for (const char* name : {"hue", "textured", "people"}) seqs.push_back(data / name);
    o.note("SHADOW_DATASET_DIR not set; synthetic stand-in");
  }
  o.require(!seqs.empty(), "no sequences found");
  if (!o.pass) return o;

  std::string args;
  for (const fs::path& s : seqs) args += " --seq " + quote(s);
  const fs::path out = work / "dataset_eval";
  fs::remove_all(out);
  const fs::path log = work / "dataset_eval.log";
  const int code = run(exe + " eval" + args + " --out " + quote(out), log);
  o.require(code == 0, "eval exited with code " + std::to_string(code));
  if (code != 0) return o;

  int rows = 0, bad = 0;
  std::map<std::string, int> per_sequence;
  for (const auto& row : read_csv(out / "scores.csv")) {
    if (row.size() < 8 || row[0] == "sequence") continue;
    ++rows;
    if (row[0] != "ALL") ++per_sequence[row[0]];
    for (int col : {3, 4}) {
      if (row[static_cast<std::size_t>(col)] == "NA") continue;
      const double v = std::stod(row[static_cast<std::size_t>(col)]);
      if (!(v >= 0.0 && v <= 1.0)) ++bad;
    }
  }
  o.require(bad == 0, std::to_string(bad) + " rates outside [0, 1]");
  for (const auto& [name, n] : per_sequence) o.require(n == 5, name + " has " + std::to_string(n) + " method rows");
  o.require(per_sequence.size() == seqs.size(), "not every sequence reported");
  const std::string stderr_text = slurp(log);
  const bool warned = stderr_text.find("sanity band") != std::string::npos;
  o.note(std::to_string(rows) + " rows, rates in [0, 1]; sanity-band warning " + (warned ? "reported" : "not triggered"));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <work-dir>\n";
    return 2;
  }
  const fs::path work = fs::absolute(argv[1]);
  fs::create_directories(work);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"metric oracle", metric_oracle},
      {"formula spot-checks", formula_checks},
      {"reduction oracle", reduction_oracle},
      {"synthetic detection quality", detection_quality},
      {"desaturation ordering", desaturation_ordering},
      {"timing ordering", timing_ordering},
      {"tracking improvement", tracking_improvement},
      {"determinism", [&] { return determinism(work); }},
      {"dataset run", [&] { return dataset_run(work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
