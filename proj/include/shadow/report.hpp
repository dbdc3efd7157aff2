#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "shadow/metrics.hpp"

namespace shadow {

inline std::string format_score(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

inline std::string format_lambda(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", lambda);
  return buf;
}

/// One line of a score report. `score` is empty for a sequence without
/// labelled frames.
struct ScoreRow {
  std::string sequence;
  std::string method;
  double lambda = 0.0;
  std::optional<MethodScore> score;
};

inline constexpr const char* kScoreHeader = "sequence,method,lambda,eta,xi,avg,ms_per_frame,frames_scored";

inline void write_score_row(std::ostream& os, const ScoreRow& r) {
  os << r.sequence << ',' << r.method << ',' << format_lambda(r.lambda) << ',';
  if (!r.score) {
    os << "NA,NA,NA,NA,0\n";
    return;
  }
  const MethodScore& s = *r.score;
  char ms[32];
  std::snprintf(ms, sizeof ms, "%.3f", s.ms_per_frame);
  os << format_score(s.eta) << ',' << format_score(s.xi) << ',' << format_score(s.avg) << ',' << ms << ','
     << s.frames_scored << '\n';
}

/// Summary over sequences for one (method, lambda): each rate is the mean of
/// the per-sequence rates where defined; timing is the mean over sequences.
inline std::optional<MethodScore> summarize(const std::vector<MethodScore>& per_sequence) {
  if (per_sequence.empty()) return std::nullopt;
  MethodScore out;
  double eta = 0.0, xi = 0.0, ms = 0.0;
  int n_eta = 0, n_xi = 0;
  for (const MethodScore& s : per_sequence) {
    if (s.eta) eta += *s.eta, ++n_eta;
    if (s.xi) xi += *s.xi, ++n_xi;
    ms += s.ms_per_frame;
    out.frames_scored += s.frames_scored;
  }
  if (n_eta > 0) out.eta = eta / n_eta;
  if (n_xi > 0) out.xi = xi / n_xi;
  if (out.eta && out.xi) out.avg = (*out.eta + *out.xi) / 2.0;
  out.ms_per_frame = ms / static_cast<double>(per_sequence.size());
  return out;
}

}  // namespace shadow
