#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "shadow/components.hpp"
#include "shadow/hungarian.hpp"
#include "shadow/image.hpp"

namespace shadow {

/// Positions use continuous image coordinates in which pixel (i, j) covers
/// [i, i+1) x [j, j+1), so a box [x, x+w) has its centre at x + w/2.
struct Observation {
  int frame = 0;
  double x = 0.0;  // centre
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
};

struct Track {
  int id = 0;
  std::vector<Observation> observations;  // strictly increasing frames
};

struct TrackerParams {
  int min_area = 30;     // pixels
  double gate = 30.0;    // pixels
  int max_missed = 3;    // k: a track unmatched for more frames ends

  void validate() const {
    if (min_area < 1) throw std::invalid_argument("tracker.min_area must be >= 1");
    if (!(gate > 0.0)) throw std::invalid_argument("tracker.gate must be > 0");
    if (max_missed < 0) throw std::invalid_argument("tracker.max_missed must be >= 0");
  }
};

inline Observation observe_region(const Region& r, int frame) {
  double sx = 0.0, sy = 0.0;
  for (const Point& q : r.pixels) sx += q.x, sy += q.y;
  const double n = static_cast<double>(r.size());
  return {frame, sx / n + 0.5, sy / n + 0.5, double(r.box.width()), double(r.box.height())};
}

/// Blob-matching tracker: components above a size floor are observations,
/// associated greedily to live tracks by nearest centroid within the gate.
inline std::vector<Track> track_blobs(std::span<const BinaryMask> masks, const TrackerParams& p = {}) {
  p.validate();
  std::vector<Track> tracks;
  struct Live {
    std::size_t track;
    int missed;
  };
  std::vector<Live> live;
  for (int t = 0; t < static_cast<int>(masks.size()); ++t) {
    std::vector<Observation> obs;
    for (const Region& r : connected_components(masks[static_cast<std::size_t>(t)])) {
      if (static_cast<int>(r.size()) >= p.min_area) obs.push_back(observe_region(r, t));
    }
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t l = 0; l < live.size(); ++l) {
      const Observation& last = tracks[live[l].track].observations.back();
      for (std::size_t o = 0; o < obs.size(); ++o) {
        const double d = std::hypot(obs[o].x - last.x, obs[o].y - last.y);
        if (d <= p.gate) pairs.emplace_back(d, l, o);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> live_used(live.size(), 0), obs_used(obs.size(), 0);
    for (const auto& [d, l, o] : pairs) {
      if (live_used[l] || obs_used[o]) continue;
      live_used[l] = obs_used[o] = 1;
      tracks[live[l].track].observations.push_back(obs[o]);
    }
    std::vector<Live> next;
    for (std::size_t l = 0; l < live.size(); ++l) {
      if (live_used[l]) {
        next.push_back({live[l].track, 0});
      } else if (live[l].missed + 1 <= p.max_missed) {
        next.push_back({live[l].track, live[l].missed + 1});
      }
    }
    for (std::size_t o = 0; o < obs.size(); ++o) {
      if (obs_used[o]) continue;
      tracks.push_back({static_cast<int>(tracks.size()) + 1, {obs[o]}});
      next.push_back({tracks.size() - 1, 0});
    }
    live = std::move(next);
  }
  return tracks;
}

struct MotCounts {
  long misses = 0;           // m
  long false_positives = 0;  // fp
  long mismatches = 0;       // mme
  long objects = 0;          // g
  double distance_sum = 0.0;
  long matches = 0;          // c
};

struct MotResult {
  MotCounts counts;
  std::optional<double> mota;
  std::optional<double> motp;
};

inline MotResult finish_mot(const MotCounts& c) {
  MotResult r{c, std::nullopt, std::nullopt};
  if (c.objects > 0) {
    r.mota = 1.0 - static_cast<double>(c.misses + c.false_positives + c.mismatches) / c.objects;
  }
  if (c.matches > 0) r.motp = c.distance_sum / c.matches;
  return r;
}

namespace detail {
struct Located {
  int id;
  double x, y;
};

inline std::map<int, std::vector<Located>> by_frame(const std::vector<Track>& tracks) {
  std::map<int, std::vector<Located>> out;
  for (const Track& t : tracks) {
    for (const Observation& o : t.observations) out[o.frame].push_back({t.id, o.x, o.y});
  }
  return out;
}
}  // namespace detail

/// MOTA / MOTP with centroid distance. Correspondences from earlier frames
/// are kept while within the gate; the rest are matched by minimum total
/// distance, and pairs beyond the gate are rejected. A ground-truth object
/// whose new partner differs from its last one counts a mismatch.
inline MotResult score_mot(const std::vector<Track>& hypotheses, const std::vector<Track>& truth, double gate) {
  if (!(gate > 0.0)) throw std::invalid_argument("score_mot: gate must be > 0");
  const auto gt_frames = detail::by_frame(truth);
  const auto hyp_frames = detail::by_frame(hypotheses);
  std::vector<int> frames;
  for (const auto& [f, _] : gt_frames) frames.push_back(f);
  for (const auto& [f, _] : hyp_frames) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

  static const std::vector<detail::Located> kNone;
  std::map<int, int> partner;  // gt id -> hypothesis id
  MotCounts c;
  for (int f : frames) {
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const std::vector<detail::Located>& gts = git != gt_frames.end() ? git->second : kNone;
    const std::vector<detail::Located>& hyps = hit != hyp_frames.end() ? hit->second : kNone;
    std::vector<char> gt_done(gts.size(), 0), hyp_done(hyps.size(), 0);
    const auto dist = [&](std::size_t g, std::size_t h) {
      return std::hypot(gts[g].x - hyps[h].x, gts[g].y - hyps[h].y);
    };
    const auto record = [&](std::size_t g, std::size_t h) {
      gt_done[g] = hyp_done[h] = 1;
      c.distance_sum += dist(g, h);
      ++c.matches;
    };

    for (std::size_t g = 0; g < gts.size(); ++g) {
      const auto prev = partner.find(gts[g].id);
      if (prev == partner.end()) continue;
      for (std::size_t h = 0; h < hyps.size(); ++h) {
        if (hyp_done[h] || hyps[h].id != prev->second) continue;
        if (dist(g, h) <= gate) record(g, h);
        break;
      }
    }

    std::vector<std::size_t> open_g, open_h;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!gt_done[g]) open_g.push_back(g);
    }
    for (std::size_t h = 0; h < hyps.size(); ++h) {
      if (!hyp_done[h]) open_h.push_back(h);
    }
    if (!open_g.empty() && !open_h.empty()) {
      // Infeasible pairs cost more than any complete feasible assignment.
      const double forbidden = gate * static_cast<double>(open_g.size() + open_h.size() + 1) * 4.0;
      CostMatrix cost(static_cast<int>(open_g.size()), static_cast<int>(open_h.size()));
      for (std::size_t i = 0; i < open_g.size(); ++i) {
        for (std::size_t j = 0; j < open_h.size(); ++j) {
          const double d = dist(open_g[i], open_h[j]);
          cost(static_cast<int>(i), static_cast<int>(j)) = d <= gate ? d : forbidden;
        }
      }
      const std::vector<int> assignment = hungarian(cost);
      for (std::size_t i = 0; i < open_g.size(); ++i) {
        const int j = assignment[i];
        if (j < 0) continue;
        const std::size_t g = open_g[i], h = open_h[static_cast<std::size_t>(j)];
        if (dist(g, h) > gate) continue;
        const auto prev = partner.find(gts[g].id);
        if (prev != partner.end() && prev->second != hyps[h].id) ++c.mismatches;
        partner[gts[g].id] = hyps[h].id;
        record(g, h);
      }
    }

    for (char d : gt_done) c.misses += d ? 0 : 1;
    for (char d : hyp_done) c.false_positives += d ? 0 : 1;
    c.objects += static_cast<long>(gts.size());
  }
  return finish_mot(c);
}

/// Reads `frame_index track_id x y w h` lines (x, y: top-left corner).
/// Blank lines and lines starting with '#' are skipped.
inline std::vector<Track> read_tracks(std::istream& is) {
  std::map<int, Track> by_id;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    int frame = 0, id = 0;
    double x = 0, y = 0, w = 0, h = 0;
    if (!(ls >> frame >> id >> x >> y >> w >> h)) {
      throw std::runtime_error("track file line " + std::to_string(line_no) +
                               ": expected `frame_index track_id x y w h`");
    }
    Track& t = by_id[id];
    t.id = id;
    if (!t.observations.empty() && t.observations.back().frame >= frame) {
      throw std::runtime_error("track file line " + std::to_string(line_no) + ": frames of track " +
                               std::to_string(id) + " must strictly increase");
    }
    t.observations.push_back({frame, x + w / 2.0, y + h / 2.0, w, h});
  }
  std::vector<Track> out;
  for (auto& [_, t] : by_id) out.push_back(std::move(t));
  return out;
}

inline void write_tracks(std::ostream& os, const std::vector<Track>& tracks) {
  std::vector<std::pair<int, std::string>> lines;
  for (const Track& t : tracks) {
    for (const Observation& o : t.observations) {
      std::ostringstream ls;
      ls << o.frame << ' ' << t.id << ' ' << (o.x - o.w / 2.0) << ' ' << (o.y - o.h / 2.0) << ' ' << o.w << ' '
         << o.h;
      lines.emplace_back(o.frame, ls.str());
    }
  }
  std::stable_sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [_, l] : lines) os << l << '\n';
}

}  // namespace shadow
