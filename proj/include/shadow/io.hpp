#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "shadow/image.hpp"
#include "shadow/tracking.hpp"

namespace shadow {

namespace fs = std::filesystem;

/// A file exists but cannot be decoded as an image.
class ImageReadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sequence directory does not follow the expected layout.
class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Frame load_frame(const fs::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw ImageReadError("cannot read image " + path.string());
  Frame f(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) f(x, y) = {row[x][2], row[x][1], row[x][0]};
  }
  return f;
}

inline GreyImage load_grey(const fs::path& path) {
  const cv::Mat g = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
  if (g.empty()) throw ImageReadError("cannot read image " + path.string());
  GreyImage out(g.cols, g.rows);
  for (int y = 0; y < g.rows; ++y) {
    const std::uint8_t* row = g.ptr<std::uint8_t>(y);
    for (int x = 0; x < g.cols; ++x) out(x, y) = row[x];
  }
  return out;
}

namespace detail {
inline void write_png(const fs::path& path, const cv::Mat& m) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), m, {cv::IMWRITE_PNG_COMPRESSION, 6})) {
    throw std::runtime_error("cannot write image " + path.string());
  }
}
}  // namespace detail

inline void save_frame(const fs::path& path, const Frame& f) {
  cv::Mat bgr(f.height(), f.width(), CV_8UC3);
  for (int y = 0; y < f.height(); ++y) {
    cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < f.width(); ++x) row[x] = {f(x, y).b, f(x, y).g, f(x, y).r};
  }
  detail::write_png(path, bgr);
}

inline void save_grey(const fs::path& path, const GreyImage& g) {
  cv::Mat m(g.height(), g.width(), CV_8UC1);
  for (int y = 0; y < g.height(); ++y) {
    std::copy_n(g.data().data() + g.index(0, y), g.width(), m.ptr<std::uint8_t>(y));
  }
  detail::write_png(path, m);
}

inline GreyImage mask_to_grey(const TriMask& mask) {
  GreyImage g(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) g[i] = static_cast<std::uint8_t>(mask[i]);
  return g;
}

/// Grey levels map to the nearest of 0 (background), 128 (shadow) and
/// 255 (object), which tolerates lossy re-encoding of label images.
inline TriMask grey_to_mask(const GreyImage& g) {
  TriMask m(g.width(), g.height());
  for (std::size_t i = 0; i < g.size(); ++i) {
    m[i] = g[i] < 64 ? Label::Background : (g[i] < 192 ? Label::Shadow : Label::Object);
  }
  return m;
}

inline void save_mask(const fs::path& path, const TriMask& mask) { save_grey(path, mask_to_grey(mask)); }
inline TriMask load_mask(const fs::path& path) { return grey_to_mask(load_grey(path)); }

/// One sequence directory:
///   frames/NNNN.png   numbered frames (zero-padded numeric names)
///   background.png    optional clean background; pins the reference image
///   gt/NNNN.png       optional labelled masks, same names as frames
///   tracks.txt        optional ground-truth tracks
struct SequenceSpec {
  std::string name;
  fs::path root;
  std::vector<fs::path> frames;
  std::vector<long> frame_index;
  std::optional<fs::path> background;
  std::optional<fs::path> gt_dir;
  std::optional<fs::path> tracks;

  std::optional<fs::path> gt_mask(std::size_t frame) const {
    if (!gt_dir) return std::nullopt;
    fs::path p = *gt_dir / frames[frame].filename();
    if (!fs::exists(p)) return std::nullopt;
    return p;
  }
};

namespace detail {
inline bool is_image(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".ppm" || ext == ".pgm";
}

inline std::optional<long> numeric_stem(const fs::path& p) {
  const std::string stem = p.stem().string();
  if (stem.empty() || !std::all_of(stem.begin(), stem.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  return std::stol(stem);
}
}  // namespace detail

inline SequenceSpec open_sequence(const fs::path& root) {
  if (!fs::is_directory(root)) throw DatasetError("sequence directory not found: " + root.string());
  SequenceSpec seq;
  seq.root = root;
  seq.name = fs::absolute(root).lexically_normal().filename().string();
  if (seq.name.empty()) seq.name = fs::absolute(root).lexically_normal().parent_path().filename().string();

  const fs::path frames_dir = root / "frames";
  if (!fs::is_directory(frames_dir)) throw DatasetError("missing frames directory: " + frames_dir.string());
  std::vector<std::pair<long, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(frames_dir)) {
    if (!entry.is_regular_file() || !detail::is_image(entry.path())) continue;
    const auto index = detail::numeric_stem(entry.path());
    if (!index) throw DatasetError("frame file name is not a number: " + entry.path().string());
    found.emplace_back(*index, entry.path());
  }
  if (found.empty()) throw DatasetError("no frames in " + frames_dir.string());
  std::sort(found.begin(), found.end());
  for (std::size_t i = 1; i < found.size(); ++i) {
    if (found[i].first == found[i - 1].first) {
      throw DatasetError("duplicate frame index " + std::to_string(found[i].first) + " in " + frames_dir.string());
    }
  }
  for (auto& [index, path] : found) {
    seq.frame_index.push_back(index);
    seq.frames.push_back(std::move(path));
  }

  if (fs::exists(root / "background.png")) seq.background = root / "background.png";
  if (fs::is_directory(root / "gt")) {
    seq.gt_dir = root / "gt";
    for (const auto& entry : fs::directory_iterator(*seq.gt_dir)) {
      if (!entry.is_regular_file() || !detail::is_image(entry.path())) continue;
      if (!fs::exists(frames_dir / entry.path().filename())) {
        throw DatasetError("ground-truth mask without a frame: " + entry.path().string());
      }
    }
  }
  if (fs::exists(root / "tracks.txt")) seq.tracks = root / "tracks.txt";
  return seq;
}

inline std::vector<Track> load_tracks(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open track file " + path.string());
  return read_tracks(in);
}

}  // namespace shadow
