#pragma once

// Random mini-scenarios and a line-by-line interpreter of the scene update
// procedure, written against plain arrays and the oracle similarity so the
// library tracker can be compared with it on equal inputs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lost3dsg/tracker.hpp"
#include "oracles.hpp"

namespace mini {

struct Box {
  std::array<double, 3> lo, hi;
  std::array<double, 3> centroid() const {
    return {(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2, (lo[2] + hi[2]) / 2};
  }
};

struct Det {
  oracle::Attrs attrs;
  std::optional<Box> box;  // nullopt: geometry without valid depth
};

struct Frame {
  std::array<double, 9> rotation;  // row-major camera-to-world
  std::array<double, 3> translation;
  bool exploration = true;
  std::vector<Det> dets;
};

struct Scenario {
  std::vector<Frame> frames;
};

// Small image keeps mask fixtures cheap; same field of view as 640x480 @ fx=500.
inline constexpr std::array<double, 4> kIntrinsics{50.0, 50.0, 32.0, 24.0};
inline constexpr std::size_t kWidth = 64;
inline constexpr std::size_t kHeight = 48;
inline constexpr double kNear = 0.3;
inline constexpr double kFar = 4.0;
inline constexpr double kEpsilon = 0.5;
inline constexpr double kTau = 0.75;
inline constexpr std::array<double, 4> kWeights{0.15, 0.30, 0.15, 0.40};

// ------------------------------------------------------------ generator

inline std::array<double, 9> yawed(const std::array<double, 9>& r, double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  const double z[9] = {c, -s, 0, s, c, 0, 0, 0, 1};
  std::array<double, 9> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) out[i * 3 + j] += z[i * 3 + k] * r[k * 3 + j];
  return out;
}

inline bool in_view(const Frame& f, const Box& b) {
  const auto c = b.centroid();
  const double d[3] = {c[0] - f.translation[0], c[1] - f.translation[1], c[2] - f.translation[2]};
  double cam[3];
  for (int k = 0; k < 3; ++k) {
    cam[k] = f.rotation[0 * 3 + k] * d[0] + f.rotation[1 * 3 + k] * d[1] +
             f.rotation[2 * 3 + k] * d[2];
  }
  if (!(cam[2] >= kNear && cam[2] <= kFar)) return false;
  const double tan_h = (kWidth / 2.0) / kIntrinsics[0];
  const double tan_v = (kHeight / 2.0) / kIntrinsics[1];
  return std::abs(cam[0] / cam[2]) <= tan_h && std::abs(cam[1] / cam[2]) <= tan_v;
}

struct GenOptions {
  std::size_t max_objects = 5;
  std::size_t max_frames = 10;
  double exploration_probability = 0.4;  // per frame; 1.0 forces exploration
};

inline Scenario generate(std::uint64_t seed, const GenOptions& opt = {}) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const auto pick = [&](const std::vector<std::string>& v) {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };

  static const std::vector<std::string> labels{
      "hammer", "mug", "cup", "tape roll", "laptop", "gamepad", "controller", "bottle",
      "book", "pen", "scissors", "bowl", "phone", "remote", "box", "wallet", "clock", "vase"};
  static const std::vector<std::string> colors{
      "red", "green", "blue", "white", "black", "brown", "yellow", "orange", "gray",
      "silver", "navy", "red and brown", "dark red", "crimson", "tan", "glorp"};
  static const std::vector<std::string> materials{
      "wood", "wooden", "metal", "steel", "plastic", "ceramic", "porcelain", "glass",
      "paper", "fabric", "rubber", "leather", "unobtainium"};
  static const std::vector<std::string> adjectives{"worn", "small", "shiny", "old", "new",
                                                   "scratched", "large", "matte"};

  struct Truth {
    oracle::Attrs attrs;
    Box box;
    bool gone = false;
  };
  const auto random_box = [&] {
    const double cx = -1.0 + 2.0 * u01(rng), cy = 1.5 + 1.0 * u01(rng), z0 = 0.75;
    const double sx = 0.05 + 0.25 * u01(rng), sy = 0.05 + 0.25 * u01(rng),
                 sz = 0.05 + 0.3 * u01(rng);
    return Box{{cx - sx / 2, cy - sy / 2, z0}, {cx + sx / 2, cy + sy / 2, z0 + sz}};
  };
  const auto random_attrs = [&] {
    oracle::Attrs a;
    a.label = pick(labels);
    a.color = pick(colors);
    a.material = pick(materials);
    a.description = pick(adjectives) + " " + a.color + " " + a.label + " made of " + a.material;
    return a;
  };

  std::vector<Truth> objects(std::uniform_int_distribution<std::size_t>(1, opt.max_objects)(rng));
  for (Truth& t : objects) {
    t.attrs = random_attrs();
    t.box = random_box();
  }

  static const std::array<double, 9> look_pos_y{1, 0, 0, 0, 0, 1, 0, -1, 0};
  static const std::array<double, 9> look_neg_y{-1, 0, 0, 0, 0, -1, 0, -1, 0};

  Scenario s;
  const std::size_t n_frames = std::uniform_int_distribution<std::size_t>(1, opt.max_frames)(rng);
  for (std::size_t f = 0; f < n_frames; ++f) {
    Frame frame;
    const bool front = u01(rng) < 0.7;
    const double yaw = (u01(rng) - 0.5) * 0.8;
    frame.rotation = yawed(front ? look_pos_y : look_neg_y, yaw);
    frame.translation = {-1.5 + 3.0 * u01(rng), front ? 0.0 : 4.0, 1.1 + 0.3 * u01(rng)};
    frame.exploration = u01(rng) < opt.exploration_probability;

    for (Truth& t : objects) {
      if (t.gone) continue;
      const double r = u01(rng);
      if (r < 0.15) {
        t.box = random_box();
      } else if (r < 0.35) {
        const double dx = (u01(rng) - 0.5) * 0.3, dy = (u01(rng) - 0.5) * 0.3;
        for (int k = 0; k < 2; ++k) {
          t.box.lo[k] += k == 0 ? dx : dy;
          t.box.hi[k] += k == 0 ? dx : dy;
        }
      } else if (r < 0.42) {
        t.gone = true;
        continue;
      }
      if (!in_view(frame, t.box) || u01(rng) < 0.15) continue;
      Det d{t.attrs, t.box};
      if (u01(rng) < 0.15) d.attrs.color = pick(colors);
      if (u01(rng) < 0.15) d.attrs.description = pick(adjectives) + " " + d.attrs.label;
      frame.dets.push_back(d);
    }
    if (u01(rng) < 0.2) frame.dets.push_back(Det{random_attrs(), random_box()});
    if (u01(rng) < 0.1) frame.dets.push_back(Det{random_attrs(), std::nullopt});
    std::shuffle(frame.dets.begin(), frame.dets.end(), rng);
    s.frames.push_back(std::move(frame));
  }
  return s;
}

// ------------------------------------------------------------ interpreter

struct Obj {
  oracle::Attrs attrs;
  Box box;
};

struct State {
  std::map<std::uint64_t, Obj> persistent;
  std::map<std::uint64_t, Obj> uncertain;
  std::uint64_t next_id = 1;
};

inline double centroid_distance(const Box& a, const Box& b) {
  const auto ca = a.centroid(), cb = b.centroid();
  return std::sqrt((ca[0] - cb[0]) * (ca[0] - cb[0]) + (ca[1] - cb[1]) * (ca[1] - cb[1]) +
                   (ca[2] - cb[2]) * (ca[2] - cb[2]));
}

inline void interpret_frame(State& st, const Frame& f, const oracle::RawVectors& raw) {
  std::set<std::uint64_t> seen;
  std::set<std::uint64_t> claimed;
  const auto spawn = [&](const Det& d) {
    const std::uint64_t id = st.next_id++;
    st.persistent[id] = Obj{d.attrs, *d.box};
    seen.insert(id);
    claimed.insert(id);
  };

  for (const Det& d : f.dets) {
    if (!d.box) continue;  // b = empty
    std::optional<std::uint64_t> best;
    double best_score = -1.0;
    for (const auto& [id, p] : st.persistent) {
      if (claimed.count(id)) continue;
      const double s = oracle::lsf(oracle::scores(raw, d.attrs, p.attrs), kWeights);
      if (s > best_score) {
        best_score = s;
        best = id;
      }
    }
    if (!best || best_score < kTau) {
      spawn(d);
      continue;
    }
    claimed.insert(*best);
    Obj& p = st.persistent.at(*best);
    if (f.exploration) {
      p.box = *d.box;
    } else if (centroid_distance(p.box, *d.box) <= kEpsilon) {
      p.box = *d.box;
      seen.insert(*best);
    } else {
      st.uncertain[*best] = p;
      st.persistent.erase(*best);
      spawn(d);
    }
  }

  if (!f.exploration) {
    for (auto it = st.persistent.begin(); it != st.persistent.end();) {
      it = (!seen.count(it->first) && in_view(f, it->second.box)) ? st.persistent.erase(it)
                                                                   : std::next(it);
    }
    for (auto it = st.uncertain.begin(); it != st.uncertain.end();) {
      it = in_view(f, it->second.box) ? st.uncertain.erase(it) : std::next(it);
    }
  }
}

// ------------------------------------------------------------ library bridge

inline lost3dsg::BBox3D to_bbox(const Box& b) {
  return lost3dsg::BBox3D{lost3dsg::Vec3(b.lo[0], b.lo[1], b.lo[2]),
                          lost3dsg::Vec3(b.hi[0], b.hi[1], b.hi[2])};
}

inline lost3dsg::SemanticAttributes to_attributes(const oracle::Attrs& a) {
  return {a.label, a.color, a.material, a.description};
}

inline lost3dsg::FrameInput to_frame_input(const Frame& f) {
  lost3dsg::FrameInput in;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) in.pose.rotation(r, c) = f.rotation[r * 3 + c];
  in.pose.translation = lost3dsg::Vec3(f.translation[0], f.translation[1], f.translation[2]);
  in.intrinsics = {kIntrinsics[0], kIntrinsics[1], kIntrinsics[2], kIntrinsics[3], kWidth, kHeight};
  in.mode_override = f.exploration;
  for (const Det& d : f.dets) {
    lost3dsg::Detection det;
    det.attributes = to_attributes(d.attrs);
    if (d.box) {
      det.geometry = to_bbox(*d.box);
    } else {
      lost3dsg::MaskDepthGeometry md;
      md.mask = {kWidth, kHeight, std::vector<bool>(kWidth * kHeight, true)};
      md.depth = {kWidth, kHeight, std::vector<double>(kWidth * kHeight, 0.0)};
      det.geometry = std::move(md);
    }
    in.detections.push_back(std::move(det));
  }
  return in;
}

inline lost3dsg::TrackerConfig tracker_config() {
  lost3dsg::TrackerConfig c;
  c.lsf.tau = kTau;
  c.epsilon = kEpsilon;
  c.near = kNear;
  c.far = kFar;
  return c;
}

// True when the library scene holds exactly the interpreter's objects.
inline bool same_objects(const lost3dsg::PersistentScene& scene, const State& st,
                         std::string* why = nullptr) {
  const auto compare = [&](const std::set<lost3dsg::NodeId>& ids,
                           const std::map<std::uint64_t, Obj>& expected, const char* which) {
    if (ids.size() != expected.size()) {
      if (why) *why = std::string(which) + " set sizes differ";
      return false;
    }
    for (const auto& [id, obj] : expected) {
      const lost3dsg::NodeId nid{id};
      if (!ids.count(nid)) {
        if (why) *why = std::string(which) + " missing id " + std::to_string(id);
        return false;
      }
      const auto& node = scene.graph.node(nid);
      if (node.attributes != to_attributes(obj.attrs) || node.bbox != to_bbox(obj.box)) {
        if (why) *why = std::string(which) + " node " + std::to_string(id) + " differs";
        return false;
      }
    }
    return true;
  };
  return compare(scene.persistent, st.persistent, "persistent") &&
         compare(scene.uncertain, st.uncertain, "uncertain");
}

}  // namespace mini
