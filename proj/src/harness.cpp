#include "lost3dsg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iterator>
#include <map>
#include <sstream>

namespace lost3dsg {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kExists:
      return "exists";
    case EventKind::kMoved:
      return "moved";
    case EventKind::kRemoved:
      return "removed";
  }
  return "exists";
}

std::set<std::string> Scenario::object_keys() const {
  std::set<std::string> keys;
  for (const GroundTruthEvent& e : ground_truth) {
    if (e.kind == EventKind::kExists) keys.insert(e.object_key);
  }
  return keys;
}

namespace {

using namespace json_read;

constexpr std::size_t kMaxFixtureImageSide = 64;

SemanticAttributes parse_attributes(const Json& object, const std::string& path,
                                    bool label_only_required) {
  SemanticAttributes a;
  a.label = string(object, "label", path);
  const auto optional_text = [&](std::string_view key) -> std::string {
    if (!object.contains(key)) {
      if (label_only_required) return {};
      throw ValidationError(child(path, key) + ": missing required field");
    }
    return string(object, key, path);
  };
  a.color = optional_text("color");
  a.material = optional_text("material");
  a.description = optional_text("description");
  try {
    validate(a);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return a;
}

CameraPose parse_pose(const Json& value, const std::string& path) {
  object(value, path);
  only_keys(value, {"rotation", "translation"}, path);
  const Json& rotation = array(value, "rotation", path);
  if (rotation.size() != 9) {
    throw ValidationError(child(path, "rotation") + ": expected 9 numbers (row-major 3x3)");
  }
  CameraPose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const std::size_t i = static_cast<std::size_t>(r * 3 + c);
      pose.rotation(r, c) = number(rotation[i], index(child(path, "rotation"), i));
    }
  }
  pose.translation = vec3(required(value, "translation", path), child(path, "translation"));
  try {
    pose.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return pose;
}

CameraIntrinsics parse_intrinsics(const Json& value, const std::string& path) {
  object(value, path);
  only_keys(value, {"fx", "fy", "cx", "cy", "width", "height"}, path);
  CameraIntrinsics k;
  k.fx = number(value, "fx", path);
  k.fy = number(value, "fy", path);
  k.cx = number(value, "cx", path);
  k.cy = number(value, "cy", path);
  k.width = count(required(value, "width", path), child(path, "width"));
  k.height = count(required(value, "height", path), child(path, "height"));
  try {
    k.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return k;
}

// {width, height, data}: a small row-major image.
template <typename Image, typename Convert>
Image parse_image(const Json& value, const std::string& path, const CameraIntrinsics& k,
                  Convert convert) {
  object(value, path);
  only_keys(value, {"width", "height", "data"}, path);
  Image image;
  image.width = count(required(value, "width", path), child(path, "width"));
  image.height = count(required(value, "height", path), child(path, "height"));
  if (image.width > kMaxFixtureImageSide || image.height > kMaxFixtureImageSide) {
    throw ValidationError(path + ": fixture images are limited to 64x64");
  }
  if (image.width != k.width || image.height != k.height) {
    throw ValidationError(path + ": image size must match the frame intrinsics");
  }
  const Json& data = array(value, "data", path);
  if (data.size() != image.width * image.height) {
    throw ValidationError(child(path, "data") + ": expected width*height values");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    image.values.push_back(convert(data[i], index(child(path, "data"), i)));
  }
  return image;
}

Detection parse_detection(const Json& value, const std::string& path, const CameraIntrinsics& k) {
  object(value, path);
  only_keys(value, {"label", "color", "material", "description", "bbox3d", "mask", "depth"}, path);
  Detection d;
  d.attributes = parse_attributes(value, path, true);
  const bool has_box = value.contains("bbox3d");
  const bool has_mask = value.contains("mask");
  const bool has_depth = value.contains("depth");
  if (has_box == (has_mask || has_depth) || has_mask != has_depth) {
    throw ValidationError(path + ": provide exactly one of bbox3d or mask+depth");
  }
  if (has_box) {
    d.geometry = bbox(value.at("bbox3d"), child(path, "bbox3d"));
    return d;
  }
  MaskDepthGeometry md;
  md.mask = parse_image<PixelMask>(value.at("mask"), child(path, "mask"), k,
                                   [](const Json& v, const std::string& p) {
                                     const auto x = count(v, p);
                                     if (x > 1) throw ValidationError(p + ": mask values are 0 or 1");
                                     return x == 1;
                                   });
  md.depth = parse_image<DepthImage>(value.at("depth"), child(path, "depth"), k,
                                     [](const Json& v, const std::string& p) {
                                       if (v.is_null()) return std::nan("");
                                       return number(v, p);
                                     });
  d.geometry = std::move(md);
  return d;
}

EventKind event_kind_from_string(const std::string& name, const std::string& path) {
  if (name == "exists") return EventKind::kExists;
  if (name == "moved") return EventKind::kMoved;
  if (name == "removed") return EventKind::kRemoved;
  throw ValidationError(path + ": unknown event kind '" + name + "'");
}

void validate_events(const Scenario& s) {
  std::map<std::string, std::uint64_t> defined_at;
  for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
    const GroundTruthEvent& e = s.ground_truth[i];
    if (e.kind != EventKind::kExists) continue;
    const std::string path = index("ground_truth", i);
    if (!defined_at.emplace(e.object_key, e.frame).second) {
      throw ValidationError(path + ": object_key '" + e.object_key + "' defined twice");
    }
  }
  for (std::size_t i = 0; i < s.ground_truth.size(); ++i) {
    const GroundTruthEvent& e = s.ground_truth[i];
    const std::string path = index("ground_truth", i);
    if (e.frame >= s.frames.size()) throw ValidationError(path + ".frame: beyond the last frame");
    if (e.deadline && (*e.deadline < e.frame || *e.deadline >= s.frames.size())) {
      throw ValidationError(path + ".deadline: must lie in [frame, last frame]");
    }
    const auto it = defined_at.find(e.object_key);
    if (it == defined_at.end()) {
      throw ValidationError(path + ".object_key: undefined object '" + e.object_key + "'");
    }
    switch (e.kind) {
      case EventKind::kExists:
        if (!e.expected_bbox || !e.attributes) {
          throw ValidationError(path + ": exists events need expected_bbox and attributes");
        }
        break;
      case EventKind::kMoved:
        if (!e.expected_bbox) throw ValidationError(path + ": moved events need expected_bbox");
        [[fallthrough]];
      case EventKind::kRemoved:
        if (e.frame < it->second) {
          throw ValidationError(path + ": event precedes the object's exists event");
        }
        break;
    }
  }
}

bool matches(const NodeObservation& node, const SemanticAttributes& reference,
             const BBox3D& location, const TrackerConfig& config, const Providers& providers) {
  return is_valid_association(node.bbox, location, config.epsilon) &&
         lsf(reference, node.attributes, config.lsf, providers) >= config.lsf.tau;
}

bool any_match(const std::vector<NodeObservation>& nodes, const SemanticAttributes& reference,
               const BBox3D& location, const TrackerConfig& config, const Providers& providers) {
  return std::any_of(nodes.begin(), nodes.end(), [&](const NodeObservation& n) {
    return matches(n, reference, location, config, providers);
  });
}

std::uint64_t object_bytes(const PersistentScene& scene) {
  std::uint64_t total = 0;
  for (const auto& [id, node] : scene.graph.nodes()) {
    if (node.layer == Layer::kObject) total += object_memory_bytes(node);
  }
  return total;
}

std::string format_rate(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", x);
  return buf;
}

}  // namespace

Scenario parse_scenario(const Json& document) {
  const std::string root;
  object(document, "scenario");
  only_keys(document, {"name", "rooms", "supports", "frames", "ground_truth"}, root);

  Scenario s;
  s.name = string(document, "name", root);

  const Json& rooms = array(document, "rooms", root);
  for (std::size_t i = 0; i < rooms.size(); ++i) {
    const std::string path = index("rooms", i);
    object(rooms[i], path);
    only_keys(rooms[i], {"label", "polygon"}, path);
    RoomSpec room;
    room.attributes.label = string(rooms[i], "label", path);
    if (room.attributes.label.empty()) throw ValidationError(path + ".label: must be non-empty");
    const Json& polygon = array(rooms[i], "polygon", path);
    if (polygon.size() < 3) throw ValidationError(path + ".polygon: needs at least 3 vertices");
    for (std::size_t j = 0; j < polygon.size(); ++j) {
      const std::string vpath = index(child(path, "polygon"), j);
      if (!polygon[j].is_array() || polygon[j].size() != 2) {
        throw ValidationError(vpath + ": expected [x, y]");
      }
      room.polygon.emplace_back(number(polygon[j][0], index(vpath, 0)),
                                number(polygon[j][1], index(vpath, 1)));
    }
    s.rooms.push_back(std::move(room));
  }

  const Json& supports = array(document, "supports", root);
  for (std::size_t i = 0; i < supports.size(); ++i) {
    const std::string path = index("supports", i);
    object(supports[i], path);
    only_keys(supports[i], {"label", "color", "material", "description", "bbox"}, path);
    SupportSpec support;
    support.attributes = parse_attributes(supports[i], path, true);
    support.bbox = bbox(required(supports[i], "bbox", path), child(path, "bbox"));
    s.supports.push_back(std::move(support));
  }

  const Json& frames = array(document, "frames", root);
  if (frames.empty()) throw ValidationError("frames: must contain at least one frame");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string path = index("frames", i);
    object(frames[i], path);
    only_keys(frames[i], {"exploration", "pose", "intrinsics", "detections"}, path);
    ScenarioFrame frame;
    frame.exploration = boolean(frames[i], "exploration", path);
    frame.input.pose = parse_pose(required(frames[i], "pose", path), child(path, "pose"));
    frame.input.intrinsics =
        parse_intrinsics(required(frames[i], "intrinsics", path), child(path, "intrinsics"));
    const Json& detections = array(frames[i], "detections", path);
    for (std::size_t j = 0; j < detections.size(); ++j) {
      frame.input.detections.push_back(parse_detection(
          detections[j], index(child(path, "detections"), j), frame.input.intrinsics));
    }
    s.frames.push_back(std::move(frame));
  }

  const Json& events = array(document, "ground_truth", root);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string path = index("ground_truth", i);
    object(events[i], path);
    only_keys(events[i],
              {"kind", "object_key", "frame", "deadline", "expected_bbox", "attributes"}, path);
    GroundTruthEvent e;
    e.kind = event_kind_from_string(string(events[i], "kind", path), child(path, "kind"));
    e.object_key = string(events[i], "object_key", path);
    e.frame = count(required(events[i], "frame", path), child(path, "frame"));
    if (events[i].contains("deadline")) {
      e.deadline = count(events[i].at("deadline"), child(path, "deadline"));
    }
    if (events[i].contains("expected_bbox")) {
      e.expected_bbox = bbox(events[i].at("expected_bbox"), child(path, "expected_bbox"));
    }
    if (events[i].contains("attributes")) {
      const std::string apath = child(path, "attributes");
      const Json& a = object(events[i].at("attributes"), apath);
      only_keys(a, {"label", "color", "material", "description"}, apath);
      e.attributes = parse_attributes(a, apath, false);
    }
    s.ground_truth.push_back(std::move(e));
  }
  validate_events(s);
  return s;
}

Scenario load_scenario(std::istream& in) {
  Json document;
  try {
    document = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("scenario: malformed document: ") + e.what());
  }
  return parse_scenario(document);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path.string());
  try {
    return load_scenario(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

SceneSnapshot snapshot_of(const PersistentScene& scene) {
  SceneSnapshot snap;
  for (const NodeId id : scene.persistent) {
    const ObjectNode& n = scene.graph.node(id);
    snap.persistent.push_back({id, n.attributes, n.bbox});
  }
  for (const NodeId id : scene.uncertain) {
    const ObjectNode& n = scene.graph.node(id);
    snap.uncertain.push_back({id, n.attributes, n.bbox});
  }
  return snap;
}

bool event_achieved(const GroundTruthEvent& event, const SemanticAttributes& reference,
                    const std::optional<BBox3D>& previous_location,
                    const SceneSnapshot& snapshot, const TrackerConfig& config,
                    const Providers& providers) {
  switch (event.kind) {
    case EventKind::kExists:
      return any_match(snapshot.persistent, reference, *event.expected_bbox, config, providers);
    case EventKind::kMoved: {
      if (!any_match(snapshot.persistent, reference, *event.expected_bbox, config, providers)) {
        return false;
      }
      return !previous_location ||
             !any_match(snapshot.persistent, reference, *previous_location, config, providers);
    }
    case EventKind::kRemoved: {
      const auto location = event.expected_bbox ? event.expected_bbox : previous_location;
      if (!location) return false;
      return !any_match(snapshot.persistent, reference, *location, config, providers) &&
             !any_match(snapshot.uncertain, reference, *location, config, providers);
    }
  }
  return false;
}

std::vector<EventContext> event_contexts(const Scenario& scenario) {
  const auto& events = scenario.ground_truth;
  std::map<std::string, SemanticAttributes> reference;
  for (const GroundTruthEvent& e : events) {
    if (e.kind == EventKind::kExists) reference[e.object_key] = *e.attributes;
  }

  std::vector<EventContext> out(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const GroundTruthEvent& e = events[i];
    out[i].reference = e.attributes.value_or(reference.at(e.object_key));
    // Latest located event of the same object strictly before this one.
    std::optional<std::pair<std::uint64_t, std::size_t>> best;
    for (std::size_t j = 0; j < events.size(); ++j) {
      const GroundTruthEvent& o = events[j];
      if (j == i || o.object_key != e.object_key || !o.expected_bbox) continue;
      const auto key = std::make_pair(o.frame, j);
      if (key >= std::make_pair(e.frame, i)) continue;
      if (!best || key > *best) {
        best = key;
        out[i].previous_location = o.expected_bbox;
      }
    }
  }
  return out;
}

ReplayResult replay(const Scenario& scenario, const TrackerConfig& config,
                    const Providers& providers) {
  Tracker tracker(make_scene(scenario.rooms, scenario.supports, config.hierarchy), config,
                  providers);
  const auto contexts = event_contexts(scenario);

  std::map<std::uint64_t, std::vector<std::size_t>> due;
  for (std::size_t i = 0; i < scenario.ground_truth.size(); ++i) {
    due[scenario.ground_truth[i].deadline_frame()].push_back(i);
  }

  ReplayResult result;
  result.peak_scene = tracker.scene();
  std::uint64_t peak_bytes = object_bytes(tracker.scene());
  std::vector<EventOutcome> outcomes;

  for (std::size_t f = 0; f < scenario.frames.size(); ++f) {
    const ScenarioFrame& frame = scenario.frames[f];
    tracker.step(frame.input, frame.exploration);

    if (const std::uint64_t bytes = object_bytes(tracker.scene()); bytes > peak_bytes) {
      peak_bytes = bytes;
      result.peak_scene = tracker.scene();
    }

    const auto it = due.find(f);
    if (it == due.end()) continue;
    const SceneSnapshot snap = snapshot_of(tracker.scene());
    for (const std::size_t i : it->second) {
      const GroundTruthEvent& e = scenario.ground_truth[i];
      outcomes.push_back({i, e.kind, e.object_key, e.deadline_frame(),
                          event_achieved(e, contexts[i].reference, contexts[i].previous_location,
                                         snap, config, providers)});
    }
  }

  std::sort(outcomes.begin(), outcomes.end(),
            [](const EventOutcome& a, const EventOutcome& b) { return a.event_index < b.event_index; });
  for (const EventOutcome& o : outcomes) {
    Ratio& ratio = o.kind == EventKind::kExists  ? result.metrics.detections
                   : o.kind == EventKind::kMoved ? result.metrics.updates
                                                 : result.metrics.deletions;
    ++ratio.expected;
    if (o.achieved) ++ratio.achieved;
  }
  result.metrics.events = std::move(outcomes);
  result.final_scene = tracker.scene();
  result.frames = tracker.history();
  return result;
}

std::vector<ComponentSet> default_ablation_subsets() {
  using C = Component;
  return {ComponentSet::all(),
          ComponentSet::of({C::kDescription, C::kMaterial, C::kColor}),
          ComponentSet::of({C::kLabel, C::kMaterial, C::kColor}),
          ComponentSet::of({C::kLabel, C::kDescription}),
          ComponentSet::of({C::kDescription}),
          ComponentSet::of({C::kLabel})};
}

std::vector<AblationRow> run_ablation(const std::vector<Scenario>& scenarios,
                                      const std::vector<ComponentSet>& subsets,
                                      const TrackerConfig& config, const Providers& providers) {
  if (scenarios.empty()) throw ValidationError("ablation needs at least one scenario");
  if (subsets.empty()) throw ValidationError("ablation needs at least one component subset");

  std::vector<AblationRow> rows;
  for (const ComponentSet& subset : subsets) {
    TrackerConfig cfg = config;
    cfg.lsf.components = subset;
    cfg.validate();

    std::vector<std::future<MetricsReport>> runs;
    for (const Scenario& scenario : scenarios) {
      runs.push_back(std::async(std::launch::async, [&scenario, cfg, &providers] {
        return replay(scenario, cfg, providers).metrics;
      }));
    }
    std::vector<MetricsReport> metrics;
    for (auto& run : runs) metrics.push_back(run.get());

    const auto mean_rate = [&](Ratio MetricsReport::*field) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const MetricsReport& m : metrics) {
        if ((m.*field).expected == 0) continue;
        sum += (m.*field).rate();
        ++n;
      }
      return n == 0 ? 0.0 : sum / static_cast<double>(n);
    };
    rows.push_back({subset, mean_rate(&MetricsReport::deletions),
                    mean_rate(&MetricsReport::updates), mean_rate(&MetricsReport::detections)});
  }
  return rows;
}

MemoryReport memory_report(const PersistentScene& scene, std::uint64_t voxel_count,
                           std::uint64_t embedding_dim, std::uint64_t bytes_per_float) {
  MemoryReport r;
  for (const auto& [id, node] : scene.graph.nodes()) {
    if (node.layer != Layer::kObject) continue;
    ++r.object_count;
    r.object_bytes += object_memory_bytes(node);
  }
  r.voxel_count = voxel_count;
  r.embedding_dim = embedding_dim;
  r.bytes_per_float = bytes_per_float;
  r.voxel_bytes = voxel_baseline_bytes(voxel_count, embedding_dim, bytes_per_float);
  if (r.object_bytes > 0) {
    r.reduction = static_cast<double>(r.voxel_bytes) / static_cast<double>(r.object_bytes);
  }
  return r;
}

std::optional<BBox3D> scene_bounds(const SceneGraph& graph) {
  std::optional<BBox3D> bounds;
  for (const auto& [id, node] : graph.nodes()) {
    if (!bounds) {
      bounds = node.bbox;
      continue;
    }
    bounds->min_corner = bounds->min_corner.cwiseMin(node.bbox.min_corner);
    bounds->max_corner = bounds->max_corner.cwiseMax(node.bbox.max_corner);
  }
  return bounds;
}

std::uint64_t voxel_count_for(const BBox3D& bounds, double resolution) {
  if (!(resolution > 0.0)) throw ValidationError("voxel resolution must be positive");
  std::uint64_t total = 1;
  for (int a = 0; a < 3; ++a) {
    const double cells = std::ceil(bounds.extent()[a] / resolution - 1e-9);
    total *= std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::max(0.0, cells)));
  }
  return total;
}

namespace {

Json ids_to_json(const std::vector<NodeId>& ids) {
  Json out = Json::array();
  for (const NodeId id : ids) out.push_back(id.value);
  return out;
}

Json ratio_to_json(const Ratio& r) {
  return Json{{"achieved", r.achieved}, {"expected", r.expected}};
}

}  // namespace

Json metrics_to_json(const MetricsReport& m) {
  Json events = Json::array();
  for (const EventOutcome& o : m.events) {
    events.push_back(Json{{"index", o.event_index},
                          {"kind", to_string(o.kind)},
                          {"object_key", o.object_key},
                          {"deadline", o.deadline},
                          {"achieved", o.achieved}});
  }
  return Json{{"detections", ratio_to_json(m.detections)},
              {"deletions", ratio_to_json(m.deletions)},
              {"updates", ratio_to_json(m.updates)},
              {"events", std::move(events)}};
}

Json update_report_to_json(const UpdateReport& r) {
  Json seen = Json::array();
  for (const NodeId id : r.seen) seen.push_back(id.value);
  Json observations = Json::array();
  for (const NodeObservation& o : r.observations) {
    observations.push_back(Json{{"id", o.id.value},
                                {"label", o.attributes.label},
                                {"color", o.attributes.color},
                                {"material", o.attributes.material},
                                {"description", o.attributes.description},
                                {"bbox", bbox_to_json(o.bbox)}});
  }
  return Json{{"frame", r.frame_index},
              {"exploration", r.exploration},
              {"spawned", ids_to_json(r.spawned)},
              {"updated", ids_to_json(r.updated)},
              {"marked_uncertain", ids_to_json(r.marked_uncertain)},
              {"pruned_persistent", ids_to_json(r.pruned_persistent)},
              {"pruned_uncertain", ids_to_json(r.pruned_uncertain)},
              {"recovered", ids_to_json(r.recovered)},
              {"seen", std::move(seen)},
              {"skipped", r.skipped},
              {"observations", std::move(observations)}};
}

Json ablation_to_json(const std::vector<AblationRow>& rows) {
  Json out = Json::array();
  for (const AblationRow& row : rows) {
    out.push_back(Json{{"components", row.components.to_string()},
                       {"deletion_rate", row.deletion_rate},
                       {"update_rate", row.update_rate},
                       {"detection_rate", row.detection_rate}});
  }
  return Json{{"rows", std::move(out)}};
}

std::string ablation_to_text(const std::vector<AblationRow>& rows) {
  std::size_t width = std::string("LSF components").size();
  for (const AblationRow& row : rows) width = std::max(width, row.components.to_string().size());

  std::ostringstream out;
  const auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  out << pad("LSF components") << "  Deletions  Updates\n";
  out << std::string(width, '-') << "  ---------  -------\n";
  for (const AblationRow& row : rows) {
    out << pad(row.components.to_string()) << "  " << format_rate(row.deletion_rate)
        << "      " << format_rate(row.update_rate) << "\n";
  }
  return out.str();
}

Json memory_report_to_json(const MemoryReport& r) {
  return Json{{"object_count", r.object_count},
              {"object_bytes", r.object_bytes},
              {"voxel_count", r.voxel_count},
              {"embedding_dim", r.embedding_dim},
              {"bytes_per_float", r.bytes_per_float},
              {"voxel_bytes", r.voxel_bytes},
              {"voxel_megabytes", static_cast<double>(r.voxel_bytes) / 1e6},
              {"reduction", r.reduction ? Json(*r.reduction) : Json(nullptr)}};
}

}  // namespace lost3dsg
