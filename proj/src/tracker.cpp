#include "lost3dsg/tracker.hpp"

#include <algorithm>

namespace lost3dsg {

namespace {

std::vector<ObjectNode> support_nodes(const SceneGraph& graph) {
  std::vector<ObjectNode> out;
  for (const ObjectNode* n : graph.nodes_in_layer(Layer::kSupportingObject)) out.push_back(*n);
  return out;
}

void attach_to_support(PersistentScene& scene, const ObjectNode& node,
                       const HierarchyParams& hierarchy) {
  const auto supports = support_nodes(scene.graph);
  const auto edges = infer_hierarchy(std::span(&node, 1), supports, {}, hierarchy);
  for (const BelongingEdge& edge : edges) scene.graph.add_edge(edge);
}

std::vector<const ObjectNode*> persistent_nodes(const PersistentScene& scene) {
  std::vector<const ObjectNode*> out;
  out.reserve(scene.persistent.size());
  for (const NodeId id : scene.persistent) out.push_back(&scene.graph.node(id));
  return out;
}

}  // namespace

std::optional<BBox3D> resolve_bbox(const Detection& detection, const CameraIntrinsics& intrinsics,
                                   const CameraPose& pose) {
  if (const auto* box = std::get_if<BBox3D>(&detection.geometry)) return *box;
  const auto& md = std::get<MaskDepthGeometry>(detection.geometry);
  const auto points = back_project(md.mask, md.depth, intrinsics, pose);
  if (points.empty()) return std::nullopt;
  return bbox_from_points(points);
}

void TrackerConfig::validate() const {
  lsf.validate();
  if (!(epsilon > 0.0)) throw ValidationError("tracker: epsilon must be positive");
  if (!(near > 0.0 && far > near)) throw ValidationError("tracker: require 0 < near < far");
}

void PersistentScene::check_invariants() const {
  graph.check_invariants();
  for (const NodeId id : persistent) {
    if (uncertain.contains(id)) {
      throw Error("node " + to_string(id) + " is both persistent and uncertain");
    }
    const ObjectNode* n = graph.find(id);
    if (n == nullptr || n->state != NodeState::kPersistent || n->layer != Layer::kObject) {
      throw Error("persistent node " + to_string(id) + " disagrees with the graph");
    }
  }
  for (const NodeId id : uncertain) {
    const ObjectNode* n = graph.find(id);
    if (n == nullptr || n->state != NodeState::kUncertain || n->layer != Layer::kObject) {
      throw Error("uncertain node " + to_string(id) + " disagrees with the graph");
    }
    if (graph.parent_of(id)) throw Error("uncertain node " + to_string(id) + " has a parent");
  }
  for (const auto& [id, n] : graph.nodes()) {
    if (n.layer == Layer::kObject && !persistent.contains(id) && !uncertain.contains(id)) {
      throw Error("object node " + to_string(id) + " is neither persistent nor uncertain");
    }
    if (id.value >= next_id) throw Error("node id " + to_string(id) + " not below next_id");
  }
}

bool operator==(const PersistentScene& a, const PersistentScene& b) {
  if (a.rooms.size() != b.rooms.size()) return false;
  for (std::size_t i = 0; i < a.rooms.size(); ++i) {
    if (a.rooms[i].id != b.rooms[i].id || a.rooms[i].polygon != b.rooms[i].polygon) return false;
  }
  return a.graph == b.graph && a.persistent == b.persistent && a.uncertain == b.uncertain &&
         a.frame_index == b.frame_index && a.next_id == b.next_id;
}

PersistentScene make_scene(std::span<const RoomSpec> rooms, std::span<const SupportSpec> supports,
                           const HierarchyParams& hierarchy) {
  PersistentScene scene;
  for (const RoomSpec& spec : rooms) {
    if (spec.polygon.size() < 3) throw ValidationError("room polygon needs at least 3 vertices");
    Vec3 lo(spec.polygon.front().x(), spec.polygon.front().y(), 0.0);
    Vec3 hi = lo;
    for (const Vec2& p : spec.polygon) {
      lo.head<2>() = lo.head<2>().cwiseMin(p);
      hi.head<2>() = hi.head<2>().cwiseMax(p);
    }
    ObjectNode node{scene.allocate_id(), Layer::kRoom, spec.attributes, BBox3D{lo, hi},
                    NodeState::kPersistent, std::nullopt};
    scene.rooms.push_back(RoomRegion{node.id, spec.polygon});
    scene.graph.add_node(std::move(node));
  }
  std::vector<ObjectNode> support_list;
  for (const SupportSpec& spec : supports) {
    ObjectNode node{scene.allocate_id(), Layer::kSupportingObject, spec.attributes, spec.bbox,
                    NodeState::kPersistent, std::nullopt};
    support_list.push_back(node);
    scene.graph.add_node(std::move(node));
  }
  for (const BelongingEdge& edge : infer_hierarchy({}, support_list, scene.rooms, hierarchy)) {
    scene.graph.add_edge(edge);
  }
  return scene;
}

NodeId spawn_object(PersistentScene& scene, const SemanticAttributes& attributes,
                    const BBox3D& bbox, std::set<NodeId>& seen, const HierarchyParams& hierarchy) {
  if (!bbox.valid()) throw ValidationError("spawn_object: invalid bbox");
  ObjectNode node{scene.allocate_id(), Layer::kObject, attributes, bbox, NodeState::kPersistent,
                  scene.frame_index};
  const NodeId id = node.id;
  scene.graph.add_node(node);
  attach_to_support(scene, node, hierarchy);
  scene.persistent.insert(id);
  seen.insert(id);
  return id;
}

void update_bbox(PersistentScene& scene, NodeId id, const BBox3D& bbox) {
  if (!scene.persistent.contains(id)) {
    throw Error("update_bbox: node " + to_string(id) + " is not persistent");
  }
  if (!bbox.valid()) throw ValidationError("update_bbox: invalid bbox");
  ObjectNode& node = scene.graph.node(id);
  node.bbox = bbox;
  node.last_seen_frame = scene.frame_index;
}

void mark_uncertain_and_remove(PersistentScene& scene, NodeId id) {
  if (!scene.persistent.contains(id)) {
    throw Error("mark_uncertain_and_remove: node " + to_string(id) + " is not persistent");
  }
  scene.persistent.erase(id);
  scene.uncertain.insert(id);
  scene.graph.node(id).state = NodeState::kUncertain;
  scene.graph.detach(id);
}

std::optional<NodeId> recover_uncertain(PersistentScene& scene,
                                        const SemanticAttributes& attributes, const BBox3D& bbox,
                                        const TrackerConfig& config, const Providers& providers) {
  if (!config.uncertain_recovery || scene.uncertain.empty()) return std::nullopt;

  std::vector<const ObjectNode*> candidates;
  for (const NodeId id : scene.uncertain) {
    const ObjectNode& node = scene.graph.node(id);
    if (is_valid_association(node, bbox, config.epsilon)) candidates.push_back(&node);
  }
  const auto match = find_best_match(attributes, candidates, config.lsf, providers, {});
  if (!match) return std::nullopt;

  scene.uncertain.erase(match->id);
  scene.persistent.insert(match->id);
  ObjectNode& node = scene.graph.node(match->id);
  node.state = NodeState::kPersistent;
  node.bbox = bbox;
  node.last_seen_frame = scene.frame_index;
  attach_to_support(scene, node, config.hierarchy);
  return match->id;
}

std::vector<NodeId> prune_persistent(PersistentScene& scene, const Frustum& frustum,
                                     const std::set<NodeId>& seen) {
  std::vector<NodeId> pruned;
  for (const NodeId id : scene.persistent) {
    if (seen.contains(id)) continue;
    if (frustum_contains(frustum, scene.graph.node(id).bbox)) pruned.push_back(id);
  }
  for (const NodeId id : pruned) {
    scene.persistent.erase(id);
    scene.graph.remove_node(id);
  }
  return pruned;
}

std::vector<NodeId> prune_uncertain(PersistentScene& scene, const Frustum& frustum) {
  std::vector<NodeId> pruned;
  for (const NodeId id : scene.uncertain) {
    if (frustum_contains(frustum, scene.graph.node(id).bbox)) pruned.push_back(id);
  }
  for (const NodeId id : pruned) {
    scene.uncertain.erase(id);
    scene.graph.remove_node(id);
  }
  return pruned;
}

UpdateResult scene_update(const PersistentScene& input, const FrameInput& frame,
                          const TrackerConfig& config, const Providers& providers) {
  config.validate();
  frame.pose.validate();
  frame.intrinsics.validate();

  UpdateResult result{input, {}};
  PersistentScene& scene = result.scene;
  UpdateReport& report = result.report;
  const bool exploration = frame.mode_override.value_or(config.exploration);
  report.frame_index = scene.frame_index;
  report.exploration = exploration;

  std::set<NodeId> claimed;
  const auto observe = [&](NodeId id) {
    const ObjectNode& n = scene.graph.node(id);
    report.observations.push_back({id, n.attributes, n.bbox});
  };
  const auto spawn_or_recover = [&](const Detection& d, const BBox3D& box) {
    if (const auto recovered = recover_uncertain(scene, d.attributes, box, config, providers)) {
      report.recovered.push_back(*recovered);
      report.seen.insert(*recovered);
      claimed.insert(*recovered);
      observe(*recovered);
      return;
    }
    const NodeId id = spawn_object(scene, d.attributes, box, report.seen, config.hierarchy);
    report.spawned.push_back(id);
    claimed.insert(id);
    observe(id);
  };

  for (std::size_t i = 0; i < frame.detections.size(); ++i) {
    const Detection& d = frame.detections[i];
    const auto box = resolve_bbox(d, frame.intrinsics, frame.pose);
    if (!box) {
      report.skipped.push_back(i);
      continue;
    }

    const auto candidates = persistent_nodes(scene);
    const auto match = find_best_match(d.attributes, candidates, config.lsf, providers, claimed);
    if (!match) {
      spawn_or_recover(d, *box);
      continue;
    }

    claimed.insert(match->id);
    if (exploration) {
      update_bbox(scene, match->id, *box);
      report.updated.push_back(match->id);
      observe(match->id);
    } else if (is_valid_association(scene.graph.node(match->id), *box, config.epsilon)) {
      update_bbox(scene, match->id, *box);
      report.updated.push_back(match->id);
      report.seen.insert(match->id);
      observe(match->id);
    } else {
      mark_uncertain_and_remove(scene, match->id);
      report.marked_uncertain.push_back(match->id);
      spawn_or_recover(d, *box);
    }
  }

  if (!exploration) {
    const Frustum view = compute_pov_volume(frame.pose, frame.intrinsics, config.near, config.far);
    report.pruned_persistent = prune_persistent(scene, view, report.seen);
    report.pruned_uncertain = prune_uncertain(scene, view);
  }
  ++scene.frame_index;
  return result;
}

Tracker::Tracker(PersistentScene scene, TrackerConfig config, const Providers& providers)
    : scene_(std::move(scene)),
      config_(std::move(config)),
      providers_(providers),
      exploring_(config_.exploration) {
  config_.validate();
}

const UpdateReport& Tracker::step(const FrameInput& frame, bool requested_exploration) {
  if (exploring_ && !requested_exploration) exploring_ = false;
  TrackerConfig frame_config = config_;
  frame_config.exploration = exploring_;
  UpdateResult result = scene_update(scene_, frame, frame_config, providers_);
  scene_ = std::move(result.scene);
  history_.push_back(std::move(result.report));
  return history_.back();
}

}  // namespace lost3dsg
