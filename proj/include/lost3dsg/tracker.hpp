#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "lost3dsg/core_graph.hpp"
#include "lost3dsg/geometry.hpp"
#include "lost3dsg/similarity.hpp"

namespace lost3dsg {

struct MaskDepthGeometry {
  PixelMask mask;
  DepthImage depth;
};

/// One observation: attributes plus either segmented depth or a ready box.
struct Detection {
  SemanticAttributes attributes;
  std::variant<MaskDepthGeometry, BBox3D> geometry;
};

/// Box for a detection in world coordinates; nullopt when the mask yields
/// no valid depth.
std::optional<BBox3D> resolve_bbox(const Detection& detection, const CameraIntrinsics& intrinsics,
                                   const CameraPose& pose);

struct FrameInput {
  std::vector<Detection> detections;
  CameraPose pose;
  CameraIntrinsics intrinsics;
  /// Replaces TrackerConfig::exploration for this frame only.
  std::optional<bool> mode_override;
};

struct TrackerConfig {
  LsfConfig lsf;
  double epsilon = 0.5;
  bool exploration = true;
  double near = 0.3;
  double far = 4.0;
  bool uncertain_recovery = false;
  HierarchyParams hierarchy;

  void validate() const;
};

/// Tracked objects plus the static structure they rest on. Room and
/// supporting-object nodes live in the graph but are never matched against.
struct PersistentScene {
  SceneGraph graph;
  std::set<NodeId> persistent;
  std::set<NodeId> uncertain;
  std::vector<RoomRegion> rooms;
  std::uint64_t frame_index = 0;
  std::uint64_t next_id = 1;

  NodeId allocate_id() { return NodeId{next_id++}; }

  /// Throws Error if the persistent/uncertain partition or graph agreement is broken.
  void check_invariants() const;

  friend bool operator==(const PersistentScene& a, const PersistentScene& b);
};

struct RoomSpec {
  SemanticAttributes attributes;
  std::vector<Vec2> polygon;
};

struct SupportSpec {
  SemanticAttributes attributes;
  BBox3D bbox;
};

/// Scene holding only rooms and supports, with their belonging edges.
PersistentScene make_scene(std::span<const RoomSpec> rooms, std::span<const SupportSpec> supports,
                           const HierarchyParams& hierarchy = {});

/// Attributes and box of a node as observed in a frame.
struct NodeObservation {
  NodeId id;
  SemanticAttributes attributes;
  BBox3D bbox;

  friend bool operator==(const NodeObservation&, const NodeObservation&) = default;
};

struct UpdateReport {
  std::uint64_t frame_index = 0;
  bool exploration = true;
  std::vector<NodeId> spawned;
  std::vector<NodeId> updated;
  std::vector<NodeId> marked_uncertain;
  std::vector<NodeId> pruned_persistent;
  std::vector<NodeId> pruned_uncertain;
  std::vector<NodeId> recovered;
  std::set<NodeId> seen;
  /// Skipped detections (no valid geometry), by index into the frame.
  std::vector<std::size_t> skipped;
  /// Post-frame box of every spawned, updated or recovered node, in processing order.
  std::vector<NodeObservation> observations;
};

NodeId spawn_object(PersistentScene& scene, const SemanticAttributes& attributes,
                    const BBox3D& bbox, std::set<NodeId>& seen,
                    const HierarchyParams& hierarchy = {});

/// Replaces the stored box with the new observation. Throws Error unless
/// the node is persistent.
void update_bbox(PersistentScene& scene, NodeId id, const BBox3D& bbox);

/// Moves a persistent node to the uncertain set and drops its belonging edge.
void mark_uncertain_and_remove(PersistentScene& scene, NodeId id);

/// Restores an uncertain node that matches the detection semantically
/// (LSF >= tau) and spatially (within epsilon of its stored box), keeping its
/// id and taking the new box. Always nullopt when recovery is disabled.
std::optional<NodeId> recover_uncertain(PersistentScene& scene,
                                        const SemanticAttributes& attributes, const BBox3D& bbox,
                                        const TrackerConfig& config, const Providers& providers);

/// Removes unseen persistent nodes whose centroid lies in the frustum.
std::vector<NodeId> prune_persistent(PersistentScene& scene, const Frustum& frustum,
                                     const std::set<NodeId>& seen);

/// Removes uncertain nodes whose centroid lies in the frustum.
std::vector<NodeId> prune_uncertain(PersistentScene& scene, const Frustum& frustum);

struct UpdateResult {
  PersistentScene scene;
  UpdateReport report;
};

/// One scene-update cycle. Detections are processed in order: resolve the
/// box (skip if empty), find the best unclaimed persistent match, then spawn,
/// update, or (tracking mode, spatially inconsistent) mark uncertain and
/// spawn anew. Tracking mode ends with frustum pruning of unseen persistent
/// and all in-view uncertain nodes. The input scene is never modified, so a
/// provider failure leaves it intact.
UpdateResult scene_update(const PersistentScene& scene, const FrameInput& frame,
                          const TrackerConfig& config, const Providers& providers);

/// Stateful driver: owns the scene and switches from exploration to
/// tracking once, the first time a frame requests tracking.
class Tracker {
 public:
  Tracker(PersistentScene scene, TrackerConfig config, const Providers& providers);

  /// requested_exploration is the frame-level flag from the scenario.
  const UpdateReport& step(const FrameInput& frame, bool requested_exploration);

  const PersistentScene& scene() const { return scene_; }
  bool exploring() const { return exploring_; }
  const std::vector<UpdateReport>& history() const { return history_; }

 private:
  PersistentScene scene_;
  TrackerConfig config_;
  Providers providers_;
  bool exploring_;
  std::vector<UpdateReport> history_;
};

}  // namespace lost3dsg
