#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lost3dsg/error.hpp"

namespace lost3dsg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Node identifier. Assigned from a monotonically increasing counter and
/// never reused within one scene.
struct NodeId {
  std::uint64_t value = 0;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

std::string to_string(NodeId id);

enum class Layer { kRoom, kSupportingObject, kObject };

std::string_view to_string(Layer layer);
Layer layer_from_string(std::string_view name);

enum class NodeState { kPersistent, kUncertain };

std::string_view to_string(NodeState state);
NodeState state_from_string(std::string_view name);

/// Open-vocabulary attributes attached to every node: label, color,
/// material and a short free-text description.
struct SemanticAttributes {
  static constexpr std::size_t kDefaultMaxDescription = 100;

  std::string label;
  std::string color;
  std::string material;
  std::string description;

  friend bool operator==(const SemanticAttributes&, const SemanticAttributes&) = default;
};

/// Throws ValidationError if the label is empty, a field carries control
/// characters or structural markup, or the description exceeds max_description bytes.
void validate(const SemanticAttributes& attributes,
              std::size_t max_description = SemanticAttributes::kDefaultMaxDescription);

/// Axis-aligned box in the world frame, meters.
struct BBox3D {
  Vec3 min_corner = Vec3::Zero();
  Vec3 max_corner = Vec3::Zero();

  Vec3 centroid() const { return 0.5 * (min_corner + max_corner); }
  Vec3 extent() const { return max_corner - min_corner; }
  bool valid() const;

  static BBox3D from_corners(const Vec3& min_corner, const Vec3& max_corner);

  friend bool operator==(const BBox3D& a, const BBox3D& b) {
    return a.min_corner == b.min_corner && a.max_corner == b.max_corner;
  }
};

struct ObjectNode {
  NodeId id;
  Layer layer = Layer::kObject;
  SemanticAttributes attributes;
  BBox3D bbox;
  NodeState state = NodeState::kPersistent;
  std::optional<std::uint64_t> last_seen_frame;

  friend bool operator==(const ObjectNode&, const ObjectNode&) = default;
};

/// child belongs to parent; parent sits exactly one layer above the child.
struct BelongingEdge {
  NodeId child;
  NodeId parent;

  friend auto operator<=>(const BelongingEdge&, const BelongingEdge&) = default;
};

/// Floor region used to assign supporting objects to rooms.
struct RoomRegion {
  NodeId id;
  std::vector<Vec2> polygon;
};

bool polygon_contains(std::span<const Vec2> polygon, const Vec2& point);

/// Hierarchical scene graph: room, supporting-object and object layers
/// connected by belonging edges.
class SceneGraph {
 public:
  /// Throws ValidationError on a duplicate id, an invalid bbox or invalid attributes.
  void add_node(ObjectNode node);

  /// Throws ValidationError if an endpoint is missing, the layers are not
  /// adjacent, or the child already has a parent.
  void add_edge(BelongingEdge edge);

  /// Removes the node and every edge touching it. Returns false if absent.
  bool remove_node(NodeId id);

  /// Drops the edge from child to its parent, if any.
  void detach(NodeId child);

  bool contains(NodeId id) const { return nodes_.contains(id); }
  const ObjectNode* find(NodeId id) const;
  ObjectNode* find(NodeId id);
  const ObjectNode& node(NodeId id) const;
  ObjectNode& node(NodeId id);

  std::optional<NodeId> parent_of(NodeId child) const;

  const std::map<NodeId, ObjectNode>& nodes() const { return nodes_; }
  /// Edges sorted by (child, parent).
  std::vector<BelongingEdge> edges() const;
  std::size_t edge_count() const { return parent_of_.size(); }

  std::vector<const ObjectNode*> nodes_in_layer(Layer layer) const;

  /// Throws Error if layer discipline or endpoint existence is violated.
  void check_invariants() const;

  friend bool operator==(const SceneGraph&, const SceneGraph&) = default;

 private:
  std::map<NodeId, ObjectNode> nodes_;
  std::map<NodeId, NodeId> parent_of_;
};

struct HierarchyParams {
  double min_overlap_ratio = 0.5;
  double support_gap = 0.10;
};

/// Geometric belonging heuristic. An object is placed on the support whose
/// XY footprint covers at least min_overlap_ratio of the object footprint and
/// whose top lies within support_gap of the object's bottom; the largest
/// overlap wins, then the smaller id. A support belongs to the room whose
/// floor polygon contains its centroid (smallest id on ties).
std::vector<BelongingEdge> infer_hierarchy(std::span<const ObjectNode> objects,
                                           std::span<const ObjectNode> supports,
                                           std::span<const RoomRegion> rooms,
                                           const HierarchyParams& params = {});

/// Byte budget of one object under the compact encoding: two 3-vectors of
/// 16-bit floats plus 8-bit text capped at 100 (description) and 15
/// (material, color, label) bytes.
std::size_t object_memory_bytes(const ObjectNode& node);

inline constexpr std::size_t kMaxObjectMemoryBytes = 157;

/// Dense per-voxel embedding storage for comparison.
std::uint64_t voxel_baseline_bytes(std::uint64_t voxel_count, std::uint64_t embedding_dim,
                                   std::uint64_t bytes_per_float);

}  // namespace lost3dsg
