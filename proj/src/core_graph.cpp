#include "lost3dsg/core_graph.hpp"

#include <algorithm>
#include <cmath>

namespace lost3dsg {

std::string to_string(NodeId id) { return std::to_string(id.value); }

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::kRoom:
      return "room";
    case Layer::kSupportingObject:
      return "supporting_object";
    case Layer::kObject:
      return "object";
  }
  return "object";
}

Layer layer_from_string(std::string_view name) {
  if (name == "room") return Layer::kRoom;
  if (name == "supporting_object") return Layer::kSupportingObject;
  if (name == "object") return Layer::kObject;
  throw ValidationError("unknown layer '" + std::string(name) + "'");
}

std::string_view to_string(NodeState state) {
  return state == NodeState::kPersistent ? "persistent" : "uncertain";
}

NodeState state_from_string(std::string_view name) {
  if (name == "persistent") return NodeState::kPersistent;
  if (name == "uncertain") return NodeState::kUncertain;
  throw ValidationError("unknown node state '" + std::string(name) + "'");
}

namespace {

void check_plain_text(std::string_view field, std::string_view value) {
  for (const char c : value) {
    const auto byte = static_cast<unsigned char>(c);
    if (byte < 0x20 || byte == 0x7f || c == '<' || c == '>') {
      throw ValidationError("attribute '" + std::string(field) +
                            "' must be plain text without control characters or markup");
    }
  }
}

// Parent layer for a child layer, if any.
std::optional<Layer> parent_layer(Layer child) {
  switch (child) {
    case Layer::kObject:
      return Layer::kSupportingObject;
    case Layer::kSupportingObject:
      return Layer::kRoom;
    case Layer::kRoom:
      return std::nullopt;
  }
  return std::nullopt;
}

double footprint_area(const BBox3D& b) {
  return (b.max_corner.x() - b.min_corner.x()) * (b.max_corner.y() - b.min_corner.y());
}

double footprint_overlap(const BBox3D& a, const BBox3D& b) {
  const double dx =
      std::min(a.max_corner.x(), b.max_corner.x()) - std::max(a.min_corner.x(), b.min_corner.x());
  const double dy =
      std::min(a.max_corner.y(), b.max_corner.y()) - std::max(a.min_corner.y(), b.min_corner.y());
  if (dx < 0.0 || dy < 0.0) return 0.0;
  return dx * dy;
}

bool footprint_inside(const BBox3D& inner, const BBox3D& outer) {
  return inner.min_corner.x() >= outer.min_corner.x() &&
         inner.max_corner.x() <= outer.max_corner.x() &&
         inner.min_corner.y() >= outer.min_corner.y() &&
         inner.max_corner.y() <= outer.max_corner.y();
}

}  // namespace

void validate(const SemanticAttributes& attributes, std::size_t max_description) {
  if (attributes.label.empty()) throw ValidationError("attribute 'label' must be non-empty");
  check_plain_text("label", attributes.label);
  check_plain_text("color", attributes.color);
  check_plain_text("material", attributes.material);
  check_plain_text("description", attributes.description);
  if (attributes.description.size() > max_description) {
    throw ValidationError("attribute 'description' exceeds " + std::to_string(max_description) +
                          " bytes");
  }
}

bool BBox3D::valid() const {
  return min_corner.allFinite() && max_corner.allFinite() &&
         (min_corner.array() <= max_corner.array()).all();
}

BBox3D BBox3D::from_corners(const Vec3& min_corner, const Vec3& max_corner) {
  BBox3D box{min_corner, max_corner};
  if (!box.valid()) throw ValidationError("bbox corners must be finite with min <= max");
  return box;
}

bool polygon_contains(std::span<const Vec2> polygon, const Vec2& point) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > point.y()) != (b.y() > point.y())) {
      const double x_cross = a.x() + (point.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (point.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

void SceneGraph::add_node(ObjectNode node) {
  if (nodes_.contains(node.id)) {
    throw ValidationError("duplicate node id " + to_string(node.id));
  }
  if (!node.bbox.valid()) {
    throw ValidationError("node " + to_string(node.id) + " has an invalid bbox");
  }
  validate(node.attributes);
  const NodeId id = node.id;
  nodes_.emplace(id, std::move(node));
}

void SceneGraph::add_edge(BelongingEdge edge) {
  const ObjectNode* child = find(edge.child);
  const ObjectNode* parent = find(edge.parent);
  if (child == nullptr || parent == nullptr) {
    throw ValidationError("edge " + to_string(edge.child) + "->" + to_string(edge.parent) +
                          " references a missing node");
  }
  if (parent_layer(child->layer) != parent->layer) {
    throw ValidationError("edge " + to_string(edge.child) + "->" + to_string(edge.parent) +
                          " does not connect adjacent layers");
  }
  if (parent_of_.contains(edge.child)) {
    throw ValidationError("node " + to_string(edge.child) + " already has a parent");
  }
  parent_of_.emplace(edge.child, edge.parent);
}

bool SceneGraph::remove_node(NodeId id) {
  if (nodes_.erase(id) == 0) return false;
  parent_of_.erase(id);
  std::erase_if(parent_of_, [id](const auto& entry) { return entry.second == id; });
  return true;
}

void SceneGraph::detach(NodeId child) { parent_of_.erase(child); }

const ObjectNode* SceneGraph::find(NodeId id) const {
  const auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

ObjectNode* SceneGraph::find(NodeId id) {
  const auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const ObjectNode& SceneGraph::node(NodeId id) const {
  if (const ObjectNode* n = find(id)) return *n;
  throw Error("unknown node id " + to_string(id));
}

ObjectNode& SceneGraph::node(NodeId id) {
  if (ObjectNode* n = find(id)) return *n;
  throw Error("unknown node id " + to_string(id));
}

std::optional<NodeId> SceneGraph::parent_of(NodeId child) const {
  const auto it = parent_of_.find(child);
  if (it == parent_of_.end()) return std::nullopt;
  return it->second;
}

std::vector<BelongingEdge> SceneGraph::edges() const {
  std::vector<BelongingEdge> out;
  out.reserve(parent_of_.size());
  for (const auto& [child, parent] : parent_of_) out.push_back({child, parent});
  return out;
}

std::vector<const ObjectNode*> SceneGraph::nodes_in_layer(Layer layer) const {
  std::vector<const ObjectNode*> out;
  for (const auto& [id, n] : nodes_) {
    if (n.layer == layer) out.push_back(&n);
  }
  return out;
}

void SceneGraph::check_invariants() const {
  for (const auto& [child, parent] : parent_of_) {
    const ObjectNode* c = find(child);
    const ObjectNode* p = find(parent);
    if (c == nullptr || p == nullptr) {
      throw Error("dangling edge " + to_string(child) + "->" + to_string(parent));
    }
    if (parent_layer(c->layer) != p->layer) {
      throw Error("edge " + to_string(child) + "->" + to_string(parent) +
                  " violates layer discipline");
    }
  }
  for (const auto& [id, n] : nodes_) {
    if (n.id != id) throw Error("node key mismatch for " + to_string(id));
  }
}

std::vector<BelongingEdge> infer_hierarchy(std::span<const ObjectNode> objects,
                                           std::span<const ObjectNode> supports,
                                           std::span<const RoomRegion> rooms,
                                           const HierarchyParams& params) {
  constexpr double kSlack = 1e-9;
  std::vector<BelongingEdge> edges;

  for (const ObjectNode& object : objects) {
    const double area = footprint_area(object.bbox);
    std::optional<NodeId> best;
    double best_overlap = -1.0;
    for (const ObjectNode& support : supports) {
      const double gap = std::abs(object.bbox.min_corner.z() - support.bbox.max_corner.z());
      if (gap > params.support_gap + kSlack) continue;
      const double overlap = footprint_overlap(object.bbox, support.bbox);
      const double ratio =
          area > 0.0 ? overlap / area : (footprint_inside(object.bbox, support.bbox) ? 1.0 : 0.0);
      if (ratio + kSlack < params.min_overlap_ratio) continue;
      if (overlap > best_overlap || (overlap == best_overlap && support.id < *best)) {
        best = support.id;
        best_overlap = overlap;
      }
    }
    if (best) edges.push_back({object.id, *best});
  }

  for (const ObjectNode& support : supports) {
    const Vec3 c = support.bbox.centroid();
    std::optional<NodeId> best;
    for (const RoomRegion& room : rooms) {
      if (!polygon_contains(room.polygon, c.head<2>())) continue;
      if (!best || room.id < *best) best = room.id;
    }
    if (best) edges.push_back({support.id, *best});
  }

  std::sort(edges.begin(), edges.end());
  return edges;
}

std::size_t object_memory_bytes(const ObjectNode& node) {
  constexpr std::size_t kBBoxBytes = 2 * 3 * 2;
  constexpr std::size_t kDescriptionCap = 100;
  constexpr std::size_t kShortFieldCap = 15;
  const SemanticAttributes& a = node.attributes;
  return kBBoxBytes + std::min(a.description.size(), kDescriptionCap) +
         std::min(a.material.size(), kShortFieldCap) + std::min(a.color.size(), kShortFieldCap) +
         std::min(a.label.size(), kShortFieldCap);
}

std::uint64_t voxel_baseline_bytes(std::uint64_t voxel_count, std::uint64_t embedding_dim,
                                   std::uint64_t bytes_per_float) {
  return voxel_count * embedding_dim * bytes_per_float;
}

}  // namespace lost3dsg
