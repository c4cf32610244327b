#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lost3dsg/json_io.hpp"
#include "lost3dsg/tracker.hpp"

namespace lost3dsg {

struct ScenarioFrame {
  FrameInput input;
  bool exploration = true;
};

enum class EventKind { kExists, kMoved, kRemoved };

std::string_view to_string(EventKind kind);

/// Ground truth about one physical object. An `exists` event defines the
/// object key and its reference attributes; later events refer to the key.
struct GroundTruthEvent {
  EventKind kind = EventKind::kExists;
  std::string object_key;
  std::uint64_t frame = 0;
  /// Frame after which the event is scored; defaults to `frame`.
  std::optional<std::uint64_t> deadline;
  std::optional<BBox3D> expected_bbox;
  std::optional<SemanticAttributes> attributes;

  std::uint64_t deadline_frame() const { return deadline.value_or(frame); }
};

struct Scenario {
  std::string name;
  std::vector<RoomSpec> rooms;
  std::vector<SupportSpec> supports;
  std::vector<ScenarioFrame> frames;
  std::vector<GroundTruthEvent> ground_truth;

  std::set<std::string> object_keys() const;
};

/// Parses and validates a scenario document. Unknown keys are rejected;
/// errors are ValidationError carrying the path of the offending field.
Scenario parse_scenario(const Json& document);
Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::filesystem::path& path);

struct Ratio {
  std::uint64_t achieved = 0;
  std::uint64_t expected = 0;

  double rate() const {
    return expected == 0 ? 0.0 : static_cast<double>(achieved) / static_cast<double>(expected);
  }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

struct EventOutcome {
  std::size_t event_index = 0;
  EventKind kind = EventKind::kExists;
  std::string object_key;
  std::uint64_t deadline = 0;
  bool achieved = false;

  friend bool operator==(const EventOutcome&, const EventOutcome&) = default;
};

struct MetricsReport {
  Ratio detections;
  Ratio deletions;
  Ratio updates;
  std::vector<EventOutcome> events;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Object-layer nodes split by lifecycle state, as seen after one frame.
struct SceneSnapshot {
  std::vector<NodeObservation> persistent;
  std::vector<NodeObservation> uncertain;
};

SceneSnapshot snapshot_of(const PersistentScene& scene);

/// Scores one event against the state after its deadline frame. A node
/// matches the ground truth when its LSF against the reference attributes
/// reaches tau and its centroid lies within epsilon of the reference box.
/// `previous_location` is the object's box before this event, needed by
/// `moved` (no duplicate left behind) and by `removed` without its own box.
bool event_achieved(const GroundTruthEvent& event, const SemanticAttributes& reference,
                    const std::optional<BBox3D>& previous_location,
                    const SceneSnapshot& snapshot, const TrackerConfig& config,
                    const Providers& providers);

/// Reference attributes and prior location of every event, in event order.
struct EventContext {
  SemanticAttributes reference;
  std::optional<BBox3D> previous_location;
};
std::vector<EventContext> event_contexts(const Scenario& scenario);

struct ReplayResult {
  PersistentScene final_scene;
  /// Scene at the end of the frame with the largest object byte budget.
  PersistentScene peak_scene;
  MetricsReport metrics;
  std::vector<UpdateReport> frames;
};

/// Builds the scene from the scenario's rooms and supports, runs every frame
/// through the tracker (exploration switches off for good at the first
/// tracking frame), and scores each event right after its deadline frame.
ReplayResult replay(const Scenario& scenario, const TrackerConfig& config,
                    const Providers& providers);

struct AblationRow {
  ComponentSet components;
  double deletion_rate = 0.0;
  double update_rate = 0.0;
  double detection_rate = 0.0;
};

/// Full, {d,m,c}, {l,m,c}, {l,d}, {d}, {l}.
std::vector<ComponentSet> default_ablation_subsets();

/// One row per subset, in input order. Rates are per-scenario ratios averaged
/// over the scenarios that expect at least one event of that kind.
std::vector<AblationRow> run_ablation(const std::vector<Scenario>& scenarios,
                                      const std::vector<ComponentSet>& subsets,
                                      const TrackerConfig& config, const Providers& providers);

struct MemoryReport {
  std::size_t object_count = 0;
  std::uint64_t object_bytes = 0;
  std::uint64_t voxel_count = 0;
  std::uint64_t embedding_dim = 0;
  std::uint64_t bytes_per_float = 0;
  std::uint64_t voxel_bytes = 0;
  /// voxel_bytes / object_bytes; nullopt when there are no objects.
  std::optional<double> reduction;
};

/// Object-level footprint of every object node (persistent and uncertain)
/// against dense per-voxel embeddings.
MemoryReport memory_report(const PersistentScene& scene, std::uint64_t voxel_count,
                           std::uint64_t embedding_dim, std::uint64_t bytes_per_float);

/// Union of every node box in the graph; nullopt for an empty graph.
std::optional<BBox3D> scene_bounds(const SceneGraph& graph);

/// Voxels of side `resolution` covering the box, each axis rounded up and
/// counted as at least one voxel.
std::uint64_t voxel_count_for(const BBox3D& bounds, double resolution);

Json metrics_to_json(const MetricsReport& metrics);
Json update_report_to_json(const UpdateReport& report);
Json ablation_to_json(const std::vector<AblationRow>& rows);
std::string ablation_to_text(const std::vector<AblationRow>& rows);
Json memory_report_to_json(const MemoryReport& report);

}  // namespace lost3dsg
