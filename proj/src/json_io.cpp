#include "lost3dsg/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace lost3dsg {

namespace {

void append_float(std::string& out, double value) {
  if (!std::isfinite(value)) {
    out += "null";
    return;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string_view text(buf);
  if (text == "-0.000000") text = "0.000000";
  out += text;
}

void dump_value(std::string& out, const Json& value, int indent, int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  const char* separator = indent < 0 ? ":" : ": ";

  switch (value.type()) {
    case Json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      // nlohmann::json objects are std::map backed, so iteration is key-sorted.
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += Json(it.key()).dump();
        out += separator;
        dump_value(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const Json& element : value) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        dump_value(out, element, indent, depth + 1);
      }
      newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::number_float:
      append_float(out, value.get<double>());
      return;
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string dump_fixed(const Json& document, int indent) {
  std::string out;
  dump_value(out, document, indent, 0);
  out += '\n';
  return out;
}

Json bbox_to_json(const BBox3D& box) {
  return Json{{"min", {box.min_corner.x(), box.min_corner.y(), box.min_corner.z()}},
              {"max", {box.max_corner.x(), box.max_corner.y(), box.max_corner.z()}}};
}

Json graph_to_json(const SceneGraph& graph) {
  Json nodes = Json::array();
  for (const auto& [id, node] : graph.nodes()) {
    Json entry{{"id", id.value},
               {"layer", to_string(node.layer)},
               {"label", node.attributes.label},
               {"color", node.attributes.color},
               {"material", node.attributes.material},
               {"description", node.attributes.description},
               {"bbox", bbox_to_json(node.bbox)},
               {"state", to_string(node.state)}};
    entry["last_seen_frame"] =
        node.last_seen_frame ? Json(*node.last_seen_frame) : Json(nullptr);
    nodes.push_back(std::move(entry));
  }
  Json edges = Json::array();
  for (const BelongingEdge& edge : graph.edges()) {
    edges.push_back(Json{{"child", edge.child.value}, {"parent", edge.parent.value}});
  }
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

SceneGraph graph_from_json(const Json& document) {
  using namespace json_read;
  const Json& root = object(document, "graph");
  only_keys(root, {"nodes", "edges"}, "graph");

  SceneGraph graph;
  const Json& nodes = array(root, "nodes", "graph");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = index("graph.nodes", i);
    const Json& entry = object(nodes[i], path);
    only_keys(entry,
              {"id", "layer", "label", "color", "material", "description", "bbox", "state",
               "last_seen_frame"},
              path);
    ObjectNode node;
    node.id = NodeId{count(required(entry, "id", path), child(path, "id"))};
    node.layer = layer_from_string(string(entry, "layer", path));
    node.attributes.label = string(entry, "label", path);
    node.attributes.color = string(entry, "color", path);
    node.attributes.material = string(entry, "material", path);
    node.attributes.description = string(entry, "description", path);
    node.bbox = bbox(required(entry, "bbox", path), child(path, "bbox"));
    node.state = state_from_string(string(entry, "state", path));
    if (const auto it = entry.find("last_seen_frame"); it != entry.end() && !it->is_null()) {
      node.last_seen_frame = count(*it, child(path, "last_seen_frame"));
    }
    graph.add_node(std::move(node));
  }

  const Json& edges = array(root, "edges", "graph");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string path = index("graph.edges", i);
    const Json& entry = object(edges[i], path);
    only_keys(entry, {"child", "parent"}, path);
    graph.add_edge({NodeId{count(required(entry, "child", path), child(path, "child"))},
                    NodeId{count(required(entry, "parent", path), child(path, "parent"))}});
  }
  return graph;
}

std::string export_graph(const SceneGraph& graph) { return dump_fixed(graph_to_json(graph)); }

SceneGraph import_graph(std::string_view document) {
  Json parsed;
  try {
    parsed = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("graph: malformed document: ") + e.what());
  }
  return graph_from_json(parsed);
}

namespace json_read {

std::string child(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const Json& object(const Json& value, const std::string& path) {
  if (!value.is_object()) throw ValidationError(path + ": expected an object");
  return value;
}

void only_keys(const Json& object, std::initializer_list<std::string_view> allowed,
               const std::string& path) {
  for (auto it = object.begin(); it != object.end(); ++it) {
    bool known = false;
    for (std::string_view key : allowed) known = known || key == it.key();
    if (!known) throw ValidationError(child(path, it.key()) + ": unknown key");
  }
}

const Json& required(const Json& object, std::string_view key, const std::string& path) {
  const auto it = object.find(key);
  if (it == object.end()) throw ValidationError(child(path, key) + ": missing required field");
  return *it;
}

const Json& array(const Json& object, std::string_view key, const std::string& path) {
  const Json& value = required(object, key, path);
  if (!value.is_array()) throw ValidationError(child(path, key) + ": expected an array");
  return value;
}

double number(const Json& value, const std::string& path) {
  if (!value.is_number()) throw ValidationError(path + ": expected a number");
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw ValidationError(path + ": expected a finite number");
  return x;
}

double number(const Json& object, std::string_view key, const std::string& path) {
  return number(required(object, key, path), child(path, key));
}

std::uint64_t count(const Json& value, const std::string& path) {
  if (!value.is_number_unsigned() &&
      !(value.is_number_integer() && value.get<std::int64_t>() >= 0)) {
    throw ValidationError(path + ": expected a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

std::string string(const Json& object, std::string_view key, const std::string& path) {
  const Json& value = required(object, key, path);
  if (!value.is_string()) throw ValidationError(child(path, key) + ": expected a string");
  return value.get<std::string>();
}

bool boolean(const Json& object, std::string_view key, const std::string& path) {
  const Json& value = required(object, key, path);
  if (!value.is_boolean()) throw ValidationError(child(path, key) + ": expected a boolean");
  return value.get<bool>();
}

Vec3 vec3(const Json& value, const std::string& path) {
  if (!value.is_array() || value.size() != 3) {
    throw ValidationError(path + ": expected an array of 3 numbers");
  }
  return Vec3(number(value[0], index(path, 0)), number(value[1], index(path, 1)),
              number(value[2], index(path, 2)));
}

BBox3D bbox(const Json& value, const std::string& path) {
  object(value, path);
  only_keys(value, {"min", "max"}, path);
  BBox3D box{vec3(required(value, "min", path), child(path, "min")),
             vec3(required(value, "max", path), child(path, "max"))};
  if (!box.valid()) throw ValidationError(path + ": bbox min must not exceed max");
  return box;
}

}  // namespace json_read

}  // namespace lost3dsg
