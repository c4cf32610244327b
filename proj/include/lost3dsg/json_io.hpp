#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "lost3dsg/core_graph.hpp"

namespace lost3dsg {

using Json = nlohmann::json;

/// Serializes with keys sorted, floating-point values printed with six
/// decimals and integers verbatim. Output is byte-stable for equal input.
std::string dump_fixed(const Json& document, int indent = 2);

Json graph_to_json(const SceneGraph& graph);
/// Throws ValidationError naming the offending field.
SceneGraph graph_from_json(const Json& document);

/// Graph export document; nodes sorted by id, edges by (child, parent).
std::string export_graph(const SceneGraph& graph);
SceneGraph import_graph(std::string_view document);

Json bbox_to_json(const BBox3D& box);

namespace json_read {

// Schema helpers. Each throws ValidationError whose message starts with the
// dotted path of the offending field.

const Json& object(const Json& value, const std::string& path);
void only_keys(const Json& object, std::initializer_list<std::string_view> allowed,
               const std::string& path);
const Json& required(const Json& object, std::string_view key, const std::string& path);
const Json& array(const Json& object, std::string_view key, const std::string& path);
double number(const Json& value, const std::string& path);
double number(const Json& object, std::string_view key, const std::string& path);
std::uint64_t count(const Json& value, const std::string& path);
std::string string(const Json& object, std::string_view key, const std::string& path);
bool boolean(const Json& object, std::string_view key, const std::string& path);
Vec3 vec3(const Json& value, const std::string& path);
BBox3D bbox(const Json& value, const std::string& path);

std::string child(const std::string& path, std::string_view key);
std::string index(const std::string& path, std::size_t i);

}  // namespace json_read

}  // namespace lost3dsg
