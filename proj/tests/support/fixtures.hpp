#pragma once

#include <string>

#include "lost3dsg/core_graph.hpp"
#include "lost3dsg/embeddings.hpp"
#include "lost3dsg/similarity.hpp"
#include "oracles.hpp"

namespace fixture {

inline lost3dsg::BBox3D box(double x0, double y0, double z0, double x1, double y1, double z1) {
  return lost3dsg::BBox3D{lost3dsg::Vec3(x0, y0, z0), lost3dsg::Vec3(x1, y1, z1)};
}

// Cube of side `side` centered at (x, y, z).
inline lost3dsg::BBox3D cube(double x, double y, double z, double side = 0.1) {
  const double h = side / 2;
  return box(x - h, y - h, z - h, x + h, y + h, z + h);
}

inline lost3dsg::ObjectNode node(std::uint64_t id, lost3dsg::Layer layer,
                                 const std::string& label, const lost3dsg::BBox3D& b) {
  lost3dsg::ObjectNode n;
  n.id = lost3dsg::NodeId{id};
  n.layer = layer;
  n.attributes.label = label;
  n.bbox = b;
  return n;
}

inline const lost3dsg::WordVectorTable& words() {
  static const lost3dsg::WordVectorTable table =
      lost3dsg::load_word_vectors(oracle::data_path("vectors/fixture_vectors.txt"));
  return table;
}

inline const oracle::RawVectors& raw_words() {
  static const oracle::RawVectors raw =
      oracle::read_raw_vectors(oracle::data_path("vectors/fixture_vectors.txt"));
  return raw;
}

// Fixture word vectors plus the offline sentence embedder.
struct Session {
  lost3dsg::LocalHashEmbedder sentences;
  lost3dsg::Providers providers{words(), sentences};
};

inline lost3dsg::SemanticAttributes attrs(std::string label, std::string color,
                                          std::string material, std::string description) {
  return {std::move(label), std::move(color), std::move(material), std::move(description)};
}

}  // namespace fixture
