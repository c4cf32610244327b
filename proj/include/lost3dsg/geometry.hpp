#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

#include "lost3dsg/core_graph.hpp"

namespace lost3dsg {

using Mat3 = Eigen::Matrix3d;

struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  std::size_t width = 0;
  std::size_t height = 0;

  void validate() const;
};

/// Camera-to-world rigid transform. Camera frame: x right, y down, z forward.
struct CameraPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  void validate() const;
  Vec3 to_world(const Vec3& camera_point) const { return rotation * camera_point + translation; }
  Vec3 to_camera(const Vec3& world_point) const {
    return rotation.transpose() * (world_point - translation);
  }
};

/// Row-major depth in meters; 0 or NaN marks an invalid pixel.
struct DepthImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> values;

  double at(std::size_t u, std::size_t v) const { return values[v * width + u]; }
};

struct PixelMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<bool> values;

  bool at(std::size_t u, std::size_t v) const { return values[v * width + u]; }
};

/// Visible volume of the camera: a pyramid between near and far planes.
struct Frustum {
  Vec3 apex = Vec3::Zero();
  Mat3 rotation = Mat3::Identity();
  double horizontal_half_angle = 0.0;
  double vertical_half_angle = 0.0;
  double near = 0.3;
  double far = 4.0;
};

/// Lifts masked pixels with valid depth to world points, pixel (u, v) with
/// depth z mapping to ((u - cx) z / fx, (v - cy) z / fy, z) in the camera
/// frame. Throws ValidationError if the mask and depth sizes differ.
std::vector<Vec3> back_project(const PixelMask& mask, const DepthImage& depth,
                               const CameraIntrinsics& intrinsics, const CameraPose& pose);

/// Axis-aligned bounds of the points. With at least 20 points, points
/// outside the per-axis [1st, 99th] percentile band are dropped first, the
/// most extreme first and never more than 2% of the input. Throws
/// ValidationError on an empty set.
BBox3D bbox_from_points(std::span<const Vec3> points);

/// Linear-interpolated percentile (q in [0, 1]) of sorted values.
double percentile(std::span<const double> sorted, double q);

/// Throws ValidationError unless 0 < near < far.
Frustum compute_pov_volume(const CameraPose& pose, const CameraIntrinsics& intrinsics,
                           double near, double far);

/// Centroid test: the bbox centroid in camera coordinates must satisfy
/// near <= z <= far, |x / z| <= tan(h), |y / z| <= tan(v).
bool frustum_contains(const Frustum& frustum, const BBox3D& box);

/// Spatial consistency: centroid distance <= epsilon.
bool is_valid_association(const BBox3D& stored, const BBox3D& observed, double epsilon);
bool is_valid_association(const ObjectNode& node, const BBox3D& observed, double epsilon);

}  // namespace lost3dsg
