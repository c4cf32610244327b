#include "lost3dsg/geometry.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lost3dsg {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw ValidationError("intrinsics: fx and fy must be positive");
  if (width == 0 || height == 0) throw ValidationError("intrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx < static_cast<double>(width) && cy >= 0.0 &&
        cy < static_cast<double>(height))) {
    throw ValidationError("intrinsics: principal point must lie inside the image");
  }
}

void CameraPose::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw ValidationError("pose: values must be finite");
  }
  if (!(rotation.transpose() * rotation).isApprox(Mat3::Identity(), 1e-6) ||
      std::abs(rotation.determinant() - 1.0) > 1e-6) {
    throw ValidationError("pose: rotation must be orthonormal with determinant +1");
  }
}

std::vector<Vec3> back_project(const PixelMask& mask, const DepthImage& depth,
                               const CameraIntrinsics& k, const CameraPose& pose) {
  if (mask.width != depth.width || mask.height != depth.height) {
    throw ValidationError("back_project: mask is " + std::to_string(mask.width) + "x" +
                          std::to_string(mask.height) + " but depth is " +
                          std::to_string(depth.width) + "x" + std::to_string(depth.height));
  }
  if (mask.values.size() != mask.width * mask.height ||
      depth.values.size() != depth.width * depth.height) {
    throw ValidationError("back_project: pixel buffer size does not match image size");
  }

  std::vector<Vec3> points;
  for (std::size_t v = 0; v < mask.height; ++v) {
    for (std::size_t u = 0; u < mask.width; ++u) {
      if (!mask.at(u, v)) continue;
      const double z = depth.at(u, v);
      if (!std::isfinite(z) || z <= 0.0) continue;
      const Vec3 camera_point((static_cast<double>(u) - k.cx) * z / k.fx,
                              (static_cast<double>(v) - k.cy) * z / k.fy, z);
      points.push_back(pose.to_world(camera_point));
    }
  }
  return points;
}

double percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ValidationError("percentile of an empty set");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BBox3D bbox_from_points(std::span<const Vec3> points) {
  if (points.empty()) throw ValidationError("bbox_from_points: empty point set");

  constexpr std::size_t kOutlierGuardMin = 20;
  std::vector<bool> keep(points.size(), true);

  if (points.size() >= kOutlierGuardMin) {
    Vec3 lo;
    Vec3 hi;
    std::vector<double> axis(points.size());
    for (int a = 0; a < 3; ++a) {
      for (std::size_t i = 0; i < points.size(); ++i) axis[i] = points[i][a];
      std::sort(axis.begin(), axis.end());
      lo[a] = percentile(axis, 0.01);
      hi[a] = percentile(axis, 0.99);
    }
    // Distance outside the band, worst axis.
    std::vector<std::pair<double, std::size_t>> outside;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec3 below = (lo - points[i]).cwiseMax(0.0);
      const Vec3 above = (points[i] - hi).cwiseMax(0.0);
      const double excess = below.cwiseMax(above).maxCoeff();
      if (excess > 0.0) outside.emplace_back(excess, i);
    }
    std::sort(outside.begin(), outside.end(),
              [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
              });
    const std::size_t budget = points.size() * 2 / 100;
    for (std::size_t j = 0; j < std::min(budget, outside.size()); ++j) {
      keep[outside[j].second] = false;
    }
  }

  Vec3 min_corner = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max_corner = Vec3::Constant(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!keep[i]) continue;
    min_corner = min_corner.cwiseMin(points[i]);
    max_corner = max_corner.cwiseMax(points[i]);
  }
  return BBox3D::from_corners(min_corner, max_corner);
}

Frustum compute_pov_volume(const CameraPose& pose, const CameraIntrinsics& k, double near,
                           double far) {
  if (!(near > 0.0 && near < far && std::isfinite(far))) {
    throw ValidationError("frustum: require 0 < near < far (got near=" + std::to_string(near) +
                          ", far=" + std::to_string(far) + ")");
  }
  Frustum f;
  f.apex = pose.translation;
  f.rotation = pose.rotation;
  f.horizontal_half_angle = std::atan((static_cast<double>(k.width) / 2.0) / k.fx);
  f.vertical_half_angle = std::atan((static_cast<double>(k.height) / 2.0) / k.fy);
  f.near = near;
  f.far = far;
  return f;
}

bool frustum_contains(const Frustum& f, const BBox3D& box) {
  const Vec3 p = f.rotation.transpose() * (box.centroid() - f.apex);
  const double z = p.z();
  if (!(z >= f.near && z <= f.far)) return false;
  return std::abs(p.x() / z) <= std::tan(f.horizontal_half_angle) &&
         std::abs(p.y() / z) <= std::tan(f.vertical_half_angle);
}

bool is_valid_association(const BBox3D& stored, const BBox3D& observed, double epsilon) {
  return (stored.centroid() - observed.centroid()).norm() <= epsilon;
}

bool is_valid_association(const ObjectNode& node, const BBox3D& observed, double epsilon) {
  return is_valid_association(node.bbox, observed, epsilon);
}

}  // namespace lost3dsg
