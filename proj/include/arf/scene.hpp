#pragma once

#include <numbers>
#include <vector>

#include "arf/model.hpp"

namespace arf {

// Analytic articulated figure: colored capsules with smoothstep edges. This
// is the ground-truth field for dataset generation and for every oracle the
// tests compare against.
struct CapsuleFigure {
  Skeleton skeleton;
  std::vector<Vec3d> colors;        // per bone
  std::vector<double> amplitudes;   // per bone, density units
  double softness = 0.01;           // edge width, meters

  void validate() const {
    skeleton.validate();
    if (colors.size() != skeleton.bones.size() || amplitudes.size() != skeleton.bones.size())
      throw std::invalid_argument("figure: per-bone color/amplitude required");
    for (double a : amplitudes)
      if (!(a > 0)) throw std::invalid_argument("figure: amplitudes must be positive");
    if (!(softness > 0)) throw std::invalid_argument("figure: softness must be positive");
  }
};

// Canonical-space analytic field. Density saturates to the bone amplitude
// deep inside a capsule and falls to zero over `softness` at the surface;
// color is the density-weighted blend of bone colors.
inline RadianceSample<double> analytic_query(const Vec3d& x, const CapsuleFigure& fig) {
  RadianceSample<double> out;
  Vec3d color_acc{0, 0, 0};
  double total = 0.0;
  for (size_t i = 0; i < fig.skeleton.bones.size(); ++i) {
    const Bone& b = fig.skeleton.bones[i];
    const double d = point_segment_distance(x, b.head, b.tail);
    if (d >= b.radius) continue;
    const double s = smoothstep01((b.radius - d) / fig.softness);
    if (s <= 0.0) continue;
    const double dens = fig.amplitudes[i] * s;
    total += dens;
    color_acc += fig.colors[i] * dens;
  }
  if (total > 0.0) {
    out.density = total;
    out.color = (color_acc / total).cast<double>();
  }
  return out;
}

// Posed analytic field: every capsule moves rigidly with its bone, i.e. each
// bone's contribution is evaluated at B_i^{-1} x'. This is exact ground truth
// (no skinning blend) which the LBS model approximates near joints.
struct PosedFigure {
  const CapsuleFigure* figure = nullptr;
  std::vector<Rigidd> inv_bones;
  std::vector<Vec3d> cap_a, cap_b;  // posed segments, for the fast path

  PosedFigure() = default;
  PosedFigure(const CapsuleFigure& fig, const SkeletonPose& pose) : figure(&fig) {
    fig.validate();
    if (pose.bone_count() != fig.skeleton.bone_count())
      throw std::invalid_argument("posed figure: bone count mismatch");
    inv_bones.reserve(fig.skeleton.bones.size());
    for (size_t i = 0; i < fig.skeleton.bones.size(); ++i) {
      const Rigidd& b = pose.bone_transforms[i];
      inv_bones.push_back(b.inverse());
      cap_a.push_back(b.apply(fig.skeleton.bones[i].head));
      cap_b.push_back(b.apply(fig.skeleton.bones[i].tail));
    }
  }

  RadianceSample<double> query(const Vec3d& x_posed) const {
    RadianceSample<double> out;
    Vec3d color_acc{0, 0, 0};
    double total = 0.0;
    for (size_t i = 0; i < figure->skeleton.bones.size(); ++i) {
      const Bone& b = figure->skeleton.bones[i];
      const double d = point_segment_distance(x_posed, cap_a[i], cap_b[i]);
      if (d >= b.radius) continue;
      const double s = smoothstep01((b.radius - d) / figure->softness);
      if (s <= 0.0) continue;
      const double dens = figure->amplitudes[i] * s;
      total += dens;
      color_acc += figure->colors[i] * dens;
    }
    if (total > 0.0) {
      out.density = total;
      out.color = color_acc / total;
    }
    return out;
  }

  // Does the ray pass within any posed capsule radius (hard silhouette)?
  bool ray_hits(const Ray& ray) const;
};

// Minimum distance between a ray (t in [t0, inf)) and a segment, via dense
// golden-section-free sampling refined by ternary steps; exact enough for
// silhouette tests because we only compare against the capsule radius.
inline double ray_segment_distance(const Vec3d& o, const Vec3d& d, const Vec3d& a, const Vec3d& b) {
  // distance between infinite line (o, d) and segment: minimize over segment
  // parameter u in [0,1] the point-line distance, then clamp ray t >= 0.
  const Vec3d ab = b - a;
  double best = std::numeric_limits<double>::max();
  constexpr int kCoarse = 64;
  for (int i = 0; i <= kCoarse; ++i) {
    const double u = double(i) / kCoarse;
    const Vec3d p = a + ab * u;
    const double t = std::max(0.0, (p - o).dot(d));
    best = std::min(best, (p - (o + d * t)).norm());
  }
  return best;
}

inline bool PosedFigure::ray_hits(const Ray& ray) const {
  for (size_t i = 0; i < figure->skeleton.bones.size(); ++i) {
    if (ray_segment_distance(ray.origin, ray.direction, cap_a[i], cap_b[i]) <
        figure->skeleton.bones[i].radius)
      return true;
  }
  return false;
}

// Default 10-bone figure: torso, head, and two-segment arms and legs with
// distinct saturated colors so correspondences are unambiguous in tests.
inline CapsuleFigure default_figure() {
  CapsuleFigure fig;
  auto add = [&fig](int parent, Vec3d head, Vec3d tail, double radius, Vec3d color) {
    fig.skeleton.bones.push_back({parent, head, tail, radius});
    fig.colors.push_back(color);
    fig.amplitudes.push_back(80.0);
  };
  // torso (root) and head
  add(-1, {0.00, 0.95, 0.00}, {0.00, 1.45, 0.00}, 0.11, {0.90, 0.10, 0.10});
  add(0, {0.00, 1.47, 0.00}, {0.00, 1.66, 0.00}, 0.09, {0.95, 0.85, 0.10});
  // left arm (upper, fore)
  add(0, {0.13, 1.38, 0.00}, {0.38, 1.27, 0.00}, 0.050, {0.10, 0.80, 0.15});
  add(2, {0.38, 1.27, 0.00}, {0.62, 1.16, 0.00}, 0.045, {0.10, 0.25, 0.90});
  // right arm
  add(0, {-0.13, 1.38, 0.00}, {-0.38, 1.27, 0.00}, 0.050, {0.10, 0.85, 0.80});
  add(4, {-0.38, 1.27, 0.00}, {-0.62, 1.16, 0.00}, 0.045, {0.85, 0.15, 0.85});
  // left leg (thigh, shin)
  add(0, {0.10, 0.92, 0.00}, {0.13, 0.50, 0.00}, 0.070, {0.95, 0.55, 0.10});
  add(6, {0.13, 0.50, 0.00}, {0.15, 0.07, 0.00}, 0.055, {0.55, 0.10, 0.85});
  // right leg
  add(0, {-0.10, 0.92, 0.00}, {-0.13, 0.50, 0.00}, 0.070, {0.10, 0.55, 0.45});
  add(8, {-0.13, 0.50, 0.00}, {-0.15, 0.07, 0.00}, 0.055, {0.60, 0.80, 0.10});
  fig.softness = 0.012;
  fig.validate();
  return fig;
}

// Joint rotations for a bend pose: elbows about +z, knees about +x.
inline SkeletonPose bend_pose(const Skeleton& skel, double elbow_rad, double knee_rad,
                              const Rigidd& global = Rigidd::identity()) {
  std::vector<Mat3d> rot(skel.bones.size(), Mat3d::identity());
  if (skel.bones.size() >= 10) {
    rot[3] = Mat3d::rot_z(elbow_rad);    // left forearm
    rot[5] = Mat3d::rot_z(-elbow_rad);   // right forearm
    rot[7] = Mat3d::rot_x(knee_rad);     // left shin
    rot[9] = Mat3d::rot_x(-knee_rad);    // right shin
  }
  return pose_from_joint_rotations(skel, rot, global);
}

inline Rigidd yaw_about(const Vec3d& pivot, double yaw_rad) {
  return Rigidd::about_point(pivot, Mat3d::rot_y(yaw_rad));
}

// Capture script: 12 turntable frames (global yaw about the root) plus 6
// frames bending elbows/knees, static frontal camera.
inline std::vector<SkeletonPose> default_pose_script(const Skeleton& skel) {
  std::vector<SkeletonPose> poses;
  const Vec3d pivot = skel.bones[0].head;
  for (int i = 0; i < 12; ++i) {
    const double yaw = 2.0 * std::numbers::pi * i / 12.0;
    poses.push_back(bend_pose(skel, 0.0, 0.0, yaw_about(pivot, yaw)));
  }
  const double deg = std::numbers::pi / 180.0;
  const double bends[6][2] = {{25 * deg, 0}, {45 * deg, 0},          {0, 25 * deg},
                              {0, 45 * deg}, {35 * deg, 35 * deg},   {-30 * deg, 20 * deg}};
  for (const auto& b : bends)
    poses.push_back(bend_pose(skel, b[0], b[1], yaw_about(pivot, 20.0 * deg)));
  return poses;
}

inline Camera default_camera(const Skeleton& skel, int width = 128, int height = 128) {
  const Vec3d target = skel.bones[0].head + Vec3d{0.0, -0.05, 0.0};
  const double dist = 3.2;
  const Vec3d eye = target + Vec3d{0.0, 0.0, -dist};
  // fit ~2.3 m of figure vertically
  const double focal = height * dist / 2.3;
  return Camera::look_at(eye, target, {0, 1, 0}, focal, width, height);
}

}  // namespace arf
