#pragma once

#include <vector>

#include "arf/math.hpp"

namespace arf {

struct Bone {
  int parent = -1;  // -1 for the root
  Vec3d head;       // rest-pose joint, canonical meters
  Vec3d tail;
  double radius = 0.05;
};

struct Skeleton {
  std::vector<Bone> bones;

  int bone_count() const { return int(bones.size()); }

  void validate() const {
    if (bones.empty()) throw std::invalid_argument("skeleton: needs at least one bone");
    if (bones[0].parent != -1) throw std::invalid_argument("skeleton: bone 0 must be the root");
    for (size_t i = 0; i < bones.size(); ++i) {
      const Bone& b = bones[i];
      if (i > 0 && (b.parent < 0 || size_t(b.parent) >= i))
        throw std::invalid_argument("skeleton: parents must form a tree rooted at bone 0");
      if (!(b.radius > 0)) throw std::invalid_argument("skeleton: radii must be positive");
      if (!b.head.all_finite() || !b.tail.all_finite())
        throw std::invalid_argument("skeleton: non-finite joint");
    }
  }

  double bone_length(int i) const { return (bones[size_t(i)].tail - bones[size_t(i)].head).norm(); }

  // Upper bound on the distance any capsule point can reach from the root
  // head under arbitrary joint rotations: per-joint head distances are
  // invariant along the chain, so summing them bounds the reach.
  double max_reach() const {
    std::vector<double> head_reach(bones.size(), 0.0);
    double reach = 0.0;
    for (size_t i = 0; i < bones.size(); ++i) {
      const Bone& b = bones[i];
      head_reach[i] = (b.parent < 0)
                          ? 0.0
                          : head_reach[size_t(b.parent)] + (b.head - bones[size_t(b.parent)].head).norm();
      reach = std::max(reach, head_reach[i] + bone_length(int(i)) + b.radius);
    }
    return reach;
  }

  // Rest-pose capsule bounds plus a relative margin (canonical box).
  Aabbd rest_bounds(double margin_frac = 0.10, double extra_pad = 0.0) const {
    Aabbd box;
    for (const Bone& b : bones) {
      box.expand(b.head - Vec3d(b.radius));
      box.expand(b.head + Vec3d(b.radius));
      box.expand(b.tail - Vec3d(b.radius));
      box.expand(b.tail + Vec3d(b.radius));
    }
    box.pad(extra_pad);
    return box.inflated_relative(margin_frac);
  }
};

// Per-bone rigid maps canonical -> posed (global motion composed in), plus
// the root's global transform kept separately so normalized space can factor
// it back out.
struct SkeletonPose {
  std::vector<Rigidd> bone_transforms;
  Rigidd global_transform;

  static SkeletonPose identity(int n_bones) {
    SkeletonPose p;
    p.bone_transforms.assign(size_t(n_bones), Rigidd::identity());
    return p;
  }

  int bone_count() const { return int(bone_transforms.size()); }

  void validate() const {
    if (bone_transforms.empty()) throw std::invalid_argument("pose: no bone transforms");
    for (const Rigidd& b : bone_transforms)
      if (!b.is_rotation(1e-6)) throw std::invalid_argument("pose: bone transform is not rigid");
    if (!global_transform.is_rotation(1e-6))
      throw std::invalid_argument("pose: global transform is not rigid");
  }
};

// Forward kinematics: per-bone rotations about the bone's head joint chained
// down the tree, then the global transform on top. Bones with identity
// rotation and identity global reproduce the rest pose exactly.
inline SkeletonPose pose_from_joint_rotations(const Skeleton& skel,
                                              const std::vector<Mat3d>& joint_rotations,
                                              const Rigidd& global = Rigidd::identity()) {
  skel.validate();
  if (joint_rotations.size() != skel.bones.size())
    throw std::invalid_argument("pose_from_joint_rotations: rotation count mismatch");
  SkeletonPose pose;
  pose.global_transform = global;
  std::vector<Rigidd> chain(skel.bones.size());
  pose.bone_transforms.resize(skel.bones.size());
  for (size_t i = 0; i < skel.bones.size(); ++i) {
    const Bone& b = skel.bones[i];
    const Rigidd local = Rigidd::about_point(b.head, joint_rotations[i]);
    chain[i] = (b.parent < 0) ? local : chain[size_t(b.parent)] * local;
    pose.bone_transforms[i] = global * chain[i];
  }
  return pose;
}

}  // namespace arf
