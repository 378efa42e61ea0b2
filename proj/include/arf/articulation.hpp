#pragma once

#include <array>

#include "arf/field.hpp"
#include "arf/skinning.hpp"

namespace arf {

constexpr int kMaxBones = 32;
constexpr int kMaxRoots = 8;

// Per-pose precomputation shared by every query: bone transforms with their
// inverses and the posed capsule segments used to prune root-finder starts.
// Built either in posed space (B_i) or, by composing with the inverse global
// transform, in normalized space (same LBS because the weights are convex).
struct PoseContext {
  int n_bones = 0;
  std::array<Rigidd, kMaxBones> bone;
  std::array<Rigidd, kMaxBones> bone_inv;
  std::array<Vec3d, kMaxBones> cap_a, cap_b;  // posed capsule segment
  std::array<double, kMaxBones> cutoff;       // init pruning distance

  static PoseContext make(const Skeleton& skel, const SkeletonPose& pose,
                          const Rigidd& pre = Rigidd::identity(), double cutoff_factor = 3.0) {
    if (skel.bone_count() != pose.bone_count())
      throw std::invalid_argument("pose context: bone count mismatch");
    if (skel.bone_count() > kMaxBones)
      throw std::invalid_argument("pose context: too many bones");
    PoseContext ctx;
    ctx.n_bones = skel.bone_count();
    for (int i = 0; i < ctx.n_bones; ++i) {
      const Rigidd b = pre * pose.bone_transforms[size_t(i)];
      ctx.bone[size_t(i)] = b;
      ctx.bone_inv[size_t(i)] = b.inverse();
      ctx.cap_a[size_t(i)] = b.apply(skel.bones[size_t(i)].head);
      ctx.cap_b[size_t(i)] = b.apply(skel.bones[size_t(i)].tail);
      ctx.cutoff[size_t(i)] = cutoff_factor * skel.bones[size_t(i)].radius;
    }
    return ctx;
  }
};

// x' = sum_i w_i B_i x  (Eq. of linear blend skinning)
inline Vec3d lbs_apply(const Vec3d& x, std::span<const double> w, const PoseContext& ctx) {
  Vec3d out{0, 0, 0};
  for (int i = 0; i < ctx.n_bones; ++i)
    if (w[size_t(i)] != 0.0) out += w[size_t(i)] * ctx.bone[size_t(i)].apply(x);
  return out;
}

inline Vec3d forward_lbs(const Vec3d& x, const SkeletonPose& pose, const SkinningGrid& grid) {
  std::array<double, kMaxBones> w;
  grid.interpolate(x, std::span<double>(w.data(), size_t(grid.n_bones)));
  Vec3d out{0, 0, 0};
  for (int i = 0; i < grid.n_bones; ++i)
    if (w[size_t(i)] != 0.0) out += w[size_t(i)] * pose.bone_transforms[size_t(i)].apply(x);
  return out;
}

struct InverseRoots {
  int count = 0;
  std::array<Vec3d, kMaxRoots> x;
  std::array<double, kMaxRoots> residual;

  void push(const Vec3d& p, double r, double dedup_radius) {
    for (int i = 0; i < count; ++i) {
      if ((x[size_t(i)] - p).norm() < dedup_radius) {
        if (r < residual[size_t(i)]) {
          x[size_t(i)] = p;
          residual[size_t(i)] = r;
        }
        return;
      }
    }
    if (count < kMaxRoots) {
      x[size_t(count)] = p;
      residual[size_t(count)] = r;
      ++count;
    }
  }
};

struct InverseLbsOptions {
  int max_iterations = 20;
  double tolerance = 1e-5;      // meters, on ||lbs(x) - x'||
  double dedup_radius = 1e-3;   // meters
};

// Correspondence search: damped Newton on g(x) = lbs(x) - x_target with the
// Jacobian frozen to sum_i w_i R_i each iteration, one start per bone whose
// posed capsule lies within its cutoff of the target. Non-convergence just
// drops the start; the result is the set of deduplicated converged roots.
inline InverseRoots inverse_lbs_ctx(const Vec3d& x_target, const PoseContext& ctx,
                                    const SkinningGrid& grid,
                                    const InverseLbsOptions& opt = {}) {
  InverseRoots roots;
  std::array<double, kMaxBones> w;
  const std::span<double> wspan(w.data(), size_t(ctx.n_bones));
  for (int b = 0; b < ctx.n_bones; ++b) {
    const double cap_dist = point_segment_distance(x_target, ctx.cap_a[size_t(b)], ctx.cap_b[size_t(b)]);
    if (cap_dist > ctx.cutoff[size_t(b)]) continue;
    Vec3d x = ctx.bone_inv[size_t(b)].apply(x_target);
    grid.interpolate(x, wspan);
    Vec3d g = lbs_apply(x, wspan, ctx) - x_target;
    double gn = g.norm();
    bool converged = gn < opt.tolerance;
    for (int it = 0; it < opt.max_iterations && !converged; ++it) {
      Mat3d jac;
      for (int i = 0; i < 9; ++i) jac.m[size_t(i)] = 0.0;
      for (int i = 0; i < ctx.n_bones; ++i)
        if (w[size_t(i)] != 0.0) jac = jac + ctx.bone[size_t(i)].rotation * w[size_t(i)];
      Vec3d step;
      try {
        step = jac.inverse() * g;
      } catch (const NumericError&) {
        break;
      }
      double damp = 1.0;
      Vec3d x_next = x;
      double gn_next = gn;
      Vec3d g_next = g;
      for (int h = 0; h < 4; ++h) {
        const Vec3d cand = x - step * damp;
        grid.interpolate(cand, wspan);
        const Vec3d gc = lbs_apply(cand, wspan, ctx) - x_target;
        const double gcn = gc.norm();
        if (gcn < gn || h == 3) {
          x_next = cand;
          g_next = gc;
          gn_next = gcn;
          break;
        }
        damp *= 0.5;
      }
      if (gn_next >= gn && gn >= opt.tolerance) break;  // stalled
      x = x_next;
      g = g_next;
      gn = gn_next;
      converged = gn < opt.tolerance;
    }
    if (converged) roots.push(x, gn, opt.dedup_radius);
  }
  return roots;
}

inline InverseRoots inverse_lbs(const Vec3d& x_posed, const Skeleton& skel,
                                const SkeletonPose& pose, const SkinningGrid& grid,
                                const InverseLbsOptions& opt = {}) {
  return inverse_lbs_ctx(x_posed, PoseContext::make(skel, pose), grid, opt);
}

// Posed-field evaluation f'(x') = f(x*): query the canonical field at every
// recovered root and keep the maximum-density sample. Empty root set (or all
// roots outside the canonical box) is empty space.
template <typename Real>
struct PosedSample {
  RadianceSample<Real> radiance;
  Vec3d canonical;      // selected root, valid only when has_root
  bool has_root = false;
};

template <typename Real>
PosedSample<Real> posed_query_ctx(const Vec3d& x_target, const PoseContext& ctx,
                                  const SkinningGrid& grid, const CanonicalField<Real>& field,
                                  typename CanonicalField<Real>::Scratch& scratch,
                                  const InverseLbsOptions& opt = {}) {
  PosedSample<Real> best;
  const InverseRoots roots = inverse_lbs_ctx(x_target, ctx, grid, opt);
  for (int i = 0; i < roots.count; ++i) {
    const Vec3d& r = roots.x[size_t(i)];
    if (!field.bounding_box().contains(r)) continue;
    const RadianceSample<Real> s = field.query(r, scratch);
    if (!best.has_root || s.density > best.radiance.density) {
      best.radiance = s;
      best.canonical = r;
      best.has_root = true;
    }
  }
  return best;
}

template <typename Real>
RadianceSample<Real> posed_query(const Vec3d& x_posed, const Skeleton& skel,
                                 const SkeletonPose& pose, const SkinningGrid& grid,
                                 const CanonicalField<Real>& field,
                                 const InverseLbsOptions& opt = {}) {
  typename CanonicalField<Real>::Scratch scratch = field.make_scratch();
  return posed_query_ctx(x_posed, PoseContext::make(skel, pose), grid, field, scratch, opt).radiance;
}

}  // namespace arf
