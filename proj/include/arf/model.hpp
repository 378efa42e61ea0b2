#pragma once

#include <atomic>
#include <memory>

#include "arf/articulation.hpp"
#include "arf/render.hpp"

namespace arf {

// Relaxed counters; exact totals are recovered because every increment
// happens-before the read at phase boundaries.
struct QueryCounters {
  std::atomic<uint64_t> posed_queries{0};
  std::atomic<uint64_t> canonical_queries{0};

  void reset() {
    posed_queries.store(0, std::memory_order_relaxed);
    canonical_queries.store(0, std::memory_order_relaxed);
  }
  void add_posed(uint64_t n = 1) { posed_queries.fetch_add(n, std::memory_order_relaxed); }
  void add_canonical(uint64_t n = 1) { canonical_queries.fetch_add(n, std::memory_order_relaxed); }
};

// The trainable avatar: canonical field + skeleton + skinning grid, with the
// boxes everything agrees on. The normalized-space box is a reach-based cube
// so any articulation of the skeleton stays inside it.
template <typename Real>
struct Model {
  Skeleton skeleton;
  SkinningGrid skinning;
  CanonicalField<Real> field;
  Aabbd canonical_box;
  Aabbd normalized_box;
  InverseLbsOptions inverse_options;
  mutable QueryCounters counters;

  Model() = default;
  Model(const Model& o)
      : skeleton(o.skeleton),
        skinning(o.skinning),
        field(o.field),
        canonical_box(o.canonical_box),
        normalized_box(o.normalized_box),
        inverse_options(o.inverse_options) {}
  Model& operator=(const Model& o) {
    skeleton = o.skeleton;
    skinning = o.skinning;
    field = o.field;
    canonical_box = o.canonical_box;
    normalized_box = o.normalized_box;
    inverse_options = o.inverse_options;
    return *this;
  }
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) = default;
};

inline Aabbd normalized_reach_box(const Skeleton& skeleton, double margin = 1.05) {
  const double reach = skeleton.max_reach() * margin;
  const Vec3d root = skeleton.bones[0].head;
  Aabbd box;
  box.expand(root - Vec3d(reach));
  box.expand(root + Vec3d(reach));
  return box;
}

template <typename Real>
Model<Real> build_model(const Skeleton& skeleton, HashGridConfig grid_cfg, MlpConfig mlp_cfg,
                        Vec3i skinning_resolution, uint64_t seed) {
  skeleton.validate();
  Model<Real> m;
  m.skeleton = skeleton;
  m.canonical_box = skeleton.rest_bounds(0.10);
  grid_cfg.bounding_box = m.canonical_box;
  m.field = CanonicalField<Real>(grid_cfg, mlp_cfg, seed);
  m.skinning = build_skinning_grid(skeleton, m.canonical_box, skinning_resolution);
  m.normalized_box = normalized_reach_box(skeleton);
  return m;
}

// One pose's view of a model, in normalized space. All rendering and
// occupancy sampling run through this: rays are mapped into normalized space
// once, articulation uses bone transforms with the global motion removed.
template <typename Real>
struct PosedModelView {
  const Model<Real>* model = nullptr;
  PoseContext ctx;            // normalized-space bone transforms
  Rigidd world_to_normalized;

  PosedModelView() = default;
  PosedModelView(const Model<Real>& m, const SkeletonPose& pose) : model(&m) {
    const Rigidd ginv = pose.global_transform.inverse();
    ctx = PoseContext::make(m.skeleton, pose, ginv);
    world_to_normalized = ginv;
  }

  Vec3d to_normalized(const Vec3d& x_world) const { return world_to_normalized.apply(x_world); }

  PosedSample<Real> query_normalized(const Vec3d& x_norm,
                                     typename CanonicalField<Real>::Scratch& scratch) const {
    model->counters.add_posed();
    PosedSample<Real> s =
        posed_query_ctx(x_norm, ctx, model->skinning, model->field, scratch, model->inverse_options);
    if (s.has_root) model->counters.add_canonical();
    return s;
  }

  double density_normalized(const Vec3d& x_norm,
                            typename CanonicalField<Real>::Scratch& scratch) const {
    const PosedSample<Real> s = query_normalized(x_norm, scratch);
    return s.has_root ? double(s.radiance.density) : 0.0;
  }
};

// Render a model in a pose. The field functor receives world points; the
// view maps them into normalized space where articulation happens.
template <typename Real>
RenderImages render_model(const Model<Real>& model, const SkeletonPose& pose,
                          const Camera& camera, const OccupancyGrid* occupancy,
                          const RenderOptions& opt) {
  const PosedModelView<Real> view(model, pose);
  return render_image<Real>(
      camera, model.normalized_box,
      [&](const Vec3d& x_world, RadianceSample<Real>& out) {
        thread_local typename CanonicalField<Real>::Scratch tl_scratch;
        if (tl_scratch.features.size() != size_t(model.field.grid.config.feature_dim()))
          tl_scratch = model.field.make_scratch();
        const PosedSample<Real> s = view.query_normalized(view.to_normalized(x_world), tl_scratch);
        if (!s.has_root) return false;
        out = s.radiance;
        return true;
      },
      [&](const Vec3d& x_world) { return view.to_normalized(x_world); }, occupancy, opt);
}

// Inference-stage occupancy for one pose, built from the model itself.
template <typename Real>
OccupancyGrid build_model_inference_grid(const Model<Real>& model, const SkeletonPose& pose,
                                         const OccupancyConfig& cfg) {
  const PosedModelView<Real> view(model, pose);
  return build_inference_grid(model.normalized_box, cfg, [&](const Vec3d& x_norm) {
    thread_local typename CanonicalField<Real>::Scratch tl_scratch;
    if (tl_scratch.features.size() != size_t(model.field.grid.config.feature_dim()))
      tl_scratch = model.field.make_scratch();
    return view.density_normalized(x_norm, tl_scratch);
  });
}

}  // namespace arf
