#pragma once

#include <cstring>
#include <unordered_map>
#include <vector>

#include "arf/parallel.hpp"
#include "arf/rng.hpp"
#include "arf/skeleton.hpp"

namespace arf {

struct OccupancyConfig {
  int resolution = 64;
  double alpha_threshold = 0.01;  // opacity a cell-diagonal path may accumulate unnoticed
  int dilation = 1;               // cells
  double decay = 0.95;            // training-grid moving decay
  int update_interval = 16;       // train steps between updates

  void validate() const {
    if (resolution < 2) throw std::invalid_argument("occupancy: resolution must be >= 2");
    if (!(alpha_threshold > 0 && alpha_threshold < 1))
      throw std::invalid_argument("occupancy: alpha_threshold must be in (0,1)");
    if (dilation < 0) throw std::invalid_argument("occupancy: dilation must be >= 0");
    if (!(decay >= 0 && decay <= 1)) throw std::invalid_argument("occupancy: decay in [0,1]");
    if (update_interval < 1) throw std::invalid_argument("occupancy: update_interval must be >= 1");
  }
};

// Map a posed-space point into normalized space (global motion factored out).
inline Vec3d to_normalized(const Vec3d& x_posed, const SkeletonPose& pose) {
  return pose.global_transform.inverse().apply(x_posed);
}

// Binary empty-space mask over the normalized-space box. `values` hold the
// clamped moving densities, `mask` the thresholded + dilated occupancy.
struct OccupancyGrid {
  Vec3i resolution{64, 64, 64};
  Aabbd box;
  double density_threshold = 0.0;
  int dilation = 1;
  std::vector<float> values;
  std::vector<uint8_t> mask;

  size_t cell_count() const { return size_t(resolution.x) * resolution.y * resolution.z; }
  size_t cell_index(int ix, int iy, int iz) const {
    return (size_t(iz) * resolution.y + iy) * resolution.x + ix;
  }
  Vec3d cell_size() const {
    const Vec3d e = box.extent();
    return {e.x / resolution.x, e.y / resolution.y, e.z / resolution.z};
  }
  Vec3d cell_center(int ix, int iy, int iz) const {
    const Vec3d cs = cell_size();
    return {box.lo.x + (ix + 0.5) * cs.x, box.lo.y + (iy + 0.5) * cs.y,
            box.lo.z + (iz + 0.5) * cs.z};
  }

  static OccupancyGrid empty(const Aabbd& box, const OccupancyConfig& cfg) {
    cfg.validate();
    OccupancyGrid g;
    g.resolution = {cfg.resolution, cfg.resolution, cfg.resolution};
    g.box = box;
    g.dilation = cfg.dilation;
    g.density_threshold = -std::log1p(-cfg.alpha_threshold) / g.cell_size().norm();
    g.values.assign(g.cell_count(), 0.0f);
    g.mask.assign(g.cell_count(), 0);
    return g;
  }

  bool cell_of(const Vec3d& x, Vec3i& c) const {
    const Vec3d e = box.extent();
    const Vec3d u{(x.x - box.lo.x) / e.x, (x.y - box.lo.y) / e.y, (x.z - box.lo.z) / e.z};
    if (u.x < 0 || u.y < 0 || u.z < 0 || u.x >= 1 || u.y >= 1 || u.z >= 1) return false;
    c = {int(u.x * resolution.x), int(u.y * resolution.y), int(u.z * resolution.z)};
    c = cwise_min(c, Vec3i{resolution.x - 1, resolution.y - 1, resolution.z - 1});
    return true;
  }

  // Points outside the grid box are unoccupied.
  bool is_occupied(const Vec3d& x_normalized) const {
    Vec3i c;
    if (!cell_of(x_normalized, c)) return false;
    return mask[cell_index(c.x, c.y, c.z)] != 0;
  }

  void rebuild_mask() {
    for (size_t i = 0; i < values.size(); ++i)
      mask[i] = values[i] >= float(density_threshold) ? 1 : 0;
    if (dilation > 0) mask = dilated_mask(mask, resolution, dilation);
  }

  double occupied_fraction() const {
    size_t n = 0;
    for (uint8_t m : mask) n += m;
    return values.empty() ? 0.0 : double(n) / double(mask.size());
  }

  // Morphological dilation of a binary mask by a (2r+1)^3 box kernel,
  // separable one axis at a time.
  static std::vector<uint8_t> dilated_mask(const std::vector<uint8_t>& in, const Vec3i& res, int r) {
    std::vector<uint8_t> a = in, b(in.size());
    const auto pass = [&](const std::vector<uint8_t>& src, std::vector<uint8_t>& dst, int axis) {
      const int n[3] = {res.x, res.y, res.z};
      const size_t stride[3] = {1, size_t(res.x), size_t(res.x) * res.y};
      for (int iz = 0; iz < n[2]; ++iz)
        for (int iy = 0; iy < n[1]; ++iy)
          for (int ix = 0; ix < n[0]; ++ix) {
            const int idx3[3] = {ix, iy, iz};
            const size_t base = ix * stride[0] + iy * stride[1] + iz * stride[2];
            uint8_t v = 0;
            for (int d = -r; d <= r && !v; ++d) {
              const int j = idx3[axis] + d;
              if (j < 0 || j >= n[axis]) continue;
              v = src[base + (j - idx3[axis]) * ptrdiff_t(stride[axis])];
            }
            dst[base] = v;
          }
    };
    if (r <= 0) return a;
    pass(a, b, 0);
    pass(b, a, 1);
    pass(a, b, 2);
    return b;
  }
};

inline OccupancyGrid dilate(const OccupancyGrid& grid, int r) {
  OccupancyGrid out = grid;
  out.mask = OccupancyGrid::dilated_mask(grid.mask, grid.resolution, r);
  return out;
}

// Inference grid for one pose: densities of the posed field at cell centers
// (positions expressed in normalized space), thresholded and dilated.
// `density_normalized(x)` must evaluate the posed field at global * x.
template <typename DensityFn>
OccupancyGrid build_inference_grid(const Aabbd& normalized_box, const OccupancyConfig& cfg,
                                   DensityFn&& density_normalized) {
  OccupancyGrid g = OccupancyGrid::empty(normalized_box, cfg);
  const int rx = g.resolution.x, ry = g.resolution.y;
  parallel_for(int64_t(g.cell_count()), [&](int64_t i) {
    const int ix = int(i % rx), iy = int((i / rx) % ry), iz = int(i / (int64_t(rx) * ry));
    const double d = density_normalized(g.cell_center(ix, iy, iz));
    g.values[size_t(i)] = float(std::min(d, 1.0));
  });
  g.rebuild_mask();
  return g;
}

// Decayed-max update of the shared training grid: one jittered sample per
// cell under a per-cell randomly drawn training pose. Plain averaging would
// let transiently empty poses erase cells, losing the union over frames.
// `density_normalized(pose_index, x)` evaluates the posed field of that frame.
template <typename PoseDensityFn>
void update_training_grid(OccupancyGrid& grid, int n_poses, double decay, uint64_t seed,
                          uint64_t step, PoseDensityFn&& density_normalized) {
  const int rx = grid.resolution.x, ry = grid.resolution.y;
  const Vec3d cs = grid.cell_size();
  parallel_for(int64_t(grid.cell_count()), [&](int64_t i) {
    const int ix = int(i % rx), iy = int((i / rx) % ry), iz = int(i / (int64_t(rx) * ry));
    Pcg32 rng = keyed_rng(seed, 0x0cc0, uint64_t(i), step);
    const int pose = int(rng.next_below(uint32_t(n_poses)));
    const Vec3d lo = grid.box.lo;
    const Vec3d x{lo.x + (ix + rng.next_double()) * cs.x, lo.y + (iy + rng.next_double()) * cs.y,
                  lo.z + (iz + rng.next_double()) * cs.z};
    const float fresh = float(std::min(density_normalized(pose, x), 1.0));
    grid.values[size_t(i)] = std::max(float(decay) * grid.values[size_t(i)], fresh);
  });
  grid.rebuild_mask();
}

// Per-pose inference grids are cheap but not free; renders reuse them via a
// hash of the pose's transforms.
struct PoseGridCache {
  std::unordered_map<uint64_t, OccupancyGrid> grids;

  static uint64_t pose_hash(const SkeletonPose& pose) {
    uint64_t h = 0x51ab5eed;
    const auto mix_rigid = [&h](const Rigidd& r) {
      for (double v : r.rotation.m) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        h = splitmix64(h ^ bits);
      }
      for (int i = 0; i < 3; ++i) {
        uint64_t bits;
        std::memcpy(&bits, &r.translation[i], sizeof bits);
        h = splitmix64(h ^ bits);
      }
    };
    for (const Rigidd& b : pose.bone_transforms) mix_rigid(b);
    mix_rigid(pose.global_transform);
    return h;
  }

  template <typename Builder>
  const OccupancyGrid& get_or_build(const SkeletonPose& pose, Builder&& build) {
    const uint64_t key = pose_hash(pose);
    auto it = grids.find(key);
    if (it == grids.end()) it = grids.emplace(key, build()).first;
    return it->second;
  }
};

}  // namespace arf
