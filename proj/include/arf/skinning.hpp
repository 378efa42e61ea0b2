#pragma once

#include <vector>

#include "arf/skeleton.hpp"

namespace arf {

// Low-resolution voxel grid of per-bone skinning weights over the canonical
// box. `resolution` counts lattice nodes per axis; weights are interpolated
// trilinearly between nodes and renormalized onto the simplex.
struct SkinningGrid {
  Vec3i resolution{32, 32, 32};
  Aabbd box;
  int n_bones = 0;
  std::vector<double> weights;  // [node_z][node_y][node_x][bone]

  size_t node_index(int ix, int iy, int iz) const {
    return (size_t(iz) * resolution.y + iy) * resolution.x + ix;
  }
  const double* node(int ix, int iy, int iz) const {
    return weights.data() + node_index(ix, iy, iz) * n_bones;
  }

  void interpolate(const Vec3d& x, std::span<double> w) const {
    Vec3d u;
    const Vec3d e = box.extent();
    const Vec3d p = box.clamp_inside(x);  // out-of-box queries clamp to the boundary
    u = {(p.x - box.lo.x) / e.x * (resolution.x - 1), (p.y - box.lo.y) / e.y * (resolution.y - 1),
         (p.z - box.lo.z) / e.z * (resolution.z - 1)};
    int c[3];
    double f[3];
    const int rmax[3] = {resolution.x - 1, resolution.y - 1, resolution.z - 1};
    for (int a = 0; a < 3; ++a) {
      double fl = std::floor(u[a]);
      if (fl > rmax[a] - 1) fl = rmax[a] - 1;
      if (fl < 0) fl = 0;
      c[a] = int(fl);
      f[a] = u[a] - fl;
    }
    for (int i = 0; i < n_bones; ++i) w[i] = 0.0;
    for (int k = 0; k < 8; ++k) {
      const int dx = k & 1, dy = (k >> 1) & 1, dz = (k >> 2) & 1;
      const double wt = (dx ? f[0] : 1 - f[0]) * (dy ? f[1] : 1 - f[1]) * (dz ? f[2] : 1 - f[2]);
      if (wt == 0.0) continue;
      const double* nw = node(c[0] + dx, c[1] + dy, c[2] + dz);
      for (int i = 0; i < n_bones; ++i) w[i] += wt * nw[i];
    }
    double sum = 0.0;
    for (int i = 0; i < n_bones; ++i) sum += w[i];
    if (sum > 0) {
      const double inv = 1.0 / sum;
      for (int i = 0; i < n_bones; ++i) w[i] *= inv;
    }
  }
};

// Nearest-capsule-axis weights: the closest bone segment wins; segments whose
// distance is within `blend_factor` times the nearest distance are blended by
// inverse distance, which removes the hard discontinuity at joint seams.
inline SkinningGrid build_skinning_grid(const Skeleton& skeleton, const Aabbd& box,
                                        Vec3i resolution = {32, 32, 32},
                                        double blend_factor = 1.5) {
  skeleton.validate();
  if (resolution.x < 2 || resolution.y < 2 || resolution.z < 2)
    throw std::invalid_argument("skinning grid: resolution must be >= 2 per axis");
  for (int i = 0; i < skeleton.bone_count(); ++i)
    if (skeleton.bone_length(i) <= 0)
      throw std::invalid_argument("skinning grid: degenerate zero-length bone");

  SkinningGrid grid;
  grid.resolution = resolution;
  grid.box = box;
  grid.n_bones = skeleton.bone_count();
  grid.weights.assign(size_t(resolution.x) * resolution.y * resolution.z * grid.n_bones, 0.0);

  const int nb = grid.n_bones;
  std::vector<double> dist(size_t(nb));
  const Vec3d e = box.extent();
  for (int iz = 0; iz < resolution.z; ++iz)
    for (int iy = 0; iy < resolution.y; ++iy)
      for (int ix = 0; ix < resolution.x; ++ix) {
        const Vec3d p{box.lo.x + e.x * ix / (resolution.x - 1),
                      box.lo.y + e.y * iy / (resolution.y - 1),
                      box.lo.z + e.z * iz / (resolution.z - 1)};
        double dmin = std::numeric_limits<double>::max();
        for (int b = 0; b < nb; ++b) {
          dist[size_t(b)] =
              point_segment_distance(p, skeleton.bones[size_t(b)].head, skeleton.bones[size_t(b)].tail);
          dmin = std::min(dmin, dist[size_t(b)]);
        }
        double* w = grid.weights.data() + grid.node_index(ix, iy, iz) * nb;
        if (dmin < 1e-12) {
          // on an axis: split equally among exact hits
          int hits = 0;
          for (int b = 0; b < nb; ++b)
            if (dist[size_t(b)] < 1e-12) ++hits;
          for (int b = 0; b < nb; ++b) w[b] = dist[size_t(b)] < 1e-12 ? 1.0 / hits : 0.0;
          continue;
        }
        const double band = blend_factor * dmin;
        double sum = 0.0;
        for (int b = 0; b < nb; ++b) {
          const double v = dist[size_t(b)] <= band ? 1.0 / dist[size_t(b)] : 0.0;
          w[b] = v;
          sum += v;
        }
        for (int b = 0; b < nb; ++b) w[b] /= sum;
      }
  return grid;
}

// Spec-level accessor (trilinear + renormalization).
inline std::vector<double> skinning_weights(const Vec3d& x, const SkinningGrid& grid) {
  std::vector<double> w(size_t(grid.n_bones));
  grid.interpolate(x, w);
  return w;
}

}  // namespace arf
