#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "arf/math.hpp"
#include "arf/rng.hpp"

namespace arf {

struct HashGridConfig {
  int levels = 8;
  int features_per_level = 2;
  int table_size_log2 = 16;
  int base_resolution = 16;
  int max_resolution = 256;
  Aabbd bounding_box{{0, 0, 0}, {1, 1, 1}};

  void validate() const {
    if (levels < 1) throw std::invalid_argument("hash grid: levels must be >= 1");
    if (features_per_level < 1) throw std::invalid_argument("hash grid: features_per_level must be >= 1");
    if (table_size_log2 < 1 || table_size_log2 > 30)
      throw std::invalid_argument("hash grid: table_size_log2 out of range");
    if (base_resolution < 2) throw std::invalid_argument("hash grid: base_resolution must be >= 2");
    if (max_resolution < base_resolution)
      throw std::invalid_argument("hash grid: max_resolution must be >= base_resolution");
    if (!bounding_box.valid()) throw std::invalid_argument("hash grid: invalid bounding box");
  }

  int feature_dim() const { return levels * features_per_level; }
};

// Geometric schedule N_l = floor(N_min * b^l), b = exp((ln N_max - ln N_min) / (L-1)).
inline std::vector<int> level_resolutions(const HashGridConfig& cfg) {
  cfg.validate();
  std::vector<int> res(cfg.levels);
  if (cfg.levels == 1) {
    res[0] = cfg.base_resolution;
    return res;
  }
  const double growth =
      std::exp((std::log(double(cfg.max_resolution)) - std::log(double(cfg.base_resolution))) /
               double(cfg.levels - 1));
  for (int l = 0; l < cfg.levels; ++l) {
    // tiny bias keeps exact powers (e.g. b == 2) from flooring one short
    const double v = cfg.base_resolution * std::pow(growth, double(l));
    res[l] = std::min(cfg.max_resolution, int(std::floor(v + 1e-6)));
    if (l > 0) res[l] = std::max(res[l], res[l - 1]);
  }
  res.back() = cfg.max_resolution;
  return res;
}

// Multi-resolution feature tables over the canonical-space box. Forward
// trilinear encoding plus additive gradient accumulation into the tables.
template <typename Real>
struct HashGrid {
  HashGridConfig config;
  std::vector<int> resolutions;
  uint32_t table_rows = 0;
  std::vector<Real> params;  // level-major [L][rows][F]
  std::vector<Real> grad;    // accumulator, same shape

  HashGrid() = default;
  explicit HashGrid(const HashGridConfig& cfg, uint64_t seed = 0, double init_scale = 1e-4)
      : config(cfg), resolutions(level_resolutions(cfg)) {
    table_rows = uint32_t(1) << config.table_size_log2;
    params.resize(size_t(config.levels) * table_rows * config.features_per_level);
    grad.assign(params.size(), Real(0));
    Pcg32 rng = keyed_rng(seed, 0x6a1d, 17);
    for (auto& p : params) p = Real(rng.uniform(-init_scale, init_scale));
  }

  size_t param_count() const { return params.size(); }
  size_t level_offset(int level) const {
    return size_t(level) * table_rows * config.features_per_level;
  }

  void zero_grad() { std::fill(grad.begin(), grad.end(), Real(0)); }

  // Row index for an integer lattice point at `level`. Direct (injective)
  // indexing whenever the level's corner lattice fits the table; a level
  // whose cell lattice fits but whose corner lattice does not wraps the far
  // corners, which keeps the cell mapping injective. Larger levels use an
  // XOR spatial hash with per-axis multipliers (1, p2, p3).
  uint32_t hash_index(int level, const Vec3i& c) const {
    const uint64_t n = uint64_t(resolutions[size_t(level)]);
    const uint64_t corners = n + 1;
    if (corners * corners * corners <= table_rows) {
      return uint32_t(uint64_t(c.x) + corners * (uint64_t(c.y) + corners * uint64_t(c.z)));
    }
    if (n * n * n <= table_rows) {
      const uint64_t wx = uint64_t(c.x) % n, wy = uint64_t(c.y) % n, wz = uint64_t(c.z) % n;
      return uint32_t(wx + n * (wy + n * wz));
    }
    constexpr uint32_t kP2 = 2654435761u;
    constexpr uint32_t kP3 = 805459861u;
    const uint32_t h = uint32_t(c.x) ^ (uint32_t(c.y) * kP2) ^ (uint32_t(c.z) * kP3);
    return h & (table_rows - 1);
  }

  bool level_injective(int level) const {
    const uint64_t corners = uint64_t(resolutions[size_t(level)]) + 1;
    return corners * corners * corners <= table_rows;
  }

  struct CornerSet {
    uint32_t index[8];
    double weight[8];
  };

  // Cell corners and trilinear weights of x at `level`.
  CornerSet gather(int level, const Vec3d& x) const {
    const Vec3d u = normalize_point(x);
    const double n = double(resolutions[size_t(level)]);
    Vec3i cell;
    Vec3d f;
    for (int a = 0; a < 3; ++a) {
      const double p = u[a] * n;
      double c = std::floor(p);
      if (c > n - 1) c = n - 1;  // x on the far face interpolates toward corner n
      if (c < 0) c = 0;
      cell[a] = int(c);
      f[a] = p - c;
    }
    CornerSet out;
    for (int k = 0; k < 8; ++k) {
      const int dx = k & 1, dy = (k >> 1) & 1, dz = (k >> 2) & 1;
      out.index[k] = hash_index(level, {cell.x + dx, cell.y + dy, cell.z + dz});
      out.weight[k] = (dx ? f.x : 1.0 - f.x) * (dy ? f.y : 1.0 - f.y) * (dz ? f.z : 1.0 - f.z);
    }
    return out;
  }

  // Concatenated per-level trilinear interpolation; out.size() == L*F.
  void encode(const Vec3d& x, std::span<Real> out) const {
    const int F = config.features_per_level;
    for (int l = 0; l < config.levels; ++l) {
      const CornerSet cs = gather(l, x);
      const Real* table = params.data() + level_offset(l);
      Real* o = out.data() + size_t(l) * F;
      for (int f = 0; f < F; ++f) o[f] = Real(0);
      for (int k = 0; k < 8; ++k) {
        const Real w = Real(cs.weight[k]);
        const Real* row = table + size_t(cs.index[k]) * F;
        for (int f = 0; f < F; ++f) o[f] += w * row[f];
      }
    }
  }

  // Accumulates upstream * trilinear weight into `grad_target` (same layout
  // as params). Callers running in parallel pass per-thread buffers and merge
  // them in a fixed order.
  void encode_backward(const Vec3d& x, std::span<const Real> upstream,
                       std::span<Real> grad_target) const {
    const int F = config.features_per_level;
    for (int l = 0; l < config.levels; ++l) {
      const CornerSet cs = gather(l, x);
      Real* gtable = grad_target.data() + level_offset(l);
      const Real* up = upstream.data() + size_t(l) * F;
      for (int k = 0; k < 8; ++k) {
        const Real w = Real(cs.weight[k]);
        if (w == Real(0)) continue;
        Real* row = gtable + size_t(cs.index[k]) * F;
        for (int f = 0; f < F; ++f) row[f] += w * up[f];
      }
    }
  }

  void encode_backward(const Vec3d& x, std::span<const Real> upstream) {
    encode_backward(x, upstream, std::span<Real>(grad));
  }

 private:
  Vec3d normalize_point(const Vec3d& x) const {
    const Aabbd& b = config.bounding_box;
    if (!b.contains(x)) throw std::domain_error("hash grid: point outside bounding box");
    const Vec3d e = b.extent();
    return {(x.x - b.lo.x) / e.x, (x.y - b.lo.y) / e.y, (x.z - b.lo.z) / e.z};
  }
};

}  // namespace arf
