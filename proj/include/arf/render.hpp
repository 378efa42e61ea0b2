#pragma once

#include <optional>
#include <vector>

#include "arf/camera.hpp"
#include "arf/field.hpp"
#include "arf/occupancy.hpp"
#include "arf/parallel.hpp"
#include "arf/rng.hpp"

namespace arf {

// Slab intersection with an axis-aligned box, clipped to t >= 0.
inline std::optional<std::pair<double, double>> ray_box(const Vec3d& origin, const Vec3d& dir,
                                                        const Aabbd& box) {
  double t0 = 0.0;
  double t1 = std::numeric_limits<double>::max();
  for (int a = 0; a < 3; ++a) {
    const double o = origin[a], d = dir[a];
    if (std::abs(d) < 1e-300) {
      if (o < box.lo[a] || o > box.hi[a]) return std::nullopt;
      continue;
    }
    double ta = (box.lo[a] - o) / d;
    double tb = (box.hi[a] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

inline std::optional<std::pair<double, double>> ray_box(const Ray& ray, const Aabbd& box) {
  return ray_box(ray.origin, ray.direction, box);
}

// One ray's sample train. Parametric positions are strictly increasing;
// delta_i = t_{i+1} - t_i with the last delta running to the far bound.
template <typename Real>
struct RaySampleSet {
  std::vector<double> t;
  std::vector<double> delta;
  std::vector<uint8_t> skipped;  // empty-space samples: density pinned to 0, never queried
  std::vector<RadianceSample<Real>> radiance;

  int size() const { return int(t.size()); }
  void clear() {
    t.clear();
    delta.clear();
    skipped.clear();
    radiance.clear();
  }
  void resize(int n) {
    t.resize(size_t(n));
    delta.resize(size_t(n));
    skipped.assign(size_t(n), 0);
    radiance.assign(size_t(n), RadianceSample<Real>{});
  }
};

// Stratified (jittered-uniform) or midpoint positions over [t_near, t_far].
// With an occupancy grid, samples landing in empty cells are flagged and get
// zero density without a field query. `to_norm` maps a world position into
// the grid's normalized space.
template <typename Real, typename ToNorm>
void sample_points(const Ray& ray, int n, bool stratified, Pcg32* rng,
                   const OccupancyGrid* occupancy, ToNorm&& to_norm, RaySampleSet<Real>& out) {
  out.clear();
  if (!(ray.t_near < ray.t_far) || n <= 0) return;
  out.resize(n);
  const double step = (ray.t_far - ray.t_near) / n;
  for (int i = 0; i < n; ++i) {
    const double jitter = stratified && rng ? rng->next_double() : 0.5;
    out.t[size_t(i)] = ray.t_near + (i + jitter) * step;
  }
  for (int i = 0; i + 1 < n; ++i) out.delta[size_t(i)] = out.t[size_t(i) + 1] - out.t[size_t(i)];
  out.delta[size_t(n) - 1] = ray.t_far - out.t[size_t(n) - 1];
  if (occupancy) {
    for (int i = 0; i < n; ++i) {
      const Vec3d xn = to_norm(ray.at(out.t[size_t(i)]));
      out.skipped[size_t(i)] = occupancy->is_occupied(xn) ? 0 : 1;
    }
  }
}

template <typename Real>
struct CompositeResult {
  Vec3d color{0, 0, 0};
  double alpha = 0.0;
  int terminated_at = 0;  // samples actually accumulated (early termination cut)
};

// Volume compositing: C = sum_i alpha_i prod_{j<i} (1 - alpha_j) c_i with
// alpha_i = 1 - exp(-sigma_i * delta_i). Accumulation stops once opacity
// reaches 1 - epsilon; the tail never contributes color or gradient.
template <typename Real>
CompositeResult<Real> composite(const RaySampleSet<Real>& s, double epsilon_terminate,
                                std::vector<double>* weights_out = nullptr) {
  CompositeResult<Real> r;
  if (weights_out) weights_out->assign(size_t(s.size()), 0.0);
  double transmittance = 1.0;
  int i = 0;
  for (; i < s.size(); ++i) {
    if (epsilon_terminate > 0 && transmittance <= epsilon_terminate) break;
    const double sigma = s.skipped[size_t(i)] ? 0.0 : double(s.radiance[size_t(i)].density);
    if (sigma <= 0.0) continue;
    const double alpha = -std::expm1(-sigma * s.delta[size_t(i)]);
    const double w = alpha * transmittance;
    const auto& c = s.radiance[size_t(i)].color;
    r.color += Vec3d{double(c.x), double(c.y), double(c.z)} * w;
    r.alpha += w;
    if (weights_out) (*weights_out)[size_t(i)] = w;
    transmittance *= 1.0 - alpha;
  }
  r.terminated_at = i;
  return r;
}

// Exact reverse pass of composite: per-sample d(loss)/d(sigma_i, c_i) from
// upstream d(loss)/d(color, alpha). Suffix accumulators avoid dividing by
// (1 - alpha): C = pre + T_i [alpha_i c_i + (1-alpha_i) Chat_{i+1}] gives
// dC/dalpha_i = T_i (c_i - Chat_{i+1}).
template <typename Real>
void composite_backward(const RaySampleSet<Real>& s, const CompositeResult<Real>& fwd,
                        const Vec3d& d_color, double d_alpha, std::vector<double>& d_sigma,
                        std::vector<Vec3d>& d_c) {
  const int n = s.size();
  d_sigma.assign(size_t(n), 0.0);
  d_c.assign(size_t(n), Vec3d{0, 0, 0});
  const int m = fwd.terminated_at;
  Vec3d chat{0, 0, 0};
  double ahat = 0.0;
  // transmittance into each accumulated sample
  std::vector<double> trans(size_t(m) + 1, 1.0);
  for (int i = 0; i < m; ++i) {
    const double sigma = s.skipped[size_t(i)] ? 0.0 : double(s.radiance[size_t(i)].density);
    const double alpha = sigma <= 0.0 ? 0.0 : -std::expm1(-sigma * s.delta[size_t(i)]);
    trans[size_t(i) + 1] = trans[size_t(i)] * (1.0 - alpha);
  }
  for (int i = m - 1; i >= 0; --i) {
    if (s.skipped[size_t(i)]) continue;
    const double sigma = double(s.radiance[size_t(i)].density);
    const double alpha = sigma <= 0.0 ? 0.0 : -std::expm1(-sigma * s.delta[size_t(i)]);
    const auto& cs = s.radiance[size_t(i)].color;
    const Vec3d c{double(cs.x), double(cs.y), double(cs.z)};
    const double dC_dalpha = d_color.dot(c - chat);
    const double dA_dalpha = 1.0 - ahat;
    const double d_alpha_total = trans[size_t(i)] * (dC_dalpha + d_alpha * dA_dalpha);
    // d alpha / d sigma = delta * exp(-sigma delta) = delta * (1 - alpha)
    d_sigma[size_t(i)] = d_alpha_total * s.delta[size_t(i)] * (1.0 - alpha);
    d_c[size_t(i)] = d_color * (alpha * trans[size_t(i)]);
    chat = c * alpha + chat * (1.0 - alpha);
    ahat = alpha + ahat * (1.0 - alpha);
  }
}

struct RenderOptions {
  int samples_per_ray = 128;
  bool stratified = false;
  double epsilon_terminate = 1e-3;
  uint64_t seed = 0;
  uint64_t frame_id = 0;
};

struct RenderImages {
  int width = 0, height = 0;
  std::vector<float> rgb;    // row-major, 3 channels
  std::vector<float> alpha;  // 1 channel
};

// Full-frame render of a posed field. `field(x_world, sample_out) -> bool`
// returns whether matter was found; `to_norm` maps world points into the
// occupancy grid's normalized space. Pixels run in parallel; every pixel's
// RNG stream is keyed by (seed, frame, pixel) so tiling does not change
// the image.
template <typename Real, typename FieldFn, typename ToNorm>
RenderImages render_image(const Camera& camera, const Aabbd& normalized_box, FieldFn&& field,
                          ToNorm&& to_norm, const OccupancyGrid* occupancy,
                          const RenderOptions& opt) {
  RenderImages out;
  out.width = camera.width;
  out.height = camera.height;
  out.rgb.assign(size_t(camera.width) * camera.height * 3, 0.0f);
  out.alpha.assign(size_t(camera.width) * camera.height, 0.0f);

  parallel_chunks(int64_t(camera.height), [&](int, int64_t row_b, int64_t row_e) {
    RaySampleSet<Real> samples;
    for (int64_t py = row_b; py < row_e; ++py) {
      for (int px = 0; px < camera.width; ++px) {
        Ray ray = generate_ray(camera, px, int(py));
        // near/far from the normalized-space scene box
        const Vec3d on = to_norm(ray.origin);
        const Vec3d dn = to_norm(ray.at(1.0)) - on;
        const auto hit = ray_box(on, dn, normalized_box);
        const size_t pix = size_t(py) * camera.width + px;
        if (!hit) continue;
        ray.t_near = hit->first;
        ray.t_far = hit->second;
        Pcg32 rng = keyed_rng(opt.seed, opt.frame_id, pix);
        sample_points<Real>(ray, opt.samples_per_ray, opt.stratified, &rng, occupancy, to_norm,
                            samples);
        for (int i = 0; i < samples.size(); ++i) {
          if (samples.skipped[size_t(i)]) continue;
          if (!field(ray.at(samples.t[size_t(i)]), samples.radiance[size_t(i)]))
            samples.skipped[size_t(i)] = 1;
        }
        const CompositeResult<Real> res = composite(samples, opt.epsilon_terminate);
        out.rgb[pix * 3 + 0] = float(res.color.x);
        out.rgb[pix * 3 + 1] = float(res.color.y);
        out.rgb[pix * 3 + 2] = float(res.color.z);
        out.alpha[pix] = float(res.alpha);
      }
    }
  });
  return out;
}

}  // namespace arf
