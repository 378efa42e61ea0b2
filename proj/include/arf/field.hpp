#pragma once

#include <atomic>
#include <span>

#include "arf/hash_grid.hpp"
#include "arf/mlp.hpp"

namespace arf {

template <typename Real>
struct RadianceSample {
  Real density = 0;            // >= 0, per unit length
  Vec3<Real> color{0, 0, 0};   // in [0,1]^3
};

// Gradient buffers matching a field's parameter layout. Threads accumulate
// into private copies which are merged in thread order.
template <typename Real>
struct FieldGrads {
  std::vector<Real> grid;
  std::vector<Real> mlp;

  void resize_like(size_t grid_n, size_t mlp_n) {
    grid.assign(grid_n, Real(0));
    mlp.assign(mlp_n, Real(0));
  }
  void zero() {
    std::fill(grid.begin(), grid.end(), Real(0));
    std::fill(mlp.begin(), mlp.end(), Real(0));
  }
  void add(const FieldGrads& o) {
    for (size_t i = 0; i < grid.size(); ++i) grid[i] += o.grid[i];
    for (size_t i = 0; i < mlp.size(); ++i) mlp[i] += o.mlp[i];
  }
};

// Canonical radiance field: hash-grid features decoded by a shallow MLP into
// (density, color). Density through softplus, color through the logistic, so
// the ranges hold for any parameter values.
template <typename Real>
struct CanonicalField {
  HashGrid<Real> grid;
  DecoderMlp<Real> mlp;

  CanonicalField() = default;
  CanonicalField(const HashGridConfig& gcfg, MlpConfig mcfg, uint64_t seed) {
    mcfg.input_dim = gcfg.feature_dim();
    grid = HashGrid<Real>(gcfg, seed);
    mlp = DecoderMlp<Real>(mcfg, seed + 1);
  }

  struct Scratch {
    std::vector<Real> features;
    std::vector<Real> logits;
    std::vector<Real> d_logits;
    std::vector<Real> d_features;
    typename DecoderMlp<Real>::Scratch mlp_fwd;
    typename DecoderMlp<Real>::Scratch mlp_bwd;
  };

  Scratch make_scratch() const {
    Scratch s;
    s.features.resize(size_t(grid.config.feature_dim()));
    s.logits.resize(size_t(mlp.config.output_dim));
    s.d_logits.resize(size_t(mlp.config.output_dim));
    s.d_features.resize(size_t(grid.config.feature_dim()));
    s.mlp_fwd = mlp.make_scratch();
    s.mlp_bwd = mlp.make_scratch();
    return s;
  }

  const Aabbd& bounding_box() const { return grid.config.bounding_box; }

  RadianceSample<Real> query(const Vec3d& x, Scratch& s) const {
    grid.encode(x, std::span<Real>(s.features));
    mlp.forward(s.features, std::span<Real>(s.logits), s.mlp_fwd);
    RadianceSample<Real> out;
    out.density = softplus(s.logits[0]);
    out.color = {logistic(s.logits[1]), logistic(s.logits[2]), logistic(s.logits[3])};
    return out;
  }

  RadianceSample<Real> query(const Vec3d& x) const {
    Scratch s = make_scratch();
    return query(x, s);
  }

  // Re-runs the forward pass at x to rebuild activations, then accumulates
  // d(loss)/d(params) for upstream gradients w.r.t. (density, color).
  void query_backward(const Vec3d& x, Real d_density, const Vec3<Real>& d_color,
                      FieldGrads<Real>& grads, Scratch& s) const {
    grid.encode(x, std::span<Real>(s.features));
    mlp.forward(s.features, std::span<Real>(s.logits), s.mlp_fwd);
    s.d_logits[0] = d_density * softplus_grad(s.logits[0]);
    for (int c = 0; c < 3; ++c) {
      const Real v = logistic(s.logits[1 + c]);
      s.d_logits[1 + c] = d_color[c] * v * (Real(1) - v);
    }
    mlp.backward(s.d_logits, s.mlp_fwd, std::span<Real>(grads.mlp),
                 std::span<Real>(s.d_features), s.mlp_bwd);
    grid.encode_backward(x, s.d_features, std::span<Real>(grads.grid));
  }

  FieldGrads<Real> make_grads() const {
    FieldGrads<Real> g;
    g.resize_like(grid.param_count(), mlp.param_count());
    return g;
  }
};

}  // namespace arf
