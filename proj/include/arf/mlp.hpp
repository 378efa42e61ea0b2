#pragma once

#include <span>
#include <vector>

#include "arf/math.hpp"
#include "arf/rng.hpp"

namespace arf {

struct MlpConfig {
  int input_dim = 16;
  int hidden_dim = 64;
  int hidden_layers = 2;
  int output_dim = 4;  // density logit + 3 color logits

  void validate() const {
    if (input_dim < 1 || hidden_dim < 1 || output_dim < 1)
      throw std::invalid_argument("mlp: dimensions must be >= 1");
    if (hidden_layers < 1 || hidden_layers > 8)
      throw std::invalid_argument("mlp: hidden_layers out of range");
  }
};

// Fully connected ReLU network with manual forward/backward. Parameters live
// in one flat vector (row-major W then b per layer) so the optimizer and the
// checkpoint writer see a single span.
template <typename Real>
struct DecoderMlp {
  MlpConfig config;
  std::vector<Real> params;
  std::vector<Real> grad;
  std::vector<int> layer_in, layer_out;  // per layer
  std::vector<size_t> w_off, b_off;

  DecoderMlp() = default;
  explicit DecoderMlp(const MlpConfig& cfg, uint64_t seed = 0) : config(cfg) {
    cfg.validate();
    int in = cfg.input_dim;
    for (int l = 0; l < cfg.hidden_layers + 1; ++l) {
      const int out = (l == cfg.hidden_layers) ? cfg.output_dim : cfg.hidden_dim;
      layer_in.push_back(in);
      layer_out.push_back(out);
      w_off.push_back(params.size() + 0);
      b_off.push_back(params.size() + size_t(in) * out);
      params.resize(params.size() + size_t(in) * out + out);
      in = out;
    }
    grad.assign(params.size(), Real(0));
    Pcg32 rng = keyed_rng(seed, 0x3317, 29);
    for (size_t l = 0; l < layer_in.size(); ++l) {
      const double s = std::sqrt(6.0 / double(layer_in[l]));
      Real* w = params.data() + w_off[l];
      for (size_t i = 0; i < size_t(layer_in[l]) * layer_out[l]; ++i)
        w[i] = Real(rng.uniform(-s, s));
      Real* b = params.data() + b_off[l];
      for (int i = 0; i < layer_out[l]; ++i) b[i] = Real(0);
    }
  }

  int num_layers() const { return int(layer_in.size()); }
  size_t param_count() const { return params.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), Real(0)); }

  // Scratch sized for the widest layer; reused across calls by one thread.
  struct Scratch {
    std::vector<Real> act;   // activations: input + post-ReLU per hidden layer
    std::vector<Real> tmp;   // one layer's pre-activation
    std::vector<Real> dcur;  // backward: gradient w.r.t. current activation
    std::vector<Real> dprev;
  };

  Scratch make_scratch() const {
    Scratch s;
    size_t total = size_t(config.input_dim);
    int width = config.input_dim;
    for (int l = 0; l < num_layers(); ++l) {
      total += size_t(layer_out[l]);
      width = std::max(width, layer_out[l]);
    }
    s.act.resize(total);
    s.tmp.resize(size_t(width));
    s.dcur.resize(size_t(width));
    s.dprev.resize(size_t(width));
    return s;
  }

  // Forward pass; records the input and every layer's output (post-ReLU,
  // final layer raw logits) in the scratch and writes the logits to `out`.
  void forward(std::span<const Real> input, std::span<Real> out, Scratch& s) const {
    Real* act = s.act.data();
    for (int i = 0; i < config.input_dim; ++i) act[i] = input[i];
    const Real* cur = act;
    size_t act_pos = size_t(config.input_dim);
    for (int l = 0; l < num_layers(); ++l) {
      const int in = layer_in[size_t(l)], on = layer_out[size_t(l)];
      const Real* w = params.data() + w_off[size_t(l)];
      const Real* b = params.data() + b_off[size_t(l)];
      Real* next = act + act_pos;
      const bool hidden = l + 1 < num_layers();
      for (int o = 0; o < on; ++o) {
        Real acc = b[o];
        const Real* wrow = w + size_t(o) * in;
        for (int i = 0; i < in; ++i) acc += wrow[i] * cur[i];
        next[o] = (hidden && acc < Real(0)) ? Real(0) : acc;
      }
      cur = next;
      act_pos += size_t(on);
    }
    for (int i = 0; i < config.output_dim; ++i) out[i] = cur[i];
  }

  // Backward through the activations recorded by the matching forward call.
  // Accumulates parameter gradients into `grad_target` (layout == params) and
  // writes the gradient w.r.t. the input into `d_input`.
  void backward(std::span<const Real> upstream, const Scratch& s, std::span<Real> grad_target,
                std::span<Real> d_input, Scratch& ws) const {
    // off[l] = start of layer l's input activations inside s.act
    std::vector<size_t> off(size_t(num_layers()) + 1);
    off[0] = 0;
    for (int l = 0; l < num_layers(); ++l)
      off[size_t(l) + 1] = off[size_t(l)] + size_t(l == 0 ? config.input_dim : layer_out[size_t(l) - 1]);
    Real* dcur = ws.dcur.data();
    Real* dprev = ws.dprev.data();
    for (int i = 0; i < config.output_dim; ++i) dcur[i] = upstream[i];
    for (int l = num_layers() - 1; l >= 0; --l) {
      const int in = layer_in[size_t(l)], on = layer_out[size_t(l)];
      const Real* input_act = s.act.data() + off[size_t(l)];
      // ReLU mask on hidden outputs: zero activation means the unit was clamped.
      if (l + 1 < num_layers()) {
        const Real* post = s.act.data() + off[size_t(l) + 1];
        for (int o = 0; o < on; ++o)
          if (post[o] == Real(0)) dcur[o] = Real(0);
      }
      Real* gw = grad_target.data() + w_off[size_t(l)];
      Real* gb = grad_target.data() + b_off[size_t(l)];
      for (int i = 0; i < in; ++i) dprev[i] = Real(0);
      const Real* w = params.data() + w_off[size_t(l)];
      for (int o = 0; o < on; ++o) {
        const Real u = dcur[o];
        gb[o] += u;
        Real* gwrow = gw + size_t(o) * in;
        const Real* wrow = w + size_t(o) * in;
        if (u != Real(0)) {
          for (int i = 0; i < in; ++i) {
            gwrow[i] += u * input_act[i];
            dprev[i] += u * wrow[i];
          }
        }
      }
      std::swap(dcur, dprev);
    }
    for (int i = 0; i < config.input_dim; ++i) d_input[i] = dcur[i];
  }
};

}  // namespace arf
