#pragma once

#include <vector>

#include "oefd/random.hpp"
#include "oefd/types.hpp"

namespace oefd {

enum class Activation { rectifier, none };

// Stand-in for a large backbone: a small feed-forward encoder mapping inputs
// to n-dimensional embeddings. widths = input dim, hidden dims..., embedding
// dim; one activation per affine layer.
struct EncoderSpec {
  std::vector<Index> widths;
  std::vector<Activation> activations;

  Index num_layers() const { return static_cast<Index>(widths.size()) - 1; }
  Index input_dim() const { return widths.front(); }
  Index embedding_dim() const { return widths.back(); }
  void validate() const;

  // Hidden layers rectified, final layer linear.
  static EncoderSpec mlp(std::vector<Index> widths);
};

struct EncoderParams {
  std::vector<Matrix> weights;  // per layer, out x in
  std::vector<Vector> biases;   // per layer, out

  Index parameter_count() const;
  void validate(const EncoderSpec& spec) const;
};

struct EncoderGrads {
  std::vector<Matrix> grad_weights;
  std::vector<Vector> grad_biases;
  Matrix grad_inputs;
};

// Layer inputs and pre-activations recorded by the forward pass; the
// embeddings are act(pre_activations.back()).
struct ForwardTrace {
  std::vector<Matrix> layer_inputs;
  std::vector<Matrix> pre_activations;
  Matrix embeddings;
};

// Seeded uniform init scaled by 1 / sqrt(fan_in); biases zero.
EncoderParams init_encoder(const EncoderSpec& spec, RandomSource& rng);

ForwardTrace forward_trace(const EncoderSpec& spec, const EncoderParams& params,
                           const Matrix& inputs);

Matrix forward(const EncoderSpec& spec, const EncoderParams& params, const Matrix& inputs);

// Exact reverse-mode gradients of the forward map.
EncoderGrads backward(const EncoderSpec& spec, const EncoderParams& params,
                      const ForwardTrace& trace, const Matrix& grad_embeddings);

}  // namespace oefd
