#include "oefd/encoder.hpp"

#include <cmath>
#include <string>

#include "oefd/errors.hpp"

namespace oefd {

void EncoderSpec::validate() const {
  if (widths.size() < 2) throw ConfigError("encoder: need at least one layer");
  for (Index w : widths) {
    if (w < 1) throw ConfigError("encoder: every width must be >= 1");
  }
  if (activations.size() != widths.size() - 1) {
    throw ConfigError("encoder: expected " + std::to_string(widths.size() - 1) +
                      " activations, got " + std::to_string(activations.size()));
  }
}

EncoderSpec EncoderSpec::mlp(std::vector<Index> widths) {
  EncoderSpec spec;
  spec.widths = std::move(widths);
  if (spec.widths.size() >= 2) {
    spec.activations.assign(spec.widths.size() - 2, Activation::rectifier);
    spec.activations.push_back(Activation::none);
  }
  spec.validate();
  return spec;
}

Index EncoderParams::parameter_count() const {
  Index n = 0;
  for (const Matrix& w : weights) n += w.size();
  for (const Vector& b : biases) n += b.size();
  return n;
}

void EncoderParams::validate(const EncoderSpec& spec) const {
  spec.validate();
  const auto layers = static_cast<std::size_t>(spec.num_layers());
  if (weights.size() != layers || biases.size() != layers) {
    throw ShapeError("encoder params: layer count mismatch with spec");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (weights[l].rows() != spec.widths[l + 1] || weights[l].cols() != spec.widths[l] ||
        biases[l].size() != spec.widths[l + 1]) {
      throw ShapeError("encoder params: layer " + std::to_string(l) + " has shape " +
                       shape_str(weights[l]) + ", spec wants " +
                       shape_str(spec.widths[l + 1], spec.widths[l]));
    }
    if (!all_finite(weights[l]) || !all_finite(biases[l])) {
      throw NumericalError("encoder params: non-finite entry in layer " + std::to_string(l));
    }
  }
}

EncoderParams init_encoder(const EncoderSpec& spec, RandomSource& rng) {
  spec.validate();
  EncoderParams params;
  for (Index l = 0; l < spec.num_layers(); ++l) {
    const Index fan_in = spec.widths[l];
    const Index fan_out = spec.widths[l + 1];
    const Real scale = 1.0 / std::sqrt(static_cast<Real>(fan_in));
    params.weights.push_back(rng.uniform_matrix(fan_out, fan_in, -scale, scale));
    // Slightly positive so rectified units start active; an all-dead row
    // would emit an exactly-zero embedding, which the angular loss rejects.
    params.biases.push_back(Vector::Constant(fan_out, 0.01));
  }
  return params;
}

ForwardTrace forward_trace(const EncoderSpec& spec, const EncoderParams& params,
                           const Matrix& inputs) {
  params.validate(spec);
  if (inputs.cols() != spec.input_dim()) {
    throw ShapeError("encoder forward: inputs " + shape_str(inputs) + " vs input dim " +
                     std::to_string(spec.input_dim()));
  }

  ForwardTrace trace;
  Matrix h = inputs;
  for (Index l = 0; l < spec.num_layers(); ++l) {
    trace.layer_inputs.push_back(h);
    Matrix pre = h * params.weights[l].transpose();
    pre.rowwise() += params.biases[l].transpose();
    trace.pre_activations.push_back(pre);
    h = spec.activations[l] == Activation::rectifier ? pre.cwiseMax(0.0) : pre;
  }
  trace.embeddings = std::move(h);
  return trace;
}

Matrix forward(const EncoderSpec& spec, const EncoderParams& params, const Matrix& inputs) {
  return forward_trace(spec, params, inputs).embeddings;
}

EncoderGrads backward(const EncoderSpec& spec, const EncoderParams& params,
                      const ForwardTrace& trace, const Matrix& grad_embeddings) {
  params.validate(spec);
  const Index layers = spec.num_layers();
  if (grad_embeddings.rows() != trace.embeddings.rows() ||
      grad_embeddings.cols() != trace.embeddings.cols()) {
    throw ShapeError("encoder backward: gradient " + shape_str(grad_embeddings) +
                     " vs embeddings " + shape_str(trace.embeddings));
  }

  EncoderGrads grads;
  grads.grad_weights.resize(layers);
  grads.grad_biases.resize(layers);

  Matrix g = grad_embeddings;
  for (Index l = layers - 1; l >= 0; --l) {
    if (spec.activations[l] == Activation::rectifier) {
      g = (trace.pre_activations[l].array() > 0.0).select(g, 0.0);
    }
    grads.grad_weights[l].noalias() = g.transpose() * trace.layer_inputs[l];
    grads.grad_biases[l] = g.colwise().sum().transpose();
    if (l > 0) g = g * params.weights[l];
  }
  grads.grad_inputs = g * params.weights[0];
  return grads;
}

}  // namespace oefd
