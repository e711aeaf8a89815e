#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oefd/dataset.hpp"
#include "oefd/encoder.hpp"
#include "oefd/losses.hpp"
#include "oefd/types.hpp"

namespace oefd {

// Training objective: plain softmax baseline, angular margin alone, or the
// multi-task combination of angular margin and norm-age regression.
enum class LossMode { softmax, a_softmax, oe };

std::string loss_mode_name(LossMode mode);
LossMode loss_mode_from_name(const std::string& name);

struct TrainConfig {
  Index batch_size = 512;
  Index epochs = 21;
  Real learning_rate = 0.05;
  std::vector<Index> lr_drop_epochs;  // empty: proportional 9/21, 15/21, 18/21
  Real lr_drop_factor = 0.1;
  Real momentum = 0.9;
  std::uint64_t seed = 1;

  LossMode mode = LossMode::oe;
  AngularMarginConfig margin;
  MultiTaskConfig multi_task;
  bool anneal_decay_auto = true;  // derive decay from total steps
  bool freeze_age_head = false;
  bool age_backprop_to_encoder = true;

  void validate() const;
  std::vector<Index> effective_drop_epochs() const;
};

struct ModelParams {
  EncoderParams encoder;
  AngularClassifier classifier;
  AgeHead age_head;
};

struct ModelVelocity {
  std::vector<Matrix> encoder_weights;
  std::vector<Vector> encoder_biases;
  Matrix classifier;
  Real age_slope = 0.0;
  Real age_intercept = 0.0;

  static ModelVelocity zeros_like(const ModelParams& params);
};

struct ModelGrads {
  std::vector<Matrix> encoder_weights;
  std::vector<Vector> encoder_biases;
  Matrix classifier;
  AgeHeadGrad age_head;
};

struct StepOptions {
  bool renormalize_classifier = true;
  bool update_age_head = true;
};

// velocity = momentum * velocity + grad; param -= lr * velocity.
void sgd_update(Matrix& param, const Matrix& grad, Matrix& velocity, Real lr, Real momentum);
void sgd_update(Vector& param, const Vector& grad, Vector& velocity, Real lr, Real momentum);

void sgd_step(ModelParams& params, const ModelGrads& grads, ModelVelocity& velocity, Real lr,
              Real momentum, const StepOptions& opts = {});

struct EpochMetrics {
  Index epoch = 0;
  Real lr = 0.0;
  Real total_loss = 0.0;
  Real id_loss = 0.0;
  Real age_loss = 0.0;
  Real train_accuracy = 0.0;
};

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  EncoderSpec spec;
  ModelParams model;
  LossMode mode = LossMode::oe;
  AngularMarginConfig margin;  // anneal_weight as of the last step
  MultiTaskConfig multi_task;
  std::int64_t step = 0;
  std::uint64_t rng_seed = 0;
  std::uint64_t rng_stream = 0;
  std::uint64_t rng_counter = 0;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<EpochMetrics> metrics;
};

// Fraction of samples whose highest classifier logit matches their identity.
// For unit-norm rows this is the cosine argmax.
Real classification_accuracy(const Matrix& embeddings, const Matrix& classifier_weights,
                             const std::vector<int>& labels);

// Seeded mini-batch SGD over the combined objective with the step-drop
// schedule. Deterministic: identical (dataset, spec, config) reruns produce
// bit-identical checkpoints and metrics.
TrainResult train(const Dataset& dataset, const EncoderSpec& spec, const TrainConfig& cfg);

}  // namespace oefd
