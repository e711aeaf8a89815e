#include "oefd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oefd/errors.hpp"

namespace oefd {

std::string loss_mode_name(LossMode mode) {
  switch (mode) {
    case LossMode::softmax: return "softmax";
    case LossMode::a_softmax: return "a_softmax";
    case LossMode::oe: return "oe";
  }
  throw ConfigError("unknown loss mode");
}

LossMode loss_mode_from_name(const std::string& name) {
  if (name == "softmax") return LossMode::softmax;
  if (name == "a_softmax") return LossMode::a_softmax;
  if (name == "oe") return LossMode::oe;
  throw ConfigError("mode: expected softmax, a_softmax or oe, got '" + name + "'");
}

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (!(lr_drop_factor > 0.0 && lr_drop_factor < 1.0)) {
    throw ConfigError("train: lr_drop_factor must be in (0, 1)");
  }
  if (momentum < 0.0) throw ConfigError("train: momentum must be >= 0");
  for (std::size_t i = 0; i < lr_drop_epochs.size(); ++i) {
    if (lr_drop_epochs[i] < 0 || lr_drop_epochs[i] >= epochs) {
      throw ConfigError("train: lr_drop_epochs must lie in [0, epochs)");
    }
    if (i > 0 && lr_drop_epochs[i] <= lr_drop_epochs[i - 1]) {
      throw ConfigError("train: lr_drop_epochs must be strictly increasing");
    }
  }
  margin.validate();
  multi_task.validate();
}

std::vector<Index> TrainConfig::effective_drop_epochs() const {
  if (!lr_drop_epochs.empty()) return lr_drop_epochs;
  // Mirrors the 21-epoch reference schedule (drops at epochs 9, 15, 18)
  // proportionally.
  std::vector<Index> drops;
  for (const Real frac : {9.0 / 21.0, 15.0 / 21.0, 18.0 / 21.0}) {
    const Index e = static_cast<Index>(std::floor(frac * static_cast<Real>(epochs)));
    if (e > 0 && e < epochs && (drops.empty() || e > drops.back())) drops.push_back(e);
  }
  return drops;
}

ModelVelocity ModelVelocity::zeros_like(const ModelParams& params) {
  ModelVelocity v;
  for (const Matrix& w : params.encoder.weights) v.encoder_weights.push_back(Matrix::Zero(w.rows(), w.cols()));
  for (const Vector& b : params.encoder.biases) v.encoder_biases.push_back(Vector::Zero(b.size()));
  v.classifier = Matrix::Zero(params.classifier.weights.rows(), params.classifier.weights.cols());
  return v;
}

namespace {

template <typename T>
void sgd_update_impl(T& param, const T& grad, T& velocity, Real lr, Real momentum) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
    throw ShapeError("sgd_update: param " + shape_str(param) + " vs grad " + shape_str(grad));
  }
  velocity = momentum * velocity + grad;
  param -= lr * velocity;
}

}  // namespace

void sgd_update(Matrix& param, const Matrix& grad, Matrix& velocity, Real lr, Real momentum) {
  sgd_update_impl(param, grad, velocity, lr, momentum);
}

void sgd_update(Vector& param, const Vector& grad, Vector& velocity, Real lr, Real momentum) {
  sgd_update_impl(param, grad, velocity, lr, momentum);
}

void sgd_step(ModelParams& params, const ModelGrads& grads, ModelVelocity& velocity, Real lr,
              Real momentum, const StepOptions& opts) {
  for (std::size_t l = 0; l < params.encoder.weights.size(); ++l) {
    sgd_update(params.encoder.weights[l], grads.encoder_weights[l], velocity.encoder_weights[l],
               lr, momentum);
    sgd_update(params.encoder.biases[l], grads.encoder_biases[l], velocity.encoder_biases[l], lr,
               momentum);
  }
  sgd_update(params.classifier.weights, grads.classifier, velocity.classifier, lr, momentum);
  if (opts.renormalize_classifier) params.classifier.renormalize();
  if (opts.update_age_head) {
    velocity.age_slope = momentum * velocity.age_slope + grads.age_head.slope;
    velocity.age_intercept = momentum * velocity.age_intercept + grads.age_head.intercept;
    params.age_head.slope -= lr * velocity.age_slope;
    params.age_head.intercept -= lr * velocity.age_intercept;
  }
}

Real classification_accuracy(const Matrix& embeddings, const Matrix& classifier_weights,
                             const std::vector<int>& labels) {
  if (embeddings.rows() == 0) return 0.0;
  Index correct = 0;
  for (Index i = 0; i < embeddings.rows(); ++i) {
    Index best = 0;
    (classifier_weights * embeddings.row(i).transpose()).maxCoeff(&best);
    if (static_cast<int>(best) == labels[i]) ++correct;
  }
  return static_cast<Real>(correct) / static_cast<Real>(embeddings.rows());
}

namespace {

struct BatchLoss {
  Real total = 0.0;
  Real id = 0.0;
  Real age = 0.0;
  Matrix grad_embeddings;
  Matrix grad_classifier;
  AgeHeadGrad grad_age_head;
};

BatchLoss evaluate_batch(const LabeledBatch& batch, const ModelParams& model,
                         const TrainConfig& cfg, const AngularMarginConfig& margin_now) {
  BatchLoss out;
  if (cfg.mode == LossMode::softmax) {
    const LossResult sm = softmax_loss(batch, model.classifier.weights);
    const LossResult age = age_loss(batch, model.age_head);  // diagnostic only
    out.total = sm.value;
    out.id = sm.value;
    out.age = age.value;
    out.grad_embeddings = sm.grad_features;
    out.grad_classifier = sm.grad_weights;
    return out;
  }

  const Real lambda = cfg.mode == LossMode::oe ? cfg.multi_task.lambda : 0.0;
  const LossResult id = identity_loss(batch, model.classifier, margin_now);
  const LossResult age = age_loss(batch, model.age_head);
  out.id = id.value;
  out.age = age.value;
  out.total = id.value + lambda * age.value;
  out.grad_embeddings = id.grad_features;
  if (cfg.age_backprop_to_encoder) out.grad_embeddings += lambda * age.grad_features;
  out.grad_classifier = id.grad_weights;
  out.grad_age_head.slope = lambda * age.grad_age_head.slope;
  out.grad_age_head.intercept = lambda * age.grad_age_head.intercept;
  return out;
}

}  // namespace

TrainResult train(const Dataset& dataset, const EncoderSpec& spec, const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  dataset.validate();
  if (dataset.size() < 1) throw ConfigError("train: dataset is empty");
  if (dataset.inputs.cols() != spec.input_dim()) {
    throw ShapeError("train: dataset inputs " + shape_str(dataset.inputs) + " vs encoder input " +
                     std::to_string(spec.input_dim()));
  }

  const Index n_samples = dataset.size();
  const Index num_classes = dataset.num_identities;
  const Index batches_per_epoch = (n_samples + cfg.batch_size - 1) / cfg.batch_size;
  const std::int64_t total_steps = static_cast<std::int64_t>(batches_per_epoch) * cfg.epochs;

  RandomSource root(cfg.seed);
  RandomSource encoder_rng = root.split(0);
  RandomSource classifier_rng = root.split(1);
  RandomSource shuffle_rng = root.split(2);

  ModelParams model;
  model.encoder = init_encoder(spec, encoder_rng);
  model.classifier =
      AngularClassifier::random_on_sphere(num_classes, spec.embedding_dim(), classifier_rng);
  model.age_head = AgeHead{};

  AngularMarginConfig margin_now = cfg.margin;
  if (cfg.anneal_decay_auto) margin_now.anneal_decay = auto_anneal_decay(total_steps);

  ModelVelocity velocity = ModelVelocity::zeros_like(model);
  StepOptions step_opts;
  step_opts.renormalize_classifier = cfg.mode != LossMode::softmax;
  step_opts.update_age_head = cfg.mode != LossMode::softmax && !cfg.freeze_age_head;

  TrainResult result;
  std::vector<Index> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), Index{0});
  const std::vector<Index> drops = cfg.effective_drop_epochs();

  Real lr = cfg.learning_rate;
  std::int64_t step = 0;
  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (std::find(drops.begin(), drops.end(), epoch) != drops.end()) lr *= cfg.lr_drop_factor;
    shuffle_rng.shuffle(order);

    Real sum_total = 0.0, sum_id = 0.0, sum_age = 0.0, sum_correct = 0.0;
    for (Index start = 0; start < n_samples; start += cfg.batch_size) {
      const Index count = std::min(cfg.batch_size, n_samples - start);
      LabeledBatch batch;
      batch.features.resize(count, spec.input_dim());
      batch.identity_labels.resize(static_cast<std::size_t>(count));
      batch.age_labels.resize(count);
      for (Index b = 0; b < count; ++b) {
        const Index src = order[static_cast<std::size_t>(start + b)];
        batch.features.row(b) = dataset.inputs.row(src);
        batch.identity_labels[static_cast<std::size_t>(b)] =
            dataset.identity_labels[static_cast<std::size_t>(src)];
        batch.age_labels[b] = dataset.age_labels[src];
      }

      ForwardTrace trace;
      LabeledBatch embedded = batch;
      BatchLoss loss;
      try {
        trace = forward_trace(spec, model.encoder, batch.features);
        embedded.features = trace.embeddings;
        loss = evaluate_batch(embedded, model, cfg, margin_now);
      } catch (const NumericalError& e) {
        throw NumericalError("train: numerical failure at step " + std::to_string(step) + ": " +
                             e.what());
      }
      if (!std::isfinite(loss.total)) {
        throw NumericalError("train: non-finite loss at step " + std::to_string(step) +
                             " (total=" + std::to_string(loss.total) +
                             ", id=" + std::to_string(loss.id) +
                             ", age=" + std::to_string(loss.age) + ")");
      }

      const Real batch_weight = static_cast<Real>(count);
      sum_total += loss.total * batch_weight;
      sum_id += loss.id * batch_weight;
      sum_age += loss.age * batch_weight;
      sum_correct += classification_accuracy(trace.embeddings, model.classifier.weights,
                                             embedded.identity_labels) *
                     batch_weight;

      const EncoderGrads enc_grads = backward(spec, model.encoder, trace, loss.grad_embeddings);
      ModelGrads grads;
      grads.encoder_weights = enc_grads.grad_weights;
      grads.encoder_biases = enc_grads.grad_biases;
      grads.classifier = loss.grad_classifier;
      grads.age_head = loss.grad_age_head;
      sgd_step(model, grads, velocity, lr, cfg.momentum, step_opts);

      margin_now.anneal_weight *= margin_now.anneal_decay;
      ++step;
    }

    EpochMetrics em;
    em.epoch = epoch;
    em.lr = lr;
    em.total_loss = sum_total / static_cast<Real>(n_samples);
    em.id_loss = sum_id / static_cast<Real>(n_samples);
    em.age_loss = sum_age / static_cast<Real>(n_samples);
    em.train_accuracy = sum_correct / static_cast<Real>(n_samples);
    result.metrics.push_back(em);
  }

  Checkpoint& ckpt = result.checkpoint;
  ckpt.spec = spec;
  ckpt.model = std::move(model);
  ckpt.mode = cfg.mode;
  ckpt.margin = margin_now;
  ckpt.multi_task = cfg.multi_task;
  ckpt.step = step;
  ckpt.rng_seed = shuffle_rng.seed();
  ckpt.rng_stream = shuffle_rng.stream();
  ckpt.rng_counter = shuffle_rng.counter();
  return result;
}

}  // namespace oefd
