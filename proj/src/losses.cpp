#include "oefd/losses.hpp"

#include <cmath>
#include <string>

#include "oefd/errors.hpp"

namespace oefd {

namespace {

constexpr Real kNormFloor = 1e-12;

// logsumexp with max subtraction; fills probs with the softmax of z.
Real log_sum_exp(const Vector& z, Vector& probs) {
  const Real zmax = z.maxCoeff();
  probs = (z.array() - zmax).exp();
  const Real total = probs.sum();
  probs /= total;
  return std::log(total) + zmax;
}

}  // namespace

AngularClassifier AngularClassifier::random_on_sphere(Index num_classes, Index dim,
                                                      RandomSource& rng) {
  AngularClassifier c;
  c.weights = rng.gaussian_matrix(num_classes, dim);
  c.renormalize();
  return c;
}

void AngularClassifier::renormalize() {
  for (Index r = 0; r < weights.rows(); ++r) {
    const Real n = weights.row(r).norm();
    if (n > kNormFloor) weights.row(r) /= n;
  }
}

void MultiTaskConfig::validate() const {
  if (!(lambda >= 0.0)) throw ConfigError("multi_task: lambda must be >= 0");
}

void LabeledBatch::validate_shapes() const {
  const Index m = features.rows();
  if (static_cast<Index>(identity_labels.size()) != m || age_labels.size() != m) {
    throw ShapeError("batch: inconsistent sizes, features " + shape_str(features) + ", " +
                     std::to_string(identity_labels.size()) + " identity labels, " +
                     std::to_string(age_labels.size()) + " age labels");
  }
}

void LabeledBatch::validate(Index num_classes) const {
  validate_shapes();
  const Index m = features.rows();
  for (Index i = 0; i < m; ++i) {
    if (identity_labels[i] < 0 || identity_labels[i] >= num_classes) {
      throw LabelError("batch: identity label " + std::to_string(identity_labels[i]) +
                       " at sample " + std::to_string(i) + " outside [0, " +
                       std::to_string(num_classes) + ")");
    }
  }
}

LossResult identity_loss(const LabeledBatch& batch, const AngularClassifier& classifier,
                         const AngularMarginConfig& cfg) {
  cfg.validate();
  batch.validate(classifier.num_classes());
  if (batch.features.cols() != classifier.dim()) {
    throw ShapeError("identity_loss: feature dim " + shape_str(batch.features) +
                     " vs classifier " + shape_str(classifier.weights));
  }

  const Index m_samples = batch.size();
  const Index num_classes = classifier.num_classes();
  const Matrix& w = classifier.weights;
  const Real s = cfg.scale;
  const Real a = cfg.anneal_weight;
  const Real inv_m = 1.0 / static_cast<Real>(m_samples);
  const Real cos_bound = 1.0 - kCosineClamp;

  LossResult res;
  res.grad_features = Matrix::Zero(m_samples, batch.features.cols());
  res.grad_weights = Matrix::Zero(num_classes, classifier.dim());

  Vector probs(num_classes);
  for (Index i = 0; i < m_samples; ++i) {
    const int y = batch.identity_labels[i];
    const Real r = batch.features.row(i).norm();
    if (!(r > kNormFloor)) {
      throw NumericalError("identity_loss: zero-norm feature at sample " + std::to_string(i));
    }
    const Vector u = batch.features.row(i).transpose() / r;
    const Vector cosines = w * u;

    const Real cy = clamp_cosine(cosines[y]);
    const Real theta = std::acos(cy);
    const Real psi_y = psi(theta, cfg.margin);
    const Real target = a > 0.0 ? (a * cy + psi_y) / (1.0 + a) : psi_y;

    Vector logits = s * cosines;
    logits[y] = s * target;
    const Real lse = log_sum_exp(logits, probs);
    const Real loss_i = lse - logits[y];
    if (!std::isfinite(loss_i)) {
      throw NumericalError("identity_loss: non-finite loss at sample " + std::to_string(i));
    }
    res.value += inv_m * loss_i;

    // d loss / d logits = softmax - onehot; chain through the target's
    // psi reparameterization, then through u = x / ||x||.
    Vector dcos = probs;
    dcos[y] -= 1.0;
    dcos *= s;
    // Outside the clamp the target logit is locally constant in cos(theta_y).
    if (std::abs(cosines[y]) < cos_bound) {
      const Real dtarget = a > 0.0 ? (a + psi_cos_slope(cy, cfg.margin)) / (1.0 + a)
                                   : psi_cos_slope(cy, cfg.margin);
      dcos[y] *= dtarget;
    } else {
      dcos[y] = 0.0;
    }

    const Vector grad_u = w.transpose() * dcos;
    res.grad_features.row(i) = inv_m / r * (grad_u - u * u.dot(grad_u)).transpose();
    res.grad_weights.noalias() += inv_m * dcos * u.transpose();
  }
  return res;
}

LossResult age_loss(const LabeledBatch& batch, const AgeHead& head) {
  batch.validate_shapes();
  if (batch.size() < 1) throw ShapeError("age_loss: empty batch");
  if (!std::isfinite(head.slope) || !std::isfinite(head.intercept)) {
    throw NumericalError("age_loss: non-finite age head");
  }

  const Index m_samples = batch.size();
  const Real inv_m = 1.0 / static_cast<Real>(m_samples);

  LossResult res;
  res.grad_features = Matrix::Zero(m_samples, batch.features.cols());

  for (Index i = 0; i < m_samples; ++i) {
    const Real r = batch.features.row(i).norm();
    const Real err = head.slope * r + head.intercept - batch.age_labels[i];
    res.value += 0.5 * inv_m * err * err;
    res.grad_age_head.slope += inv_m * err * r;
    res.grad_age_head.intercept += inv_m * err;
    if (r > kNormFloor) {
      res.grad_features.row(i) = (inv_m * head.slope * err / r) * batch.features.row(i);
    }
  }
  return res;
}

LossResult combined_loss(const LabeledBatch& batch, const AngularClassifier& classifier,
                         const AgeHead& head, const AngularMarginConfig& margin_cfg,
                         const MultiTaskConfig& mt_cfg) {
  mt_cfg.validate();
  LossResult id = identity_loss(batch, classifier, margin_cfg);
  const LossResult age = age_loss(batch, head);
  const Real lambda = mt_cfg.lambda;

  id.value += lambda * age.value;
  id.grad_features += lambda * age.grad_features;
  id.grad_age_head.slope = lambda * age.grad_age_head.slope;
  id.grad_age_head.intercept = lambda * age.grad_age_head.intercept;
  return id;
}

LossResult softmax_loss(const LabeledBatch& batch, const Matrix& weights) {
  batch.validate(weights.rows());
  if (batch.features.cols() != weights.cols()) {
    throw ShapeError("softmax_loss: feature dim " + shape_str(batch.features) + " vs classifier " +
                     shape_str(weights));
  }

  const Index m_samples = batch.size();
  const Index num_classes = weights.rows();
  const Real inv_m = 1.0 / static_cast<Real>(m_samples);

  LossResult res;
  res.grad_features = Matrix::Zero(m_samples, batch.features.cols());
  res.grad_weights = Matrix::Zero(num_classes, weights.cols());

  Vector probs(num_classes);
  for (Index i = 0; i < m_samples; ++i) {
    const int y = batch.identity_labels[i];
    const Vector logits = weights * batch.features.row(i).transpose();
    const Real lse = log_sum_exp(logits, probs);
    const Real loss_i = lse - logits[y];
    if (!std::isfinite(loss_i)) {
      throw NumericalError("softmax_loss: non-finite loss at sample " + std::to_string(i));
    }
    res.value += inv_m * loss_i;

    Vector g = probs;
    g[y] -= 1.0;
    res.grad_features.row(i) = inv_m * (weights.transpose() * g).transpose();
    res.grad_weights.noalias() += inv_m * g * batch.features.row(i);
  }
  return res;
}

}  // namespace oefd
