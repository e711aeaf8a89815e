#pragma once

#include <vector>

#include "oefd/margin.hpp"
#include "oefd/random.hpp"
#include "oefd/types.hpp"

namespace oefd {

// Per-class weight directions; rows live on the unit sphere. The angular
// losses read the angle between a normalized feature and a row, which is only
// well-defined if rows stay unit-norm, so renormalize() runs after
// construction and after every optimizer step.
struct AngularClassifier {
  Matrix weights;  // C x n

  static AngularClassifier random_on_sphere(Index num_classes, Index dim, RandomSource& rng);

  void renormalize();
  Index num_classes() const { return weights.rows(); }
  Index dim() const { return weights.cols(); }
};

// Linear map f(r) = slope * r + intercept from feature norm to age.
struct AgeHead {
  Real slope = 1.0;
  Real intercept = 0.0;
};

struct AgeHeadGrad {
  Real slope = 0.0;
  Real intercept = 0.0;
};

struct MultiTaskConfig {
  Real lambda = 0.01;

  void validate() const;
};

struct LabeledBatch {
  Matrix features;                  // M x n
  std::vector<int> identity_labels; // M, each in [0, C)
  Vector age_labels;                // M

  Index size() const { return features.rows(); }
  void validate_shapes() const;
  void validate(Index num_classes) const;
};

// Scalar loss plus analytic gradients. grad_weights is empty for the
// age-only loss (no classifier participates); grad_age_head is zero for the
// identity-only losses.
struct LossResult {
  Real value = 0.0;
  Matrix grad_features;  // M x n
  Matrix grad_weights;   // C x n
  AgeHeadGrad grad_age_head;
};

// Scaled angular-margin cross-entropy over normalized features and unit
// weight rows. The target logit is s * psi(theta_y); competing logits are
// s * cos(theta_j). With anneal weight a > 0 the target logit blends to
// s * (a cos + psi) / (1 + a), easing early optimization.
LossResult identity_loss(const LabeledBatch& batch, const AngularClassifier& classifier,
                         const AngularMarginConfig& cfg);

// Half mean squared error between f(feature norm) and the age label. The
// feature gradient is purely radial: directions receive zero gradient.
LossResult age_loss(const LabeledBatch& batch, const AgeHead& head);

// L = L_id + lambda * L_age, gradients summed element-wise.
LossResult combined_loss(const LabeledBatch& batch, const AngularClassifier& classifier,
                         const AgeHead& head, const AngularMarginConfig& margin_cfg,
                         const MultiTaskConfig& mt_cfg);

// Plain cross-entropy over raw logits W x, no normalization and no margin.
// Baseline mode for comparisons; not part of the angular geometry.
LossResult softmax_loss(const LabeledBatch& batch, const Matrix& weights);

}  // namespace oefd
