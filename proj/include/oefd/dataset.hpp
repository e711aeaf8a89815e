#pragma once

#include <vector>

#include "oefd/errors.hpp"
#include "oefd/types.hpp"

namespace oefd {

// In-memory dataset: one input row per sample plus identity and age labels.
struct Dataset {
  Matrix inputs;                     // N x input_dim
  std::vector<int> identity_labels;  // N
  Vector age_labels;                 // N
  Index num_identities = 0;

  Index size() const { return inputs.rows(); }

  void validate() const {
    const Index n = inputs.rows();
    if (static_cast<Index>(identity_labels.size()) != n || age_labels.size() != n) {
      throw ShapeError("dataset: inconsistent sizes, " + shape_str(inputs) + " inputs, " +
                       std::to_string(identity_labels.size()) + " identities, " +
                       std::to_string(age_labels.size()) + " ages");
    }
    for (Index i = 0; i < n; ++i) {
      if (identity_labels[i] < 0 || identity_labels[i] >= num_identities) {
        throw LabelError("dataset: identity " + std::to_string(identity_labels[i]) +
                         " at sample " + std::to_string(i) + " outside [0, " +
                         std::to_string(num_identities) + ")");
      }
    }
    if (!all_finite(inputs) || !all_finite(age_labels)) {
      throw NumericalError("dataset: non-finite entry");
    }
  }
};

}  // namespace oefd
