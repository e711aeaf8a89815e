#pragma once

#include <cstdint>
#include <vector>

#include "oefd/dataset.hpp"
#include "oefd/errors.hpp"
#include "oefd/types.hpp"

namespace oefd {

struct SplitError : ConfigError {
  using ConfigError::ConfigError;
};

// Synthetic cross-age generator. Each identity is a unit prototype direction;
// age scales the prototype and adds a shared drift direction, so age ends up
// in both the norm and the angle of the raw inputs and a norm-only shortcut
// cannot solve identity.
struct SyntheticSpec {
  Index num_identities = 30;
  Index input_dim = 16;
  Index samples_per_identity = 24;
  Real age_min = 20.0;
  Real age_max = 70.0;
  Real age_effect = 1.0;
  Real noise_sigma = 0.05;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticSample {
  Vector input;
  int identity = 0;
  Real age = 0.0;
};

// input = (1 + age_effect * z) * prototype + age_effect * z * drift + noise,
// with z the age normalized to [0, 1]. Identity c draws from stream c + 1;
// the shared drift uses stream 0.
std::vector<SyntheticSample> generate(const SyntheticSpec& spec);

Dataset to_dataset(const std::vector<SyntheticSample>& samples, Index num_identities);

// Dataset restricted to the given sample indices. With remap_identities the
// surviving identities are renumbered contiguously from 0 in sorted order
// (for training on a split); otherwise original labels are kept (for
// gallery/probe files that must stay comparable).
Dataset subset_dataset(const std::vector<SyntheticSample>& samples,
                       const std::vector<Index>& indices, bool remap_identities);

// Young-gallery / old-probe identification split with train and test
// identities disjoint. Indices refer to positions in the sample list.
struct CrossAgeSplit {
  std::vector<Index> train_indices;
  std::vector<Index> gallery_indices;  // one youngest sample per test identity
  std::vector<Index> probe_indices;    // one oldest sample per test identity
  std::vector<int> test_identities;
  Real age_lo = 0.0;  // observed dataset age range
  Real age_hi = 0.0;
};

CrossAgeSplit make_cross_age_split(const std::vector<SyntheticSample>& samples,
                                   Real test_fraction, std::uint64_t seed);

struct Pair {
  Index a = 0;
  Index b = 0;
  int label = 0;  // 1 same identity, 0 different
};

// Positives are same-identity pairs taken largest age gap first; negatives
// are a seeded draw without replacement from the cross-identity pairs.
std::vector<Pair> make_pairs(const std::vector<SyntheticSample>& samples, Index num_positive,
                             Index num_negative, std::uint64_t seed);

}  // namespace oefd
