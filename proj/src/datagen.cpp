#include "oefd/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "oefd/random.hpp"

namespace oefd {

void SyntheticSpec::validate() const {
  if (num_identities < 2) throw ConfigError("datagen: num_identities must be >= 2");
  if (input_dim < 2) throw ConfigError("datagen: input_dim must be >= 2");
  if (samples_per_identity < 1) throw ConfigError("datagen: samples_per_identity must be >= 1");
  if (!(age_min < age_max)) throw ConfigError("datagen: invalid age_range, min must be < max");
  if (age_effect < 0.0) throw ConfigError("datagen: age_effect must be >= 0");
  if (noise_sigma < 0.0) throw ConfigError("datagen: noise_sigma must be >= 0");
}

std::vector<SyntheticSample> generate(const SyntheticSpec& spec) {
  spec.validate();
  const RandomSource root(spec.seed);
  RandomSource drift_rng = root.split(0);
  const Vector drift = drift_rng.unit_vector(spec.input_dim);
  const Real range = spec.age_max - spec.age_min;

  std::vector<SyntheticSample> samples;
  samples.reserve(static_cast<std::size_t>(spec.num_identities * spec.samples_per_identity));
  for (Index c = 0; c < spec.num_identities; ++c) {
    RandomSource rng = root.split(static_cast<std::uint64_t>(c) + 1);
    const Vector prototype = rng.unit_vector(spec.input_dim);
    for (Index s = 0; s < spec.samples_per_identity; ++s) {
      const Real age = rng.next_uniform(spec.age_min, spec.age_max);
      const Vector noise = rng.gaussian_vector(spec.input_dim);
      const Real z = (age - spec.age_min) / range;
      SyntheticSample sample;
      sample.input = (1.0 + spec.age_effect * z) * prototype + (spec.age_effect * z) * drift +
                     spec.noise_sigma * noise;
      sample.identity = static_cast<int>(c);
      sample.age = age;
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

Dataset to_dataset(const std::vector<SyntheticSample>& samples, Index num_identities) {
  Dataset ds;
  ds.num_identities = num_identities;
  if (samples.empty()) return ds;
  ds.inputs.resize(static_cast<Index>(samples.size()), samples.front().input.size());
  ds.age_labels.resize(static_cast<Index>(samples.size()));
  ds.identity_labels.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ds.inputs.row(static_cast<Index>(i)) = samples[i].input.transpose();
    ds.identity_labels.push_back(samples[i].identity);
    ds.age_labels[static_cast<Index>(i)] = samples[i].age;
  }
  ds.validate();
  return ds;
}

Dataset subset_dataset(const std::vector<SyntheticSample>& samples,
                       const std::vector<Index>& indices, bool remap_identities) {
  std::vector<SyntheticSample> subset;
  subset.reserve(indices.size());
  for (const Index i : indices) {
    if (i < 0 || i >= static_cast<Index>(samples.size())) {
      throw ConfigError("subset: sample index " + std::to_string(i) + " out of range");
    }
    subset.push_back(samples[static_cast<std::size_t>(i)]);
  }

  int num_identities = 0;
  if (remap_identities) {
    std::map<int, int> remap;
    for (const SyntheticSample& s : subset) remap.emplace(s.identity, 0);
    for (auto& [original, renumbered] : remap) renumbered = num_identities++;
    for (SyntheticSample& s : subset) s.identity = remap.at(s.identity);
  } else {
    for (const SyntheticSample& s : subset) num_identities = std::max(num_identities, s.identity + 1);
  }
  return to_dataset(subset, num_identities);
}

CrossAgeSplit make_cross_age_split(const std::vector<SyntheticSample>& samples,
                                   Real test_fraction, std::uint64_t seed) {
  if (samples.empty()) throw ConfigError("split: no samples");
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
    throw ConfigError("split: test_fraction must be in [0, 1]");
  }

  int max_identity = 0;
  CrossAgeSplit split;
  split.age_lo = samples.front().age;
  split.age_hi = samples.front().age;
  for (const SyntheticSample& s : samples) {
    max_identity = std::max(max_identity, s.identity);
    split.age_lo = std::min(split.age_lo, s.age);
    split.age_hi = std::max(split.age_hi, s.age);
  }
  const int num_identities = max_identity + 1;
  const int num_test =
      static_cast<int>(std::lround(test_fraction * static_cast<Real>(num_identities)));

  std::vector<int> ids(static_cast<std::size_t>(num_identities));
  std::iota(ids.begin(), ids.end(), 0);
  RandomSource rng(seed);
  rng.shuffle(ids);
  split.test_identities.assign(ids.begin(), ids.begin() + num_test);
  std::sort(split.test_identities.begin(), split.test_identities.end());

  std::vector<bool> is_test(static_cast<std::size_t>(num_identities), false);
  for (int id : split.test_identities) is_test[static_cast<std::size_t>(id)] = true;

  const Real q_young = split.age_lo + 0.25 * (split.age_hi - split.age_lo);
  const Real q_old = split.age_hi - 0.25 * (split.age_hi - split.age_lo);

  for (int id : split.test_identities) {
    Index youngest = -1, oldest = -1;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].identity != id) continue;
      if (youngest < 0 || samples[i].age < samples[static_cast<std::size_t>(youngest)].age) {
        youngest = static_cast<Index>(i);
      }
      if (oldest < 0 || samples[i].age > samples[static_cast<std::size_t>(oldest)].age) {
        oldest = static_cast<Index>(i);
      }
    }
    if (youngest < 0) throw SplitError("split: identity " + std::to_string(id) + " has no samples");
    const Real young_age = samples[static_cast<std::size_t>(youngest)].age;
    const Real old_age = samples[static_cast<std::size_t>(oldest)].age;
    if (young_age > q_young || old_age < q_old) {
      throw SplitError("split: identity " + std::to_string(id) +
                       " lacks age extremes (youngest " + std::to_string(young_age) +
                       ", oldest " + std::to_string(old_age) + ")");
    }
    split.gallery_indices.push_back(youngest);
    split.probe_indices.push_back(oldest);
  }

  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!is_test[static_cast<std::size_t>(samples[i].identity)]) {
      split.train_indices.push_back(static_cast<Index>(i));
    }
  }
  return split;
}

std::vector<Pair> make_pairs(const std::vector<SyntheticSample>& samples, Index num_positive,
                             Index num_negative, std::uint64_t seed) {
  if (num_positive < 0 || num_negative < 0) {
    throw ConfigError("pairs: counts must be >= 0");
  }
  const Index n = static_cast<Index>(samples.size());

  struct Candidate {
    Real gap;
    Index a, b;
  };
  std::vector<Candidate> positives;
  std::vector<Pair> negatives_all;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (samples[static_cast<std::size_t>(i)].identity ==
          samples[static_cast<std::size_t>(j)].identity) {
        positives.push_back({std::abs(samples[static_cast<std::size_t>(i)].age -
                                      samples[static_cast<std::size_t>(j)].age),
                             i, j});
      } else {
        negatives_all.push_back({i, j, 0});
      }
    }
  }
  if (static_cast<Index>(positives.size()) < num_positive) {
    throw ConfigError("pairs: only " + std::to_string(positives.size()) +
                      " same-identity pairs available, " + std::to_string(num_positive) +
                      " requested");
  }
  if (static_cast<Index>(negatives_all.size()) < num_negative) {
    throw ConfigError("pairs: only " + std::to_string(negatives_all.size()) +
                      " cross-identity pairs available, " + std::to_string(num_negative) +
                      " requested");
  }

  std::sort(positives.begin(), positives.end(), [](const Candidate& x, const Candidate& y) {
    if (x.gap != y.gap) return x.gap > y.gap;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });

  RandomSource rng(seed);
  rng.shuffle(negatives_all);

  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(num_positive + num_negative));
  for (Index k = 0; k < num_positive; ++k) {
    pairs.push_back({positives[static_cast<std::size_t>(k)].a,
                     positives[static_cast<std::size_t>(k)].b, 1});
  }
  for (Index k = 0; k < num_negative; ++k) {
    pairs.push_back(negatives_all[static_cast<std::size_t>(k)]);
  }
  return pairs;
}

}  // namespace oefd
