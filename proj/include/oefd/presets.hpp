#pragma once

#include <cstdint>

#include "oefd/datagen.hpp"
#include "oefd/encoder.hpp"
#include "oefd/trainer.hpp"

namespace oefd {

// Defaults for the two built-in experiments. The toy setup trains 10
// identities into a 2-D embedding with the age map frozen to f(x) = x; the
// cross-age setup trains and tests on disjoint identities with a
// young-gallery / old-probe split.

SyntheticSpec toy_synthetic_spec(std::uint64_t seed);
EncoderSpec toy_encoder_spec(Index input_dim);
TrainConfig toy_train_config(LossMode mode, std::uint64_t seed);

SyntheticSpec crossage_synthetic_spec(std::uint64_t seed);
EncoderSpec crossage_encoder_spec(Index input_dim);
TrainConfig crossage_train_config(LossMode mode, std::uint64_t seed);

inline constexpr Real kCrossAgeTestFraction = 0.5;

}  // namespace oefd
