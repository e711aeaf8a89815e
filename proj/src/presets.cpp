#include "oefd/presets.hpp"

namespace oefd {

SyntheticSpec toy_synthetic_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_identities = 10;
  spec.input_dim = 16;
  spec.samples_per_identity = 40;
  spec.age_min = 20.0;
  spec.age_max = 70.0;
  spec.age_effect = 1.0;
  spec.noise_sigma = 0.05;
  spec.seed = seed;
  return spec;
}

EncoderSpec toy_encoder_spec(Index input_dim) {
  return EncoderSpec::mlp({input_dim, 32, 2});
}

TrainConfig toy_train_config(LossMode mode, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.batch_size = 64;
  cfg.epochs = 400;
  cfg.learning_rate = 0.05;
  cfg.momentum = 0.9;
  cfg.freeze_age_head = true;  // f(x) = x throughout the toy runs
  return cfg;
}

SyntheticSpec crossage_synthetic_spec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.num_identities = 80;
  spec.input_dim = 16;
  spec.samples_per_identity = 32;
  spec.age_min = 20.0;
  spec.age_max = 70.0;
  spec.age_effect = 2.0;
  spec.noise_sigma = 0.15;
  spec.seed = seed;
  return spec;
}

EncoderSpec crossage_encoder_spec(Index input_dim) {
  return EncoderSpec::mlp({input_dim, 32, 8});
}

TrainConfig crossage_train_config(LossMode mode, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.mode = mode;
  cfg.seed = seed;
  cfg.batch_size = 64;
  cfg.epochs = 200;
  cfg.learning_rate = 0.05;
  cfg.momentum = 0.9;
  return cfg;
}

}  // namespace oefd
