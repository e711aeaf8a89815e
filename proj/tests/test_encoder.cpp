#include <doctest.h>

#include <cmath>

#include "oefd/encoder.hpp"
#include "oefd/losses.hpp"
#include "oefd/numerics.hpp"
#include "test_support.hpp"

using namespace oefd;

TEST_CASE("single identity layer passes inputs through") {
  const EncoderSpec spec = EncoderSpec::mlp({3, 3});
  EncoderParams params;
  params.weights.push_back(Matrix::Identity(3, 3));
  params.biases.push_back(Vector::Zero(3));

  Matrix inputs(2, 3);
  inputs << 1, -2, 3, 0.5, 0, -1;
  CHECK(forward(spec, params, inputs) == inputs);
}

TEST_CASE("zero weights emit the bias on every row") {
  const EncoderSpec spec = EncoderSpec::mlp({2, 3});
  EncoderParams params;
  params.weights.push_back(Matrix::Zero(3, 2));
  Vector b(3);
  b << 1.5, -2.0, 0.25;
  params.biases.push_back(b);

  const Matrix out = forward(spec, params, Matrix::Ones(4, 2));
  for (Index i = 0; i < 4; ++i) CHECK(out.row(i).transpose() == b);
}

TEST_CASE("rectifier clips negatives") {
  EncoderSpec spec;
  spec.widths = {2, 2};
  spec.activations = {Activation::rectifier};
  EncoderParams params;
  params.weights.push_back(Matrix::Identity(2, 2));
  params.biases.push_back(Vector::Zero(2));

  Matrix inputs(1, 2);
  inputs << -1, 2;
  Matrix expected(1, 2);
  expected << 0, 2;
  CHECK(forward(spec, params, inputs) == expected);
}

TEST_CASE("backward on a linear layer is the chain rule") {
  const EncoderSpec spec = EncoderSpec::mlp({3, 2});
  RandomSource rng(41);
  EncoderParams params = init_encoder(spec, rng);
  const Matrix inputs = rng.gaussian_matrix(5, 3);
  const Matrix g = rng.gaussian_matrix(5, 2);

  const ForwardTrace trace = forward_trace(spec, params, inputs);
  const EncoderGrads grads = backward(spec, params, trace, g);

  CHECK((grads.grad_weights[0] - g.transpose() * inputs).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((grads.grad_biases[0] - g.colwise().sum().transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((grads.grad_inputs - g * params.weights[0]).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("gradient through an inactive rectifier is zero") {
  EncoderSpec spec;
  spec.widths = {1, 1};
  spec.activations = {Activation::rectifier};
  EncoderParams params;
  params.weights.push_back(Matrix::Ones(1, 1));
  params.biases.push_back(Vector::Zero(1));

  Matrix inputs(1, 1);
  inputs << -2.0;  // pre-activation negative
  const ForwardTrace trace = forward_trace(spec, params, inputs);
  const EncoderGrads grads = backward(spec, params, trace, Matrix::Ones(1, 1));
  CHECK(grads.grad_weights[0](0, 0) == 0.0);
  CHECK(grads.grad_inputs(0, 0) == 0.0);
}

TEST_CASE("full network gradient matches finite differences") {
  const EncoderSpec spec = EncoderSpec::mlp({4, 6, 3});
  RandomSource rng(42);
  EncoderParams params = init_encoder(spec, rng);
  const Matrix inputs = rng.gaussian_matrix(6, 4);
  // Scalar head: sum of squares of the embeddings.
  const auto objective = [&](const EncoderParams& p) {
    return 0.5 * forward(spec, p, inputs).squaredNorm();
  };

  const ForwardTrace trace = forward_trace(spec, params, inputs);
  const EncoderGrads grads = backward(spec, params, trace, trace.embeddings);

  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    Vector flat(params.weights[l].size());
    Vector analytic(params.weights[l].size());
    Index k = 0;
    for (Index r = 0; r < params.weights[l].rows(); ++r) {
      for (Index c = 0; c < params.weights[l].cols(); ++c) {
        flat[k] = params.weights[l](r, c);
        analytic[k] = grads.grad_weights[l](r, c);
        ++k;
      }
    }
    const auto f = [&](const Vector& v) {
      EncoderParams probe = params;
      Index idx = 0;
      for (Index r = 0; r < probe.weights[l].rows(); ++r)
        for (Index c = 0; c < probe.weights[l].cols(); ++c) probe.weights[l](r, c) = v[idx++];
      return objective(probe);
    };
    const Vector numeric = finite_difference_gradient(f, flat, 1e-5);
    CHECK(gradient_rel_error(analytic, numeric) < 1e-4);
  }
}

TEST_CASE("initialization is scaled by fan-in and deterministic") {
  const EncoderSpec spec = EncoderSpec::mlp({16, 8, 4});
  RandomSource a(99), b(99);
  const EncoderParams p1 = init_encoder(spec, a);
  const EncoderParams p2 = init_encoder(spec, b);
  CHECK(p1.weights[0] == p2.weights[0]);
  CHECK(p1.weights[1] == p2.weights[1]);

  CHECK(p1.weights[0].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(16.0));
  CHECK(p1.weights[1].cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(8.0));
  CHECK(p1.biases[0].minCoeff() == 0.01);
  CHECK(p1.biases[0].maxCoeff() == 0.01);
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(EncoderSpec::mlp({5}), ConfigError);
  CHECK_THROWS_AS(EncoderSpec::mlp({5, 0}), ConfigError);

  const EncoderSpec spec = EncoderSpec::mlp({4, 3});
  RandomSource rng(1);
  const EncoderParams params = init_encoder(spec, rng);
  CHECK_THROWS_AS(forward(spec, params, Matrix::Zero(2, 5)), ShapeError);

  EncoderParams bad = params;
  bad.weights[0] = Matrix::Zero(3, 5);
  CHECK_THROWS_AS(bad.validate(spec), ShapeError);
}
