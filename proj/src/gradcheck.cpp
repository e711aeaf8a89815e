#include "oefd/gradcheck.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "oefd/encoder.hpp"
#include "oefd/losses.hpp"
#include "oefd/numerics.hpp"
#include "oefd/random.hpp"

namespace oefd {

namespace {

constexpr Real kStep = 1e-5;

std::string fmt_short(Real v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

Vector flatten(const Matrix& m) {
  Vector v(m.size());
  Index k = 0;
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) v[k++] = m(r, c);
  return v;
}

Matrix unflatten(const Vector& v, Index rows, Index cols) {
  Matrix m(rows, cols);
  Index k = 0;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = v[k++];
  return m;
}

struct LossFixture {
  LabeledBatch batch;
  AngularClassifier classifier;
  AgeHead head;
  AngularMarginConfig margin;
  MultiTaskConfig mt;
};

LossFixture make_fixture(RandomSource& rng, int m, Real s, Real lambda, Real anneal) {
  LossFixture fx;
  const Index samples = 5, dim = 7, classes = 4;
  fx.batch.features = rng.gaussian_matrix(samples, dim);
  for (Index i = 0; i < samples; ++i) {
    fx.batch.identity_labels.push_back(static_cast<int>(rng.next_u64() % classes));
  }
  fx.batch.age_labels.resize(samples);
  for (Index i = 0; i < samples; ++i) fx.batch.age_labels[i] = rng.next_uniform(1.0, 5.0);
  fx.classifier = AngularClassifier::random_on_sphere(classes, dim, rng);
  fx.head.slope = rng.next_uniform(0.5, 1.5);
  fx.head.intercept = rng.next_uniform(-0.5, 0.5);
  fx.margin.margin = m;
  fx.margin.scale = s;
  fx.margin.anneal_weight = anneal;
  fx.mt.lambda = lambda;
  return fx;
}

// Worst relative error across feature, weight and age-head gradient blocks
// of `loss`, each checked against the finite-difference oracle.
template <typename LossFn>
Real check_loss_blocks(const LossFixture& fx, LossFn loss, bool with_weights, bool with_head,
                       Real corruption) {
  const LossResult res = loss(fx);
  Real worst = 0.0;

  {
    Matrix grad = res.grad_features;
    grad(0, 0) += corruption;
    const auto f = [&](const Vector& v) {
      LossFixture probe = fx;
      probe.batch.features = unflatten(v, fx.batch.features.rows(), fx.batch.features.cols());
      return loss(probe).value;
    };
    const Vector numeric = finite_difference_gradient(f, flatten(fx.batch.features), kStep);
    worst = std::max(worst, gradient_rel_error(flatten(grad), numeric));
  }

  if (with_weights) {
    const auto f = [&](const Vector& v) {
      LossFixture probe = fx;
      probe.classifier.weights =
          unflatten(v, fx.classifier.weights.rows(), fx.classifier.weights.cols());
      return loss(probe).value;
    };
    const Vector numeric = finite_difference_gradient(f, flatten(fx.classifier.weights), kStep);
    worst = std::max(worst, gradient_rel_error(flatten(res.grad_weights), numeric));
  }

  if (with_head) {
    const auto f = [&](const Vector& v) {
      LossFixture probe = fx;
      probe.head.slope = v[0];
      probe.head.intercept = v[1];
      return loss(probe).value;
    };
    Vector x(2);
    x << fx.head.slope, fx.head.intercept;
    Vector analytic(2);
    analytic << res.grad_age_head.slope, res.grad_age_head.intercept;
    const Vector numeric = finite_difference_gradient(f, x, kStep);
    worst = std::max(worst, gradient_rel_error(analytic, numeric));
  }
  return worst;
}

Vector flatten_params(const EncoderParams& params) {
  Index total = params.parameter_count();
  Vector v(total);
  Index k = 0;
  for (const Matrix& w : params.weights) {
    const Vector fw = flatten(w);
    v.segment(k, fw.size()) = fw;
    k += fw.size();
  }
  for (const Vector& b : params.biases) {
    v.segment(k, b.size()) = b;
    k += b.size();
  }
  return v;
}

EncoderParams unflatten_params(const Vector& v, const EncoderSpec& spec) {
  EncoderParams params;
  Index k = 0;
  for (Index l = 0; l < spec.num_layers(); ++l) {
    const Index rows = spec.widths[l + 1], cols = spec.widths[l];
    params.weights.push_back(unflatten(v.segment(k, rows * cols), rows, cols));
    k += rows * cols;
  }
  for (Index l = 0; l < spec.num_layers(); ++l) {
    params.biases.push_back(v.segment(k, spec.widths[l + 1]));
    k += spec.widths[l + 1];
  }
  return params;
}

// End-to-end: d combined_loss(forward(inputs)) / d encoder parameters.
Real check_encoder_composition(RandomSource& rng, int m, Real lambda) {
  const EncoderSpec spec = EncoderSpec::mlp({6, 8, 5});
  EncoderParams params = init_encoder(spec, rng);
  const Matrix inputs = rng.gaussian_matrix(8, 6);

  LossFixture fx = make_fixture(rng, m, 32.0, lambda, 0.0);
  fx.batch.features = Matrix();  // embeddings come from the encoder below
  fx.batch.identity_labels.resize(8);
  for (int& label : fx.batch.identity_labels) label = static_cast<int>(rng.next_u64() % 4);
  fx.batch.age_labels.resize(8);
  for (Index i = 0; i < 8; ++i) fx.batch.age_labels[i] = rng.next_uniform(1.0, 5.0);
  fx.classifier = AngularClassifier::random_on_sphere(4, 5, rng);

  const auto loss_at = [&](const EncoderParams& p) {
    LossFixture probe = fx;
    probe.batch.features = forward(spec, p, inputs);
    return combined_loss(probe.batch, probe.classifier, probe.head, probe.margin, probe.mt);
  };

  const ForwardTrace trace = forward_trace(spec, params, inputs);
  LabeledBatch embedded = fx.batch;
  embedded.features = trace.embeddings;
  const LossResult res = combined_loss(embedded, fx.classifier, fx.head, fx.margin, fx.mt);
  const EncoderGrads grads = backward(spec, params, trace, res.grad_features);

  EncoderParams grad_params;
  grad_params.weights = grads.grad_weights;
  grad_params.biases = grads.grad_biases;

  const auto f = [&](const Vector& v) { return loss_at(unflatten_params(v, spec)).value; };
  const Vector numeric = finite_difference_gradient(f, flatten_params(params), kStep);
  return gradient_rel_error(flatten_params(grad_params), numeric);
}

}  // namespace

GradCheckReport run_gradient_checks(std::uint64_t seed, bool corrupt) {
  GradCheckReport report;
  report.step = kStep;
  RandomSource rng(seed);
  bool first = true;

  const auto add_case = [&](const std::string& name, Real rel) {
    report.cases.push_back({name, rel, rel < report.tolerance});
  };

  for (const int m : {1, 2, 4}) {
    for (const Real s : {1.0, 32.0}) {
      LossFixture fx = make_fixture(rng, m, s, 0.0, 0.0);
      const Real rel = check_loss_blocks(
          fx,
          [](const LossFixture& p) { return identity_loss(p.batch, p.classifier, p.margin); },
          true, false, corrupt && first ? 1e-3 : 0.0);
      first = false;
      add_case("identity m=" + std::to_string(m) + " s=" + fmt_short(s), rel);
    }
  }

  for (int variant = 0; variant < 2; ++variant) {
    LossFixture fx = make_fixture(rng, 1, 1.0, 1.0, 0.0);
    const Real rel = check_loss_blocks(
        fx, [](const LossFixture& p) { return age_loss(p.batch, p.head); }, false, true, 0.0);
    add_case("age variant=" + std::to_string(variant), rel);
  }

  for (const int m : {1, 2, 4}) {
    for (const Real s : {1.0, 32.0}) {
      for (const Real lambda : {0.0, 0.01, 1.0}) {
        LossFixture fx = make_fixture(rng, m, s, lambda, 0.0);
        const Real rel = check_loss_blocks(
            fx,
            [](const LossFixture& p) {
              return combined_loss(p.batch, p.classifier, p.head, p.margin, p.mt);
            },
            true, true, 0.0);
        add_case("combined m=" + std::to_string(m) + " s=" + fmt_short(s) +
                     " lambda=" + fmt_short(lambda),
                 rel);
      }
    }
  }

  for (const Real lambda : {0.0, 0.01}) {
    LossFixture fx = make_fixture(rng, 4, 32.0, lambda, 5.0);
    const Real rel = check_loss_blocks(
        fx,
        [](const LossFixture& p) {
          return combined_loss(p.batch, p.classifier, p.head, p.margin, p.mt);
        },
        true, true, 0.0);
    add_case("combined annealed m=4 s=32 lambda=" + fmt_short(lambda), rel);
  }

  for (const int m : {1, 4}) {
    for (const Real lambda : {0.0, 0.01}) {
      const Real rel = check_encoder_composition(rng, m, lambda);
      add_case("encoder m=" + std::to_string(m) + " lambda=" + fmt_short(lambda), rel);
    }
  }

  return report;
}

}  // namespace oefd
