#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oefd/eval.hpp"
#include "test_support.hpp"

using namespace oefd;
using oefd::testing::exhaustive_kfold_accuracy;
using oefd::testing::mann_whitney_auc;

namespace {

EmbeddingSet embedding_set(std::initializer_list<std::initializer_list<Real>> rows,
                           std::initializer_list<int> ids) {
  EmbeddingSet set;
  set.embeddings.resize(static_cast<Index>(rows.size()),
                        static_cast<Index>(rows.begin()->size()));
  Index r = 0;
  for (const auto& row : rows) {
    Index c = 0;
    for (const Real v : row) set.embeddings(r, c++) = v;
    ++r;
  }
  set.identities.assign(ids);
  return set;
}

}  // namespace

TEST_CASE("identity similarity basics") {
  Vector a(2), b(2);
  a << 1, 0;
  b << 2, 0;
  CHECK(identity_similarity(a, b) == doctest::Approx(1.0).epsilon(1e-12));

  b << 0, 5;
  CHECK(identity_similarity(a, b) == doctest::Approx(0.0).epsilon(1e-12));

  RandomSource rng(3);
  const Vector x = rng.gaussian_vector(5);
  const Vector y = rng.gaussian_vector(5);
  // Power-of-two scaling is exact in floating point, so the norm cancels
  // without any roundoff at all.
  CHECK(identity_similarity(4.0 * x, y) == identity_similarity(x, y));
  CHECK(identity_similarity(3.0 * x, y) ==
        doctest::Approx(identity_similarity(x, y)).epsilon(1e-14));

  const Vector zero = Vector::Zero(5);
  CHECK_THROWS_AS(identity_similarity(zero, y), DomainError);
  Vector shorter(3);
  shorter << 1, 2, 3;
  CHECK_THROWS_AS(identity_similarity(x, shorter), ShapeError);
}

TEST_CASE("rank1: exact match wins") {
  const EmbeddingSet gallery = embedding_set({{1, 0}, {0, 1}, {0.7, 0.7}}, {0, 1, 2});
  const EmbeddingSet probe = embedding_set({{0, 1}}, {1});
  const EvalReport report = rank1_identification(gallery, probe);
  CHECK(report.metrics.at("rank1_rate") == 1.0);
}

TEST_CASE("rank1 with a single gallery item") {
  const EmbeddingSet gallery = embedding_set({{1, 0}}, {0});
  CHECK(rank1_identification(gallery, embedding_set({{0.9, 0.1}}, {0})).metrics.at("rank1_rate") ==
        1.0);
  CHECK(rank1_identification(gallery, embedding_set({{0.9, 0.1}}, {5})).metrics.at("rank1_rate") ==
        0.0);
}

TEST_CASE("rank1 three-probe fixture scores two of three") {
  // Gallery directions at 0, 60 and 90 degrees; probes at 10, 80 and 40
  // degrees with identities 0, 1, 2. Nearest gallery angles: 0 (hit),
  // 90 (miss for identity 1), 60 (miss... 40 degrees is 20 from 60 and 40
  // from 0, so gallery 1 at 60 wins and identity 2 misses).
  EmbeddingSet gallery;
  gallery.embeddings.resize(3, 2);
  gallery.embeddings << 1, 0, 0.5, std::sqrt(3.0) / 2.0, 0, 1;
  gallery.identities = {0, 1, 2};

  EmbeddingSet probe;
  probe.embeddings.resize(3, 2);
  const Real d10 = 10.0 * std::numbers::pi / 180.0;
  const Real d80 = 80.0 * std::numbers::pi / 180.0;
  const Real d40 = 40.0 * std::numbers::pi / 180.0;
  probe.embeddings << std::cos(d10), std::sin(d10), std::cos(d80), std::sin(d80), std::cos(d40),
      std::sin(d40);
  probe.identities = {0, 1, 2};

  // probe 0 at 10deg -> gallery 0 (0deg), identity 0: hit.
  // probe 1 at 80deg -> gallery 1 is 20deg away, gallery 2 is 10deg away ->
  //   selects gallery 2, identity mismatch: miss.
  // probe 2 at 40deg -> gallery 1 (60deg) is 20deg away, gallery 0 is 40deg
  //   away -> selects gallery 1... identity 2 expected: miss. That would be
  //   1/3, so give probe 2 identity 1 to make the fixture 2/3.
  probe.identities = {0, 1, 1};
  const EvalReport report = rank1_identification(gallery, probe);
  CHECK(report.metrics.at("rank1_rate") == doctest::Approx(2.0 / 3.0));
  CHECK(report.counts.at("probes") == 3);
}

TEST_CASE("rank1 selection is invariant to per-row positive rescaling") {
  RandomSource rng(8);
  EmbeddingSet gallery;
  gallery.embeddings = rng.gaussian_matrix(6, 4);
  gallery.identities = {0, 1, 2, 3, 4, 5};
  EmbeddingSet probe;
  probe.embeddings = rng.gaussian_matrix(10, 4);
  for (int i = 0; i < 10; ++i) probe.identities.push_back(i % 6);

  const EvalReport base = rank1_identification(gallery, probe);
  EmbeddingSet scaled_gallery = gallery;
  EmbeddingSet scaled_probe = probe;
  for (Index r = 0; r < scaled_gallery.embeddings.rows(); ++r) {
    scaled_gallery.embeddings.row(r) *= rng.next_uniform(0.1, 10.0);
  }
  for (Index r = 0; r < scaled_probe.embeddings.rows(); ++r) {
    scaled_probe.embeddings.row(r) *= rng.next_uniform(0.1, 10.0);
  }
  const EvalReport scaled = rank1_identification(scaled_gallery, scaled_probe);
  CHECK(base.metrics.at("rank1_rate") == scaled.metrics.at("rank1_rate"));
  CHECK(base.counts.at("hits") == scaled.counts.at("hits"));
}

TEST_CASE("rank1 rejects empty galleries and degenerate rows") {
  EmbeddingSet empty;
  empty.embeddings.resize(0, 2);
  const EmbeddingSet probe = embedding_set({{1, 0}}, {0});
  CHECK_THROWS_AS(rank1_identification(empty, probe), ProtocolError);

  const EmbeddingSet degenerate = embedding_set({{0, 0}}, {0});
  CHECK_THROWS_AS(rank1_identification(degenerate, probe), DomainError);
}

TEST_CASE("distractor rank1 reduces to rank1 without distractors") {
  RandomSource rng(9);
  EmbeddingSet gallery;
  gallery.embeddings = rng.gaussian_matrix(5, 3);
  gallery.identities = {0, 1, 2, 3, 4};
  EmbeddingSet probe;
  probe.embeddings = rng.gaussian_matrix(8, 3);
  for (int i = 0; i < 8; ++i) probe.identities.push_back(i % 5);

  const Matrix none(0, 3);
  CHECK(distractor_rank1(gallery, none, probe).metrics.at("rank1_rate") ==
        rank1_identification(gallery, probe).metrics.at("rank1_rate"));
}

TEST_CASE("a distractor identical to the probe causes a miss") {
  const EmbeddingSet gallery = embedding_set({{0.95, 0.1}}, {0});
  const EmbeddingSet probe = embedding_set({{1.0, 0.0}}, {0});
  CHECK(rank1_identification(gallery, probe).metrics.at("rank1_rate") == 1.0);

  Matrix distractors(1, 2);
  distractors << 1.0, 0.0;
  const EvalReport report = distractor_rank1(gallery, distractors, probe);
  CHECK(report.metrics.at("rank1_rate") == 0.0);
  CHECK(report.counts.at("distractors") == 1);
}

TEST_CASE("a decoy between probe and true match drops the rate") {
  const EmbeddingSet gallery = embedding_set({{1, 0}, {0, 1}}, {0, 1});
  const EmbeddingSet probe = embedding_set({{0.9, 0.44}, {0.44, 0.9}}, {0, 1});
  CHECK(distractor_rank1(gallery, Matrix(0, 2), probe).metrics.at("rank1_rate") == 1.0);

  // One decoy close to the first probe only.
  Matrix decoys(1, 2);
  decoys << 0.9, 0.44;
  const EvalReport report = distractor_rank1(gallery, decoys, probe);
  CHECK(report.metrics.at("rank1_rate") == doctest::Approx(0.5));
}

TEST_CASE("roc on perfectly separated scores") {
  const std::vector<ScoredPair> scores = {
      {0.9, true}, {0.8, true}, {0.3, false}, {0.1, false}};
  const RocCurve curve = roc_auc(scores);
  CHECK(curve.auc == 1.0);
  CHECK(curve.points.front() == std::pair<Real, Real>{0.0, 0.0});
  CHECK(curve.points.back() == std::pair<Real, Real>{1.0, 1.0});
}

TEST_CASE("roc with a constant score is chance") {
  const std::vector<ScoredPair> scores = {
      {0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}};
  const RocCurve curve = roc_auc(scores);
  CHECK(curve.auc == 0.5);
  CHECK(curve.points.size() == 2);  // single threshold group
}

TEST_CASE("the four-pair fixture has AUC exactly 0.75") {
  const std::vector<ScoredPair> scores = {
      {0.9, true}, {0.8, false}, {0.7, true}, {0.1, false}};
  CHECK(roc_auc(scores).auc == 0.75);
}

TEST_CASE("roc requires both classes") {
  CHECK_THROWS_AS(roc_auc({{0.5, true}, {0.2, true}}), ProtocolError);
  CHECK_THROWS_AS(roc_auc({{0.5, false}}), ProtocolError);
  CHECK_THROWS_AS(roc_auc({}), ProtocolError);
}

TEST_CASE("roc curve monotonicity and Mann-Whitney equivalence") {
  RandomSource rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 5 + static_cast<int>(rng.next_u64() % 196);
    std::vector<ScoredPair> scores;
    bool pos = false, neg = false;
    for (int i = 0; i < n; ++i) {
      ScoredPair sp;
      // Quantized scores so ties actually occur.
      sp.score = std::round(rng.next_uniform(-1.0, 1.0) * 8.0) / 8.0;
      sp.same = rng.next_double() < 0.5;
      (sp.same ? pos : neg) = true;
      scores.push_back(sp);
    }
    if (!pos || !neg) continue;

    const RocCurve curve = roc_auc(scores);
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
      CHECK(curve.points[k].first >= curve.points[k - 1].first);
      CHECK(curve.points[k].second >= curve.points[k - 1].second);
    }
    CHECK(std::abs(curve.auc - mann_whitney_auc(scores)) < 1e-12);
  }
}

TEST_CASE("kfold on separable scores is perfect for any fold count") {
  std::vector<ScoredPair> scores;
  for (int i = 0; i < 12; ++i) scores.push_back({i % 2 == 0 ? 0.8 : 0.2, i % 2 == 0});
  for (const Index folds : {2, 3, 4, 6}) {
    CHECK(kfold_accuracy(scores, folds).metrics.at("accuracy") == 1.0);
  }
}

TEST_CASE("kfold matches the exhaustive sweep on hand fixtures") {
  const std::vector<ScoredPair> fixture = {
      {0.9, true}, {0.8, false}, {0.7, true}, {0.1, false}};
  CHECK(kfold_accuracy(fixture, 2).metrics.at("accuracy") ==
        doctest::Approx(exhaustive_kfold_accuracy(fixture, 2)).epsilon(1e-15));

  RandomSource rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ScoredPair> scores;
    for (int i = 0; i < 24; ++i) {
      scores.push_back({std::round(rng.next_uniform(0.0, 1.0) * 4.0) / 4.0,
                        rng.next_double() < 0.5});
    }
    bool pos = false, neg = false;
    for (const auto& sp : scores) (sp.same ? pos : neg) = true;
    if (!pos || !neg) continue;
    for (const Index folds : {2, 3, 4}) {
      CHECK(kfold_accuracy(scores, folds).metrics.at("accuracy") ==
            doctest::Approx(exhaustive_kfold_accuracy(scores, folds)).epsilon(1e-15));
    }
  }
}

TEST_CASE("kfold with a globally optimal threshold equals plain accuracy") {
  // Identical blocks, so every fold sees the same training multiset and
  // picks the same (smallest optimal) threshold.
  std::vector<ScoredPair> scores;
  for (int rep = 0; rep < 4; ++rep) {
    scores.push_back({0.9, true});
    scores.push_back({0.8, true});
    scores.push_back({0.3, false});
    scores.push_back({0.1, true});  // one stubborn mislabeled pair per block
  }
  const Real acc = kfold_accuracy(scores, 4).metrics.at("accuracy");
  // Plain accuracy at threshold 0.8: 3 of 4 correct in every block.
  CHECK(acc == doctest::Approx(0.75));
}

TEST_CASE("kfold protocol errors") {
  std::vector<ScoredPair> all_pos = {{0.9, true}, {0.8, true}, {0.7, true}, {0.6, true}};
  CHECK_THROWS_AS(kfold_accuracy(all_pos, 2), ProtocolError);

  std::vector<ScoredPair> tiny = {{0.9, true}, {0.1, false}};
  CHECK_THROWS_AS(kfold_accuracy(tiny, 3), ProtocolError);  // an empty fold
  CHECK_THROWS_AS(kfold_accuracy(tiny, 1), ProtocolError);
}

TEST_CASE("pearson correlation reference points") {
  Vector x(4), y(4);
  x << 1, 2, 3, 4;
  y << 2, 4, 6, 8;
  CHECK(pearson_correlation(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  y = -y;
  CHECK(pearson_correlation(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
  y << 1, -1, 1, -1;
  CHECK(std::abs(pearson_correlation(x, y)) < 0.5);
  CHECK(pearson_correlation(x, Vector::Ones(4)) == 0.0);
}
