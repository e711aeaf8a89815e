#include "oefd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "oefd/errors.hpp"

namespace oefd {

namespace {

constexpr Real kNormFloor = 1e-12;

Matrix normalized_or_throw(const Matrix& m, const std::string& what) {
  Matrix out(m.rows(), m.cols());
  for (Index r = 0; r < m.rows(); ++r) {
    const Real n = m.row(r).norm();
    if (!(n > kNormFloor)) {
      throw DomainError(what + ": degenerate zero embedding at row " + std::to_string(r));
    }
    out.row(r) = m.row(r) / n;
  }
  return out;
}

}  // namespace

void EmbeddingSet::validate(const std::string& what) const {
  if (static_cast<Index>(identities.size()) != embeddings.rows()) {
    throw ShapeError(what + ": " + std::to_string(identities.size()) + " identities for " +
                     shape_str(embeddings) + " embeddings");
  }
  if (ages.size() != 0 && ages.size() != embeddings.rows()) {
    throw ShapeError(what + ": age column length mismatch");
  }
}

Real identity_similarity(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw ShapeError("identity_similarity: dimensions " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  const Real na = a.norm();
  const Real nb = b.norm();
  if (!(na > kNormFloor) || !(nb > kNormFloor)) {
    throw DomainError("identity_similarity: degenerate zero vector");
  }
  return a.dot(b) / (na * nb);
}

EvalReport rank1_identification(const EmbeddingSet& gallery, const EmbeddingSet& probe) {
  gallery.validate("gallery");
  probe.validate("probe");
  if (gallery.size() == 0) throw ProtocolError("rank1: empty gallery");
  if (gallery.embeddings.cols() != probe.embeddings.cols()) {
    throw ShapeError("rank1: gallery dim " + shape_str(gallery.embeddings) + " vs probe " +
                     shape_str(probe.embeddings));
  }

  const Matrix g = normalized_or_throw(gallery.embeddings, "gallery");
  const Matrix p = normalized_or_throw(probe.embeddings, "probe");
  const Matrix sims = p * g.transpose();  // probes x gallery

  Index hits = 0;
  for (Index i = 0; i < p.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < g.rows(); ++j) {
      if (sims(i, j) > sims(i, best)) best = j;
    }
    if (gallery.identities[static_cast<std::size_t>(best)] ==
        probe.identities[static_cast<std::size_t>(i)]) {
      ++hits;
    }
  }

  EvalReport report;
  report.protocol = "rank1";
  report.metrics["rank1_rate"] =
      probe.size() == 0 ? 0.0 : static_cast<Real>(hits) / static_cast<Real>(probe.size());
  report.counts["gallery"] = gallery.size();
  report.counts["probes"] = probe.size();
  report.counts["hits"] = hits;
  return report;
}

EvalReport distractor_rank1(const EmbeddingSet& gallery, const Matrix& distractors,
                            const EmbeddingSet& probe) {
  gallery.validate("gallery");
  probe.validate("probe");
  if (gallery.size() == 0) throw ProtocolError("distractor_rank1: empty gallery");
  if (distractors.rows() > 0 && distractors.cols() != gallery.embeddings.cols()) {
    throw ShapeError("distractor_rank1: distractor dim " + shape_str(distractors) +
                     " vs gallery " + shape_str(gallery.embeddings));
  }

  const Matrix g = normalized_or_throw(gallery.embeddings, "gallery");
  const Matrix p = normalized_or_throw(probe.embeddings, "probe");
  const Matrix sims = p * g.transpose();
  Matrix dist_sims;
  if (distractors.rows() > 0) {
    dist_sims = p * normalized_or_throw(distractors, "distractors").transpose();
  }

  Index hits = 0;
  for (Index i = 0; i < p.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < g.rows(); ++j) {
      if (sims(i, j) > sims(i, best)) best = j;
    }
    // The union is ordered gallery first, so a distractor must be strictly
    // closer to displace the best gallery match.
    bool distractor_wins = false;
    for (Index d = 0; d < dist_sims.cols(); ++d) {
      if (dist_sims(i, d) > sims(i, best)) {
        distractor_wins = true;
        break;
      }
    }
    if (!distractor_wins && gallery.identities[static_cast<std::size_t>(best)] ==
                                probe.identities[static_cast<std::size_t>(i)]) {
      ++hits;
    }
  }

  EvalReport report;
  report.protocol = "distractor_rank1";
  report.metrics["rank1_rate"] =
      probe.size() == 0 ? 0.0 : static_cast<Real>(hits) / static_cast<Real>(probe.size());
  report.counts["gallery"] = gallery.size();
  report.counts["probes"] = probe.size();
  report.counts["distractors"] = distractors.rows();
  report.counts["hits"] = hits;
  return report;
}

RocCurve roc_auc(const std::vector<ScoredPair>& scores) {
  Index positives = 0, negatives = 0;
  for (const ScoredPair& sp : scores) {
    if (!std::isfinite(sp.score)) throw NumericalError("roc: non-finite score");
    (sp.same ? positives : negatives) += 1;
  }
  if (positives == 0 || negatives == 0) {
    throw ProtocolError("roc: need at least one positive and one negative pair");
  }

  std::vector<ScoredPair> sorted = scores;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScoredPair& a, const ScoredPair& b) { return a.score > b.score; });

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  Index tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    const Real threshold = sorted[i].score;
    // Group ties: every pair with this score flips at one threshold.
    while (i < sorted.size() && sorted[i].score == threshold) {
      (sorted[i].same ? tp : fp) += 1;
      ++i;
    }
    curve.points.emplace_back(static_cast<Real>(fp) / static_cast<Real>(negatives),
                              static_cast<Real>(tp) / static_cast<Real>(positives));
  }

  Real auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& [x0, y0] = curve.points[k - 1];
    const auto& [x1, y1] = curve.points[k];
    auc += (x1 - x0) * 0.5 * (y0 + y1);
  }
  curve.auc = auc;
  return curve;
}

namespace {

struct ThresholdPick {
  Real threshold;
  Index correct;
};

// Smallest threshold maximizing accuracy of "same iff score >= t" on the
// given pairs; +inf (predict all different) is the fallback candidate.
ThresholdPick best_threshold(const std::vector<ScoredPair>& pairs) {
  std::vector<Real> candidates;
  candidates.reserve(pairs.size() + 1);
  for (const ScoredPair& sp : pairs) candidates.push_back(sp.score);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  candidates.push_back(std::numeric_limits<Real>::infinity());

  ThresholdPick pick{candidates.front(), -1};
  for (const Real t : candidates) {
    Index correct = 0;
    for (const ScoredPair& sp : pairs) {
      if ((sp.score >= t) == sp.same) ++correct;
    }
    if (correct > pick.correct) pick = {t, correct};
  }
  return pick;
}

}  // namespace

EvalReport kfold_accuracy(const std::vector<ScoredPair>& scores, Index folds) {
  if (folds < 2) throw ProtocolError("kfold: folds must be >= 2");
  const Index n = static_cast<Index>(scores.size());
  bool any_pos = false, any_neg = false;
  for (const ScoredPair& sp : scores) (sp.same ? any_pos : any_neg) = true;
  if (!any_pos || !any_neg) {
    throw ProtocolError("kfold: need both positive and negative pairs");
  }

  Real accuracy_sum = 0.0;
  for (Index f = 0; f < folds; ++f) {
    const Index begin = f * n / folds;
    const Index end = (f + 1) * n / folds;
    if (begin == end) throw ProtocolError("kfold: fold " + std::to_string(f) + " is empty");

    std::vector<ScoredPair> train;
    train.reserve(static_cast<std::size_t>(n - (end - begin)));
    for (Index i = 0; i < n; ++i) {
      if (i < begin || i >= end) train.push_back(scores[static_cast<std::size_t>(i)]);
    }
    const ThresholdPick pick = best_threshold(train);

    Index correct = 0;
    for (Index i = begin; i < end; ++i) {
      const ScoredPair& sp = scores[static_cast<std::size_t>(i)];
      if ((sp.score >= pick.threshold) == sp.same) ++correct;
    }
    accuracy_sum += static_cast<Real>(correct) / static_cast<Real>(end - begin);
  }

  EvalReport report;
  report.protocol = "kfold";
  report.metrics["accuracy"] = accuracy_sum / static_cast<Real>(folds);
  report.counts["pairs"] = n;
  report.counts["folds"] = folds;
  return report;
}

Real pearson_correlation(const Vector& x, const Vector& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ShapeError("pearson: need two equal-length series of size >= 2");
  }
  const Real mx = x.mean();
  const Real my = y.mean();
  const Vector dx = x.array() - mx;
  const Vector dy = y.array() - my;
  const Real denom = dx.norm() * dy.norm();
  if (denom < 1e-300) return 0.0;
  return dx.dot(dy) / denom;
}

}  // namespace oefd
