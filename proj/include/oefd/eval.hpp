#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oefd/types.hpp"

namespace oefd {

// Test-time embeddings with their identity labels. Only the angular
// component matters to every protocol here: all scores are cosines, so any
// per-row positive rescaling leaves results unchanged.
struct EmbeddingSet {
  Matrix embeddings;           // M x n
  std::vector<int> identities; // M; -1 marks an unlabeled distractor
  Vector ages;                 // optional, empty or M

  Index size() const { return embeddings.rows(); }
  void validate(const std::string& what) const;
};

// Cosine of the angle between two nonzero vectors; the feature norms cancel,
// which is exactly how the radial (age) component is discarded at test time.
Real identity_similarity(const Vector& a, const Vector& b);

struct EvalReport {
  std::string protocol;
  std::map<std::string, Real> metrics;
  std::map<std::string, Index> counts;
  std::map<std::string, std::string> config;
};

// Nearest-gallery identification; ties resolve to the lowest gallery index.
EvalReport rank1_identification(const EmbeddingSet& gallery, const EmbeddingSet& probe);

// Identification over gallery plus unlabeled, never-correct distractors.
// A probe whose best match is a distractor counts as a miss.
EvalReport distractor_rank1(const EmbeddingSet& gallery, const Matrix& distractors,
                            const EmbeddingSet& probe);

struct ScoredPair {
  Real score = 0.0;
  bool same = false;
};

struct RocCurve {
  std::vector<std::pair<Real, Real>> points;  // (fpr, tpr), (0,0) .. (1,1)
  Real auc = 0.0;
};

// Threshold sweep over descending unique scores with ties grouped; AUC by
// the trapezoid rule.
RocCurve roc_auc(const std::vector<ScoredPair>& scores);

// Per held-out fold, apply the accuracy-maximizing threshold of the other
// folds (ties -> smallest threshold); folds are contiguous in input order.
EvalReport kfold_accuracy(const std::vector<ScoredPair>& scores, Index folds);

Real pearson_correlation(const Vector& x, const Vector& y);

}  // namespace oefd
