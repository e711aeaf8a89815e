#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oefd/datagen.hpp"
#include "oefd/dataset.hpp"
#include "oefd/eval.hpp"
#include "oefd/trainer.hpp"
#include "oefd/types.hpp"

namespace oefd {

// Shortest 17-significant-digit decimal; round-trips doubles exactly.
std::string fmt_real(Real v);

// Dataset file: "# oefd-dataset v1", then one sample per line as
// "identity,age<TAB>c1,c2,...".
void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

// Pair list: one "index_a,index_b,label" line per pair.
void write_pairs(const std::filesystem::path& path, const std::vector<Pair>& pairs);
std::vector<Pair> read_pairs(const std::filesystem::path& path);

// Embedding file: "# oefd-embeddings v1", then "identity<TAB>c1,c2,..." with
// identity -1 for distractors.
void write_embeddings(const std::filesystem::path& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

// Decomposed embeddings for analysis: "identity,age,norm<TAB>d1,d2,...".
void write_decomposed(const std::filesystem::path& path, const EmbeddingSet& set);

// Split manifest (JSON): sample indices of train/gallery/probe plus the test
// identities and observed age range.
void write_split(const std::filesystem::path& path, const CrossAgeSplit& split);
CrossAgeSplit read_split(const std::filesystem::path& path);

// Evaluation report (JSON): protocol, metrics, counts, config echo.
void write_report(const std::filesystem::path& path, const EvalReport& report);

// Metrics log: "epoch,lr,total_loss,id_loss,age_loss,train_accuracy" header
// plus one comma-separated line per epoch.
std::string metrics_to_csv(const std::vector<EpochMetrics>& metrics);
void write_metrics(const std::filesystem::path& path, const std::vector<EpochMetrics>& metrics);

}  // namespace oefd
