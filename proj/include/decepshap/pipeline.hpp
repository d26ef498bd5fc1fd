#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decepshap/corpus.hpp"
#include "decepshap/eval.hpp"
#include "decepshap/explain.hpp"
#include "decepshap/gbm.hpp"
#include "decepshap/io.hpp"
#include "decepshap/lexfeat.hpp"

namespace decepshap {

struct PipelineConfig {
  std::filesystem::path lexicon_dir = default_lexicon_dir();
  std::filesystem::path corpus_dir = std::filesystem::path(DECEPSHAP_DATA_DIR) / "corpora";
  std::filesystem::path out_dir = "out";
  TrainConfig train;
  std::size_t train_size = 200;
  std::size_t test_size = 20;
  std::uint64_t seed = 42;
  std::size_t background_cap = 200;
  ShapMethod method = ShapMethod::kTree;

  // Throws UsageError for non-positive sizes or bad training parameters.
  void validate() const;
};

// Features and labels loaded from either a corpus (.jsonl, featurized on the
// fly) or a feature CSV whose last column is `label`.
struct Dataset {
  std::vector<std::string> feature_names;
  FeatureMatrix features;
  std::vector<int> labels;
};

Dataset load_dataset(const std::filesystem::path& path, const PipelineConfig& cfg);
Dataset featurize_to_dataset(const Corpus& corpus, const Featurizer& featurizer);

// Each stage writes its outputs into cfg.out_dir only after every output has
// been computed, one atomic rename per file.
struct SplitSummary {
  std::size_t train = 0;
  std::size_t test = 0;
};
SplitSummary run_split(const std::filesystem::path& dis, const std::filesystem::path& partner,
                       const PipelineConfig& cfg);

std::size_t run_featurize(const std::filesystem::path& input, const std::filesystem::path& output,
                          const PipelineConfig& cfg);

// Writes model.json and loss.csv; returns the final training loss.
double run_train(const std::filesystem::path& train_path, const PipelineConfig& cfg);

// Writes metrics.json, roc.csv and table3.txt.
MetricsReport run_evaluate(const std::filesystem::path& model_path,
                           const std::filesystem::path& test_path, const std::string& name,
                           const PipelineConfig& cfg);

// Writes summary.json, explanations/, waterfall/ and interactions/.
GlobalSummary run_explain(const std::filesystem::path& model_path,
                          const std::filesystem::path& instances_path,
                          const std::filesystem::path& background_path,
                          const PipelineConfig& cfg);

struct HybridModelSpec {
  std::string name;  // e.g. DIS+EN
  std::string partner_file;
  Source partner_source;
};

// The four hybrid models, in results-table order.
const std::vector<HybridModelSpec>& hybrid_models();

struct HybridModelResult {
  std::string name;
  MetricsReport metrics;
  GlobalSummary summary;
  std::vector<double> round_loss;
};

struct RunAllResult {
  std::vector<HybridModelResult> models;
  std::string table;
};

// Split, featurize, train, evaluate and explain every hybrid model.
RunAllResult run_all(const PipelineConfig& cfg);

// Builds every output of one stage in memory; exposed for tests.
void add_explain_outputs(OutputBatch& batch, const std::filesystem::path& dir,
                         const std::vector<Explanation>& explanations,
                         const GlobalSummary& summary);

}  // namespace decepshap
