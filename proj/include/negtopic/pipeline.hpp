#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "negtopic/corpus.hpp"
#include "negtopic/lda.hpp"

namespace negtopic {

inline constexpr std::string_view kVersion = "1.0.0";

struct SimulateConfig {
  uint32_t documents = 2000;
  uint32_t topics = 10;
  uint32_t vocab_size = 400;
  double mean_length = 10.0;
  double alpha_sum = 1.0;       // document-topic Dirichlet, split evenly over topics
  double concentration = 0.05;  // topic-word Dirichlet
  double negative_fraction = 0.5;

  void validate() const;
};

/// Every setting of a run. Optional resource paths fall back to the built-in
/// lists. hyper.topics = 0 means "use the K chosen by select-k".
struct PipelineConfig {
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path out_dir = "negtopic-out";
  std::optional<std::filesystem::path> stopwords;
  std::optional<std::filesystem::path> positive_lexicon;
  std::optional<std::filesystem::path> negative_lexicon;
  std::optional<std::filesystem::path> queries;
  std::optional<std::filesystem::path> seeds;
  std::string lang = "en";
  TokenizerRules tokenizer;
  uint64_t min_count = 5;
  Hyperparams hyper;
  std::vector<uint32_t> k_grid{5, 10, 20, 40, 80};
  double train_fraction = 0.8;
  uint32_t particles = 20;
  size_t top_n = 20;
  double tau = 0.5;
  bool contains_stem = true;
  uint64_t seed = 0;
  unsigned workers = 0;  // 0: all hardware threads
  SimulateConfig simulate;

  void validate() const;
  // Unknown keys are rejected. Relative paths resolve against base_dir.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                                  PipelineConfig base);
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static PipelineConfig load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

// Stage seeds: derive_seed(config.seed, <label>).
inline constexpr std::string_view kSplitSeedLabel = "split";
inline constexpr std::string_view kEvalSeedLabel = "eval";
inline constexpr std::string_view kTrainSeedLabel = "train";
inline constexpr std::string_view kSimulateSeedLabel = "simulate";

/// Artifact names inside out_dir.
namespace artifacts {
inline constexpr std::string_view kCorpus = "corpus.jsonl";
inline constexpr std::string_view kIngestStats = "ingest_stats.json";
inline constexpr std::string_view kNegativeCorpus = "negative_corpus.jsonl";
inline constexpr std::string_view kSentimentStats = "sentiment_stats.json";
inline constexpr std::string_view kCurve = "k_curve.csv";
inline constexpr std::string_view kSelection = "selection.json";
inline constexpr std::string_view kModel = "model.json";
inline constexpr std::string_view kTopics = "topics.json";
inline constexpr std::string_view kGraph = "graph.json";
inline constexpr std::string_view kReport = "report.txt";
inline constexpr std::string_view kTopicWords = "topic_words.csv";
inline constexpr std::string_view kSimulated = "simulated.jsonl";
inline constexpr std::string_view kTruth = "truth.json";
inline constexpr std::string_view kManifest = "manifest.json";
}  // namespace artifacts

struct StageResult {
  std::vector<std::filesystem::path> outputs;
  nlohmann::ordered_json stats;
};

// Each stage reads its declared upstream artifacts from out_dir, writes its
// own, and records itself in manifest.json.
StageResult run_ingest(const PipelineConfig& config);
StageResult run_sentiment(const PipelineConfig& config);
StageResult run_select_k(const PipelineConfig& config);
StageResult run_train(const PipelineConfig& config);
StageResult run_report(const PipelineConfig& config);
StageResult run_simulate(const PipelineConfig& config);

}  // namespace negtopic
