#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "negtopic/corpus.hpp"
#include "negtopic/lda.hpp"

namespace negtopic {

struct SplitSpec {
  double train_fraction = 0.8;
  uint64_t seed = 0;

  void validate() const;
};

struct Split {
  std::vector<size_t> train;  // indices into the input, in shuffled order
  std::vector<size_t> test;
  std::string partition_hash;  // SHA-256 over the sorted train and test document ids
};

/// Seeded Fisher-Yates shuffle, then the first round(train_fraction * D)
/// documents (clamped to [1, D-1]) train and the rest test.
Split split_corpus(std::span<const TokenizedDocument> docs, const SplitSpec& options);

struct EvalConfig {
  uint32_t particles = 20;
  uint64_t seed = 0;

  void validate() const;
};

inline constexpr uint32_t kOutOfVocabulary = std::numeric_limits<uint32_t>::max();

/// Test documents expressed in a model's vocabulary. Tokens equal to
/// kOutOfVocabulary (or >= V) are dropped and counted.
struct HeldOutSet {
  std::string vocabulary_hash;
  std::vector<std::vector<uint32_t>> documents;
  std::string partition_hash;
};

HeldOutSet make_heldout(const Corpus& corpus, std::span<const size_t> indices, std::string partition_hash = {});
// Re-expresses documents from one vocabulary in another; unknown words become kOutOfVocabulary.
HeldOutSet remap_heldout(std::span<const TokenizedDocument> docs, const Vocabulary& from, const Vocabulary& to);

struct EvalResult {
  uint32_t topics = 0;
  double heldout_ll = 0.0;  // nats, summed over test documents
  double per_token_ll = 0.0;
  size_t test_tokens = 0;
  size_t oov_dropped = 0;
  std::string partition_hash;
};

/// Left-to-right estimate of log p(doc) with R particles. phi_by_word is
/// V x K. Each position: every particle resamples its prefix assignments
/// once, contributes sum_k p(z_n = k | z_<n) phi_{k,w_n}, then draws z_n.
double left_to_right(std::span<const uint32_t> doc, const Matrix& phi_by_word, double alpha_sum, uint32_t particles,
                     Rng& rng);

/// Sum of left_to_right over the held-out documents. Document d uses the
/// generator seeded with derive_seed(config.seed, "doc:<d>"), so the
/// result does not depend on the worker count.
EvalResult heldout_loglik(const TopicModel& model, const HeldOutSet& test, const EvalConfig& config,
                          unsigned workers = 1);

struct Selection {
  uint32_t best_topics = 0;
  std::vector<EvalResult> curve;
  std::string partition_hash;
};

/// Trains one model per K on a single shared split and evaluates each on the
/// same test partition. Best K maximizes per_token_ll; values within 1e-12
/// count as ties and go to the smaller K. The model for K uses seed
/// derive_seed(hyper_template.seed, "k=<K>").
Selection select_k(const Corpus& corpus, std::span<const uint32_t> k_grid, const Hyperparams& hyper_template,
                   const SplitSpec& split_spec, const EvalConfig& eval_config, unsigned workers = 1);

uint32_t best_topic_count(std::span<const EvalResult> curve);

// "k,heldout_ll,per_token_ll,test_tokens,oov_dropped" plus one row per result.
std::string curve_csv(std::span<const EvalResult> curve);

}  // namespace negtopic
