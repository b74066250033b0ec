#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "negtopic/corpus.hpp"
#include "negtopic/random.hpp"

namespace negtopic {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

/// Documents as one flat token array with offsets.
class DocumentSet {
 public:
  DocumentSet() = default;
  DocumentSet(std::span<const TokenizedDocument> docs, uint32_t vocab_size);
  DocumentSet(std::span<const std::vector<uint32_t>> docs, uint32_t vocab_size);

  size_t size() const { return offsets_.size() - 1; }
  uint32_t vocab_size() const { return vocab_size_; }
  size_t total_tokens() const { return tokens_.size(); }
  std::span<const uint32_t> doc(size_t d) const {
    return {tokens_.data() + offsets_[d], offsets_[d + 1] - offsets_[d]};
  }
  size_t offset(size_t d) const { return offsets_[d]; }

 private:
  void append(std::span<const uint32_t> tokens);

  uint32_t vocab_size_ = 0;
  std::vector<uint32_t> tokens_;
  std::vector<size_t> offsets_{0};
};

struct Hyperparams {
  uint32_t topics = 0;
  double alpha_sum = 5.0;  // symmetric: each topic gets alpha_sum / topics
  double beta = 0.01;
  uint32_t iterations = 1000;
  uint64_t seed = 0;
  // Estimates average the counts of the last `samples` states, `thinning`
  // sweeps apart. samples = 1 uses the final state only.
  uint32_t samples = 1;
  uint32_t thinning = 1;

  double alpha() const { return alpha_sum / topics; }
  void validate() const;
  nlohmann::ordered_json to_json() const;
  static Hyperparams from_json(const nlohmann::json& j);

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Collapsed Gibbs sampler state: topic assignments z plus the word-topic
/// and topic-total tallies of z. Word-topic counts are stored word-major
/// (V x K) so each token's conditional reads one contiguous K-vector.
/// Doc-topic counts are tallied from z on demand.
class GibbsState {
 public:
  // Assignments in flat token order; counts are rebuilt from them.
  static GibbsState from_assignments(DocumentSet docs, uint32_t topics, std::vector<uint32_t> z);

  const DocumentSet& docs() const { return docs_; }
  uint32_t topics() const { return topics_; }
  std::span<const uint32_t> assignments() const { return z_; }
  std::span<const uint32_t> assignments(size_t d) const { return {z_.data() + docs_.offset(d), docs_.doc(d).size()}; }
  std::span<const int32_t> word_topic(uint32_t w) const { return {word_topic_.data() + size_t{w} * topics_, topics_}; }
  std::span<const int32_t> topic_totals() const { return topic_totals_; }
  std::vector<int32_t> doc_topic_counts(size_t d) const;

  // Stored counts equal a full recount of z and are non-negative.
  bool consistent() const;

 private:
  friend void gibbs_sweep(GibbsState& state, const Hyperparams& hyper, Rng& rng);

  DocumentSet docs_;
  uint32_t topics_ = 0;
  std::vector<uint32_t> z_;
  std::vector<int32_t> word_topic_;
  std::vector<int32_t> topic_totals_;
};

// Uniform random topic per token from the generator. Throws ConfigError for topics < 1.
GibbsState init_state(DocumentSet docs, const Hyperparams& hyper, Rng& rng);

/// p(z_di = k | all other assignments), normalized.
std::vector<double> conditional(const GibbsState& state, const Hyperparams& hyper, size_t d, size_t i);

/// Resamples every token once, document order then position order.
void gibbs_sweep(GibbsState& state, const Hyperparams& hyper, Rng& rng);

// Draws an index from unnormalized weights whose sum is `total`, given u in [0, 1).
size_t sample_weighted(std::span<const double> weights, double total, double u);

/// Counts summed over the averaged samples.
struct CountSums {
  uint32_t samples = 0;
  uint32_t topics = 0;
  uint32_t vocab_size = 0;
  std::vector<int64_t> topic_word;  // K x V, topic-major
  std::vector<int64_t> topic_totals;
  std::vector<int64_t> doc_topic;  // D x K

  size_t documents() const { return topics == 0 ? 0 : doc_topic.size() / topics; }
  void add(const GibbsState& state);
  friend bool operator==(const CountSums&, const CountSums&) = default;
};

/// phi_kw = (n_kw + beta) / (n_k + V beta), theta_dk = (n_dk + alpha_k) / (N_d + alpha_sum),
/// with counts taken as CountSums / samples.
class TopicModel {
 public:
  TopicModel() = default;
  TopicModel(Hyperparams hyper, std::string vocabulary_hash, CountSums counts);

  const Hyperparams& hyper() const { return hyper_; }
  uint32_t topics() const { return hyper_.topics; }
  uint32_t vocab_size() const { return counts_.vocab_size; }
  size_t documents() const { return counts_.documents(); }
  const std::string& vocabulary_hash() const { return vocabulary_hash_; }
  const CountSums& counts() const { return counts_; }
  const Matrix& phi() const { return phi_; }      // K x V
  const Matrix& theta() const { return theta_; }  // D x K
  // V x K copy of phi, contiguous over topics for each word.
  Matrix phi_by_word() const;

 private:
  Hyperparams hyper_;
  std::string vocabulary_hash_;
  CountSums counts_;
  Matrix phi_;
  Matrix theta_;
};

using SweepCallback = std::function<void(uint32_t iteration, const GibbsState& state)>;

TopicModel train(const DocumentSet& docs, const Hyperparams& hyper, std::string vocabulary_hash,
                 const SweepCallback& on_sweep = {});

struct WordWeight {
  uint32_t word;
  double weight;
};

/// Descending phi_kw, ties by ascending word id; min(n, V) entries.
std::vector<WordWeight> top_words(const TopicModel& model, uint32_t topic, size_t n);
std::vector<WordWeight> top_words(std::span<const double> phi_row, size_t n);

struct SyntheticCorpus {
  std::vector<std::vector<uint32_t>> documents;
  std::vector<std::vector<uint32_t>> assignments;  // true topic of each token
  Matrix theta;                                    // D x K
};

/// theta_d ~ Dirichlet(alpha); N_d ~ Poisson(mean_len) conditioned on N_d >= 1;
/// each token: topic ~ theta_d, word ~ phi_true[topic].
SyntheticCorpus generate_corpus(const Matrix& phi_true, std::span<const double> alpha, size_t doc_count,
                                double mean_len, uint64_t seed);

// K topics over V words, each row ~ Dirichlet(concentration).
Matrix random_topics(uint32_t topics, uint32_t vocab_size, double concentration, uint64_t seed);

}  // namespace negtopic
