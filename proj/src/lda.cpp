#include "negtopic/lda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/kernels.hpp"

namespace negtopic {

// ---------------------------------------------------------------------------
// DocumentSet

DocumentSet::DocumentSet(std::span<const TokenizedDocument> docs, uint32_t vocab_size) : vocab_size_(vocab_size) {
  for (const auto& d : docs) append(d.tokens);
}

DocumentSet::DocumentSet(std::span<const std::vector<uint32_t>> docs, uint32_t vocab_size)
    : vocab_size_(vocab_size) {
  for (const auto& d : docs) append(d);
}

void DocumentSet::append(std::span<const uint32_t> tokens) {
  for (uint32_t t : tokens) {
    if (t >= vocab_size_) throw DataError(fmt::format("token id {} outside vocabulary of size {}", t, vocab_size_));
  }
  tokens_.insert(tokens_.end(), tokens.begin(), tokens.end());
  offsets_.push_back(tokens_.size());
}

// ---------------------------------------------------------------------------
// Hyperparams

void Hyperparams::validate() const {
  if (topics < 1) throw ConfigError("number of topics must be >= 1");
  if (!(alpha_sum > 0.0) || !std::isfinite(alpha_sum)) throw ConfigError("alpha_sum must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be > 0");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (samples < 1) throw ConfigError("samples must be >= 1");
  if (thinning < 1) throw ConfigError("thinning must be >= 1");
  if (uint64_t{samples - 1} * thinning >= iterations) {
    throw ConfigError(fmt::format("cannot average {} samples {} sweeps apart within {} iterations", samples,
                                  thinning, iterations));
  }
}

nlohmann::ordered_json Hyperparams::to_json() const {
  return {{"topics", topics},         {"alpha_sum", alpha_sum}, {"beta", beta},
          {"iterations", iterations}, {"seed", seed},           {"samples", samples},
          {"thinning", thinning}};
}

Hyperparams Hyperparams::from_json(const nlohmann::json& j) {
  Hyperparams h;
  h.topics = j.at("topics").get<uint32_t>();
  h.alpha_sum = j.at("alpha_sum").get<double>();
  h.beta = j.at("beta").get<double>();
  h.iterations = j.at("iterations").get<uint32_t>();
  h.seed = j.at("seed").get<uint64_t>();
  h.samples = j.value("samples", 1u);
  h.thinning = j.value("thinning", 1u);
  return h;
}

// ---------------------------------------------------------------------------
// GibbsState

GibbsState GibbsState::from_assignments(DocumentSet docs, uint32_t topics, std::vector<uint32_t> z) {
  if (topics < 1) throw ConfigError("number of topics must be >= 1");
  if (z.size() != docs.total_tokens()) throw DataError("assignment count does not match token count");
  GibbsState s;
  s.topics_ = topics;
  s.word_topic_.assign(size_t{docs.vocab_size()} * topics, 0);
  s.topic_totals_.assign(topics, 0);
  for (size_t d = 0, n = 0; d < docs.size(); ++d) {
    for (uint32_t w : docs.doc(d)) {
      const uint32_t k = z[n++];
      if (k >= topics) throw DataError(fmt::format("assignment {} out of range for {} topics", k, topics));
      ++s.word_topic_[size_t{w} * topics + k];
      ++s.topic_totals_[k];
    }
  }
  s.docs_ = std::move(docs);
  s.z_ = std::move(z);
  return s;
}

std::vector<int32_t> GibbsState::doc_topic_counts(size_t d) const {
  std::vector<int32_t> counts(topics_, 0);
  for (uint32_t k : assignments(d)) ++counts[k];
  return counts;
}

bool GibbsState::consistent() const {
  std::vector<int32_t> word_topic(word_topic_.size(), 0);
  std::vector<int32_t> totals(topics_, 0);
  size_t n = 0;
  for (size_t d = 0; d < docs_.size(); ++d) {
    for (uint32_t w : docs_.doc(d)) {
      const uint32_t k = z_[n++];
      if (k >= topics_) return false;
      ++word_topic[size_t{w} * topics_ + k];
      ++totals[k];
    }
  }
  return word_topic == word_topic_ && totals == topic_totals_ &&
         std::all_of(word_topic_.begin(), word_topic_.end(), [](int32_t c) { return c >= 0; });
}

GibbsState init_state(DocumentSet docs, const Hyperparams& hyper, Rng& rng) {
  if (hyper.topics < 1) throw ConfigError("number of topics must be >= 1");
  if (docs.size() == 0) throw DataError("cannot initialise a sampler without documents");
  std::vector<uint32_t> z(docs.total_tokens());
  for (auto& k : z) k = static_cast<uint32_t>(rng.below(hyper.topics));
  return GibbsState::from_assignments(std::move(docs), hyper.topics, std::move(z));
}

std::vector<double> conditional(const GibbsState& state, const Hyperparams& hyper, size_t d, size_t i) {
  const uint32_t K = state.topics();
  const auto doc = state.docs().doc(d);
  if (i >= doc.size()) throw std::out_of_range("token position out of range");
  const uint32_t w = doc[i];
  const uint32_t own = state.assignments(d)[i];

  auto doc_counts = state.doc_topic_counts(d);
  std::vector<int32_t> word_counts(state.word_topic(w).begin(), state.word_topic(w).end());
  std::vector<int32_t> totals(state.topic_totals().begin(), state.topic_totals().end());
  --doc_counts[own];
  --word_counts[own];
  --totals[own];

  std::vector<double> p(K);
  const double vbeta = hyper.beta * state.docs().vocab_size();
  const double total = kernels::gibbs_weights(doc_counts, word_counts, totals, hyper.alpha_sum / K, hyper.beta,
                                              vbeta, p);
  for (double& x : p) x /= total;
  return p;
}

size_t sample_weighted(std::span<const double> weights, double total, double u) {
  const double target = u * total;
  double cumulative = 0.0;
  size_t last_positive = 0;
  for (size_t k = 0; k < weights.size(); ++k) {
    cumulative += weights[k];
    if (weights[k] > 0.0) last_positive = k;
    if (target < cumulative) return k;
  }
  // Rounding left target at or past the running sum.
  return last_positive;
}

void gibbs_sweep(GibbsState& state, const Hyperparams& hyper, Rng& rng) {
  const uint32_t K = state.topics_;
  const double alpha = hyper.alpha_sum / K;
  const double beta = hyper.beta;
  const double vbeta = beta * state.docs_.vocab_size();
  const auto& table = kernels::active();

  std::vector<int32_t> doc_counts(K, 0);
  std::vector<double> weights(K);
  int32_t* totals = state.topic_totals_.data();

  for (size_t d = 0; d < state.docs_.size(); ++d) {
    const auto doc = state.docs_.doc(d);
    uint32_t* z = state.z_.data() + state.docs_.offset(d);
    for (size_t i = 0; i < doc.size(); ++i) ++doc_counts[z[i]];

    for (size_t i = 0; i < doc.size(); ++i) {
      int32_t* word = state.word_topic_.data() + size_t{doc[i]} * K;
      const uint32_t old_topic = z[i];
      --doc_counts[old_topic];
      --word[old_topic];
      --totals[old_topic];

      const double total =
          table.gibbs_weights(doc_counts.data(), word, totals, K, alpha, beta, vbeta, weights.data());
      const auto new_topic = static_cast<uint32_t>(sample_weighted(weights, total, rng.uniform()));

      z[i] = new_topic;
      ++doc_counts[new_topic];
      ++word[new_topic];
      ++totals[new_topic];
    }
    for (size_t i = 0; i < doc.size(); ++i) doc_counts[z[i]] = 0;
  }
}

// ---------------------------------------------------------------------------
// TopicModel

void CountSums::add(const GibbsState& state) {
  const uint32_t K = state.topics();
  const uint32_t V = state.docs().vocab_size();
  const size_t D = state.docs().size();
  if (samples == 0) {
    topics = K;
    vocab_size = V;
    topic_word.assign(size_t{K} * V, 0);
    topic_totals.assign(K, 0);
    doc_topic.assign(D * K, 0);
  }
  for (uint32_t w = 0; w < V; ++w) {
    const auto counts = state.word_topic(w);
    for (uint32_t k = 0; k < K; ++k) topic_word[size_t{k} * V + w] += counts[k];
  }
  for (uint32_t k = 0; k < K; ++k) topic_totals[k] += state.topic_totals()[k];
  for (size_t d = 0; d < D; ++d) {
    for (uint32_t k : state.assignments(d)) ++doc_topic[d * K + k];
  }
  ++samples;
}

TopicModel::TopicModel(Hyperparams hyper, std::string vocabulary_hash, CountSums counts)
    : hyper_(hyper), vocabulary_hash_(std::move(vocabulary_hash)), counts_(std::move(counts)) {
  hyper_.validate();
  const uint32_t K = counts_.topics;
  const uint32_t V = counts_.vocab_size;
  if (K != hyper_.topics) throw DataError("model counts disagree with hyperparameter topic count");
  if (counts_.samples < 1) throw DataError("model has no samples");
  if (counts_.topic_word.size() != size_t{K} * V || counts_.topic_totals.size() != K ||
      counts_.doc_topic.size() % K != 0) {
    throw DataError("model count arrays have inconsistent shapes");
  }
  const double s = counts_.samples;
  const double beta = hyper_.beta;
  const double vbeta = beta * V;
  phi_ = Matrix(K, V);
  for (uint32_t k = 0; k < K; ++k) {
    const double denom = static_cast<double>(counts_.topic_totals[k]) / s + vbeta;
    for (uint32_t w = 0; w < V; ++w) {
      phi_(k, w) = (static_cast<double>(counts_.topic_word[size_t{k} * V + w]) / s + beta) / denom;
    }
  }
  const size_t D = counts_.documents();
  const double alpha = hyper_.alpha();
  theta_ = Matrix(D, K);
  for (size_t d = 0; d < D; ++d) {
    int64_t length = 0;
    for (uint32_t k = 0; k < K; ++k) length += counts_.doc_topic[d * K + k];
    const double denom = static_cast<double>(length) / s + hyper_.alpha_sum;
    for (uint32_t k = 0; k < K; ++k) {
      theta_(d, k) = (static_cast<double>(counts_.doc_topic[d * K + k]) / s + alpha) / denom;
    }
  }
}

Matrix TopicModel::phi_by_word() const {
  Matrix out(phi_.cols(), phi_.rows());
  for (size_t k = 0; k < phi_.rows(); ++k) {
    for (size_t w = 0; w < phi_.cols(); ++w) out(w, k) = phi_(k, w);
  }
  return out;
}

TopicModel train(const DocumentSet& docs, const Hyperparams& hyper, std::string vocabulary_hash,
                 const SweepCallback& on_sweep) {
  hyper.validate();
  Rng rng(hyper.seed);
  GibbsState state = init_state(docs, hyper, rng);
  CountSums sums;
  const uint32_t first_sample = hyper.iterations - (hyper.samples - 1) * hyper.thinning;
  for (uint32_t it = 1; it <= hyper.iterations; ++it) {
    gibbs_sweep(state, hyper, rng);
    if (it >= first_sample && (hyper.iterations - it) % hyper.thinning == 0) sums.add(state);
    if (on_sweep) on_sweep(it, state);
  }
  return TopicModel(hyper, std::move(vocabulary_hash), std::move(sums));
}

std::vector<WordWeight> top_words(std::span<const double> phi_row, size_t n) {
  std::vector<uint32_t> ids(phi_row.size());
  std::iota(ids.begin(), ids.end(), 0u);
  const size_t count = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(count), ids.end(),
                    [&](uint32_t a, uint32_t b) { return phi_row[a] != phi_row[b] ? phi_row[a] > phi_row[b] : a < b; });
  std::vector<WordWeight> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) out.push_back({ids[i], phi_row[ids[i]]});
  return out;
}

std::vector<WordWeight> top_words(const TopicModel& model, uint32_t topic, size_t n) {
  if (topic >= model.topics()) throw std::out_of_range("topic index out of range");
  return top_words(model.phi().row(topic), n);
}

// ---------------------------------------------------------------------------
// Synthetic corpora

SyntheticCorpus generate_corpus(const Matrix& phi_true, std::span<const double> alpha, size_t doc_count,
                                double mean_len, uint64_t seed) {
  const size_t K = phi_true.rows();
  const size_t V = phi_true.cols();
  if (K == 0 || V == 0) throw ConfigError("generator needs at least one topic and one word");
  if (alpha.size() != K) throw ConfigError("alpha length must equal the number of topics");
  if (!(mean_len > 0.0)) throw ConfigError("mean document length must be > 0");
  for (double a : alpha) {
    if (!(a > 0.0)) throw ConfigError("alpha entries must be > 0");
  }
  // Cumulative rows for inverse-CDF word draws.
  std::vector<std::vector<double>> cdf(K, std::vector<double>(V));
  for (size_t k = 0; k < K; ++k) {
    double sum = 0.0;
    for (size_t w = 0; w < V; ++w) {
      const double p = phi_true(k, w);
      if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError(fmt::format("phi row {} has an invalid entry", k));
      sum += p;
      cdf[k][w] = sum;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError(fmt::format("phi row {} sums to {}, not 1", k, sum));
  }

  Rng rng(seed);
  SyntheticCorpus out;
  out.theta = Matrix(doc_count, K);
  out.documents.resize(doc_count);
  out.assignments.resize(doc_count);
  for (size_t d = 0; d < doc_count; ++d) {
    const auto theta = rng.dirichlet(alpha);
    std::copy(theta.begin(), theta.end(), out.theta.row(d).begin());
    uint32_t length = 0;
    while (length == 0) length = rng.poisson(mean_len);
    auto& words = out.documents[d];
    auto& topics = out.assignments[d];
    words.reserve(length);
    topics.reserve(length);
    for (uint32_t n = 0; n < length; ++n) {
      const size_t k = rng.categorical(theta);
      const auto& row = cdf[k];
      const double target = rng.uniform() * row.back();
      // First cumulative value above target always belongs to a positive-probability word.
      auto w = static_cast<uint32_t>(std::upper_bound(row.begin(), row.end(), target) - row.begin());
      if (w == V) {
        w = static_cast<uint32_t>(V - 1);
        while (w > 0 && phi_true(k, w) == 0.0) --w;
      }
      topics.push_back(static_cast<uint32_t>(k));
      words.push_back(w);
    }
  }
  return out;
}

Matrix random_topics(uint32_t topics, uint32_t vocab_size, double concentration, uint64_t seed) {
  Rng rng(seed);
  Matrix phi(topics, vocab_size);
  const std::vector<double> alpha(vocab_size, concentration);
  for (uint32_t k = 0; k < topics; ++k) {
    const auto row = rng.dirichlet(alpha);
    std::copy(row.begin(), row.end(), phi.row(k).begin());
  }
  return phi;
}

}  // namespace negtopic
