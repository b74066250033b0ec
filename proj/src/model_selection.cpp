#include "negtopic/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/kernels.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

void SplitSpec::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
}

void EvalConfig::validate() const {
  if (particles < 1) throw ConfigError("particle count must be >= 1");
}

Split split_corpus(std::span<const TokenizedDocument> docs, const SplitSpec& options) {
  options.validate();
  const size_t D = docs.size();
  if (D < 2) throw DataError(fmt::format("need at least 2 documents to split, got {}", D));
  std::vector<size_t> order(D);
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng(options.seed);
  for (size_t i = D - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);

  const auto rounded = static_cast<size_t>(std::llround(options.train_fraction * static_cast<double>(D)));
  const size_t n_train = std::clamp<size_t>(rounded, 1, D - 1);
  Split split;
  split.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());

  std::string material;
  for (const auto* part : {&split.train, &split.test}) {
    std::vector<std::string> ids;
    for (size_t i : *part) ids.push_back(docs[i].id);
    std::sort(ids.begin(), ids.end());
    material += part == &split.train ? "train\n" : "test\n";
    for (const auto& id : ids) material += id + "\n";
  }
  split.partition_hash = sha256_hex(material);
  return split;
}

HeldOutSet make_heldout(const Corpus& corpus, std::span<const size_t> indices, std::string partition_hash) {
  HeldOutSet out{corpus.vocabulary.hash(), {}, std::move(partition_hash)};
  out.documents.reserve(indices.size());
  for (size_t i : indices) out.documents.push_back(corpus.documents.at(i).tokens);
  return out;
}

HeldOutSet remap_heldout(std::span<const TokenizedDocument> docs, const Vocabulary& from, const Vocabulary& to) {
  HeldOutSet out{to.hash(), {}, {}};
  std::vector<uint32_t> mapping(from.size());
  for (uint32_t i = 0; i < from.size(); ++i) mapping[i] = to.id(from.word(i)).value_or(kOutOfVocabulary);
  for (const auto& d : docs) {
    std::vector<uint32_t> tokens;
    tokens.reserve(d.tokens.size());
    for (uint32_t t : d.tokens) tokens.push_back(mapping.at(t));
    out.documents.push_back(std::move(tokens));
  }
  return out;
}

double left_to_right(std::span<const uint32_t> doc, const Matrix& phi_by_word, double alpha_sum, uint32_t particles,
                     Rng& rng) {
  const size_t K = phi_by_word.cols();
  const size_t N = doc.size();
  const double alpha = alpha_sum / static_cast<double>(K);
  const auto& table = kernels::active();

  std::vector<uint32_t> z(size_t{particles} * N);
  std::vector<int32_t> counts(size_t{particles} * K, 0);
  std::vector<double> weights(K);
  double log_likelihood = 0.0;

  for (size_t n = 0; n < N; ++n) {
    double p_n = 0.0;
    for (uint32_t r = 0; r < particles; ++r) {
      uint32_t* zr = z.data() + size_t{r} * N;
      int32_t* cr = counts.data() + size_t{r} * K;
      for (size_t j = 0; j < n; ++j) {
        --cr[zr[j]];
        const double total = table.mixture_weights(cr, phi_by_word.row(doc[j]).data(), K, alpha, weights.data());
        zr[j] = static_cast<uint32_t>(sample_weighted(weights, total, rng.uniform()));
        ++cr[zr[j]];
      }
      const double total = table.mixture_weights(cr, phi_by_word.row(doc[n]).data(), K, alpha, weights.data());
      p_n += total / (static_cast<double>(n) + alpha_sum);
      zr[n] = static_cast<uint32_t>(sample_weighted(weights, total, rng.uniform()));
      ++cr[zr[n]];
    }
    log_likelihood += std::log(p_n / particles);
  }
  return log_likelihood;
}

EvalResult heldout_loglik(const TopicModel& model, const HeldOutSet& test, const EvalConfig& config,
                          unsigned workers) {
  config.validate();
  if (test.documents.empty()) throw DataError("held-out set is empty");
  if (test.vocabulary_hash != model.vocabulary_hash()) {
    throw DataError(fmt::format("held-out documents use vocabulary {} but the model was trained on {}",
                                test.vocabulary_hash.substr(0, 12), model.vocabulary_hash().substr(0, 12)));
  }
  const Matrix phi = model.phi_by_word();
  const uint32_t V = model.vocab_size();
  const size_t D = test.documents.size();

  std::vector<double> doc_ll(D, 0.0);
  std::vector<size_t> kept(D, 0);
  std::vector<size_t> dropped(D, 0);
  parallel_for(D, workers, [&](size_t begin, size_t end) {
    std::vector<uint32_t> tokens;
    for (size_t d = begin; d < end; ++d) {
      tokens.clear();
      for (uint32_t t : test.documents[d]) {
        if (t == kOutOfVocabulary || t >= V) {
          ++dropped[d];
        } else {
          tokens.push_back(t);
        }
      }
      kept[d] = tokens.size();
      if (tokens.empty()) continue;
      Rng rng(derive_seed(config.seed, fmt::format("doc:{}", d)));
      doc_ll[d] = left_to_right(tokens, phi, model.hyper().alpha_sum, config.particles, rng);
    }
  });

  EvalResult result;
  result.topics = model.topics();
  result.partition_hash = test.partition_hash;
  for (size_t d = 0; d < D; ++d) {
    result.heldout_ll += doc_ll[d];
    result.test_tokens += kept[d];
    result.oov_dropped += dropped[d];
  }
  result.per_token_ll = result.test_tokens == 0 ? 0.0 : result.heldout_ll / static_cast<double>(result.test_tokens);
  return result;
}

uint32_t best_topic_count(std::span<const EvalResult> curve) {
  if (curve.empty()) throw std::invalid_argument("empty curve");
  size_t best = 0;
  for (size_t i = 1; i < curve.size(); ++i) {
    const bool better = curve[i].per_token_ll > curve[best].per_token_ll + 1e-12;
    const bool tie_smaller = std::abs(curve[i].per_token_ll - curve[best].per_token_ll) <= 1e-12 &&
                             curve[i].topics < curve[best].topics;
    if (better || tie_smaller) best = i;
  }
  return curve[best].topics;
}

Selection select_k(const Corpus& corpus, std::span<const uint32_t> k_grid, const Hyperparams& hyper_template,
                   const SplitSpec& split_spec, const EvalConfig& eval_config, unsigned workers) {
  if (k_grid.empty()) throw ConfigError("K grid is empty");
  for (size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1) throw ConfigError("K grid values must be >= 1");
    if (i > 0 && k_grid[i] <= k_grid[i - 1]) throw ConfigError("K grid must be strictly ascending");
  }
  eval_config.validate();

  const Split split = split_corpus(corpus.documents, split_spec);
  std::vector<TokenizedDocument> train_docs;
  train_docs.reserve(split.train.size());
  for (size_t i : split.train) train_docs.push_back(corpus.documents[i]);
  const DocumentSet train_set(train_docs, corpus.vocabulary.size());
  const HeldOutSet test_set = make_heldout(corpus, split.test, split.partition_hash);

  Selection selection;
  selection.partition_hash = split.partition_hash;
  selection.curve.resize(k_grid.size());
  // Independent chains run side by side; each evaluation is then single-threaded.
  parallel_for(k_grid.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const uint32_t K = k_grid[i];
      try {
        Hyperparams hyper = hyper_template;
        hyper.topics = K;
        hyper.seed = derive_seed(hyper_template.seed, fmt::format("k={}", K));
        const TopicModel model = train(train_set, hyper, corpus.vocabulary.hash());
        selection.curve[i] = heldout_loglik(model, test_set, eval_config, 1);
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("K={}: {}", K, e.what()));
      } catch (const Error& e) {
        throw DataError(fmt::format("K={}: {}", K, e.what()));
      }
    }
  });
  selection.best_topics = best_topic_count(selection.curve);
  return selection;
}

std::string curve_csv(std::span<const EvalResult> curve) {
  std::string out = "k,heldout_ll,per_token_ll,test_tokens,oov_dropped\n";
  for (const auto& r : curve) {
    out += fmt::format("{},{:.17g},{:.17g},{},{}\n", r.topics, r.heldout_ll, r.per_token_ll, r.test_tokens,
                       r.oov_dropped);
  }
  return out;
}

}  // namespace negtopic
