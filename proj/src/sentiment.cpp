#include "negtopic/sentiment.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/resources.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

Polarity polarity_of(uint32_t pos_count, uint32_t neg_count) {
  return (neg_count >= 1 && neg_count > pos_count) ? Polarity::kNegative : Polarity::kNonNegative;
}

// ---------------------------------------------------------------------------
// TermSet

void TermSet::add(std::string_view raw) {
  std::string term = to_lower_ascii(trim(raw));
  if (term.empty()) return;
  const auto star = term.find('*');
  if (star == std::string::npos) {
    literals_.insert(std::move(term));
    return;
  }
  if (star != term.size() - 1) throw ConfigError(fmt::format("lexicon term '{}': '*' is only allowed at the end", term));
  term.pop_back();
  if (term.empty()) throw ConfigError("lexicon term '*' would match every token");
  const size_t len = term.size();
  if (stems_.insert(std::move(term)).second) {
    const auto at = std::lower_bound(stem_lengths_.begin(), stem_lengths_.end(), len);
    if (at == stem_lengths_.end() || *at != len) stem_lengths_.insert(at, len);
  }
}

bool TermSet::matches(std::string_view token) const {
  if (!literals_.empty() && literals_.contains(std::string(token))) return true;
  for (size_t len : stem_lengths_) {
    if (len > token.size()) break;
    if (stems_.contains(std::string(token.substr(0, len)))) return true;
  }
  return false;
}

std::vector<std::string> TermSet::terms() const {
  std::vector<std::string> out(literals_.begin(), literals_.end());
  for (const auto& s : stems_) out.push_back(s + "*");
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// SentimentLexicon

namespace {

void check_disjoint(const TermSet& a, const TermSet& b) {
  const auto conflict = [](std::string_view x, std::string_view y) {
    return ConfigError(
        fmt::format("sentiment lexicon overlap: positive term '{}' conflicts with negative term '{}'", x, y));
  };
  for (const auto& lit : a.literals()) {
    if (b.matches(lit)) {
      // Name the negative term responsible.
      if (b.literals().contains(lit)) throw conflict(lit, lit);
      for (const auto& stem : b.stems()) {
        if (lit.starts_with(stem)) throw conflict(lit, stem + "*");
      }
    }
  }
  for (const auto& lit : b.literals()) {
    for (const auto& stem : a.stems()) {
      if (lit.starts_with(stem)) throw conflict(stem + "*", lit);
    }
  }
  for (const auto& sa : a.stems()) {
    for (const auto& sb : b.stems()) {
      if (sa.starts_with(sb) || sb.starts_with(sa)) throw conflict(sa + "*", sb + "*");
    }
  }
}

}  // namespace

SentimentLexicon::SentimentLexicon(std::span<const std::string> positive, std::span<const std::string> negative) {
  for (const auto& t : positive) positive_.add(t);
  for (const auto& t : negative) negative_.add(t);
  if (negative_.size() == 0) throw ConfigError("negative sentiment lexicon is empty");
  check_disjoint(positive_, negative_);
}

SentimentLexicon SentimentLexicon::load(const std::filesystem::path& positive_path,
                                        const std::filesystem::path& negative_path) {
  const auto pos = read_word_list(positive_path);
  const auto neg = read_word_list(negative_path);
  if (neg.empty()) throw ConfigError(fmt::format("negative lexicon '{}' has no terms", negative_path.string()));
  return SentimentLexicon(pos, neg);
}

SentimentLexicon SentimentLexicon::defaults() {
  const auto pos = parse_word_list(resources::kPositiveLexicon);
  const auto neg = parse_word_list(resources::kNegativeLexicon);
  return SentimentLexicon(pos, neg);
}

TermMatch SentimentLexicon::classify(std::string_view token) const {
  if (positive_.matches(token)) return TermMatch::kPositive;
  if (negative_.matches(token)) return TermMatch::kNegative;
  return TermMatch::kNone;
}

// ---------------------------------------------------------------------------
// Scoring

namespace {

SentimentScore tally(SentimentScore s) {
  s.polarity = polarity_of(s.pos_count, s.neg_count);
  return s;
}

void count(TermMatch m, SentimentScore& s) {
  if (m == TermMatch::kPositive) {
    ++s.pos_count;
  } else if (m == TermMatch::kNegative) {
    ++s.neg_count;
  }
}

}  // namespace

SentimentScore score_document(std::span<const std::string> tokens, const SentimentLexicon& lexicon) {
  SentimentScore s;
  for (const auto& t : tokens) count(lexicon.classify(t), s);
  return tally(s);
}

std::vector<TermMatch> classify_vocabulary(const Vocabulary& vocabulary, const SentimentLexicon& lexicon) {
  std::vector<TermMatch> out(vocabulary.size());
  for (uint32_t i = 0; i < vocabulary.size(); ++i) out[i] = lexicon.classify(vocabulary.word(i));
  return out;
}

SentimentScore score_document(std::span<const uint32_t> tokens, std::span<const TermMatch> classes) {
  SentimentScore s;
  for (uint32_t t : tokens) count(classes[t], s);
  return tally(s);
}

nlohmann::ordered_json FilterStats::to_json() const {
  return {{"total", total}, {"negative", negative}, {"fraction", fraction}};
}

namespace {

FilterStats make_stats(size_t total, size_t negative) {
  return {total, negative, total == 0 ? 0.0 : static_cast<double>(negative) / static_cast<double>(total)};
}

}  // namespace

WordFilterResult filter_negative(std::span<const WordDocument> docs, const SentimentLexicon& lexicon,
                                 unsigned workers) {
  std::vector<uint8_t> keep(docs.size(), 0);
  parallel_for(docs.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      keep[i] = score_document(docs[i].tokens, lexicon).polarity == Polarity::kNegative;
    }
  });
  WordFilterResult out;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (keep[i]) out.negative.push_back(docs[i]);
  }
  out.stats = make_stats(docs.size(), out.negative.size());
  return out;
}

CorpusFilterResult filter_negative(const Corpus& corpus, const SentimentLexicon& lexicon, unsigned workers) {
  const auto classes = classify_vocabulary(corpus.vocabulary, lexicon);
  const auto& docs = corpus.documents;
  std::vector<uint8_t> keep(docs.size(), 0);
  parallel_for(docs.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      keep[i] = score_document(docs[i].tokens, classes).polarity == Polarity::kNegative;
    }
  });
  CorpusFilterResult out;
  out.negative.vocabulary = corpus.vocabulary;
  for (size_t i = 0; i < docs.size(); ++i) {
    if (keep[i]) out.negative.documents.push_back(docs[i]);
  }
  out.stats = make_stats(docs.size(), out.negative.documents.size());
  return out;
}

}  // namespace negtopic
