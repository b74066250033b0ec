#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "negtopic/corpus.hpp"

namespace negtopic {

enum class Polarity { kNonNegative, kNegative };

struct SentimentScore {
  uint32_t pos_count = 0;
  uint32_t neg_count = 0;
  Polarity polarity = Polarity::kNonNegative;

  friend bool operator==(const SentimentScore&, const SentimentScore&) = default;
};

// Negative iff neg_count > pos_count and neg_count >= 1; ties are not negative.
Polarity polarity_of(uint32_t pos_count, uint32_t neg_count);

enum class TermMatch : uint8_t { kNone, kPositive, kNegative };

/// Literal terms plus '*'-suffixed prefix stems. A term set matches a token
/// when the token equals a literal or starts with a stem.
class TermSet {
 public:
  void add(std::string_view term);
  bool matches(std::string_view token) const;

  const std::unordered_set<std::string>& literals() const { return literals_; }
  const std::unordered_set<std::string>& stems() const { return stems_; }
  size_t size() const { return literals_.size() + stems_.size(); }
  // Terms in canonical form ("stem*" for stems), sorted.
  std::vector<std::string> terms() const;

 private:
  std::unordered_set<std::string> literals_;
  std::unordered_set<std::string> stems_;
  std::vector<size_t> stem_lengths_;  // ascending, distinct
};

class SentimentLexicon {
 public:
  /// Validates: non-empty negative set, no empty stems, and no token can
  /// match both polarities (literal vs literal, literal vs covering stem,
  /// stem vs stem when one extends the other). Throws ConfigError naming
  /// the offending term.
  SentimentLexicon(std::span<const std::string> positive, std::span<const std::string> negative);

  static SentimentLexicon load(const std::filesystem::path& positive_path, const std::filesystem::path& negative_path);
  static SentimentLexicon defaults();

  TermMatch classify(std::string_view token) const;

  const TermSet& positive() const { return positive_; }
  const TermSet& negative() const { return negative_; }

 private:
  TermSet positive_;
  TermSet negative_;
};

SentimentScore score_document(std::span<const std::string> tokens, const SentimentLexicon& lexicon);

// Classification of every vocabulary word, so corpus scoring is a table lookup.
std::vector<TermMatch> classify_vocabulary(const Vocabulary& vocabulary, const SentimentLexicon& lexicon);
SentimentScore score_document(std::span<const uint32_t> tokens, std::span<const TermMatch> classes);

struct FilterStats {
  size_t total = 0;
  size_t negative = 0;
  double fraction = 0.0;

  nlohmann::ordered_json to_json() const;
};

struct WordFilterResult {
  std::vector<WordDocument> negative;
  FilterStats stats;
};

struct CorpusFilterResult {
  Corpus negative;  // same vocabulary as the input
  FilterStats stats;
};

WordFilterResult filter_negative(std::span<const WordDocument> docs, const SentimentLexicon& lexicon,
                                 unsigned workers = 1);
CorpusFilterResult filter_negative(const Corpus& corpus, const SentimentLexicon& lexicon, unsigned workers = 1);

}  // namespace negtopic
