#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

namespace negtopic {

struct RawDocument {
  std::string id;
  std::string text;
  std::optional<std::string> lang;
  std::optional<std::string> created_at;
};

struct TokenizerRules {
  bool lowercase = true;
  bool strip_urls = true;
  bool strip_mentions = true;
  bool fold_hashtags = true;  // "#diet" -> "diet"
  uint32_t min_token_len = 2;  // in code points

  void validate() const;
  nlohmann::ordered_json to_json() const;
  static TokenizerRules from_json(const nlohmann::json& j, TokenizerRules base);
  static TokenizerRules from_json(const nlohmann::json& j) { return from_json(j, TokenizerRules()); }
};

class StopWordList {
 public:
  StopWordList() = default;
  explicit StopWordList(std::span<const std::string> words);

  static StopWordList load(const std::filesystem::path& path);
  static StopWordList defaults();

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

struct QueryCategory {
  std::string name;
  std::vector<std::string> terms;
};

/// Category name -> match terms, in file order.
class QuerySet {
 public:
  QuerySet() = default;
  explicit QuerySet(std::vector<QueryCategory> categories);

  static QuerySet load(const std::filesystem::path& path);
  // Diabetes, Diet, Exercise, Obesity with "#term OR term" each.
  static QuerySet defaults();

  // Terms rewritten into post-tokenization form ('#' dropped under fold_hashtags, lowercased).
  QuerySet normalized(const TokenizerRules& rules) const;

  const std::vector<QueryCategory>& categories() const { return categories_; }
  std::vector<std::string> names() const;

 private:
  std::vector<QueryCategory> categories_;
};

struct IngestResult {
  std::vector<RawDocument> documents;
  size_t lines = 0;  // non-blank lines seen
  size_t malformed = 0;
  size_t skipped_lang = 0;
  size_t duplicates = 0;  // dropped because an earlier record had the same id
};

/// Line-delimited JSON records {"id","text","lang"?,"created_at"?}.
/// lang_filter empty disables language filtering; otherwise a record whose
/// lang is present and differs (case-insensitive primary subtag) is skipped.
IngestResult ingest(std::istream& in, std::string_view lang_filter, std::string_view source = "<stream>");
IngestResult ingest(const std::filesystem::path& path, std::string_view lang_filter);
// Several inputs, deduplicated by id across files in argument order.
IngestResult ingest(std::span<const std::filesystem::path> paths, std::string_view lang_filter);

std::vector<std::string> tokenize(std::string_view text, const TokenizerRules& rules);
std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopWordList& stoplist);
std::set<std::string> match_queries(std::span<const std::string> tokens, const QuerySet& queries);

/// A cleaned document still in word form.
struct WordDocument {
  std::string id;
  std::vector<std::string> tokens;
  std::set<std::string> categories;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  // Words must be unique; ids follow the given order.
  Vocabulary(std::vector<std::string> words, std::vector<uint64_t> frequencies);

  uint32_t size() const { return static_cast<uint32_t>(words_.size()); }
  std::optional<uint32_t> id(std::string_view word) const;
  const std::string& word(uint32_t id) const { return words_.at(id); }
  uint64_t frequency(uint32_t id) const { return frequencies_.at(id); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<uint64_t>& frequencies() const { return frequencies_; }
  // SHA-256 over the id-ordered words; models and evaluation sets carry it.
  const std::string& hash() const { return hash_; }

 private:
  std::vector<std::string> words_;
  std::vector<uint64_t> frequencies_;
  std::unordered_map<std::string, uint32_t> index_;
  std::string hash_;
};

struct TokenizedDocument {
  std::string id;
  std::vector<uint32_t> tokens;
  std::set<std::string> categories;
};

struct Corpus {
  Vocabulary vocabulary;
  std::vector<TokenizedDocument> documents;

  size_t token_count() const;
  std::vector<WordDocument> to_words() const;
};

struct VocabularyBuild {
  Corpus corpus;
  size_t dropped_documents = 0;  // empty after pruning
  size_t pruned_tokens = 0;
};

/// Drops words with corpus frequency < min_count, assigns ids by descending
/// frequency (ties lexicographic), and drops documents left empty.
/// Throws DataError when nothing survives.
VocabularyBuild build_vocabulary(std::span<const WordDocument> docs, uint64_t min_count);

/// Per-document cleaning: tokenize, drop stop words, tag categories.
struct Cleaner {
  TokenizerRules rules;
  StopWordList stopwords;
  QuerySet queries;  // already normalized

  WordDocument operator()(const RawDocument& doc) const;
};

std::vector<WordDocument> clean_documents(std::span<const RawDocument> docs, const Cleaner& cleaner,
                                          unsigned workers);

}  // namespace negtopic
