#include "negtopic/corpus.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/resources.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

// ---------------------------------------------------------------------------
// Configuration types

void TokenizerRules::validate() const {
  if (min_token_len < 1) throw ConfigError("tokenizer.min_token_len must be >= 1");
}

nlohmann::ordered_json TokenizerRules::to_json() const {
  return {{"lowercase", lowercase},
          {"strip_urls", strip_urls},
          {"strip_mentions", strip_mentions},
          {"fold_hashtags", fold_hashtags},
          {"min_token_len", min_token_len}};
}

TokenizerRules TokenizerRules::from_json(const nlohmann::json& j, TokenizerRules base) {
  if (!j.is_object()) throw ConfigError("tokenizer settings must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "lowercase") {
      base.lowercase = value.get<bool>();
    } else if (key == "strip_urls") {
      base.strip_urls = value.get<bool>();
    } else if (key == "strip_mentions") {
      base.strip_mentions = value.get<bool>();
    } else if (key == "fold_hashtags") {
      base.fold_hashtags = value.get<bool>();
    } else if (key == "min_token_len") {
      const auto n = value.get<int64_t>();
      if (n < 1) throw ConfigError("tokenizer.min_token_len must be >= 1");
      base.min_token_len = static_cast<uint32_t>(n);
    } else {
      throw ConfigError(fmt::format("unknown tokenizer setting '{}'", key));
    }
  }
  base.validate();
  return base;
}

StopWordList::StopWordList(std::span<const std::string> words) {
  for (const auto& w : words) words_.insert(to_lower_ascii(w));
}

StopWordList StopWordList::load(const std::filesystem::path& path) {
  const auto words = read_word_list(path);
  return StopWordList(words);
}

StopWordList StopWordList::defaults() {
  const auto words = parse_word_list(resources::kStopWords);
  return StopWordList(words);
}

QuerySet::QuerySet(std::vector<QueryCategory> categories) : categories_(std::move(categories)) {
  std::set<std::string> seen;
  for (auto& c : categories_) {
    if (c.name.empty()) throw ConfigError("query category with empty name");
    if (!seen.insert(c.name).second) throw ConfigError(fmt::format("duplicate query category '{}'", c.name));
    if (c.terms.empty()) throw ConfigError(fmt::format("query category '{}' has no terms", c.name));
    for (auto& t : c.terms) t = to_lower_ascii(trim(t));
  }
}

QuerySet QuerySet::load(const std::filesystem::path& path) {
  const auto sections = parse_sections(read_file(path), path.string());
  std::vector<QueryCategory> categories;
  for (const auto& s : sections) categories.push_back({s.name, s.terms});
  return QuerySet(std::move(categories));
}

QuerySet QuerySet::defaults() {
  const auto sections = parse_sections(resources::kQuerySet, "<default query set>");
  std::vector<QueryCategory> categories;
  for (const auto& s : sections) categories.push_back({s.name, s.terms});
  return QuerySet(std::move(categories));
}

QuerySet QuerySet::normalized(const TokenizerRules& rules) const {
  std::vector<QueryCategory> out;
  for (const auto& c : categories_) {
    QueryCategory n{c.name, {}};
    for (std::string_view t : c.terms) {
      if (rules.fold_hashtags && t.starts_with('#')) t.remove_prefix(1);
      std::string term = rules.lowercase ? to_lower_ascii(t) : std::string(t);
      if (!term.empty() && std::find(n.terms.begin(), n.terms.end(), term) == n.terms.end()) {
        n.terms.push_back(std::move(term));
      }
    }
    out.push_back(std::move(n));
  }
  QuerySet q;
  q.categories_ = std::move(out);
  return q;
}

std::vector<std::string> QuerySet::names() const {
  std::vector<std::string> out;
  for (const auto& c : categories_) out.push_back(c.name);
  return out;
}

// ---------------------------------------------------------------------------
// Ingestion

namespace {

bool language_matches(std::string_view lang, std::string_view filter) {
  const std::string l = to_lower_ascii(lang);
  const std::string f = to_lower_ascii(filter);
  if (l == f) return true;
  return l.size() > f.size() && l.starts_with(f) && (l[f.size()] == '-' || l[f.size()] == '_');
}

std::optional<RawDocument> parse_record(std::string_view line) {
  const auto j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!j.is_object()) return std::nullopt;
  const auto id = j.find("id");
  const auto text = j.find("text");
  if (id == j.end() || !id->is_string() || text == j.end() || !text->is_string()) return std::nullopt;
  RawDocument doc;
  doc.id = id->get<std::string>();
  if (doc.id.empty()) return std::nullopt;
  doc.text = text->get<std::string>();
  for (auto [key, slot] : {std::pair{"lang", &doc.lang}, std::pair{"created_at", &doc.created_at}}) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) continue;
    if (!it->is_string()) return std::nullopt;
    *slot = it->get<std::string>();
  }
  return doc;
}

void ingest_into(std::istream& in, std::string_view lang_filter, std::string_view source, IngestResult& result,
                 std::unordered_set<std::string>& seen) {
  size_t lines = 0;
  size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++lines;
    auto doc = parse_record(line);
    if (!doc) {
      ++malformed;
      continue;
    }
    if (!lang_filter.empty() && doc->lang && !language_matches(*doc->lang, lang_filter)) {
      ++result.skipped_lang;
      continue;
    }
    if (!seen.insert(doc->id).second) {
      ++result.duplicates;
      continue;
    }
    result.documents.push_back(std::move(*doc));
  }
  if (in.bad()) throw DataError(fmt::format("read error in '{}'", source));
  if (lines > 0 && malformed * 2 > lines) {
    throw DataError(fmt::format("'{}': {} of {} lines are malformed; expected one JSON object per line with "
                                "string \"id\" and \"text\"",
                                source, malformed, lines));
  }
  result.lines += lines;
  result.malformed += malformed;
}

}  // namespace

IngestResult ingest(std::istream& in, std::string_view lang_filter, std::string_view source) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  ingest_into(in, lang_filter, source, result, seen);
  return result;
}

IngestResult ingest(const std::filesystem::path& path, std::string_view lang_filter) {
  return ingest(std::span<const std::filesystem::path>(&path, 1), lang_filter);
}

IngestResult ingest(std::span<const std::filesystem::path> paths, std::string_view lang_filter) {
  IngestResult result;
  std::unordered_set<std::string> seen;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(fmt::format("cannot read input '{}'", path.string()));
    ingest_into(in, lang_filter, path.string(), result, seen);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Tokenization

namespace {

// Decodes one UTF-8 code point starting at s[i]; malformed bytes decode as
// themselves with length 1.
char32_t decode(std::string_view s, size_t i, size_t& len) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    len = 1;
    return b0;
  }
  const auto cont = [&](size_t k) {
    return i + k < s.size() && (static_cast<unsigned char>(s[i + k]) & 0xC0) == 0x80;
  };
  const auto byte = [&](size_t k) { return static_cast<char32_t>(static_cast<unsigned char>(s[i + k]) & 0x3F); };
  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    len = 2;
    return (static_cast<char32_t>(b0 & 0x1F) << 6) | byte(1);
  }
  if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    len = 3;
    return (static_cast<char32_t>(b0 & 0x0F) << 12) | (byte(1) << 6) | byte(2);
  }
  if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    len = 4;
    return (static_cast<char32_t>(b0 & 0x07) << 18) | (byte(1) << 12) | (byte(2) << 6) | byte(3);
  }
  len = 1;
  return b0;
}

bool is_space(char32_t c) {
  return c == ' ' || (c >= '\t' && c <= '\r') || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200B) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
         c == 0x3000 || c == 0xFEFF;
}

// Letters, digits and anything outside the punctuation/symbol ranges below.
bool is_word_char(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  if (c >= 0xA0 && c <= 0xBF) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // general punctuation, symbols, arrows, dingbats
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFE00 && c <= 0xFE0F) return false;  // variation selectors
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;  // emoji and pictographs
  return true;
}

size_t code_points(std::string_view s) {
  return static_cast<size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    char c = s[i];
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if (c != prefix[i]) return false;
  }
  return true;
}

void emit(std::string_view piece, const TokenizerRules& rules, std::vector<std::string>& out) {
  if (piece.empty()) return;
  std::string token = rules.lowercase ? to_lower_ascii(piece) : std::string(piece);
  if (code_points(token) < rules.min_token_len) return;
  out.push_back(std::move(token));
}

void tokenize_chunk(std::string_view chunk, const TokenizerRules& rules, std::vector<std::string>& out) {
  // Opening punctuation in front of a URL, mention or hashtag.
  while (!chunk.empty() && std::string_view("\"'([{<*").find(chunk.front()) != std::string_view::npos) {
    chunk.remove_prefix(1);
  }
  if (chunk.empty()) return;
  if (rules.strip_urls &&
      (starts_with_ci(chunk, "http://") || starts_with_ci(chunk, "https://") || starts_with_ci(chunk, "www."))) {
    return;
  }
  if (rules.strip_mentions && chunk.front() == '@') return;

  bool keep_hash = false;
  if (chunk.front() == '#') {
    chunk.remove_prefix(1);
    keep_hash = !rules.fold_hashtags;
  }

  size_t i = 0;
  bool first = true;
  while (i < chunk.size()) {
    size_t len = 0;
    while (i < chunk.size() && !is_word_char(decode(chunk, i, len))) i += len;
    const size_t begin = i;
    while (i < chunk.size() && is_word_char(decode(chunk, i, len))) i += len;
    if (i == begin) break;
    const auto piece = chunk.substr(begin, i - begin);
    if (first && keep_hash && begin == 0) {
      emit("#" + std::string(piece), rules, out);
    } else {
      emit(piece, rules, out);
    }
    first = false;
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerRules& rules) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    size_t len = 0;
    while (i < text.size() && is_space(decode(text, i, len))) i += len;
    const size_t begin = i;
    while (i < text.size() && !is_space(decode(text, i, len))) i += len;
    if (i > begin) tokenize_chunk(text.substr(begin, i - begin), rules, out);
  }
  return out;
}

std::vector<std::string> remove_stopwords(std::vector<std::string> tokens, const StopWordList& stoplist) {
  std::erase_if(tokens, [&](const std::string& t) { return stoplist.contains(t); });
  return tokens;
}

std::set<std::string> match_queries(std::span<const std::string> tokens, const QuerySet& queries) {
  std::set<std::string> out;
  for (const auto& category : queries.categories()) {
    const bool hit = std::any_of(tokens.begin(), tokens.end(), [&](const std::string& token) {
      return std::find(category.terms.begin(), category.terms.end(), token) != category.terms.end();
    });
    if (hit) out.insert(category.name);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<uint64_t> frequencies)
    : words_(std::move(words)), frequencies_(std::move(frequencies)) {
  if (words_.size() != frequencies_.size()) throw DataError("vocabulary words/frequencies length mismatch");
  index_.reserve(words_.size());
  std::string joined;
  for (uint32_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) throw DataError(fmt::format("duplicate vocabulary word '{}'", words_[i]));
    joined += words_[i];
    joined += '\n';
  }
  hash_ = sha256_hex(joined);
}

std::optional<uint32_t> Vocabulary::id(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

size_t Corpus::token_count() const {
  size_t n = 0;
  for (const auto& d : documents) n += d.tokens.size();
  return n;
}

std::vector<WordDocument> Corpus::to_words() const {
  std::vector<WordDocument> out;
  out.reserve(documents.size());
  for (const auto& d : documents) {
    WordDocument w{d.id, {}, d.categories};
    w.tokens.reserve(d.tokens.size());
    for (uint32_t t : d.tokens) w.tokens.push_back(vocabulary.word(t));
    out.push_back(std::move(w));
  }
  return out;
}

VocabularyBuild build_vocabulary(std::span<const WordDocument> docs, uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::unordered_map<std::string, uint64_t> counts;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, uint64_t>> kept;
  for (auto& [word, n] : counts) {
    if (n >= min_count) kept.emplace_back(word, n);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> words;
  std::vector<uint64_t> freqs;
  words.reserve(kept.size());
  freqs.reserve(kept.size());
  for (auto& [w, n] : kept) {
    words.push_back(std::move(w));
    freqs.push_back(n);
  }

  VocabularyBuild out;
  out.corpus.vocabulary = Vocabulary(std::move(words), std::move(freqs));
  const auto& vocab = out.corpus.vocabulary;
  for (const auto& d : docs) {
    TokenizedDocument td{d.id, {}, d.categories};
    td.tokens.reserve(d.tokens.size());
    for (const auto& t : d.tokens) {
      if (auto id = vocab.id(t)) {
        td.tokens.push_back(*id);
      } else {
        ++out.pruned_tokens;
      }
    }
    if (td.tokens.empty()) {
      ++out.dropped_documents;
      continue;
    }
    out.corpus.documents.push_back(std::move(td));
  }
  if (out.corpus.documents.empty()) {
    throw DataError(fmt::format("no documents left after pruning words with frequency < {} ({} input documents)",
                                min_count, docs.size()));
  }
  return out;
}

WordDocument Cleaner::operator()(const RawDocument& doc) const {
  WordDocument out{doc.id, remove_stopwords(tokenize(doc.text, rules), stopwords), {}};
  out.categories = match_queries(out.tokens, queries);
  return out;
}

std::vector<WordDocument> clean_documents(std::span<const RawDocument> docs, const Cleaner& cleaner,
                                          unsigned workers) {
  std::vector<WordDocument> out(docs.size());
  parallel_for(docs.size(), workers, [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) out[i] = cleaner(docs[i]);
  });
  return out;
}

}  // namespace negtopic
