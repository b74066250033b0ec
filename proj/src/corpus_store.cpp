#include "negtopic/corpus_store.hpp"

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

namespace {

constexpr std::string_view kFormat = "negtopic.corpus";
constexpr int kVersion = 1;

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const size_t end = std::min(text_.find('\n', pos_), text_.size());
    line = text_.substr(pos_, end - pos_);
    pos_ = end + 1;
    ++line_no_;
    return true;
  }
  size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  size_t line_no_ = 0;
};

}  // namespace

std::string serialize_corpus(const Corpus& corpus) {
  const auto& vocab = corpus.vocabulary;
  std::string out;
  nlohmann::ordered_json header = {{"format", kFormat},
                                   {"version", kVersion},
                                   {"vocabulary_hash", vocab.hash()},
                                   {"vocabulary_size", vocab.size()},
                                   {"documents", corpus.documents.size()},
                                   {"tokens", corpus.token_count()}};
  out += header.dump();
  out += '\n';
  for (uint32_t i = 0; i < vocab.size(); ++i) {
    out += nlohmann::json::array({vocab.word(i), vocab.frequency(i)}).dump();
    out += '\n';
  }
  for (const auto& d : corpus.documents) {
    nlohmann::ordered_json j = {{"id", d.id}, {"categories", d.categories}, {"tokens", d.tokens}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

Corpus parse_corpus(std::string_view text, std::string_view source) {
  LineReader reader(text);
  std::string_view line;
  const auto fail = [&](std::string_view why) {
    return DataError(fmt::format("{}:{}: {}", source, reader.line_no(), why));
  };
  if (!reader.next(line)) throw DataError(fmt::format("{}: empty corpus artifact", source));
  const auto header = nlohmann::json::parse(line, nullptr, false);
  if (!header.is_object() || header.value("format", "") != kFormat) throw fail("not a negtopic corpus artifact");
  if (header.value("version", 0) != kVersion) throw fail("unsupported corpus artifact version");

  try {
    const auto vocab_size = header.at("vocabulary_size").get<uint32_t>();
    const auto doc_count = header.at("documents").get<size_t>();
    std::vector<std::string> words;
    std::vector<uint64_t> freqs;
    words.reserve(vocab_size);
    freqs.reserve(vocab_size);
    for (uint32_t i = 0; i < vocab_size; ++i) {
      if (!reader.next(line)) throw fail("truncated vocabulary");
      const auto entry = nlohmann::json::parse(line);
      words.push_back(entry.at(0).get<std::string>());
      freqs.push_back(entry.at(1).get<uint64_t>());
    }
    Corpus corpus;
    corpus.vocabulary = Vocabulary(std::move(words), std::move(freqs));
    if (corpus.vocabulary.hash() != header.at("vocabulary_hash").get<std::string>()) {
      throw fail("vocabulary hash does not match header");
    }
    corpus.documents.reserve(doc_count);
    for (size_t d = 0; d < doc_count; ++d) {
      if (!reader.next(line)) throw fail("truncated document list");
      const auto j = nlohmann::json::parse(line);
      TokenizedDocument doc;
      doc.id = j.at("id").get<std::string>();
      doc.categories = j.at("categories").get<std::set<std::string>>();
      doc.tokens = j.at("tokens").get<std::vector<uint32_t>>();
      for (uint32_t t : doc.tokens) {
        if (t >= vocab_size) throw fail(fmt::format("token id {} out of range (V={})", t, vocab_size));
      }
      corpus.documents.push_back(std::move(doc));
    }
    if (reader.next(line) && !trim(line).empty()) throw fail("trailing data after last document");
    return corpus;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
}

void write_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  write_file(path, serialize_corpus(corpus));
}

Corpus read_corpus(const std::filesystem::path& path) { return parse_corpus(read_file(path), path.string()); }

}  // namespace negtopic
