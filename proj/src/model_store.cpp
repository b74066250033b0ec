#include "negtopic/model_store.hpp"

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

namespace {

constexpr std::string_view kFormat = "negtopic.model";
constexpr int kVersion = 1;

}  // namespace

std::string serialize_model(const TopicModel& model) {
  const auto& c = model.counts();
  const uint32_t K = c.topics;
  const uint32_t V = c.vocab_size;

  nlohmann::json topic_word = nlohmann::json::array();
  for (uint32_t k = 0; k < K; ++k) {
    nlohmann::json row = nlohmann::json::array();
    for (uint32_t w = 0; w < V; ++w) {
      if (const int64_t n = c.topic_word[size_t{k} * V + w]) row.push_back({w, n});
    }
    topic_word.push_back(std::move(row));
  }
  nlohmann::json doc_topic = nlohmann::json::array();
  for (size_t d = 0; d < c.documents(); ++d) {
    nlohmann::json row = nlohmann::json::array();
    for (uint32_t k = 0; k < K; ++k) {
      if (const int64_t n = c.doc_topic[d * K + k]) row.push_back({k, n});
    }
    doc_topic.push_back(std::move(row));
  }

  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["hyperparameters"] = model.hyper().to_json();
  j["vocabulary_hash"] = model.vocabulary_hash();
  j["vocabulary_size"] = V;
  j["documents"] = c.documents();
  j["samples"] = c.samples;
  j["topic_totals"] = c.topic_totals;
  j["topic_word"] = std::move(topic_word);
  j["doc_topic"] = std::move(doc_topic);
  return j.dump() + "\n";
}

TopicModel parse_model(std::string_view text, std::string_view source) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (!j.is_object() || j.value("format", "") != kFormat) {
    throw DataError(fmt::format("{}: not a negtopic model artifact", source));
  }
  if (j.value("version", 0) != kVersion) throw DataError(fmt::format("{}: unsupported model version", source));
  try {
    const auto hyper = Hyperparams::from_json(j.at("hyperparameters"));
    CountSums c;
    c.topics = hyper.topics;
    c.vocab_size = j.at("vocabulary_size").get<uint32_t>();
    c.samples = j.at("samples").get<uint32_t>();
    const auto D = j.at("documents").get<size_t>();
    const uint32_t K = c.topics;
    const uint32_t V = c.vocab_size;
    c.topic_totals = j.at("topic_totals").get<std::vector<int64_t>>();
    c.topic_word.assign(size_t{K} * V, 0);
    c.doc_topic.assign(D * K, 0);
    const auto& tw = j.at("topic_word");
    if (tw.size() != K) throw DataError("topic_word has the wrong number of topics");
    for (uint32_t k = 0; k < K; ++k) {
      for (const auto& e : tw[k]) {
        const auto w = e.at(0).get<uint32_t>();
        if (w >= V) throw DataError(fmt::format("word id {} out of range", w));
        c.topic_word[size_t{k} * V + w] = e.at(1).get<int64_t>();
      }
    }
    const auto& dt = j.at("doc_topic");
    if (dt.size() != D) throw DataError("doc_topic has the wrong number of documents");
    for (size_t d = 0; d < D; ++d) {
      for (const auto& e : dt[d]) {
        const auto k = e.at(0).get<uint32_t>();
        if (k >= K) throw DataError(fmt::format("topic id {} out of range", k));
        c.doc_topic[d * K + k] = e.at(1).get<int64_t>();
      }
    }
    return TopicModel(hyper, j.at("vocabulary_hash").get<std::string>(), std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  } catch (const Error& e) {
    throw DataError(fmt::format("{}: {}", source, e.what()));
  }
}

void write_model(const std::filesystem::path& path, const TopicModel& model) {
  write_file(path, serialize_model(model));
}

TopicModel read_model(const std::filesystem::path& path) { return parse_model(read_file(path), path.string()); }

}  // namespace negtopic
