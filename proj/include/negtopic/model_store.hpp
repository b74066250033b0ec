#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "negtopic/lda.hpp"

namespace negtopic {

/// Model artifact (JSON): hyperparameters (seed included), vocabulary hash,
/// averaged-sample count, and the summed count arrays in sparse form:
///   topic_word: per topic [[word, count], ...] for non-zero counts
///   doc_topic:  per document [[topic, count], ...]
/// phi and theta are recomputed from these exactly on load.
std::string serialize_model(const TopicModel& model);
TopicModel parse_model(std::string_view text, std::string_view source);

void write_model(const std::filesystem::path& path, const TopicModel& model);
TopicModel read_model(const std::filesystem::path& path);

}  // namespace negtopic
