#pragma once

#include <filesystem>
#include <string>

#include "negtopic/corpus.hpp"

namespace negtopic {

/// Tokenized-corpus artifact, JSON lines:
///   1. header  {"format":"negtopic.corpus","version":1,"vocabulary_hash":..,
///               "vocabulary_size":V,"documents":D,"tokens":N}
///   2. V lines ["word", frequency] in id order
///   3. D lines {"id":..,"categories":[..],"tokens":[ids]}
std::string serialize_corpus(const Corpus& corpus);
Corpus parse_corpus(std::string_view text, std::string_view source);

void write_corpus(const std::filesystem::path& path, const Corpus& corpus);
Corpus read_corpus(const std::filesystem::path& path);

}  // namespace negtopic
