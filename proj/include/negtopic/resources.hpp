#pragma once

#include <string_view>

// Built-in copies of the files under data/, used when a path is not configured.
namespace negtopic::resources {

extern const std::string_view kStopWords;
extern const std::string_view kPositiveLexicon;
extern const std::string_view kNegativeLexicon;
extern const std::string_view kQuerySet;
extern const std::string_view kSeedLexicon;

}  // namespace negtopic::resources
