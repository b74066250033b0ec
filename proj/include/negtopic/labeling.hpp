#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "negtopic/corpus.hpp"
#include "negtopic/lda.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

inline constexpr std::string_view kUnlabeled = "Unlabeled";
inline constexpr std::string_view kNonHealth = "Non-Health";

/// Per-category seed terms. A literal matches a word exactly. A "stem*"
/// term matches a word starting with the stem, or, with contains_stem on,
/// any word containing it ("prediabetes", "#diabetes", "stopdiabetes").
class SeedLexicon {
 public:
  SeedLexicon() = default;
  SeedLexicon(std::span<const Section> categories, bool contains_stem = true);

  static SeedLexicon load(const std::filesystem::path& path, bool contains_stem = true);
  static SeedLexicon defaults(bool contains_stem = true);

  size_t size() const { return categories_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<size_t> index(std::string_view name) const;
  bool contains_stem() const { return contains_stem_; }

  bool matches(size_t category, std::string_view word) const;
  bool matches_any(std::string_view word) const;

 private:
  struct Category {
    std::set<std::string, std::less<>> literals;
    std::vector<std::string> stems;
  };
  std::vector<std::string> names_;
  std::vector<Category> categories_;
  bool contains_stem_ = true;
};

struct TopicLabel {
  std::optional<size_t> category;  // empty when Unlabeled
  std::vector<uint32_t> seed_hits;  // per lexicon category
};

/// Counts, for each category, the words matching any of its seeds. The label
/// is the unique category with hits > N/2 (N = top_words.size()).
TopicLabel label_topic(std::span<const std::string> top_words, const SeedLexicon& seeds);

enum class Placement { kMain, kSubtopic, kNonHealth };
std::string_view placement_name(Placement p);

struct TopicSummary {
  uint32_t topic = 0;
  std::vector<WordWeight> top_words;
  std::vector<std::string> words;  // strings of top_words
  std::optional<size_t> label;
  std::vector<uint32_t> seed_hits;
  std::vector<double> category_mass;  // normalized over lexicon categories; all zero when no tagged mass
  Placement placement = Placement::kNonHealth;
  std::optional<size_t> attached_to;  // category for kMain and kSubtopic
  std::string subtopic_name;
};

/// K x C matrix: entry (k, c) sums theta_dk over documents tagged with
/// category c, then each row is normalized to sum to 1 (rows with no tagged
/// mass stay zero). Throws DataError when the tag list does not cover the
/// model's documents or no document carries a tag.
Matrix category_mass(const Matrix& theta, std::span<const std::set<std::string>> doc_categories,
                     const SeedLexicon& seeds);

/// Top words, label and category mass for every topic, attachments not yet set.
std::vector<TopicSummary> summarize_topics(const TopicModel& model, const Vocabulary& vocabulary,
                                           std::span<const std::set<std::string>> doc_categories,
                                           const SeedLexicon& seeds, size_t top_n, unsigned workers = 1);

struct SubTopic {
  uint32_t topic;
  std::string name;
};

struct CategoryGroup {
  std::string category;  // a lexicon category, or Non-Health last
  std::vector<uint32_t> main_topics;
  std::vector<SubTopic> subtopics;
};

/// Labeled topics become main topics of their category. Every other topic
/// goes under the category of maximal mass (ties to the earlier category)
/// when that mass >= tau, else under Non-Health. The sub-topic name is the
/// highest-weight top word matching no seed, or the first top word when all
/// match. Throws DataError when a summary lacks category mass.
std::vector<CategoryGroup> attach_subtopics(std::vector<TopicSummary>& summaries, const SeedLexicon& seeds,
                                            double tau = 0.5);

struct Witness {
  uint32_t topic;
  std::string word;
};

struct GraphEdge {
  std::string from;
  std::string to;
  uint32_t weight = 0;  // number of supporting topics
  std::vector<Witness> witnesses;
};

struct CategoryGraph {
  std::vector<std::string> nodes;
  std::vector<GraphEdge> edges;  // ordered by (from, to) lexicon position

  nlohmann::ordered_json to_json() const;
};

/// Edge C1 -> C2 for each topic placed under C1 (main or sub-topic) whose top
/// words match a seed of C2 != C1. Non-Health topics contribute nothing.
CategoryGraph build_relationship_graph(std::span<const TopicSummary> summaries, const SeedLexicon& seeds);

nlohmann::ordered_json topics_json(std::span<const TopicSummary> summaries, const SeedLexicon& seeds, double tau);

}  // namespace negtopic
