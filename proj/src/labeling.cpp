#include "negtopic/labeling.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/resources.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

SeedLexicon::SeedLexicon(std::span<const Section> categories, bool contains_stem) : contains_stem_(contains_stem) {
  if (categories.empty()) throw ConfigError("seed lexicon has no categories");
  for (const auto& section : categories) {
    if (index(section.name)) throw ConfigError(fmt::format("seed category '{}' is declared twice", section.name));
    Category category;
    for (const auto& raw : section.terms) {
      std::string term = to_lower_ascii(trim(raw));
      if (term.empty()) continue;
      const auto star = term.find('*');
      if (star == std::string::npos) {
        category.literals.insert(std::move(term));
        continue;
      }
      if (star != term.size() - 1) {
        throw ConfigError(fmt::format("seed term '{}': '*' is only allowed at the end", term));
      }
      term.pop_back();
      if (term.empty()) throw ConfigError(fmt::format("seed category '{}' has an empty stem", section.name));
      if (std::find(category.stems.begin(), category.stems.end(), term) == category.stems.end()) {
        category.stems.push_back(std::move(term));
      }
    }
    if (category.literals.empty() && category.stems.empty()) {
      throw ConfigError(fmt::format("seed category '{}' has no terms", section.name));
    }
    names_.push_back(section.name);
    categories_.push_back(std::move(category));
  }
}

SeedLexicon SeedLexicon::load(const std::filesystem::path& path, bool contains_stem) {
  const auto sections = parse_sections(read_file(path), path.string());
  return SeedLexicon(sections, contains_stem);
}

SeedLexicon SeedLexicon::defaults(bool contains_stem) {
  const auto sections = parse_sections(resources::kSeedLexicon, "<built-in seeds>");
  return SeedLexicon(sections, contains_stem);
}

std::optional<size_t> SeedLexicon::index(std::string_view name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<size_t>(it - names_.begin());
}

bool SeedLexicon::matches(size_t category, std::string_view word) const {
  const auto& c = categories_.at(category);
  if (c.literals.contains(word)) return true;
  for (const auto& stem : c.stems) {
    if (contains_stem_ ? word.find(stem) != std::string_view::npos : word.starts_with(stem)) return true;
  }
  return false;
}

bool SeedLexicon::matches_any(std::string_view word) const {
  for (size_t c = 0; c < categories_.size(); ++c) {
    if (matches(c, word)) return true;
  }
  return false;
}

TopicLabel label_topic(std::span<const std::string> top_words, const SeedLexicon& seeds) {
  TopicLabel out;
  out.seed_hits.assign(seeds.size(), 0);
  for (const auto& word : top_words) {
    for (size_t c = 0; c < seeds.size(); ++c) {
      if (seeds.matches(c, word)) ++out.seed_hits[c];
    }
  }
  const size_t n = top_words.size();
  size_t winners = 0;
  for (size_t c = 0; c < seeds.size(); ++c) {
    if (2 * size_t{out.seed_hits[c]} > n) {
      ++winners;
      out.category = c;
    }
  }
  if (winners != 1) out.category.reset();
  return out;
}

std::string_view placement_name(Placement p) {
  switch (p) {
    case Placement::kMain:
      return "main";
    case Placement::kSubtopic:
      return "subtopic";
    case Placement::kNonHealth:
      return "non-health";
  }
  return "?";
}

Matrix category_mass(const Matrix& theta, std::span<const std::set<std::string>> doc_categories,
                     const SeedLexicon& seeds) {
  if (doc_categories.size() != theta.rows()) {
    throw DataError(fmt::format("category tags cover {} documents but the model has {}", doc_categories.size(),
                                theta.rows()));
  }
  const size_t K = theta.cols();
  const size_t C = seeds.size();
  Matrix mass(K, C);
  bool any_tag = false;
  for (size_t d = 0; d < theta.rows(); ++d) {
    for (const auto& name : doc_categories[d]) {
      const auto c = seeds.index(name);
      if (!c) continue;
      any_tag = true;
      for (size_t k = 0; k < K; ++k) mass(k, *c) += theta(d, k);
    }
  }
  if (!any_tag) throw DataError("no training document carries a category tag matching the seed lexicon");
  for (size_t k = 0; k < K; ++k) {
    double total = 0.0;
    for (size_t c = 0; c < C; ++c) total += mass(k, c);
    if (total > 0.0) {
      for (size_t c = 0; c < C; ++c) mass(k, c) /= total;
    }
  }
  return mass;
}

std::vector<TopicSummary> summarize_topics(const TopicModel& model, const Vocabulary& vocabulary,
                                           std::span<const std::set<std::string>> doc_categories,
                                           const SeedLexicon& seeds, size_t top_n, unsigned workers) {
  if (top_n < 1) throw ConfigError("top_n must be >= 1");
  if (vocabulary.hash() != model.vocabulary_hash()) {
    throw DataError("vocabulary does not match the one the model was trained on");
  }
  const Matrix mass = category_mass(model.theta(), doc_categories, seeds);
  std::vector<TopicSummary> out(model.topics());
  parallel_for(out.size(), workers, [&](size_t begin, size_t end) {
    for (size_t k = begin; k < end; ++k) {
      auto& s = out[k];
      s.topic = static_cast<uint32_t>(k);
      s.top_words = top_words(model, s.topic, top_n);
      for (const auto& ww : s.top_words) s.words.push_back(vocabulary.word(ww.word));
      auto label = label_topic(s.words, seeds);
      s.label = label.category;
      s.seed_hits = std::move(label.seed_hits);
      const auto row = mass.row(k);
      s.category_mass.assign(row.begin(), row.end());
    }
  });
  return out;
}

std::vector<CategoryGroup> attach_subtopics(std::vector<TopicSummary>& summaries, const SeedLexicon& seeds,
                                            double tau) {
  std::vector<CategoryGroup> groups(seeds.size() + 1);
  for (size_t c = 0; c < seeds.size(); ++c) groups[c].category = seeds.names()[c];
  groups.back().category = std::string(kNonHealth);

  for (auto& s : summaries) {
    if (s.category_mass.size() != seeds.size()) {
      throw DataError(fmt::format("topic {} has no category mass; tag documents before labeling", s.topic));
    }
    s.subtopic_name.clear();
    for (const auto& w : s.words) {
      if (!seeds.matches_any(w)) {
        s.subtopic_name = w;
        break;
      }
    }
    if (s.subtopic_name.empty() && !s.words.empty()) s.subtopic_name = s.words.front();

    if (s.label) {
      s.placement = Placement::kMain;
      s.attached_to = s.label;
      groups[*s.label].main_topics.push_back(s.topic);
      continue;
    }
    size_t best = 0;
    for (size_t c = 1; c < s.category_mass.size(); ++c) {
      if (s.category_mass[c] > s.category_mass[best]) best = c;
    }
    if (!s.category_mass.empty() && s.category_mass[best] > 0.0 && s.category_mass[best] >= tau) {
      s.placement = Placement::kSubtopic;
      s.attached_to = best;
      groups[best].subtopics.push_back({s.topic, s.subtopic_name});
    } else {
      s.placement = Placement::kNonHealth;
      s.attached_to.reset();
      groups.back().subtopics.push_back({s.topic, s.subtopic_name});
    }
  }
  return groups;
}

CategoryGraph build_relationship_graph(std::span<const TopicSummary> summaries, const SeedLexicon& seeds) {
  const size_t C = seeds.size();
  std::vector<GraphEdge> table(C * C);
  for (const auto& s : summaries) {
    if (s.placement == Placement::kNonHealth || !s.attached_to) continue;
    const size_t from = *s.attached_to;
    for (size_t to = 0; to < C; ++to) {
      if (to == from) continue;
      auto& edge = table[from * C + to];
      bool supported = false;
      for (const auto& w : s.words) {
        if (seeds.matches(to, w)) {
          edge.witnesses.push_back({s.topic, w});
          supported = true;
        }
      }
      if (supported) ++edge.weight;
    }
  }
  CategoryGraph graph;
  graph.nodes = seeds.names();
  for (size_t from = 0; from < C; ++from) {
    for (size_t to = 0; to < C; ++to) {
      auto& edge = table[from * C + to];
      if (edge.weight == 0) continue;
      edge.from = seeds.names()[from];
      edge.to = seeds.names()[to];
      std::sort(edge.witnesses.begin(), edge.witnesses.end(), [](const Witness& a, const Witness& b) {
        return a.topic != b.topic ? a.topic < b.topic : a.word < b.word;
      });
      graph.edges.push_back(std::move(edge));
    }
  }
  return graph;
}

nlohmann::ordered_json CategoryGraph::to_json() const {
  nlohmann::ordered_json j;
  j["format"] = "negtopic.graph";
  j["version"] = 1;
  j["nodes"] = nodes;
  auto edges_json = nlohmann::ordered_json::array();
  for (const auto& e : edges) {
    auto witnesses = nlohmann::ordered_json::array();
    for (const auto& w : e.witnesses) witnesses.push_back({{"topic", w.topic}, {"word", w.word}});
    edges_json.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}, {"witnesses", witnesses}});
  }
  j["edges"] = edges_json;
  return j;
}

nlohmann::ordered_json topics_json(std::span<const TopicSummary> summaries, const SeedLexicon& seeds, double tau) {
  nlohmann::ordered_json j;
  j["format"] = "negtopic.topics";
  j["version"] = 1;
  j["categories"] = seeds.names();
  j["tau"] = tau;
  j["contains_stem"] = seeds.contains_stem();
  auto topics = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    nlohmann::ordered_json t;
    t["id"] = s.topic;
    t["label"] = s.label ? seeds.names()[*s.label] : std::string(kUnlabeled);
    t["placement"] = placement_name(s.placement);
    t["attached_to"] = s.attached_to ? seeds.names()[*s.attached_to] : std::string(kNonHealth);
    t["subtopic_name"] = s.subtopic_name;
    auto words = nlohmann::ordered_json::array();
    for (size_t i = 0; i < s.top_words.size(); ++i) {
      words.push_back({{"word", s.words[i]}, {"id", s.top_words[i].word}, {"weight", s.top_words[i].weight}});
    }
    t["top_words"] = words;
    nlohmann::ordered_json hits = nlohmann::ordered_json::object();
    nlohmann::ordered_json mass = nlohmann::ordered_json::object();
    for (size_t c = 0; c < seeds.size(); ++c) {
      hits[seeds.names()[c]] = s.seed_hits.at(c);
      mass[seeds.names()[c]] = s.category_mass.at(c);
    }
    t["seed_hits"] = hits;
    t["category_mass"] = mass;
    topics.push_back(std::move(t));
  }
  j["topics"] = topics;
  return j;
}

}  // namespace negtopic
