#include "negtopic/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "negtopic/corpus_store.hpp"
#include "negtopic/error.hpp"
#include "negtopic/kernels.hpp"
#include "negtopic/labeling.hpp"
#include "negtopic/model_selection.hpp"
#include "negtopic/model_store.hpp"
#include "negtopic/random.hpp"
#include "negtopic/resources.hpp"
#include "negtopic/sentiment.hpp"
#include "negtopic/util.hpp"

namespace negtopic {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Configuration

void SimulateConfig::validate() const {
  if (documents < 1) throw ConfigError("simulate.documents must be >= 1");
  if (topics < 1) throw ConfigError("simulate.topics must be >= 1");
  if (vocab_size < 2) throw ConfigError("simulate.vocab_size must be >= 2");
  if (!(mean_length > 0.0)) throw ConfigError("simulate.mean_length must be > 0");
  if (!(alpha_sum > 0.0)) throw ConfigError("simulate.alpha_sum must be > 0");
  if (!(concentration > 0.0)) throw ConfigError("simulate.concentration must be > 0");
  if (!(negative_fraction >= 0.0 && negative_fraction <= 1.0)) {
    throw ConfigError("simulate.negative_fraction must lie in [0, 1]");
  }
}

void PipelineConfig::validate() const {
  for (const auto* p : {&stopwords, &positive_lexicon, &negative_lexicon, &queries, &seeds}) {
    if (*p && !fs::exists(**p)) throw ConfigError(fmt::format("file not found: {}", (*p)->string()));
  }
  tokenizer.validate();
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  if (!(hyper.alpha_sum > 0.0)) throw ConfigError("alpha_sum must be > 0");
  if (!(hyper.beta > 0.0)) throw ConfigError("beta must be > 0");
  if (hyper.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (hyper.samples < 1 || hyper.thinning < 1) throw ConfigError("samples and thinning must be >= 1");
  if (uint64_t{hyper.samples - 1} * hyper.thinning >= hyper.iterations) {
    throw ConfigError("averaged samples reach back past the first iteration");
  }
  if (k_grid.empty()) throw ConfigError("k_grid is empty");
  for (size_t i = 0; i < k_grid.size(); ++i) {
    if (k_grid[i] < 1) throw ConfigError("k_grid values must be >= 1");
    if (i > 0 && k_grid[i] <= k_grid[i - 1]) throw ConfigError("k_grid must be strictly ascending");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0, 1)");
  if (particles < 1) throw ConfigError("particles must be >= 1");
  if (top_n < 1) throw ConfigError("top_n must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  simulate.validate();
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::optional<fs::path> optional_path(const nlohmann::json& v, const fs::path& base) {
  if (v.is_null()) return std::nullopt;
  return resolve(base, v.get<std::string>());
}

ojson path_json(const std::optional<fs::path>& p) { return p ? ojson(p->string()) : ojson(nullptr); }

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const fs::path& base_dir, PipelineConfig c) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "inputs") {
        c.inputs.clear();
        for (const auto& p : v) c.inputs.push_back(resolve(base_dir, p.get<std::string>()));
      } else if (key == "out_dir") {
        c.out_dir = resolve(base_dir, v.get<std::string>());
      } else if (key == "stopwords") {
        c.stopwords = optional_path(v, base_dir);
      } else if (key == "positive_lexicon") {
        c.positive_lexicon = optional_path(v, base_dir);
      } else if (key == "negative_lexicon") {
        c.negative_lexicon = optional_path(v, base_dir);
      } else if (key == "queries") {
        c.queries = optional_path(v, base_dir);
      } else if (key == "seeds") {
        c.seeds = optional_path(v, base_dir);
      } else if (key == "lang") {
        c.lang = v.get<std::string>();
      } else if (key == "tokenizer") {
        c.tokenizer = TokenizerRules::from_json(v, c.tokenizer);
      } else if (key == "min_count") {
        c.min_count = v.get<uint64_t>();
      } else if (key == "lda") {
        for (const auto& [k, x] : v.items()) {
          if (k == "topics") {
            c.hyper.topics = x.get<uint32_t>();
          } else if (k == "alpha_sum") {
            c.hyper.alpha_sum = x.get<double>();
          } else if (k == "beta") {
            c.hyper.beta = x.get<double>();
          } else if (k == "iterations") {
            c.hyper.iterations = x.get<uint32_t>();
          } else if (k == "samples") {
            c.hyper.samples = x.get<uint32_t>();
          } else if (k == "thinning") {
            c.hyper.thinning = x.get<uint32_t>();
          } else {
            throw ConfigError(fmt::format("unknown lda setting '{}'", k));
          }
        }
      } else if (key == "k_grid") {
        c.k_grid = v.get<std::vector<uint32_t>>();
      } else if (key == "train_fraction") {
        c.train_fraction = v.get<double>();
      } else if (key == "particles") {
        c.particles = v.get<uint32_t>();
      } else if (key == "top_n") {
        c.top_n = v.get<size_t>();
      } else if (key == "tau") {
        c.tau = v.get<double>();
      } else if (key == "contains_stem") {
        c.contains_stem = v.get<bool>();
      } else if (key == "seed") {
        c.seed = v.get<uint64_t>();
      } else if (key == "workers") {
        c.workers = v.get<unsigned>();
      } else if (key == "simulate") {
        auto& s = c.simulate;
        for (const auto& [k, x] : v.items()) {
          if (k == "documents") {
            s.documents = x.get<uint32_t>();
          } else if (k == "topics") {
            s.topics = x.get<uint32_t>();
          } else if (k == "vocab_size") {
            s.vocab_size = x.get<uint32_t>();
          } else if (k == "mean_length") {
            s.mean_length = x.get<double>();
          } else if (k == "alpha_sum") {
            s.alpha_sum = x.get<double>();
          } else if (k == "concentration") {
            s.concentration = x.get<double>();
          } else if (k == "negative_fraction") {
            s.negative_fraction = x.get<double>();
          } else {
            throw ConfigError(fmt::format("unknown simulate setting '{}'", k));
          }
        }
      } else {
        throw ConfigError(fmt::format("unknown configuration key '{}'", key));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("invalid configuration value: {}", e.what()));
  }
  return c;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  return from_json(j, base_dir, PipelineConfig());
}

PipelineConfig PipelineConfig::load(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return from_json(j, path.parent_path());
}

ojson PipelineConfig::to_json() const {
  ojson j;
  auto in = ojson::array();
  for (const auto& p : inputs) in.push_back(p.string());
  j["inputs"] = in;
  j["out_dir"] = out_dir.string();
  j["stopwords"] = path_json(stopwords);
  j["positive_lexicon"] = path_json(positive_lexicon);
  j["negative_lexicon"] = path_json(negative_lexicon);
  j["queries"] = path_json(queries);
  j["seeds"] = path_json(seeds);
  j["lang"] = lang;
  j["tokenizer"] = tokenizer.to_json();
  j["min_count"] = min_count;
  j["lda"] = {{"topics", hyper.topics},         {"alpha_sum", hyper.alpha_sum}, {"beta", hyper.beta},
              {"iterations", hyper.iterations}, {"samples", hyper.samples},     {"thinning", hyper.thinning}};
  j["k_grid"] = k_grid;
  j["train_fraction"] = train_fraction;
  j["particles"] = particles;
  j["top_n"] = top_n;
  j["tau"] = tau;
  j["contains_stem"] = contains_stem;
  j["seed"] = seed;
  j["workers"] = workers;
  j["simulate"] = {{"documents", simulate.documents},
                   {"topics", simulate.topics},
                   {"vocab_size", simulate.vocab_size},
                   {"mean_length", simulate.mean_length},
                   {"alpha_sum", simulate.alpha_sum},
                   {"concentration", simulate.concentration},
                   {"negative_fraction", simulate.negative_fraction}};
  return j;
}

// ---------------------------------------------------------------------------
// Shared stage plumbing

namespace {

using Clock = std::chrono::steady_clock;

fs::path artifact(const PipelineConfig& c, std::string_view name) { return c.out_dir / std::string(name); }

fs::path require(const PipelineConfig& c, std::string_view name, std::string_view stage) {
  auto p = artifact(c, name);
  if (!fs::exists(p)) {
    throw DataError(fmt::format("missing {} (produced by '{}'); run that stage first", p.string(), stage));
  }
  return p;
}

void write_json(const fs::path& path, const ojson& j) { write_file(path, j.dump(2) + "\n"); }

StopWordList load_stopwords(const PipelineConfig& c) {
  return c.stopwords ? StopWordList::load(*c.stopwords) : StopWordList::defaults();
}

QuerySet load_queries(const PipelineConfig& c) { return c.queries ? QuerySet::load(*c.queries) : QuerySet::defaults(); }

SentimentLexicon load_lexicon(const PipelineConfig& c) {
  if (!c.positive_lexicon && !c.negative_lexicon) return SentimentLexicon::defaults();
  const auto positive = c.positive_lexicon ? read_word_list(*c.positive_lexicon)
                                           : parse_word_list(resources::kPositiveLexicon);
  const auto negative = c.negative_lexicon ? read_word_list(*c.negative_lexicon)
                                           : parse_word_list(resources::kNegativeLexicon);
  if (negative.empty()) throw ConfigError("negative lexicon has no terms");
  return SentimentLexicon(positive, negative);
}

SeedLexicon load_seeds(const PipelineConfig& c) {
  return c.seeds ? SeedLexicon::load(*c.seeds, c.contains_stem) : SeedLexicon::defaults(c.contains_stem);
}

std::string resource_id(const std::optional<fs::path>& p) { return p ? sha256_file(*p) : std::string("built-in"); }

// Configuration as it affects artifact contents: no paths, no worker count.
ojson content_config(const PipelineConfig& c) {
  ojson j = c.to_json();
  j.erase("inputs");
  j.erase("out_dir");
  j.erase("workers");
  j["stopwords"] = resource_id(c.stopwords);
  j["positive_lexicon"] = resource_id(c.positive_lexicon);
  j["negative_lexicon"] = resource_id(c.negative_lexicon);
  j["queries"] = resource_id(c.queries);
  j["seeds"] = resource_id(c.seeds);
  return j;
}

void record_stage(const PipelineConfig& c, std::string_view stage, const std::vector<fs::path>& inputs,
                  const StageResult& result, double seconds) {
  const auto path = artifact(c, artifacts::kManifest);
  ojson m = ojson::object();
  if (fs::exists(path)) {
    try {
      m = ojson::parse(read_file(path));
    } catch (const nlohmann::json::exception&) {
      m = ojson::object();
    }
  }
  m["tool"] = "negtopic";
  m["version"] = kVersion;
  m["kernels"] = kernels::isa_name(kernels::active().isa);
  m["stage_order"] = "tokenize, stop words, query tags, sentiment filter, vocabulary pruning";
  m["config"] = c.to_json();
  m["resources"] = content_config(c);
  ojson in = ojson::object();
  for (const auto& p : inputs) in[p.string()] = sha256_file(p);
  ojson out = ojson::object();
  for (const auto& p : result.outputs) out[p.string()] = sha256_file(p);
  m["stages"][std::string(stage)] = {{"inputs", in}, {"outputs", out}, {"seconds", seconds}, {"stats", result.stats}};
  if (stage == "select-k") m["selected_k"] = result.stats.at("best_k");
  write_json(path, m);
}

template <typename Fn>
StageResult run_stage(const PipelineConfig& c, std::string_view stage, Fn&& body) {
  c.validate();
  fs::create_directories(c.out_dir);
  const auto start = Clock::now();
  std::vector<fs::path> inputs;
  StageResult result = body(inputs);
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  record_stage(c, stage, inputs, result, seconds);
  return result;
}

unsigned workers_of(const PipelineConfig& c) { return resolve_workers(c.workers); }

}  // namespace

// ---------------------------------------------------------------------------
// Stages

StageResult run_ingest(const PipelineConfig& config) {
  return run_stage(config, "ingest", [&](std::vector<fs::path>& inputs) {
    if (config.inputs.empty()) throw ConfigError("no input files given");
    inputs = config.inputs;
    const auto ingested = ingest(config.inputs, config.lang);
    if (ingested.documents.empty()) throw DataError("input contains no documents");

    const QuerySet queries = load_queries(config);
    const Cleaner cleaner{config.tokenizer, load_stopwords(config), queries.normalized(config.tokenizer)};
    const auto words = clean_documents(ingested.documents, cleaner, workers_of(config));
    const auto build = build_vocabulary(words, 1);
    const auto out = artifact(config, artifacts::kCorpus);
    write_corpus(out, build.corpus);

    ojson categories = ojson::object();
    for (const auto& name : queries.names()) categories[name] = 0;
    for (const auto& d : build.corpus.documents) {
      for (const auto& name : d.categories) categories[name] = categories[name].get<size_t>() + 1;
    }
    StageResult r;
    r.stats = {{"lines", ingested.lines},
               {"malformed", ingested.malformed},
               {"skipped_lang", ingested.skipped_lang},
               {"duplicates", ingested.duplicates},
               {"records", ingested.documents.size()},
               {"dropped_empty", build.dropped_documents},
               {"documents", build.corpus.documents.size()},
               {"tokens", build.corpus.token_count()},
               {"vocabulary_size", build.corpus.vocabulary.size()},
               {"categories", categories}};
    const auto stats_path = artifact(config, artifacts::kIngestStats);
    write_json(stats_path, r.stats);
    r.outputs = {out, stats_path};
    return r;
  });
}

StageResult run_sentiment(const PipelineConfig& config) {
  return run_stage(config, "sentiment", [&](std::vector<fs::path>& inputs) {
    const auto in = require(config, artifacts::kCorpus, "ingest");
    inputs = {in};
    const Corpus corpus = read_corpus(in);
    const auto filtered = filter_negative(corpus, load_lexicon(config), workers_of(config));
    if (filtered.negative.documents.empty()) throw DataError("no document was classified negative");

    const auto words = filtered.negative.to_words();
    const auto build = build_vocabulary(words, config.min_count);
    const auto out = artifact(config, artifacts::kNegativeCorpus);
    write_corpus(out, build.corpus);

    StageResult r;
    r.stats = filtered.stats.to_json();
    r.stats["min_count"] = config.min_count;
    r.stats["pruned_tokens"] = build.pruned_tokens;
    r.stats["dropped_empty"] = build.dropped_documents;
    r.stats["documents"] = build.corpus.documents.size();
    r.stats["tokens"] = build.corpus.token_count();
    r.stats["vocabulary_size"] = build.corpus.vocabulary.size();
    const auto stats_path = artifact(config, artifacts::kSentimentStats);
    write_json(stats_path, r.stats);
    r.outputs = {out, stats_path};
    return r;
  });
}

StageResult run_select_k(const PipelineConfig& config) {
  return run_stage(config, "select-k", [&](std::vector<fs::path>& inputs) {
    const auto in = require(config, artifacts::kNegativeCorpus, "sentiment");
    inputs = {in};
    const Corpus corpus = read_corpus(in);
    Hyperparams hyper = config.hyper;
    hyper.seed = derive_seed(config.seed, kTrainSeedLabel);
    const SplitSpec split{config.train_fraction, derive_seed(config.seed, kSplitSeedLabel)};
    const EvalConfig eval{config.particles, derive_seed(config.seed, kEvalSeedLabel)};
    const Selection sel = select_k(corpus, config.k_grid, hyper, split, eval, workers_of(config));

    const auto curve_path = artifact(config, artifacts::kCurve);
    write_file(curve_path, curve_csv(sel.curve));
    auto curve = ojson::array();
    for (const auto& e : sel.curve) {
      curve.push_back({{"k", e.topics},
                       {"heldout_ll", e.heldout_ll},
                       {"per_token_ll", e.per_token_ll},
                       {"test_tokens", e.test_tokens},
                       {"oov_dropped", e.oov_dropped}});
    }
    StageResult r;
    r.stats = {{"best_k", sel.best_topics},
               {"partition_hash", sel.partition_hash},
               {"k_grid", config.k_grid},
               {"train_fraction", config.train_fraction},
               {"particles", config.particles},
               {"curve", curve}};
    const auto sel_path = artifact(config, artifacts::kSelection);
    write_json(sel_path, r.stats);
    r.outputs = {curve_path, sel_path};
    return r;
  });
}

StageResult run_train(const PipelineConfig& config) {
  return run_stage(config, "train", [&](std::vector<fs::path>& inputs) {
    const auto in = require(config, artifacts::kNegativeCorpus, "sentiment");
    inputs = {in};
    Hyperparams hyper = config.hyper;
    if (hyper.topics == 0) {
      const auto sel_path = require(config, artifacts::kSelection, "select-k");
      inputs.push_back(sel_path);
      try {
        hyper.topics = nlohmann::json::parse(read_file(sel_path)).at("best_k").get<uint32_t>();
      } catch (const nlohmann::json::exception& e) {
        throw DataError(fmt::format("{}: {}", sel_path.string(), e.what()));
      }
    }
    hyper.seed = derive_seed(config.seed, kTrainSeedLabel);
    const Corpus corpus = read_corpus(in);
    const DocumentSet docs(corpus.documents, corpus.vocabulary.size());
    const TopicModel model = train(docs, hyper, corpus.vocabulary.hash());
    const auto out = artifact(config, artifacts::kModel);
    write_model(out, model);

    StageResult r;
    r.stats = {{"topics", hyper.topics}, {"documents", docs.size()}, {"tokens", docs.total_tokens()}};
    r.outputs = {out};
    return r;
  });
}

namespace {

std::string pad(std::string_view s, size_t width) {
  std::string out(s);
  if (out.size() < width) out.append(width - out.size(), ' ');
  return out;
}

std::string render_report(const PipelineConfig& config, const Corpus& corpus, const TopicModel& model,
                          std::span<const TopicSummary> summaries, std::span<const CategoryGroup> groups,
                          const CategoryGraph& graph, const SeedLexicon& seeds, const std::optional<std::string>& curve,
                          const ojson& run) {
  std::string out;
  auto line = [&out](std::string_view s = {}) {
    out += s;
    out += '\n';
  };
  auto heading = [&](std::string_view title) {
    line();
    line(title);
    line(std::string(title.size(), '-'));
  };

  line("Negative topic report");
  line("=====================");
  line();
  line(fmt::format("Documents: {}", corpus.documents.size()));
  line(fmt::format("Tokens: {}", corpus.token_count()));
  line(fmt::format("Vocabulary: {} words ({})", corpus.vocabulary.size(), corpus.vocabulary.hash()));
  const auto& h = model.hyper();
  line(fmt::format("Model: K={} alpha_sum={} beta={} iterations={} samples={} thinning={}", h.topics, h.alpha_sum,
                   h.beta, h.iterations, h.samples, h.thinning));
  line(fmt::format("Labeling: top {} words, tau={}, contains-stem {}", config.top_n, config.tau,
                   seeds.contains_stem() ? "on" : "off"));

  heading("Topics and sub-topics");
  for (const auto& g : groups) {
    line(g.category);
    for (uint32_t t : g.main_topics) {
      line(fmt::format("  main topic {}: {}", t, fmt::join(summaries[t].words.begin(),
                                                          summaries[t].words.begin() +
                                                              static_cast<std::ptrdiff_t>(
                                                                  std::min<size_t>(5, summaries[t].words.size())),
                                                          ", ")));
    }
    for (const auto& s : g.subtopics) line(fmt::format("  sub-topic {} (topic {})", s.name, s.topic));
    if (g.main_topics.empty() && g.subtopics.empty()) line("  (none)");
  }

  heading("Category relationships");
  if (graph.edges.empty()) line("(no cross-category topics)");
  for (const auto& e : graph.edges) {
    std::vector<std::string> w;
    for (const auto& x : e.witnesses) w.push_back(fmt::format("{}:{}", x.topic, x.word));
    line(fmt::format("{} -> {}  weight {}  [{}]", e.from, e.to, e.weight, fmt::join(w, ", ")));
  }

  heading("Topic words");
  for (const auto& s : summaries) {
    const std::string where = s.attached_to ? seeds.names()[*s.attached_to] : std::string(kNonHealth);
    line(fmt::format("Topic {} [{}; {} under {}; name {}]", s.topic,
                     s.label ? seeds.names()[*s.label] : std::string(kUnlabeled), placement_name(s.placement), where,
                     s.subtopic_name));
    for (size_t i = 0; i < s.top_words.size(); ++i) {
      line(fmt::format("  {:>3}  {} {:.6f}", i + 1, pad(s.words[i], 24), s.top_words[i].weight));
    }
  }

  heading("Model selection");
  if (curve) {
    out += *curve;
  } else {
    line("(select-k not run)");
  }

  heading("Run");
  out += run.dump(2);
  line();
  return out;
}

}  // namespace

StageResult run_report(const PipelineConfig& config) {
  return run_stage(config, "report", [&](std::vector<fs::path>& inputs) {
    const auto corpus_path = require(config, artifacts::kNegativeCorpus, "sentiment");
    const auto model_path = require(config, artifacts::kModel, "train");
    inputs = {corpus_path, model_path};
    const Corpus corpus = read_corpus(corpus_path);
    const TopicModel model = read_model(model_path);
    if (model.vocabulary_hash() != corpus.vocabulary.hash() || model.documents() != corpus.documents.size()) {
      throw DataError("model.json was trained on a different corpus; rerun 'train'");
    }
    std::optional<std::string> curve;
    const auto curve_path = artifact(config, artifacts::kCurve);
    if (fs::exists(curve_path)) {
      inputs.push_back(curve_path);
      curve = read_file(curve_path);
    }

    const SeedLexicon seeds = load_seeds(config);
    std::vector<std::set<std::string>> tags;
    tags.reserve(corpus.documents.size());
    for (const auto& d : corpus.documents) tags.push_back(d.categories);
    auto summaries = summarize_topics(model, corpus.vocabulary, tags, seeds, config.top_n, workers_of(config));
    const auto groups = attach_subtopics(summaries, seeds, config.tau);
    const auto graph = build_relationship_graph(summaries, seeds);

    ojson topics = topics_json(summaries, seeds, config.tau);
    topics["top_n"] = config.top_n;
    topics["vocabulary_hash"] = model.vocabulary_hash();
    const auto topics_path = artifact(config, artifacts::kTopics);
    write_json(topics_path, topics);
    const auto graph_path = artifact(config, artifacts::kGraph);
    write_json(graph_path, graph.to_json());

    std::string csv = "topic,rank,word,word_id,weight\n";
    for (const auto& s : summaries) {
      for (size_t i = 0; i < s.top_words.size(); ++i) {
        csv += fmt::format("{},{},{},{},{:.17g}\n", s.topic, i + 1, s.words[i], s.top_words[i].word,
                           s.top_words[i].weight);
      }
    }
    const auto csv_path = artifact(config, artifacts::kTopicWords);
    write_file(csv_path, csv);

    ojson run;
    run["tool"] = fmt::format("negtopic {}", kVersion);
    run["config"] = content_config(config);
    ojson hashes = ojson::object();
    for (const auto& p : inputs) hashes[p.filename().string()] = sha256_file(p);
    run["artifacts"] = hashes;
    const auto report_path = artifact(config, artifacts::kReport);
    write_file(report_path, render_report(config, corpus, model, summaries, groups, graph, seeds, curve, run));

    StageResult r;
    size_t main = 0, sub = 0, other = 0;
    for (const auto& s : summaries) {
      (s.placement == Placement::kMain ? main : s.placement == Placement::kSubtopic ? sub : other) += 1;
    }
    r.stats = {{"topics", summaries.size()},
               {"main", main},
               {"subtopics", sub},
               {"non_health", other},
               {"edges", graph.edges.size()}};
    r.outputs = {topics_path, graph_path, csv_path, report_path};
    return r;
  });
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Vowel-free pseudo-words: no lexicon stem, stop word or seed can match them.
std::vector<std::string> synthetic_words(uint32_t count, const SentimentLexicon& lexicon, const StopWordList& stop,
                                         const SeedLexicon& seeds) {
  static constexpr std::string_view kLetters = "bcdfghjklmnpqrstvwxz";
  std::vector<std::string> out;
  for (char a : kLetters) {
    for (char b : kLetters) {
      for (char c : kLetters) {
        std::string w = {'q', 'x', a, b, c};
        if (lexicon.classify(w) != TermMatch::kNone || stop.contains(w) || seeds.matches_any(w)) continue;
        out.push_back(std::move(w));
        if (out.size() == count) return out;
      }
    }
  }
  throw ConfigError(fmt::format("simulate.vocab_size {} exceeds the {} available synthetic words", count, out.size()));
}

}  // namespace

StageResult run_simulate(const PipelineConfig& config) {
  return run_stage(config, "simulate", [&](std::vector<fs::path>&) {
    const auto& sc = config.simulate;
    const uint64_t seed = derive_seed(config.seed, kSimulateSeedLabel);
    const SentimentLexicon lexicon = load_lexicon(config);
    const StopWordList stop = load_stopwords(config);
    const SeedLexicon seeds = load_seeds(config);
    const QuerySet queries = load_queries(config);

    const auto vocab = synthetic_words(sc.vocab_size, lexicon, stop, seeds);
    // Negative words that survive cleaning unchanged and match only the negative list.
    std::vector<std::string> negative_words;
    for (const auto& w : lexicon.negative().literals()) {
      const auto tokens = tokenize(w, config.tokenizer);
      if (tokens.size() == 1 && tokens[0] == w && !stop.contains(w) && !seeds.matches_any(w) &&
          lexicon.classify(w) == TermMatch::kNegative) {
        negative_words.push_back(w);
      }
    }
    std::sort(negative_words.begin(), negative_words.end());
    if (sc.negative_fraction > 0.0 && negative_words.empty()) {
      throw ConfigError("negative lexicon has no literal word usable for planting");
    }
    std::vector<std::string> category_terms;
    for (const auto& cat : queries.categories()) {
      if (cat.terms.empty()) throw ConfigError(fmt::format("query category '{}' has no terms", cat.name));
      std::string term = cat.terms.back();
      for (const auto& t : cat.terms) {
        if (!t.starts_with('#')) {
          term = t;
          break;
        }
      }
      category_terms.push_back(term);
    }
    const auto names = queries.names();

    const Matrix phi = random_topics(sc.topics, sc.vocab_size, sc.concentration, derive_seed(seed, "topics"));
    const std::vector<double> alpha(sc.topics, sc.alpha_sum / sc.topics);
    const auto corpus = generate_corpus(phi, alpha, sc.documents, sc.mean_length, derive_seed(seed, "corpus"));
    Rng plant(derive_seed(seed, "plant"));

    std::string jsonl;
    ojson docs_truth = ojson::array();
    size_t planted = 0;
    for (size_t d = 0; d < corpus.documents.size(); ++d) {
      const auto theta = corpus.theta.row(d);
      const auto dominant = static_cast<size_t>(std::max_element(theta.begin(), theta.end()) - theta.begin());
      const size_t category = dominant % names.size();
      std::string text;
      for (uint32_t w : corpus.documents[d]) {
        if (!text.empty()) text += ' ';
        text += vocab[w];
      }
      const bool negative = plant.uniform() < sc.negative_fraction;
      if (negative) {
        text += ' ';
        text += negative_words[plant.below(negative_words.size())];
        ++planted;
      }
      text += ' ';
      text += category_terms[category];
      const std::string id = fmt::format("sim-{:06d}", d);
      jsonl += ojson{{"id", id}, {"text", text}, {"lang", "en"}}.dump();
      jsonl += '\n';
      docs_truth.push_back({{"id", id},
                            {"negative", negative},
                            {"category", names[category]},
                            {"theta", std::vector<double>(theta.begin(), theta.end())}});
    }

    const auto corpus_path = artifact(config, artifacts::kSimulated);
    write_file(corpus_path, jsonl);
    ojson topics = ojson::array();
    ojson topic_categories = ojson::array();
    for (uint32_t k = 0; k < sc.topics; ++k) {
      const auto row = phi.row(k);
      topics.push_back(std::vector<double>(row.begin(), row.end()));
      topic_categories.push_back(names[k % names.size()]);
    }
    ojson truth;
    truth["format"] = "negtopic.truth";
    truth["version"] = 1;
    truth["seed"] = seed;
    truth["vocabulary"] = vocab;
    truth["topic_categories"] = topic_categories;
    truth["phi"] = topics;
    truth["documents"] = docs_truth;
    const auto truth_path = artifact(config, artifacts::kTruth);
    write_json(truth_path, truth);

    StageResult r;
    r.stats = {{"documents", corpus.documents.size()}, {"planted_negative", planted}, {"topics", sc.topics}};
    r.outputs = {corpus_path, truth_path};
    return r;
  });
}

}  // namespace negtopic
