#include <fstream>
#include <regex>

#include <gtest/gtest.h>

#include "negtopic/error.hpp"
#include "negtopic/pipeline.hpp"
#include "negtopic/random.hpp"
#include "negtopic/util.hpp"
#include "test_support.hpp"

using namespace negtopic;
namespace fs = std::filesystem;

namespace {

PipelineConfig small_config(const fs::path& out) {
  PipelineConfig c;
  c.out_dir = out;
  c.inputs = {out / "simulated.jsonl"};
  c.k_grid = {2, 4};
  c.hyper.iterations = 40;
  c.particles = 5;
  c.top_n = 10;
  c.workers = 2;
  c.seed = 3;
  c.simulate.documents = 300;
  c.simulate.topics = 4;
  c.simulate.vocab_size = 80;
  return c;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

}  // namespace

TEST(Config, UnknownKeyIsRejected) {
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json{{"k_grid", {2}}, {"bogus", 1}}, ""), ConfigError);
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json{{"lda", {{"gamma", 1}}}}, ""), ConfigError);
  EXPECT_THROW(PipelineConfig::from_json(nlohmann::json{{"top_n", "ten"}}, ""), ConfigError);
}

TEST(Config, FileValuesOverrideDefaultsAndPathsResolve) {
  const auto c = PipelineConfig::from_json(
      nlohmann::json{{"k_grid", {3, 6}}, {"inputs", {"a.jsonl"}}, {"lda", {{"beta", 0.1}}}, {"seeds", nullptr}},
      "/base");
  EXPECT_EQ(c.k_grid, (std::vector<uint32_t>{3, 6}));
  EXPECT_EQ(c.inputs.at(0), fs::path("/base/a.jsonl"));
  EXPECT_EQ(c.hyper.beta, 0.1);
  EXPECT_EQ(c.hyper.alpha_sum, 5.0);
  EXPECT_EQ(c.top_n, 20u);
}

TEST(Config, RoundTripsThroughJson) {
  PipelineConfig c;
  c.k_grid = {2, 9};
  c.tau = 0.6;
  c.stopwords = "/x/stop.txt";
  const auto back = PipelineConfig::from_json(c.to_json(), "");
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(Config, ValidationCatchesBadValues) {
  PipelineConfig c;
  c.k_grid = {4, 4};
  EXPECT_THROW(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.stopwords = "/definitely/missing.txt";
  EXPECT_THROW(c.validate(), ConfigError);
  c = PipelineConfig{};
  c.tau = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Ingest, StatsMatchIndependentScan) {
  TempDir dir;
  Rng rng(12);
  const std::vector<std::string> pool{"diabetes", "#diet", "exercise", "sugar", "gym", "the", "and", "bread"};
  std::ofstream out(dir / "in.jsonl");
  std::map<std::string, size_t> expected{{"Diabetes", 0}, {"Diet", 0}, {"Exercise", 0}, {"Obesity", 0}};
  size_t expected_docs = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> words;
    for (uint64_t n = 0, len = rng.below(5); n < len; ++n) words.push_back(pool[rng.below(pool.size())]);
    std::string text;
    for (const auto& w : words) text += w + " ";
    out << nlohmann::json{{"id", std::to_string(i)}, {"text", text}}.dump() << "\n";
    // Survives when some word is not a stop word.
    const bool keeps = std::any_of(words.begin(), words.end(), [](auto& w) { return w != "the" && w != "and"; });
    if (!keeps) continue;
    ++expected_docs;
    auto has = [&](std::string_view x) { return std::find(words.begin(), words.end(), x) != words.end(); };
    if (has("diabetes")) ++expected["Diabetes"];
    if (has("#diet")) ++expected["Diet"];
    if (has("exercise")) ++expected["Exercise"];
  }
  out.close();

  PipelineConfig c;
  c.out_dir = dir / "out";
  c.inputs = {dir / "in.jsonl"};
  const auto r = run_ingest(c);
  EXPECT_EQ(r.stats["documents"].get<size_t>(), expected_docs);
  EXPECT_EQ(r.stats["dropped_empty"].get<size_t>(), 100 - expected_docs);
  for (const auto& [name, n] : expected) EXPECT_EQ(r.stats["categories"][name].get<size_t>(), n) << name;
  EXPECT_TRUE(fs::exists(dir / "out" / "manifest.json"));
}

TEST(Ingest, EmptyInputIsFatal) {
  TempDir dir;
  std::ofstream(dir / "empty.jsonl").close();
  PipelineConfig c;
  c.out_dir = dir / "out";
  c.inputs = {dir / "empty.jsonl"};
  EXPECT_THROW(run_ingest(c), DataError);
}

TEST(Ingest, RerunIsByteIdentical) {
  TempDir dir;
  auto c = small_config(dir.path());
  run_simulate(c);
  run_ingest(c);
  const auto first = read_file(dir / "corpus.jsonl");
  run_ingest(c);
  EXPECT_EQ(read_file(dir / "corpus.jsonl"), first);
}

TEST(Stages, MissingUpstreamNamesTheStage) {
  TempDir dir;
  auto c = small_config(dir.path());
  try {
    run_report(c);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'sentiment'"), std::string::npos);
  }
  run_simulate(c);
  run_ingest(c);
  run_sentiment(c);
  try {
    run_train(c);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'select-k'"), std::string::npos);
  }
}

TEST(Stages, FullRunProducesConsistentArtifacts) {
  TempDir dir;
  auto c = small_config(dir.path());
  const auto sim = run_simulate(c);
  run_ingest(c);
  const auto sent = run_sentiment(c);
  // Planted negatives are exactly the negative documents.
  EXPECT_EQ(sent.stats["negative"].get<size_t>(), sim.stats["planted_negative"].get<size_t>());

  const auto sel = run_select_k(c);
  const auto k = sel.stats["best_k"].get<uint32_t>();
  EXPECT_TRUE(k == 2 || k == 4);
  run_train(c);
  EXPECT_EQ(load_json(dir / "model.json")["hyperparameters"]["topics"].get<uint32_t>(), k);
  run_report(c);

  const auto topics = load_json(dir / "topics.json");
  const auto graph = load_json(dir / "graph.json");
  ASSERT_EQ(topics["topics"].size(), k);
  for (const auto& e : graph["edges"]) {
    ASSERT_FALSE(e["witnesses"].empty());
    for (const auto& w : e["witnesses"]) {
      const auto& t = topics["topics"][w["topic"].get<size_t>()];
      bool found = false;
      for (const auto& tw : t["top_words"]) found = found || tw["word"] == w["word"];
      EXPECT_TRUE(found);
    }
  }
  const auto report = read_file(dir / "report.txt");
  EXPECT_NE(report.find("Topics and sub-topics"), std::string::npos);
  EXPECT_NE(report.find("k,heldout_ll,per_token_ll"), std::string::npos);

  // Report regeneration from the same artifacts is byte-identical.
  const auto topics_text = read_file(dir / "topics.json");
  run_report(c);
  EXPECT_EQ(read_file(dir / "report.txt"), report);
  EXPECT_EQ(read_file(dir / "topics.json"), topics_text);

  // Weights in topics.json round-trip exactly to the model-derived CSV values.
  const auto csv = read_file(dir / "topic_words.csv");
  const auto first_weight = topics["topics"][0]["top_words"][0]["weight"].get<double>();
  auto line = csv.substr(csv.find('\n') + 1);
  line = line.substr(0, line.find('\n'));
  const auto weight_text = line.substr(line.rfind(',') + 1);
  EXPECT_EQ(std::stod(weight_text), first_weight);

  const auto manifest = load_json(dir / "manifest.json");
  for (const char* stage : {"simulate", "ingest", "sentiment", "select-k", "train", "report"}) {
    EXPECT_TRUE(manifest["stages"].contains(stage)) << stage;
  }
  EXPECT_EQ(manifest["selected_k"].get<uint32_t>(), k);
}

TEST(Stages, ExplicitKSkipsSelection) {
  TempDir dir;
  auto c = small_config(dir.path());
  run_simulate(c);
  run_ingest(c);
  run_sentiment(c);
  c.hyper.topics = 3;
  run_train(c);
  EXPECT_EQ(load_json(dir / "model.json")["hyperparameters"]["topics"].get<uint32_t>(), 3u);
}
