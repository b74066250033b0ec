#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "negtopic/error.hpp"
#include "negtopic/pipeline.hpp"

namespace {

std::vector<uint32_t> parse_grid(const std::string& text) {
  std::vector<uint32_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<uint32_t>(v));
    } catch (const std::exception&) {
      throw negtopic::ConfigError(fmt::format("--k-grid: '{}' is not a positive integer", item));
    }
  }
  return out;
}

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out_dir;
  std::vector<std::string> inputs;
  std::optional<uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<uint32_t> k;
  std::optional<std::string> k_grid;
  std::optional<double> alpha_sum;
  std::optional<double> beta;
  std::optional<uint32_t> iters;
  std::optional<double> train_frac;
  std::optional<uint32_t> particles;
  std::optional<size_t> top_n;
  std::optional<double> tau;
};

negtopic::PipelineConfig build_config(const Flags& f) {
  auto c = f.config ? negtopic::PipelineConfig::load(*f.config) : negtopic::PipelineConfig{};
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (!f.inputs.empty()) c.inputs.assign(f.inputs.begin(), f.inputs.end());
  if (f.seed) c.seed = *f.seed;
  if (f.workers) c.workers = *f.workers;
  if (f.k) c.hyper.topics = *f.k;
  if (f.k_grid) c.k_grid = parse_grid(*f.k_grid);
  if (f.alpha_sum) c.hyper.alpha_sum = *f.alpha_sum;
  if (f.beta) c.hyper.beta = *f.beta;
  if (f.iters) c.hyper.iterations = *f.iters;
  if (f.train_frac) c.train_fraction = *f.train_frac;
  if (f.particles) c.particles = *f.particles;
  if (f.top_n) c.top_n = *f.top_n;
  if (f.tau) c.tau = *f.tau;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negative-sentiment topic discovery over short health texts"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Flags f;
  app.add_option("--config", f.config, "JSON configuration file");
  app.add_option("--out-dir", f.out_dir, "Artifact directory");
  app.add_option("--seed", f.seed, "Global seed");
  app.add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  app.add_option("--k", f.k, "Topic count for train (overrides select-k)");
  app.add_option("--k-grid", f.k_grid, "Comma-separated K values for select-k");
  app.add_option("--alpha-sum", f.alpha_sum, "Document-topic concentration summed over topics");
  app.add_option("--beta", f.beta, "Topic-word concentration");
  app.add_option("--iters", f.iters, "Gibbs sweeps");
  app.add_option("--train-frac", f.train_frac, "Training share of the held-out split");
  app.add_option("--particles", f.particles, "Left-to-right particles");
  app.add_option("--top-n", f.top_n, "Top words per topic used for labeling");
  app.add_option("--tau", f.tau, "Sub-topic attachment threshold");

  using Stage = negtopic::StageResult (*)(const negtopic::PipelineConfig&);
  const std::pair<const char*, Stage> stages[] = {
      {"ingest", negtopic::run_ingest},     {"sentiment", negtopic::run_sentiment},
      {"select-k", negtopic::run_select_k}, {"train", negtopic::run_train},
      {"report", negtopic::run_report},     {"simulate", negtopic::run_simulate},
  };
  const char* descriptions[] = {
      "Read JSON-lines records, clean and tokenize them", "Keep the negative documents",
      "Choose K by held-out likelihood",                  "Fit the topic model",
      "Label topics and write the report",                "Write a synthetic corpus with ground truth",
  };
  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < std::size(stages); ++i) subs.push_back(app.add_subcommand(stages[i].first, descriptions[i]));
  subs[0]->add_option("--input", f.inputs, "Input JSON-lines file (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = build_config(f);
    for (size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) {
        const auto result = stages[i].second(config);
        std::cout << result.stats.dump() << '\n';
      }
    }
  } catch (const negtopic::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
