// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails. Pass criterion numbers to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "negtopic/labeling.hpp"
#include "negtopic/lda.hpp"
#include "negtopic/model_selection.hpp"
#include "negtopic/pipeline.hpp"
#include "negtopic/random.hpp"
#include "negtopic/resources.hpp"
#include "negtopic/sentiment.hpp"
#include "negtopic/util.hpp"
#include "oracles/oracles.hpp"
#include "unit/test_support.hpp"

using namespace negtopic;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// ---------------------------------------------------------------------------
// 1. Gibbs sampler against the enumerated posterior.

Outcome sampler_exactness() {
  const auto start = Clock::now();
  const oracle::Docs docs{{0, 1, 1}, {2, 3}, {0, 3, 2}};
  const uint32_t K = 2;
  const uint32_t V = 4;
  const size_t N = oracle::token_count(docs);
  const auto exact = oracle::posterior(docs, K, V, 1.0, 1.0);

  Hyperparams hyper;
  hyper.topics = K;
  hyper.alpha_sum = 2.0;  // alpha_k = 1
  hyper.beta = 1.0;
  Rng rng(derive_seed(2024, "sampler"));
  GibbsState state = init_state(DocumentSet(std::span<const std::vector<uint32_t>>(docs), V), hyper, rng);
  for (int i = 0; i < 1000; ++i) gibbs_sweep(state, hyper, rng);

  const size_t sweeps = 200000;
  std::vector<double> freq(exact.size(), 0.0);
  for (size_t s = 0; s < sweeps; ++s) {
    gibbs_sweep(state, hyper, rng);
    const auto z = state.assignments();
    freq[oracle::encode({z.begin(), z.end()}, K)] += 1.0;
  }
  double tv = 0.0;
  for (size_t i = 0; i < exact.size(); ++i) tv += std::abs(freq[i] / sweeps - exact[i]);
  tv *= 0.5;
  const double secs = seconds_since(start);
  return {tv < 0.02 && secs < 120.0,
          fmt::format("N={} states={} sweeps={} TV={:.5f} (< 0.02) in {:.1f}s (< 120s)", N, exact.size(), sweeps, tv,
                      secs)};
}

// ---------------------------------------------------------------------------
// 2. Left-to-right estimator against enumeration.

Outcome estimator_exactness() {
  const auto start = Clock::now();
  const uint32_t V = 5;
  const uint32_t R = 50;
  std::vector<double> rel;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng gen(derive_seed(seed, "l2r-data"));
    const uint32_t K = 2 + static_cast<uint32_t>(seed % 2);  // 2 or 3
    const Matrix phi = random_topics(K, V, 0.5, derive_seed(seed, "l2r-phi"));
    std::vector<std::vector<double>> rows(K);
    for (uint32_t k = 0; k < K; ++k) rows[k].assign(phi.row(k).begin(), phi.row(k).end());
    Matrix by_word(V, K);
    for (uint32_t w = 0; w < V; ++w) {
      for (uint32_t k = 0; k < K; ++k) by_word(w, k) = phi(k, w);
    }
    const double alpha_sum = 0.5 + gen.uniform() * 2.0;
    double exact = 0.0;
    double estimate = 0.0;
    size_t tokens = 0;
    Rng eval(derive_seed(seed, "l2r-eval"));
    for (int d = 0; d < 5; ++d) {
      std::vector<uint32_t> doc(1 + gen.below(8));
      for (auto& w : doc) w = static_cast<uint32_t>(gen.below(V));
      exact += oracle::doc_loglik(doc, rows, alpha_sum);
      estimate += left_to_right(doc, by_word, alpha_sum, R, eval);
      tokens += doc.size();
    }
    const double e = exact / tokens;
    rel.push_back(std::abs(estimate / tokens - e) / std::abs(e));
  }
  double mean_rel = 0.0;
  for (double r : rel) mean_rel += r;
  mean_rel /= rel.size();
  const double worst = *std::max_element(rel.begin(), rel.end());

  // K = 1: every prefix predicts phi[w] exactly.
  double k1_err = 0.0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng gen(derive_seed(seed, "k1"));
    const Matrix phi = random_topics(1, V, 1.0, derive_seed(seed, "k1-phi"));
    Matrix by_word(V, 1);
    for (uint32_t w = 0; w < V; ++w) by_word(w, 0) = phi(0, w);
    std::vector<uint32_t> doc(1 + gen.below(8));
    double closed = 0.0;
    for (auto& w : doc) {
      w = static_cast<uint32_t>(gen.below(V));
      closed += std::log(phi(0, w));
    }
    Rng eval(seed);
    k1_err = std::max(k1_err, std::abs(left_to_right(doc, by_word, 1.0, R, eval) - closed));
  }
  const double secs = seconds_since(start);
  return {mean_rel < 0.01 && k1_err <= 1e-12 && secs < 60.0,
          fmt::format("mean rel err {:.5f} over 20 seeds (< 0.01; worst seed {:.5f}), K=1 max |diff| {:.2e} "
                      "(<= 1e-12) in {:.1f}s (< 60s)",
                      mean_rel, worst, k1_err, secs)};
}

// ---------------------------------------------------------------------------
// 3 and 4. Synthetic corpus shared by selection and recovery.

constexpr uint32_t kTrueTopics = 10;
constexpr uint32_t kSynthVocab = 500;

struct Synthetic {
  Matrix phi;
  Corpus corpus;
};

const Synthetic& synthetic() {
  static const Synthetic s = [] {
    Synthetic out;
    out.phi = random_topics(kTrueTopics, kSynthVocab, 0.05, 101);
    const std::vector<double> alpha(kTrueTopics, 0.1);
    const auto gen = generate_corpus(out.phi, alpha, 5000, 10.0, 202);
    std::vector<std::string> words;
    std::vector<uint64_t> freq(kSynthVocab, 0);
    for (uint32_t w = 0; w < kSynthVocab; ++w) words.push_back(fmt::format("w{:03}", w));
    for (size_t d = 0; d < gen.documents.size(); ++d) {
      for (uint32_t w : gen.documents[d]) ++freq[w];
      out.corpus.documents.push_back({fmt::format("doc-{:05}", d), gen.documents[d], {}});
    }
    out.corpus.vocabulary = Vocabulary(words, freq);
    return out;
  }();
  return s;
}

Outcome k_selection() {
  const auto start = Clock::now();
  const auto& s = synthetic();
  const std::vector<uint32_t> grid{2, 5, 10, 20, 40};
  Hyperparams hyper;  // defaults: alpha_sum 5, beta 0.01, 1000 iterations
  hyper.seed = 303;
  const auto sel = select_k(s.corpus, grid, hyper, SplitSpec{0.8, 404}, EvalConfig{20, 505}, 0);
  bool rising = true;
  std::string curve;
  for (size_t i = 0; i < sel.curve.size(); ++i) {
    curve += fmt::format("{}{}:{:.4f}", i ? " " : "", sel.curve[i].topics, sel.curve[i].per_token_ll);
    if (i > 0 && sel.curve[i].topics <= 10 && sel.curve[i].per_token_ll < sel.curve[i - 1].per_token_ll) {
      rising = false;
    }
  }
  const double secs = seconds_since(start);
  const bool k_ok = sel.best_topics == 10 || sel.best_topics == 20;
  return {k_ok && rising && secs < 900.0,
          fmt::format("selected K={} (in {{10,20}}), curve [{}] non-decreasing to K=10: {} in {:.0f}s (< 900s)",
                      sel.best_topics, curve, rising ? "yes" : "no", secs)};
}

Outcome topic_recovery() {
  const auto start = Clock::now();
  const auto& s = synthetic();
  Hyperparams hyper;
  hyper.topics = kTrueTopics;
  hyper.seed = 606;
  const TopicModel model =
      train(DocumentSet(s.corpus.documents, kSynthVocab), hyper, s.corpus.vocabulary.hash());

  auto top10 = [](std::span<const double> row) {
    std::set<uint32_t> out;
    std::vector<uint32_t> idx(row.size());
    for (uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](uint32_t a, uint32_t b) { return row[a] > row[b]; });
    out.insert(idx.begin(), idx.begin() + 10);
    return out;
  };
  std::vector<std::set<uint32_t>> learned;
  std::vector<std::set<uint32_t>> truth;
  for (uint32_t k = 0; k < kTrueTopics; ++k) {
    learned.push_back(top10(model.phi().row(k)));
    truth.push_back(top10(s.phi.row(k)));
  }
  std::vector<std::vector<int>> overlap(kTrueTopics, std::vector<int>(kTrueTopics));
  for (uint32_t a = 0; a < kTrueTopics; ++a) {
    for (uint32_t b = 0; b < kTrueTopics; ++b) {
      for (uint32_t w : learned[a]) overlap[a][b] += static_cast<int>(truth[b].count(w));
    }
  }
  // Greedy: repeatedly take the largest remaining pair.
  std::vector<bool> used_a(kTrueTopics, false);
  std::vector<bool> used_b(kTrueTopics, false);
  double total = 0.0;
  for (uint32_t round = 0; round < kTrueTopics; ++round) {
    int best = -1;
    uint32_t ba = 0;
    uint32_t bb = 0;
    for (uint32_t a = 0; a < kTrueTopics; ++a) {
      for (uint32_t b = 0; b < kTrueTopics; ++b) {
        if (!used_a[a] && !used_b[b] && overlap[a][b] > best) {
          best = overlap[a][b];
          ba = a;
          bb = b;
        }
      }
    }
    used_a[ba] = used_b[bb] = true;
    total += best / 10.0;
  }
  const double mean = total / kTrueTopics;
  return {mean >= 0.6, fmt::format("mean top-10 overlap {:.3f} (>= 0.6) in {:.0f}s", mean, seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 5. Sentiment filter against a brute-force scorer.

std::vector<std::string> lexicon_terms(std::string_view text) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.erase(0, 1);
    if (line.empty() || line == "#" || line.rfind("# ", 0) == 0) continue;
    std::transform(line.begin(), line.end(), line.begin(), [](unsigned char c) { return std::tolower(c); });
    out.push_back(line);
  }
  return out;
}

Outcome sentiment_equivalence() {
  const auto start = Clock::now();
  const auto pos = lexicon_terms(resources::kPositiveLexicon);
  const auto neg = lexicon_terms(resources::kNegativeLexicon);
  const auto lexicon = SentimentLexicon::defaults();

  // Token pool: lexicon literals, stems with suffixes, stems alone and plain words.
  std::vector<std::string> pool;
  for (const auto* list : {&pos, &neg}) {
    for (const auto& t : *list) {
      if (t.back() == '*') {
        const auto stem = t.substr(0, t.size() - 1);
        pool.push_back(stem);
        pool.push_back(stem + "ing");
        pool.push_back("un" + stem);
      } else {
        pool.push_back(t);
      }
    }
  }
  const std::vector<std::string> plain{"diet", "gym", "sugar", "insulin", "walk", "bread", "weight", "run", "today"};
  Rng rng(707);
  std::vector<WordDocument> docs;
  for (size_t d = 0; d < 10000; ++d) {
    WordDocument doc{fmt::format("r{}", d), {}, {}};
    const size_t n = rng.below(13);
    for (size_t i = 0; i < n; ++i) {
      doc.tokens.push_back(rng.uniform() < 0.6 ? plain[rng.below(plain.size())] : pool[rng.below(pool.size())]);
    }
    docs.push_back(std::move(doc));
  }
  const auto filtered = filter_negative(docs, lexicon, 0);
  std::vector<std::string> expected;
  size_t score_mismatches = 0;
  for (const auto& d : docs) {
    const auto o = oracle::sentiment(d.tokens, pos, neg);
    if (o.negative) expected.push_back(d.id);
    const auto s = score_document(d.tokens, lexicon);
    if (s.pos_count != o.pos || s.neg_count != o.neg || (s.polarity == Polarity::kNegative) != o.negative) {
      ++score_mismatches;
    }
  }
  std::vector<std::string> got;
  for (const auto& d : filtered.negative) got.push_back(d.id);
  size_t set_mismatches = 0;
  {
    std::set<std::string> a(expected.begin(), expected.end());
    std::set<std::string> b(got.begin(), got.end());
    for (const auto& id : a) set_mismatches += b.count(id) ? 0 : 1;
    for (const auto& id : b) set_mismatches += a.count(id) ? 0 : 1;
  }
  const bool same_order = got == expected;

  // Planting: words unique to the negative lexicon into otherwise neutral documents.
  std::vector<std::string> unique_negative;
  for (const auto& t : neg) {
    if (t.back() == '*') continue;
    bool positive = false;
    for (const auto& p : pos) positive = positive || oracle::term_matches(p, t, false);
    if (!positive) unique_negative.push_back(t);
  }
  std::vector<WordDocument> planted;
  std::set<std::string> truth;
  for (size_t d = 0; d < 10000; ++d) {
    WordDocument doc{fmt::format("p{}", d), {}, {}};
    const size_t n = 1 + rng.below(12);
    for (size_t i = 0; i < n; ++i) doc.tokens.push_back(plain[rng.below(plain.size())]);
    if (rng.uniform() < 0.3) {
      doc.tokens.insert(doc.tokens.begin() + static_cast<long>(rng.below(n + 1)),
                       unique_negative[rng.below(unique_negative.size())]);
      truth.insert(doc.id);
    }
    planted.push_back(std::move(doc));
  }
  const auto found = filter_negative(planted, lexicon, 0);
  size_t tp = 0;
  for (const auto& d : found.negative) tp += truth.count(d.id);
  const double precision = found.negative.empty() ? 0.0 : double(tp) / found.negative.size();
  const double recall = truth.empty() ? 0.0 : double(tp) / truth.size();

  return {set_mismatches == 0 && score_mismatches == 0 && same_order && precision == 1.0 && recall == 1.0,
          fmt::format("{} negative of 10000, {} filter mismatches, {} score mismatches; planted {}: precision {} "
                      "recall {} in {:.1f}s",
                      got.size(), set_mismatches, score_mismatches, truth.size(), precision, recall,
                      seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 6. Labeling rule against the counting oracle.

Outcome labeling_exactness() {
  const auto start = Clock::now();
  const std::vector<std::string> stems{"diab", "diet", "fat", "run", "gym", "obes", "carb", "sugar"};
  Rng rng(808);
  size_t mismatches = 0;
  size_t labeled = 0;
  const size_t trials = 10000;
  for (size_t t = 0; t < trials; ++t) {
    const size_t C = 1 + rng.below(4);
    std::vector<Section> sections;
    std::vector<std::vector<std::string>> terms(C);
    for (size_t c = 0; c < C; ++c) {
      Section s{fmt::format("C{}", c), {}};
      for (size_t i = 0, n = 1 + rng.below(3); i < n; ++i) {
        std::string term = stems[rng.below(stems.size())];
        if (rng.uniform() < 0.5) term += '*';
        s.terms.push_back(term);
        terms[c].push_back(term);
      }
      sections.push_back(std::move(s));
    }
    const bool contains = rng.uniform() < 0.5;
    const SeedLexicon seeds(sections, contains);

    std::vector<std::string> words;
    for (size_t i = 0, n = 1 + rng.below(20); i < n; ++i) {
      const double u = rng.uniform();
      // Mostly this trial's own terms, so labels are common.
      const auto& own = terms[rng.below(C)];
      std::string w = rng.uniform() < 0.7 ? own[rng.below(own.size())] : stems[rng.below(stems.size())];
      if (w.back() == '*') w.pop_back();
      if (u < 0.3) {
        w += "s";
      } else if (u < 0.5) {
        w = "pre" + w;
      } else if (u < 0.7) {
        w = fmt::format("x{}", rng.below(50));
      }
      words.push_back(w);
    }
    const auto got = label_topic(words, seeds);
    const auto want = oracle::label(words, terms, contains);
    if (got.category != want.category || got.seed_hits != want.hits) ++mismatches;
    labeled += got.category.has_value();
  }
  return {mismatches == 0, fmt::format("{} mismatches in {} trials ({} labeled, {} Unlabeled) in {:.1f}s", mismatches,
                                       trials, labeled, trials - labeled, seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 7. Two end-to-end runs give identical bytes.

PipelineConfig e2e_config(const fs::path& out) {
  PipelineConfig c;
  c.out_dir = out;
  c.inputs = {out / std::string(artifacts::kSimulated)};
  c.seed = 42;
  c.k_grid = {5, 10, 20};
  c.hyper.iterations = 300;
  c.simulate.documents = 3000;
  return c;
}

void run_all(const PipelineConfig& c) {
  run_simulate(c);
  run_ingest(c);
  run_sentiment(c);
  run_select_k(c);
  run_train(c);
  run_report(c);
}

Outcome determinism() {
  const auto start = Clock::now();
  TempDir a;
  TempDir b;
  run_all(e2e_config(a.path()));
  run_all(e2e_config(b.path()));
  size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(a.path())) {
    const auto name = entry.path().filename().string();
    if (name == artifacts::kManifest) continue;  // records timings
    ++compared;
    if (!fs::exists(b / name) || read_file(entry.path()) != read_file(b / name)) differing.push_back(name);
  }
  const std::vector<std::string_view> required{artifacts::kCorpus, artifacts::kNegativeCorpus, artifacts::kModel,
                                               artifacts::kCurve,  artifacts::kTopics,         artifacts::kGraph,
                                               artifacts::kReport};
  bool all_present = true;
  for (auto name : required) all_present = all_present && fs::exists(a / std::string(name));
  std::string diff;
  for (const auto& n : differing) diff += " " + n;
  return {differing.empty() && all_present,
          fmt::format("{} artifacts compared, {} differ{} in {:.0f}s", compared, differing.size(), diff,
                      seconds_since(start))};
}

// ---------------------------------------------------------------------------
// 8. Ingest and sentiment throughput.

Outcome throughput() {
  TempDir dir;
  const auto input = dir / "tweets.jsonl";
  {
    const std::vector<std::string> words{
        "diabetes", "#diet",  "exercise", "obesity", "hate",   "love",    "sugar", "gym",  "the",     "and",
        "tired",    "insulin", "walk",    "bread",   "awful",  "happy",   "run",   "fat",  "weight",  "today",
        "carbs",    "doctor", "blood",    "test",    "morning", "pain",   "lost",  "good", "week",    "meal"};
    Rng rng(909);
    std::ofstream out(input);
    std::string line;
    for (size_t d = 0; d < 1000000; ++d) {
      line = fmt::format(R"({{"id":"t{}","text":")", d);
      for (int i = 0; i < 10; ++i) {
        if (i) line += ' ';
        line += words[rng.below(words.size())];
      }
      line += "\",\"lang\":\"en\"}\n";
      out << line;
    }
  }
  PipelineConfig c;
  c.out_dir = dir / "out";
  c.inputs = {input};
  const auto start = Clock::now();
  const auto ingest_stats = run_ingest(c).stats;
  const auto sentiment_stats = run_sentiment(c).stats;
  const double secs = seconds_since(start);
  const auto docs = ingest_stats["documents"].get<size_t>();
  return {secs < 120.0 && docs == 1000000,
          fmt::format("{} documents, {} negative, ingest + tokenize + sentiment in {:.1f}s (< 120s) on {} thread(s)",
                      docs, sentiment_stats["negative"].get<size_t>(), secs, resolve_workers(0))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sampler exactness", sampler_exactness},
      {"held-out estimator exactness", estimator_exactness},
      {"K-selection plateau", k_selection},
      {"topic recovery", topic_recovery},
      {"sentiment oracle equivalence", sentiment_equivalence},
      {"labeling rule exactness", labeling_exactness},
      {"determinism", determinism},
      {"throughput", throughput},
  };
  std::set<size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    failed += o.pass ? 0 : 1;
    fmt::print("[{}] {}. {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} failed\n", failed);
  return failed == 0 ? 0 : 1;
}
