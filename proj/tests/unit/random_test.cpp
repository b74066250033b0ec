#include <cmath>
#include <numeric>
#include <set>

#include <gtest/gtest.h>

#include "negtopic/random.hpp"

using negtopic::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, EngineMatchesStandardSequence) {
  // mt19937_64 with the default seed yields 9981545732273789042 as its 10000th value.
  Rng rng(5489);
  uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowIsUnbiasedOverSmallRange) {
  Rng rng(7);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) counts[rng.below(5)]++;
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
}

TEST(Rng, GammaMeanMatchesShape) {
  for (double shape : {0.1, 0.5, 1.0, 3.0, 20.0}) {
    Rng rng(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.gamma(shape);
    EXPECT_NEAR(sum / n, shape, 0.02 * std::max(1.0, shape)) << "shape " << shape;
  }
}

TEST(Rng, PoissonMeanAndVariance) {
  for (double mean : {0.5, 3.0, 10.0, 45.0}) {
    Rng rng(3);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = rng.poisson(mean);
      s += x;
      s2 += x * x;
    }
    const double m = s / n;
    EXPECT_NEAR(m, mean, 0.02 * std::max(1.0, mean)) << mean;
    EXPECT_NEAR(s2 / n - m * m, mean, 0.05 * std::max(1.0, mean)) << mean;
  }
}

TEST(Rng, DirichletSumsToOne) {
  Rng rng(9);
  const std::vector<double> alpha{0.1, 0.2, 5.0};
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < 20000; ++i) {
    const auto x = rng.dirichlet(alpha);
    EXPECT_NEAR(std::accumulate(x.begin(), x.end(), 0.0), 1.0, 1e-12);
    for (int k = 0; k < 3; ++k) mean[k] += x[k] / 20000;
  }
  EXPECT_NEAR(mean[2], 5.0 / 5.3, 0.01);
}

TEST(Rng, CategoricalSkipsZeroWeights) {
  Rng rng(5);
  const std::vector<double> w{0.0, 1.0, 0.0, 3.0};
  std::vector<int> counts(4, 0);
  for (int i = 0; i < 40000; ++i) counts[rng.categorical(w)]++;
  EXPECT_EQ(counts[0], 0);
  EXPECT_EQ(counts[2], 0);
  EXPECT_NEAR(counts[3] / 40000.0, 0.75, 0.01);
}

TEST(DeriveSeed, LabelsSeparateStreams) {
  std::set<uint64_t> seen;
  for (const char* label : {"split", "eval", "train", "simulate"}) seen.insert(negtopic::derive_seed(1, label));
  EXPECT_EQ(seen.size(), 4u);
  EXPECT_EQ(negtopic::derive_seed(1, "split"), negtopic::derive_seed(1, "split"));
  EXPECT_NE(negtopic::derive_seed(1, "split"), negtopic::derive_seed(2, "split"));
}

TEST(DeriveSeed, Fnv1aKnownValue) {
  EXPECT_EQ(negtopic::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(negtopic::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}
