#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "semconf/detail/numeric.hpp"
#include "semconf/detail/parallel.hpp"
#include "semconf/detail/text.hpp"
#include "semconf_test.hpp"

using namespace semconf;
using namespace semconf::detail;

TEST(Numeric, QuantileInterpolates) {
  const std::vector<double> v = {1, 2, 3, 4};
  EXPECT_EQ(quantile_sorted(v, 0.0), 1.0);
  EXPECT_EQ(quantile_sorted(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 1.75);
  EXPECT_EQ(quantile_sorted(std::vector<double>{7}, 0.3), 7.0);
}

TEST(Numeric, MeanStdExactOnEqualValues) {
  const std::vector<double> same(17, 0.1);
  const auto s = mean_std(same);
  EXPECT_EQ(s.mean, 0.1);
  EXPECT_EQ(s.stdev, 0.0);
  const auto t = mean_std(std::vector<double>{1, 3});
  EXPECT_EQ(t.mean, 2.0);
  EXPECT_EQ(t.stdev, 1.0);
}

TEST(Numeric, CosineLaws) {
  const std::vector<double> a = {3, 4}, b = {4, 3}, z = {0, 0};
  EXPECT_EQ(cosine(a, a), 1.0);
  EXPECT_DOUBLE_EQ(cosine(a, b), 24.0 / 25.0);
  EXPECT_THROW(cosine(a, z), DataError);
  EXPECT_THROW(cosine(a, std::vector<double>{1, 2, 3}), DataError);
  test::Rng rng(91);
  for (int i = 0; i < 1000; ++i) {
    const auto u = test::gaussian_vector(rng, 5);
    EXPECT_EQ(cosine(u, u), 1.0);
    const auto v = test::gaussian_vector(rng, 5);
    EXPECT_EQ(cosine(u, v), cosine(v, u));
  }
}

TEST(Numeric, FormatDoubleRoundTrips) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(0.0), "0");
  test::Rng rng(92);
  for (int i = 0; i < 10000; ++i) {
    const double v = test::uniform(rng, -1e3, 1e3);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Text, NormalizeCollapsesWhitespaceAndCase) {
  EXPECT_EQ(normalize_text("  How\tTO\n\n make  TEA  "), "how to make tea");
  EXPECT_EQ(normalize_text(""), "");
  EXPECT_EQ(normalize_text("I\xE2\x80\x99m"), "i'm");
  EXPECT_EQ(normalize_text("\xE2\x80\x98q"), "'q");
  EXPECT_EQ(trim("  a b \n"), "a b");
}

TEST(Text, DecodeUtf8) {
  EXPECT_EQ(decode_utf8("ab"), U"ab");
  EXPECT_EQ(decode_utf8("\xC3\xA9t\xC3\xA9"), U"été");
  EXPECT_EQ(decode_utf8("\xE2\x82\xAC"), U"€");
  EXPECT_EQ(decode_utf8("\xF0\x9F\x98\x80"), U"\U0001F600");
  EXPECT_EQ(decode_utf8("\xFF").size(), 1u);  // malformed byte decodes as itself
}

TEST(Parallel, EveryIndexOnceAndLowestChunkErrorWins) {
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 10 || i == 90) throw std::runtime_error("at " + std::to_string(i));
    });
    FAIL() << "expected a throw";
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "at 10");
  }
  parallel_for(0, 4, [](std::size_t) { FAIL(); });
}
