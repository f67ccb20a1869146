#include <gtest/gtest.h>

#include "semconf/dataset_gates.hpp"
#include "semconf_test.hpp"

using namespace semconf;

namespace {

PromptRecord seed_record(const std::string& id, const std::string& text) {
  PromptRecord r;
  r.prompt_id = id;
  r.cluster_id = "k" + id;
  r.is_seed = true;
  r.text = text;
  return r;
}

std::string random_text(test::Rng& rng, std::size_t len) {
  const std::string alphabet = "abcde fgh  ABC\t";
  std::string s;
  for (std::size_t i = 0; i < len; ++i) s += alphabet[test::uniform_index(rng, 0, alphabet.size() - 1)];
  return s + "z";
}

}  // namespace

TEST(DatasetGates, JaccardMatchesOracle) {
  const auto cases = test::read_json(test::fixture("metric_oracles.json"))["jaccard"];
  for (const auto& c : cases) {
    EXPECT_NEAR(char_jaccard(c["a"].get<std::string>(), c["b"].get<std::string>(), c["n"].get<std::size_t>()),
                c["value"].get<double>(), 1e-15)
        << c["a"] << " / " << c["b"];
  }
  EXPECT_DOUBLE_EQ(char_jaccard("how to make tea", "how to brew tea"), 7.0 / 18.0);
}

TEST(DatasetGates, JaccardErrors) {
  EXPECT_THROW(char_jaccard("", "abc"), DataError);
  EXPECT_THROW(char_jaccard("  \n", "abc"), DataError);
  EXPECT_THROW(char_jaccard("abc", "abc", 0), UsageError);
}

TEST(DatasetGates, PropertyJaccardSymmetricBoundedReflexive) {
  test::Rng rng(61);
  for (int i = 0; i < 3000; ++i) {
    const auto a = random_text(rng, test::uniform_index(rng, 0, 20));
    const auto b = random_text(rng, test::uniform_index(rng, 0, 20));
    const auto n = test::uniform_index(rng, 1, 4);
    const double j = char_jaccard(a, b, n);
    EXPECT_EQ(j, char_jaccard(b, a, n));
    EXPECT_GE(j, 0.0);
    EXPECT_LE(j, 1.0);
    EXPECT_EQ(char_jaccard(a, a, n), 1.0);
  }
}

TEST(DatasetGates, ThresholdTruthTable) {
  const GateThresholds t;
  const GateMeasurement base{0.8, 0.5, 0.5};
  auto passes = [&](GateMeasurement m) { return gate_measured("c", m, t).passed; };
  EXPECT_TRUE(passes(base));
  EXPECT_FALSE(passes({0.59, 0.5, 0.5}));
  EXPECT_TRUE(passes({0.60, 0.5, 0.5}));
  EXPECT_TRUE(passes({0.8, 0.90, 0.5}));
  EXPECT_FALSE(passes({0.8, 0.91, 0.5}));
  EXPECT_FALSE(passes({0.8, 0.5, 0.29}));
  EXPECT_TRUE(passes({0.8, 0.5, 0.30}));
  EXPECT_TRUE(passes({0.8, 0.5, 0.70}));
  EXPECT_FALSE(passes({0.8, 0.5, 0.71}));
  const auto v = gate_measured("c", {0.59, 0.91, 0.71}, t);
  EXPECT_FALSE(v.sim_ok);
  EXPECT_FALSE(v.lex_ok);
  EXPECT_FALSE(v.risk_ok);
}

TEST(DatasetGates, CandidateBoundariesFromRawInputs) {
  const GateThresholds t;
  const auto seed = seed_record("s", "abcdefghijkl");
  const std::vector<double> se = {1, 0};
  // cos = 3/5 exactly at the threshold.
  const auto at = gate_candidate(seed, "c1", "zzzz", std::vector<double>{3, 4}, se, 0.5, t);
  EXPECT_EQ(at.measured.sim, 0.6);
  EXPECT_TRUE(at.sim_ok);
  const auto below = gate_candidate(seed, "c2", "zzzz", std::vector<double>{0.59, std::sqrt(1 - 0.59 * 0.59)}, se, 0.5, t);
  EXPECT_FALSE(below.sim_ok);
  // 9 of the seed's 10 trigrams: Jaccard = 0.9 exactly.
  const auto j90 = gate_candidate(seed, "c3", "abcdefghijk", se, se, 0.5, t);
  EXPECT_EQ(j90.measured.jaccard, 0.9);
  EXPECT_TRUE(j90.lex_ok);
  EXPECT_TRUE(j90.passed);
  // 10 of 11 trigrams: just above the cap.
  const auto seed11 = seed_record("s2", "abcdefghijklm");
  const auto j91 = gate_candidate(seed11, "c4", "abcdefghijkl", se, se, 0.5, t);
  EXPECT_GT(j91.measured.jaccard, 0.9);
  EXPECT_FALSE(j91.lex_ok);
  for (auto [risk, ok] : {std::pair{0.29, false}, {0.30, true}, {0.70, true}, {0.71, false}}) {
    EXPECT_EQ(gate_candidate(seed, "c5", "zzzz", se, se, risk, t).risk_ok, ok) << risk;
  }
  EXPECT_THROW(gate_candidate(seed, "c6", "zzzz", std::vector<double>{1, 0, 0}, se, 0.5, t), DataError);
  EXPECT_THROW(gate_candidate(seed, "c7", "zzzz", se, se, 1.5, t), DataError);
}

TEST(DatasetGates, EnsembleRisk) {
  EXPECT_DOUBLE_EQ(ensemble_risk({{"a", 0.2}, {"b", 0.6}}), 0.4);
  EXPECT_DOUBLE_EQ(ensemble_risk({{"a", 0.2}, {"b", 0.6}}, {{"a", 3.0}}), (0.6 + 0.6) / 4.0);
  EXPECT_THROW(ensemble_risk({}), DataError);
  EXPECT_THROW(ensemble_risk({{"a", 1.2}}), DataError);
  EXPECT_THROW(ensemble_risk({{"a", 0.5}}, {{"a", -1.0}}), UsageError);
  EXPECT_THROW(ensemble_risk({{"a", 0.5}}, {{"a", 0.0}}), UsageError);
}

TEST(DatasetGates, PropertyDedupIdempotentAndOrderPreserving) {
  test::Rng rng(62);
  for (int i = 0; i < 300; ++i) {
    std::vector<PromptRecord> recs;
    const std::size_t n = test::uniform_index(rng, 0, 30);
    for (std::size_t k = 0; k < n; ++k) {
      recs.push_back(seed_record(test::pad_id("p", k), random_text(rng, test::uniform_index(rng, 0, 3))));
    }
    const auto once = dedup_records(recs);
    EXPECT_EQ(dedup_records(once), once);
    std::set<std::string> norms;
    for (const auto& r : once) EXPECT_TRUE(norms.insert(normalize_text(r.text)).second);
    for (const auto& r : recs) EXPECT_TRUE(norms.count(normalize_text(r.text)));
    for (std::size_t k = 1; k < once.size(); ++k) EXPECT_LT(once[k - 1].prompt_id, once[k].prompt_id);
  }
}

TEST(DatasetGates, DedupUsesNormalizedText) {
  const std::vector<PromptRecord> recs = {seed_record("a", "How to make tea"), seed_record("b", " how  TO make tea "),
                                          seed_record("c", "how to brew tea")};
  const auto out = dedup_records(recs);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].prompt_id, "a");
  EXPECT_EQ(out[1].prompt_id, "c");
}

TEST(DatasetGates, Mt19937CheckValue) {
  std::mt19937_64 g(5489);
  g.discard(9999);
  EXPECT_EQ(g(), 9981545732273789042ULL);
}

TEST(DatasetGates, SamplingMatchesIndependentGolden) {
  const auto golden = test::read_json(test::fixture("sampling_golden.json"));
  std::mt19937_64 g(42);
  for (const auto& v : golden["mt_seed42_first5"]) EXPECT_EQ(std::to_string(g()), v.get<std::string>());
  for (const auto& c : golden["cases"]) {
    const auto got = sample_indices(c["population"].get<std::size_t>(), c["n"].get<std::size_t>(),
                                    c["seed"].get<std::uint64_t>());
    EXPECT_EQ(got, c["indices"].get<std::vector<std::size_t>>());
  }
}

TEST(DatasetGates, SamplingProperties) {
  const auto a = sample_indices(500, 200, 7);
  EXPECT_EQ(a, sample_indices(500, 200, 7));
  EXPECT_NE(a, sample_indices(500, 200, 8));
  std::set<std::size_t> uniq(a.begin(), a.end());
  EXPECT_EQ(uniq.size(), 200u);
  EXPECT_LT(*uniq.rbegin(), 500u);
  EXPECT_THROW(sample_indices(3, 4, 1), DataError);
  EXPECT_TRUE(sample_indices(0, 0, 1).empty());
}

TEST(DatasetGates, DedupAndSampleDefaults) {
  std::vector<PromptRecord> recs;
  for (std::size_t i = 0; i < 2100; ++i) recs.push_back(seed_record(test::pad_id("p", i), "text " + std::to_string(i % 2050)));
  const auto seeds = dedup_and_sample(recs);
  EXPECT_EQ(seeds.size(), kDefaultSeedCount);
  const auto idx = sample_indices(2050, 2000, 42);
  for (std::size_t i = 0; i < seeds.size(); ++i) EXPECT_EQ(seeds[i].prompt_id, test::pad_id("p", idx[i]));
  EXPECT_THROW(dedup_and_sample(std::vector<PromptRecord>(recs.begin(), recs.begin() + 10)), DataError);
}

TEST(DatasetGates, LoadCandidates) {
  std::istringstream in(
      R"({"candidate_id":"c1","seed_id":"s","text":"x","embedding":[1,0],"risk_scores":{"a":0.4,"b":0.6}})"
      "\n\n"
      R"({"candidate_id":"c2","seed_id":"s","text":"y","embedding":[0,1],"risk_scores":{"a":0.1}})");
  const auto c = load_candidates(in, "cands");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].risk_scores.at("b"), 0.6);
  auto bad = [](const std::string& line, const std::string& needle) {
    std::istringstream s(line);
    try {
      load_candidates(s, "cands");
      ADD_FAILURE() << line;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  bad(R"({"candidate_id":"c1","seed_id":"s","text":"x","embedding":[1],"risk_scores":{}})", "cands:1: field 'risk_scores'");
  bad(R"({"candidate_id":"c1","seed_id":"s","text":"x","embedding":[1],"risk_scores":{"a":2}})", "outside [0, 1]");
  bad(R"({"candidate_id":"c1","seed_id":"s","text":"x","risk_scores":{"a":0.2}})", "field 'embedding'");
  bad("{\"candidate_id\":\"c1\",\"seed_id\":\"s\",\"text\":\"x\",\"embedding\":[1],\"risk_scores\":{\"a\":0.2}}\n"
      "{\"candidate_id\":\"c1\",\"seed_id\":\"s\",\"text\":\"x\",\"embedding\":[1],\"risk_scores\":{\"a\":0.2}}",
      "cands:2: duplicate candidate_id");
  bad("[1,2]", "expected a JSON object");
}

TEST(DatasetGates, AssembleClusters) {
  const std::vector<PromptRecord> seeds = {seed_record("s1", "seed one"), seed_record("s2", "seed two")};
  std::vector<GatedVariant> variants;
  for (int i = 0; i < 6; ++i) {
    GatedVariant v;
    v.seed_id = "s1";
    v.text = "variant " + std::to_string(i);
    v.verdict = gate_measured("v" + std::to_string(i), {0.8, 0.4, 0.5}, {});
    if (i == 5) v.verdict = gate_measured("v5", {0.1, 0.4, 0.5}, {});
    variants.push_back(v);
  }
  const auto res = assemble_clusters(seeds, variants);
  EXPECT_EQ(res.records.size(), 2u + 5u);
  ASSERT_EQ(res.warnings.size(), 1u);
  EXPECT_NE(res.warnings[0].find("'s2' has 0"), std::string::npos);
  for (const auto& r : res.records) {
    if (r.is_seed) continue;
    EXPECT_EQ(r.cluster_id, "ks1");
    EXPECT_EQ(r.seed_similarity, 0.8);
    EXPECT_EQ(r.lexical_overlap, 0.4);
    EXPECT_EQ(r.risk_score, 0.5);
  }
  variants.push_back({"ghost", "x", gate_measured("g", {0.8, 0.4, 0.5}, {})});
  EXPECT_THROW(assemble_clusters(seeds, variants), DataError);
}
