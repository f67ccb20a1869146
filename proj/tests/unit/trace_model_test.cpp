#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "semconf/trace_model.hpp"
#include "semconf_test.hpp"

using namespace semconf;
using semconf::test::Rng;

namespace {

const char* kRecord =
    R"({"kind":"record","prompt_id":"%s","cluster_id":"%s","is_seed":%s,"text":"t","seed_similarity":%s,)"
    R"("lexical_overlap":%s,"risk_score":0.5,"source":"synthetic"})";

std::string record(const std::string& id, const std::string& cluster, bool seed, double sim = 1.0, double lex = 1.0) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), kRecord, id.c_str(), cluster.c_str(), seed ? "true" : "false",
                detail::format_double(sim).c_str(), detail::format_double(lex).c_str());
  return buf;
}

std::string trace_line(const std::string& id, double ppl = 2.0) {
  return R"({"kind":"trace","prompt_id":")" + id +
         R"(","tokens":["a","b"],"token_embeddings":[[1,0],[0,1]],"realized_probs":[0.5,0.5],"perplexity":)" +
         detail::format_double(ppl) + "}";
}

}  // namespace

TEST(TraceModel, LoadsMinimalCorpus) {
  const std::string text = record("s1", "c1", true) + "\n" + record("v1", "c1", false, 0.8, 0.4) + "\n" +
                           R"({"kind":"embedding","prompt_id":"s1","vector":[1,2]})" + "\n" + trace_line("s1") +
                           "\n" + R"({"kind":"decision","prompt_id":"v1","decision":"REJECT"})" + "\n\n";
  const Corpus c = parse_corpus(text);
  ASSERT_EQ(c.records.size(), 2u);
  EXPECT_EQ(c.records[0].prompt_id, "s1");
  EXPECT_EQ(c.records[1].seed_similarity, 0.8);
  EXPECT_EQ(c.embeddings.at("s1").vector, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.decision_of("v1"), Decision::reject);
  EXPECT_EQ(c.decision_of("s1"), std::nullopt);
  EXPECT_EQ(c.count(Decision::reject), 1u);
}

TEST(TraceModel, LineOrderAndFileSplitDoNotMatter) {
  Rng rng(3);
  const Corpus c = test::random_corpus(rng);
  std::string text = serialize_corpus(c);
  std::vector<std::string> lines;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) lines.push_back(l);
  std::reverse(lines.begin(), lines.end());
  CorpusBuilder b;
  for (std::size_t part = 0; part < 3; ++part) {
    std::string chunk;
    for (std::size_t i = part; i < lines.size(); i += 3) chunk += lines[i] + "\n";
    std::istringstream in(chunk);
    b.add_stream(in, "part" + std::to_string(part));
  }
  EXPECT_EQ(std::move(b).finish(), c);
}

TEST(TraceModel, RoundTripIsExact) {
  Rng rng(11);
  for (int i = 0; i < 20; ++i) {
    test::CorpusShape shape;
    shape.with_dists = i % 2 == 0;
    Corpus c = test::random_corpus(rng, shape);
    c.metadata.push_back(nlohmann::ordered_json::parse(R"({"kind":"meta","model":"m","note":"x"})"));
    const std::string once = serialize_corpus(c);
    const Corpus back = parse_corpus(once);
    EXPECT_EQ(back, c);
    EXPECT_EQ(serialize_corpus(back), once);
  }
}

TEST(TraceModel, MalformedJsonNamesLine) {
  const std::string text = record("s1", "c1", true) + "\n{not json\n";
  try {
    parse_corpus(text);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("<memory>:2"), std::string::npos) << e.what();
  }
}

TEST(TraceModel, FieldErrorsNameFieldAndLine) {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      parse_corpus(text);
      ADD_FAILURE() << "no error for: " << text;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_error(R"({"kind":"record","prompt_id":"a"})", "<memory>:1: field 'cluster_id': missing");
  expect_error(R"({"prompt_id":"a"})", "field 'kind'");
  expect_error(R"({"kind":"bogus","prompt_id":"a"})", "unknown kind 'bogus'");
  expect_error(record("a", "c", true) + "\n" + R"({"kind":"embedding","prompt_id":"a","vector":"x"})",
               "<memory>:2: field 'vector': expected array");
  expect_error(record("a", "c", true) + "\n" + R"({"kind":"embedding","prompt_id":"a","vector":[0,0]})",
               "zero-norm");
  expect_error(record("a", "c", true) + "\n" + R"({"kind":"decision","prompt_id":"a","decision":"MAYBE"})",
               "expected ACCEPT or REJECT");
  expect_error(record("a", "c", true) + "\n" + R"({"kind":"decision","prompt_id":"a"})", "field 'decision'");
  expect_error(R"({"kind":"record","prompt_id":"a","cluster_id":"c","is_seed":true,"text":"t","seed_similarity":1,)"
               R"("lexical_overlap":1,"risk_score":1.5,"source":"synthetic"})",
               "field 'risk_score'");
  expect_error(R"({"kind":"record","prompt_id":"a","cluster_id":"c","is_seed":true,"text":"t","seed_similarity":1,)"
               R"("lexical_overlap":1,"risk_score":0.5,"source":"web"})",
               "unknown source 'web'");
}

TEST(TraceModel, DuplicatesAreRejected) {
  EXPECT_THROW(parse_corpus(record("a", "c", true) + "\n" + record("a", "c", true)), DataError);
  EXPECT_THROW(parse_corpus(record("a", "c", true) + "\n" + trace_line("a") + "\n" + trace_line("a")), DataError);
}

TEST(TraceModel, OrphansAreListed) {
  try {
    parse_corpus(record("a", "c", true) + "\n" + trace_line("ghost") + "\n" +
                 R"({"kind":"embedding","prompt_id":"phantom","vector":[1]})");
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("\"ghost\""), std::string::npos) << msg;
    EXPECT_NE(msg.find("\"phantom\""), std::string::npos) << msg;
  }
}

TEST(TraceModel, ClusterInvariants) {
  EXPECT_THROW(parse_corpus(record("a", "c", true) + "\n" + record("b", "c", true)), DataError);
  EXPECT_THROW(parse_corpus(record("a", "c", false, 0.9, 0.5)), DataError);
  EXPECT_THROW(parse_corpus(record("a", "c", true, 0.9, 1.0)), DataError);
  EXPECT_NO_THROW(parse_corpus(record("a", "c", true) + "\n" + record("b", "c", false, 0.7, 0.2)));
}

TEST(TraceModel, EmbeddingDimensionMismatchNamesBoth) {
  try {
    parse_corpus(record("a", "c", true) + "\n" + record("b", "d", true) + "\n" +
                 R"({"kind":"embedding","prompt_id":"a","vector":[1,2,3]})" + "\n" +
                 R"({"kind":"embedding","prompt_id":"b","vector":[1,2]})");
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'a' has 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'b' has 2"), std::string::npos) << msg;
  }
}

TEST(TraceModel, TokenEmbeddingDimensionCheckedAcrossTraces) {
  const std::string other =
      R"({"kind":"trace","prompt_id":"b","tokens":["a"],"token_embeddings":[[1,0,0]],"realized_probs":[0.5],"perplexity":2})";
  EXPECT_THROW(parse_corpus(record("a", "c", true) + "\n" + record("b", "d", true) + "\n" + trace_line("a") + "\n" +
                            other),
               DataError);
}

TEST(TraceModel, TraceValidationCodes) {
  TokenTrace t;
  t.prompt_id = "x";
  t.tokens = {"a", "b"};
  t.token_embeddings = {{1, 0}, {0, 1}};
  t.realized_probs = {0.25, 0.25};
  t.perplexity = 4.0;
  EXPECT_TRUE(validate_trace(t).empty());

  auto codes = [](const TokenTrace& tr) {
    std::vector<std::string> out;
    for (const auto& v : validate_trace(tr)) out.push_back(v.code);
    return out;
  };
  auto bad = t;
  bad.perplexity = 4.0 * (1 + 2e-6);
  EXPECT_EQ(codes(bad), std::vector<std::string>{"ppl-mismatch"});
  bad.perplexity = 4.0 * (1 + 5e-7);
  EXPECT_TRUE(codes(bad).empty());

  bad = t;
  bad.realized_probs = {0.0, 0.25};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"prob-range"});
  bad.realized_probs = {1.5, 0.25};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"prob-range"});

  bad = t;
  bad.tokens = {};
  bad.token_embeddings = {};
  bad.realized_probs = {};
  auto c = codes(bad);
  EXPECT_NE(std::find(c.begin(), c.end(), "empty"), c.end());

  bad = t;
  bad.token_embeddings = {{1, 0}};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"length-mismatch"});

  bad = t;
  bad.token_embeddings = {{1, 0}, {0, 0}};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"zero-embedding"});

  bad = t;
  bad.token_embeddings = {{1, 0}, {0, 1, 2}};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"embedding-dim"});

  bad = t;
  bad.next_token_dists = std::vector<TokenDistribution>{{{"a", 0.7}, {"b", 0.4}}, {{"a", 1.0}}};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"dist-sum"});
  bad.next_token_dists = std::vector<TokenDistribution>{{{"a", 0.5}}, {{"a", 1.0}}};
  EXPECT_TRUE(codes(bad).empty());
  bad.next_token_dists = std::vector<TokenDistribution>{{{"a", 0.5}}};
  EXPECT_EQ(codes(bad), std::vector<std::string>{"length-mismatch"});
}

TEST(TraceModel, InvalidTraceFailsLoadUnlessDisabled) {
  const std::string text = record("a", "c", true) + "\n" + trace_line("a", 3.0);
  EXPECT_THROW(parse_corpus(text), DataError);
  EXPECT_NO_THROW(parse_corpus(text, LoadOptions{.validate_traces = false}));
}

TEST(TraceModel, PerplexityFromProbs) {
  EXPECT_DOUBLE_EQ(perplexity_from_probs(std::vector<double>{0.5, 0.5}), 2.0);
  EXPECT_NEAR(perplexity_from_probs(std::vector<double>{0.1, 0.2, 0.4}), std::exp(-(std::log(0.008)) / 3), 1e-12);
  EXPECT_DOUBLE_EQ(perplexity_from_probs(std::vector<double>{1.0, 1.0}), 1.0);
}

TEST(TraceModel, MetaLinesSurvive) {
  const std::string text = std::string(R"({"kind":"meta","model":"tiny","z":1,"a":2})") + "\n" + record("a", "c", true);
  const Corpus c = parse_corpus(text);
  ASSERT_EQ(c.metadata.size(), 1u);
  EXPECT_EQ(c.metadata[0].dump(), R"({"kind":"meta","model":"tiny","z":1,"a":2})");
}

TEST(TraceModel, LoadsFullScaleCorpus) {
  // 10,724 single-record clusters with 4,054 accepted and 6,670 rejected.
  std::string text;
  text.reserve(10724 * 220);
  for (std::size_t i = 0; i < 10724; ++i) {
    const std::string id = test::pad_id("q", i);
    text += record(id, id, true) + "\n";
    text += R"({"kind":"decision","prompt_id":")" + id + R"(","decision":")" + (i < 4054 ? "ACCEPT" : "REJECT") +
            "\"}\n";
  }
  const Corpus c = parse_corpus(text);
  EXPECT_EQ(c.records.size(), 10724u);
  EXPECT_EQ(c.count(Decision::accept), 4054u);
  EXPECT_EQ(c.count(Decision::reject), 6670u);
}

TEST(TraceModel, MissingFileIsDataError) {
  EXPECT_THROW(load_corpus({"/nonexistent/corpus.jsonl"}), DataError);
}
