#pragma once

// Canonical data model for audit corpora and the JSONL interchange schema.
//
// Every line of a corpus file is one JSON object with a "kind" field:
//
//   record     prompt_id, cluster_id, is_seed, text, seed_similarity,
//              lexical_overlap, risk_score, source
//   embedding  prompt_id, vector
//   trace      prompt_id, tokens, token_embeddings, realized_probs,
//              perplexity, next_token_dists (optional)
//   decision   prompt_id, decision (ACCEPT|REJECT), response_text,
//              benignness_score (all but prompt_id optional; a decision line
//              without "decision" is an unlabeled response)
//   meta       free-form producer metadata, carried through untouched
//
// Lines may be spread over any number of files in any order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semconf/error.hpp"
#include "semconf/detail/numeric.hpp"
#include "semconf/detail/text.hpp"

namespace semconf {

enum class Source { orbench, usebench, phtest, synthetic };
enum class Decision { accept, reject };

inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::orbench: return "orbench";
    case Source::usebench: return "usebench";
    case Source::phtest: return "phtest";
    case Source::synthetic: return "synthetic";
  }
  return "synthetic";
}

inline std::optional<Source> parse_source(std::string_view s) {
  if (s == "orbench") return Source::orbench;
  if (s == "usebench") return Source::usebench;
  if (s == "phtest") return Source::phtest;
  if (s == "synthetic") return Source::synthetic;
  return std::nullopt;
}

inline std::string_view to_string(Decision d) {
  return d == Decision::accept ? "ACCEPT" : "REJECT";
}

inline std::optional<Decision> parse_decision(std::string_view s) {
  if (s == "ACCEPT") return Decision::accept;
  if (s == "REJECT") return Decision::reject;
  return std::nullopt;
}

struct PromptRecord {
  std::string prompt_id;
  std::string cluster_id;
  bool is_seed = false;
  std::string text;
  double seed_similarity = 1.0;  // sentence-embedding cosine to the seed
  double lexical_overlap = 1.0;  // character n-gram Jaccard vs the seed
  double risk_score = 0.0;
  Source source = Source::synthetic;

  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

struct PromptEmbedding {
  std::string prompt_id;
  std::vector<double> vector;

  friend bool operator==(const PromptEmbedding&, const PromptEmbedding&) = default;
};

using TokenDistribution = std::map<std::string, double>;

struct TokenTrace {
  std::string prompt_id;
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> token_embeddings;
  std::vector<double> realized_probs;  // p(t_i | prefix) for the realized token
  std::optional<std::vector<TokenDistribution>> next_token_dists;
  double perplexity = 1.0;

  std::size_t size() const { return tokens.size(); }

  friend bool operator==(const TokenTrace&, const TokenTrace&) = default;
};

struct DecisionRecord {
  std::string prompt_id;
  std::optional<Decision> decision;
  std::optional<std::string> response_text;
  std::optional<double> benignness_score;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

struct Corpus {
  std::vector<PromptRecord> records;  // sorted by prompt_id
  std::map<std::string, PromptEmbedding> embeddings;
  std::map<std::string, TokenTrace> traces;
  std::map<std::string, DecisionRecord> decisions;
  std::vector<nlohmann::ordered_json> metadata;

  const PromptRecord* find_record(std::string_view id) const {
    auto it = std::lower_bound(records.begin(), records.end(), id,
                               [](const PromptRecord& r, std::string_view k) { return r.prompt_id < k; });
    return it != records.end() && it->prompt_id == id ? &*it : nullptr;
  }

  std::optional<Decision> decision_of(const std::string& id) const {
    auto it = decisions.find(id);
    if (it == decisions.end()) return std::nullopt;
    return it->second.decision;
  }

  std::size_t count(Decision d) const {
    std::size_t n = 0;
    for (const auto& [id, rec] : decisions) n += rec.decision == d ? 1 : 0;
    return n;
  }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// ---------------------------------------------------------------------------
// Trace validation

struct TraceViolation {
  std::string prompt_id;
  std::string code;
  std::string message;
};

inline constexpr double kPerplexityRelTol = 1e-6;
inline constexpr double kDistributionSumTol = 1e-6;

// exp(-mean(ln p)).
inline double perplexity_from_probs(std::span<const double> probs) {
  double s = 0.0;
  for (double p : probs) s += std::log(p);
  return std::exp(-s / static_cast<double>(probs.size()));
}

inline std::vector<TraceViolation> validate_trace(const TokenTrace& trace) {
  std::vector<TraceViolation> out;
  auto add = [&](std::string code, std::string msg) {
    out.push_back({trace.prompt_id, std::move(code), std::move(msg)});
  };
  const std::size_t n = trace.tokens.size();
  if (n == 0) add("empty", "trace has no tokens");
  if (trace.token_embeddings.size() != n || trace.realized_probs.size() != n) {
    add("length-mismatch", "tokens=" + std::to_string(n) +
                               " token_embeddings=" + std::to_string(trace.token_embeddings.size()) +
                               " realized_probs=" + std::to_string(trace.realized_probs.size()));
  }
  if (!trace.token_embeddings.empty()) {
    const std::size_t dim = trace.token_embeddings.front().size();
    for (std::size_t i = 0; i < trace.token_embeddings.size(); ++i) {
      const auto& e = trace.token_embeddings[i];
      if (e.size() != dim || dim == 0) {
        add("embedding-dim", "token " + std::to_string(i) + " has dimension " + std::to_string(e.size()) +
                                 ", expected " + std::to_string(dim));
      } else if (detail::norm(e) == 0.0) {
        add("zero-embedding", "token " + std::to_string(i) + " has a zero-norm embedding");
      }
    }
  }
  bool probs_ok = !trace.realized_probs.empty();
  for (std::size_t i = 0; i < trace.realized_probs.size(); ++i) {
    const double p = trace.realized_probs[i];
    if (!(p > 0.0 && p <= 1.0)) {
      add("prob-range", "realized_probs[" + std::to_string(i) + "] = " + detail::format_double(p) +
                            " outside (0, 1]");
      probs_ok = false;
    }
  }
  if (!(trace.perplexity >= 1.0) || !std::isfinite(trace.perplexity)) {
    add("ppl-range", "perplexity " + detail::format_double(trace.perplexity) + " is below 1");
  }
  if (probs_ok) {
    const double recomputed = perplexity_from_probs(trace.realized_probs);
    if (std::abs(recomputed - trace.perplexity) > kPerplexityRelTol * std::abs(recomputed)) {
      add("ppl-mismatch", "stored perplexity " + detail::format_double(trace.perplexity) +
                              " but realized_probs give " + detail::format_double(recomputed));
    }
  }
  if (trace.next_token_dists) {
    const auto& dists = *trace.next_token_dists;
    if (dists.size() != n) {
      add("length-mismatch", "next_token_dists has " + std::to_string(dists.size()) + " entries for " +
                                 std::to_string(n) + " tokens");
    }
    for (std::size_t i = 0; i < dists.size(); ++i) {
      double sum = 0.0;
      for (const auto& [tok, p] : dists[i]) {
        if (!(p >= 0.0 && p <= 1.0)) {
          add("dist-range", "next_token_dists[" + std::to_string(i) + "][" + tok + "] outside [0, 1]");
        }
        sum += p;
      }
      if (sum > 1.0 + kDistributionSumTol) {
        add("dist-sum", "next_token_dists[" + std::to_string(i) + "] sums to " + detail::format_double(sum));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSONL loading

namespace detail {

using json = nlohmann::json;

class LineContext {
 public:
  LineContext(std::string_view file, std::size_t line) : file_(file), line_(line) {}

  [[noreturn]] void fail(std::string_view field, std::string_view problem) const {
    throw DataError(where() + ": field '" + std::string(field) + "': " + std::string(problem));
  }

  std::string where() const { return file_ + ":" + std::to_string(line_); }

  const json& require(const json& obj, std::string_view field) const {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) fail(field, "missing");
    return *it;
  }

  static const json* optional(const json& obj, std::string_view field) {
    auto it = obj.find(field);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  std::string as_string(const json& v, std::string_view field) const {
    if (!v.is_string()) fail(field, "expected string");
    return v.get<std::string>();
  }

  double as_number(const json& v, std::string_view field) const {
    if (!v.is_number()) fail(field, "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(field, "non-finite number");
    return d;
  }

  bool as_bool(const json& v, std::string_view field) const {
    if (!v.is_boolean()) fail(field, "expected boolean");
    return v.get<bool>();
  }

  std::vector<double> as_vector(const json& v, std::string_view field) const {
    if (!v.is_array()) fail(field, "expected array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(as_number(x, field));
    return out;
  }

  std::string string_field(const json& obj, std::string_view f) const { return as_string(require(obj, f), f); }
  double number_field(const json& obj, std::string_view f) const { return as_number(require(obj, f), f); }

  double unit_field(const json& obj, std::string_view f, double lo, double hi) const {
    const double v = number_field(obj, f);
    if (v < lo || v > hi) {
      fail(f, "value " + format_double(v) + " outside [" + format_double(lo) + ", " + format_double(hi) + "]");
    }
    return v;
  }

 private:
  std::string file_;
  std::size_t line_;
};

inline PromptRecord parse_record(const json& obj, const LineContext& ctx) {
  PromptRecord r;
  r.prompt_id = ctx.string_field(obj, "prompt_id");
  r.cluster_id = ctx.string_field(obj, "cluster_id");
  r.is_seed = ctx.as_bool(ctx.require(obj, "is_seed"), "is_seed");
  r.text = ctx.string_field(obj, "text");
  r.seed_similarity = ctx.unit_field(obj, "seed_similarity", -1.0, 1.0);
  r.lexical_overlap = ctx.unit_field(obj, "lexical_overlap", 0.0, 1.0);
  r.risk_score = ctx.unit_field(obj, "risk_score", 0.0, 1.0);
  const std::string src = ctx.string_field(obj, "source");
  auto parsed = parse_source(src);
  if (!parsed) ctx.fail("source", "unknown source '" + src + "'");
  r.source = *parsed;
  return r;
}

inline PromptEmbedding parse_embedding(const json& obj, const LineContext& ctx) {
  PromptEmbedding e;
  e.prompt_id = ctx.string_field(obj, "prompt_id");
  e.vector = ctx.as_vector(ctx.require(obj, "vector"), "vector");
  if (e.vector.empty()) ctx.fail("vector", "empty vector");
  if (norm(e.vector) == 0.0) ctx.fail("vector", "zero-norm vector");
  return e;
}

inline TokenTrace parse_trace(const json& obj, const LineContext& ctx) {
  TokenTrace t;
  t.prompt_id = ctx.string_field(obj, "prompt_id");
  const json& toks = ctx.require(obj, "tokens");
  if (!toks.is_array()) ctx.fail("tokens", "expected array of strings");
  for (const auto& tok : toks) t.tokens.push_back(ctx.as_string(tok, "tokens"));
  const json& embs = ctx.require(obj, "token_embeddings");
  if (!embs.is_array()) ctx.fail("token_embeddings", "expected array of arrays");
  for (const auto& e : embs) t.token_embeddings.push_back(ctx.as_vector(e, "token_embeddings"));
  t.realized_probs = ctx.as_vector(ctx.require(obj, "realized_probs"), "realized_probs");
  t.perplexity = ctx.number_field(obj, "perplexity");
  if (const json* d = LineContext::optional(obj, "next_token_dists")) {
    if (!d->is_array()) ctx.fail("next_token_dists", "expected array of objects");
    std::vector<TokenDistribution> dists;
    for (const auto& entry : *d) {
      if (!entry.is_object()) ctx.fail("next_token_dists", "expected object");
      TokenDistribution dist;
      for (auto it = entry.begin(); it != entry.end(); ++it) {
        dist[it.key()] = ctx.as_number(it.value(), "next_token_dists");
      }
      dists.push_back(std::move(dist));
    }
    t.next_token_dists = std::move(dists);
  }
  return t;
}

inline DecisionRecord parse_decision_line(const json& obj, const LineContext& ctx) {
  DecisionRecord d;
  d.prompt_id = ctx.string_field(obj, "prompt_id");
  if (const json* v = LineContext::optional(obj, "decision")) {
    const std::string s = ctx.as_string(*v, "decision");
    d.decision = parse_decision(s);
    if (!d.decision) ctx.fail("decision", "expected ACCEPT or REJECT, got '" + s + "'");
  }
  if (const json* v = LineContext::optional(obj, "response_text")) d.response_text = ctx.as_string(*v, "response_text");
  if (const json* v = LineContext::optional(obj, "benignness_score")) {
    const double s = ctx.as_number(*v, "benignness_score");
    if (s < 0.0 || s > 1.0) ctx.fail("benignness_score", "outside [0, 1]");
    d.benignness_score = s;
  }
  if (!d.decision && !d.response_text && !d.benignness_score) {
    ctx.fail("decision", "missing (need decision, response_text or benignness_score)");
  }
  return d;
}

inline std::string join_ids(const std::vector<std::string>& ids, std::size_t limit = 20) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += '"' + ids[i] + '"';
  }
  if (ids.size() > limit) out += ", ... (" + std::to_string(ids.size()) + " total)";
  return out;
}

}  // namespace detail

struct LoadOptions {
  // When false, trace invariants are left to validate_trace (used by lint).
  bool validate_traces = true;
};

// Accumulates JSONL lines from any number of sources, then validates the
// whole corpus at once in finish().
class CorpusBuilder {
 public:
  explicit CorpusBuilder(LoadOptions opts = {}) : opts_(opts) {}

  void add_stream(std::istream& in, std::string_view source_name) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      add_line(line, detail::LineContext(source_name, lineno));
    }
  }

  void add_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open input file: " + path.string());
    add_stream(in, path.string());
  }

  Corpus finish() && {
    Corpus c;
    std::map<std::string, PromptRecord> records;
    for (auto& [id, rec] : records_) records.emplace(id, std::move(rec));
    check_references(records);
    check_clusters(records);
    check_dimensions();
    if (opts_.validate_traces) {
      std::vector<TraceViolation> all;
      for (const auto& [id, t] : traces_) {
        auto v = validate_trace(t);
        all.insert(all.end(), v.begin(), v.end());
      }
      if (!all.empty()) {
        std::string msg = "trace validation failed (" + std::to_string(all.size()) + " violations)";
        for (std::size_t i = 0; i < all.size() && i < 10; ++i) {
          msg += "\n  " + all[i].prompt_id + ": " + all[i].code + ": " + all[i].message;
        }
        throw DataError(msg);
      }
    }
    for (auto& [id, rec] : records) c.records.push_back(std::move(rec));
    c.embeddings = std::move(embeddings_);
    c.traces = std::move(traces_);
    c.decisions = std::move(decisions_);
    std::sort(metadata_.begin(), metadata_.end(),
              [](const auto& a, const auto& b) { return a.dump() < b.dump(); });
    c.metadata = std::move(metadata_);
    return c;
  }

 private:
  void add_line(const std::string& line, const detail::LineContext& ctx) {
    nlohmann::json plain;
    try {
      plain = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(ctx.where() + ": malformed JSON: " + e.what());
    }
    if (!plain.is_object()) throw DataError(ctx.where() + ": expected a JSON object");
    const std::string kind = ctx.string_field(plain, "kind");
    if (kind == "record") {
      auto r = detail::parse_record(plain, ctx);
      std::string id = r.prompt_id;
      insert_unique(records_, std::move(id), std::move(r), ctx, "record");
    } else if (kind == "embedding") {
      auto e = detail::parse_embedding(plain, ctx);
      std::string id = e.prompt_id;
      insert_unique(embeddings_, std::move(id), std::move(e), ctx, "embedding");
    } else if (kind == "trace") {
      auto t = detail::parse_trace(plain, ctx);
      std::string id = t.prompt_id;
      insert_unique(traces_, std::move(id), std::move(t), ctx, "trace");
    } else if (kind == "decision") {
      auto d = detail::parse_decision_line(plain, ctx);
      std::string id = d.prompt_id;
      insert_unique(decisions_, std::move(id), std::move(d), ctx, "decision");
    } else if (kind == "meta") {
      metadata_.push_back(nlohmann::ordered_json::parse(line));
    } else {
      ctx.fail("kind", "unknown kind '" + kind + "'");
    }
  }

  template <typename T>
  static void insert_unique(std::map<std::string, T>& m, std::string id, T&& value,
                            const detail::LineContext& ctx, std::string_view what) {
    if (!m.emplace(id, std::move(value)).second) {
      throw DataError(ctx.where() + ": duplicate " + std::string(what) + " for prompt_id '" + id + "'");
    }
  }

  void check_references(const std::map<std::string, PromptRecord>& records) const {
    std::set<std::string> orphans;
    auto scan = [&](const auto& m) {
      for (const auto& [id, v] : m) {
        if (!records.count(id)) orphans.insert(id);
      }
    };
    scan(embeddings_);
    scan(traces_);
    scan(decisions_);
    if (!orphans.empty()) {
      throw DataError("orphan prompt_id references (no matching record): " +
                      detail::join_ids({orphans.begin(), orphans.end()}));
    }
  }

  static void check_clusters(const std::map<std::string, PromptRecord>& records) {
    std::map<std::string, std::size_t> seeds_per_cluster;
    for (const auto& [id, r] : records) {
      if (!r.is_seed) continue;
      ++seeds_per_cluster[r.cluster_id];
      if (r.seed_similarity != 1.0 || r.lexical_overlap != 1.0) {
        throw DataError("seed record '" + id + "' must have seed_similarity = 1 and lexical_overlap = 1");
      }
    }
    for (const auto& [cluster, n] : seeds_per_cluster) {
      if (n > 1) throw DataError("cluster '" + cluster + "' has " + std::to_string(n) + " seed records");
    }
    std::vector<std::string> unseeded;
    for (const auto& [id, r] : records) {
      if (!r.is_seed && !seeds_per_cluster.count(r.cluster_id)) unseeded.push_back(id);
    }
    if (!unseeded.empty()) {
      throw DataError("records whose cluster_id matches no seed record: " + detail::join_ids(unseeded));
    }
  }

  void check_dimensions() const {
    std::optional<std::pair<std::string, std::size_t>> first;
    for (const auto& [id, e] : embeddings_) {
      if (!first) {
        first.emplace(id, e.vector.size());
      } else if (e.vector.size() != first->second) {
        throw DataError("embedding dimension mismatch: '" + first->first + "' has " +
                        std::to_string(first->second) + ", '" + id + "' has " + std::to_string(e.vector.size()));
      }
    }
    std::optional<std::pair<std::string, std::size_t>> tok;
    for (const auto& [id, t] : traces_) {
      for (const auto& e : t.token_embeddings) {
        if (!tok) {
          tok.emplace(id, e.size());
        } else if (e.size() != tok->second) {
          throw DataError("token embedding dimension mismatch: '" + tok->first + "' has " +
                          std::to_string(tok->second) + ", '" + id + "' has " + std::to_string(e.size()));
        }
      }
    }
  }

  LoadOptions opts_;
  std::map<std::string, PromptRecord> records_;
  std::map<std::string, PromptEmbedding> embeddings_;
  std::map<std::string, TokenTrace> traces_;
  std::map<std::string, DecisionRecord> decisions_;
  std::vector<nlohmann::ordered_json> metadata_;
};

inline Corpus load_corpus(const std::vector<std::filesystem::path>& paths, LoadOptions opts = {}) {
  CorpusBuilder b(opts);
  for (const auto& p : paths) b.add_file(p);
  return std::move(b).finish();
}

inline Corpus parse_corpus(std::string_view jsonl, LoadOptions opts = {}) {
  CorpusBuilder b(opts);
  std::istringstream in{std::string(jsonl)};
  b.add_stream(in, "<memory>");
  return std::move(b).finish();
}

// ---------------------------------------------------------------------------
// JSONL writing. Output is canonical: meta, records, embeddings, traces,
// decisions, each group sorted by prompt_id, fixed key order.

inline nlohmann::ordered_json to_json(const PromptRecord& r) {
  nlohmann::ordered_json j;
  j["kind"] = "record";
  j["prompt_id"] = r.prompt_id;
  j["cluster_id"] = r.cluster_id;
  j["is_seed"] = r.is_seed;
  j["text"] = r.text;
  j["seed_similarity"] = r.seed_similarity;
  j["lexical_overlap"] = r.lexical_overlap;
  j["risk_score"] = r.risk_score;
  j["source"] = std::string(to_string(r.source));
  return j;
}

inline nlohmann::ordered_json to_json(const PromptEmbedding& e) {
  nlohmann::ordered_json j;
  j["kind"] = "embedding";
  j["prompt_id"] = e.prompt_id;
  j["vector"] = e.vector;
  return j;
}

inline nlohmann::ordered_json to_json(const TokenTrace& t) {
  nlohmann::ordered_json j;
  j["kind"] = "trace";
  j["prompt_id"] = t.prompt_id;
  j["tokens"] = t.tokens;
  j["token_embeddings"] = t.token_embeddings;
  j["realized_probs"] = t.realized_probs;
  if (t.next_token_dists) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& d : *t.next_token_dists) {
      nlohmann::ordered_json m = nlohmann::ordered_json::object();
      for (const auto& [tok, p] : d) m[tok] = p;
      arr.push_back(std::move(m));
    }
    j["next_token_dists"] = std::move(arr);
  }
  j["perplexity"] = t.perplexity;
  return j;
}

inline nlohmann::ordered_json to_json(const DecisionRecord& d) {
  nlohmann::ordered_json j;
  j["kind"] = "decision";
  j["prompt_id"] = d.prompt_id;
  if (d.decision) j["decision"] = std::string(to_string(*d.decision));
  if (d.response_text) j["response_text"] = *d.response_text;
  if (d.benignness_score) j["benignness_score"] = *d.benignness_score;
  return j;
}

inline void write_decisions(const std::map<std::string, DecisionRecord>& decisions, std::ostream& out) {
  for (const auto& [id, d] : decisions) out << to_json(d).dump() << '\n';
}

inline void write_corpus(const Corpus& c, std::ostream& out) {
  for (const auto& m : c.metadata) out << m.dump() << '\n';
  for (const auto& r : c.records) out << to_json(r).dump() << '\n';
  for (const auto& [id, e] : c.embeddings) out << to_json(e).dump() << '\n';
  for (const auto& [id, t] : c.traces) out << to_json(t).dump() << '\n';
  write_decisions(c.decisions, out);
}

inline std::string serialize_corpus(const Corpus& c) {
  std::ostringstream out;
  write_corpus(c, out);
  return out.str();
}

}  // namespace semconf
