#pragma once

// Corpus construction gates: normalized dedup, reproducible seed sampling,
// the three-layer variant gate (intent retention, nontrivial rewrite,
// harmlessness band) and cluster assembly.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "semconf/error.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/detail/numeric.hpp"
#include "semconf/detail/text.hpp"

namespace semconf {

inline constexpr std::size_t kDefaultNgram = 3;
inline constexpr std::size_t kDefaultSeedCount = 2000;
inline constexpr std::size_t kVariantsPerSeed = 5;

using detail::normalize_text;

// Set Jaccard over character n-grams (code points) of the normalized texts.
// A text shorter than n contributes itself as its only gram.
inline double char_jaccard(std::string_view a, std::string_view b, std::size_t n = kDefaultNgram) {
  if (n < 1) throw UsageError("n-gram size must be >= 1");
  auto grams = [n](std::string_view s) {
    const std::u32string cps = detail::decode_utf8(normalize_text(s));
    if (cps.empty()) throw DataError("char_jaccard: text is empty after normalization");
    std::set<std::u32string> out;
    if (cps.size() < n) {
      out.insert(cps);
    } else {
      for (std::size_t i = 0; i + n <= cps.size(); ++i) out.insert(cps.substr(i, n));
    }
    return out;
  };
  const auto ga = grams(a);
  const auto gb = grams(b);
  std::size_t inter = 0;
  for (const auto& g : ga) inter += gb.count(g);
  const std::size_t uni = ga.size() + gb.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct GateThresholds {
  double min_similarity = 0.60;
  double max_jaccard = 0.90;
  double risk_min = 0.30;
  double risk_max = 0.70;
  std::size_t ngram = kDefaultNgram;

  friend bool operator==(const GateThresholds&, const GateThresholds&) = default;
};

struct GateMeasurement {
  double sim = 0.0;
  double jaccard = 0.0;
  double risk = 0.0;
};

struct GateVerdict {
  std::string candidate_id;
  bool sim_ok = false;
  bool lex_ok = false;
  bool risk_ok = false;
  bool passed = false;
  GateMeasurement measured;
};

// All comparisons are closed: boundary values pass.
inline GateVerdict gate_measured(std::string candidate_id, const GateMeasurement& m, const GateThresholds& t) {
  GateVerdict v;
  v.candidate_id = std::move(candidate_id);
  v.measured = m;
  v.sim_ok = m.sim >= t.min_similarity;
  v.lex_ok = m.jaccard <= t.max_jaccard;
  v.risk_ok = m.risk >= t.risk_min && m.risk <= t.risk_max;
  v.passed = v.sim_ok && v.lex_ok && v.risk_ok;
  return v;
}

inline GateVerdict gate_candidate(const PromptRecord& seed, std::string candidate_id, std::string_view cand_text,
                                  std::span<const double> cand_embedding, std::span<const double> seed_embedding,
                                  double risk, const GateThresholds& t = {}) {
  if (cand_embedding.size() != seed_embedding.size()) {
    throw DataError("candidate '" + candidate_id + "' embedding has dimension " +
                    std::to_string(cand_embedding.size()) + ", seed '" + seed.prompt_id + "' has " +
                    std::to_string(seed_embedding.size()));
  }
  if (!(risk >= 0.0 && risk <= 1.0)) throw DataError("candidate '" + candidate_id + "' risk outside [0, 1]");
  GateMeasurement m;
  m.sim = detail::cosine(cand_embedding, seed_embedding);
  m.jaccard = char_jaccard(seed.text, cand_text, t.ngram);
  m.risk = risk;
  return gate_measured(std::move(candidate_id), m, t);
}

// Weighted mean of per-classifier risk scores. Classifiers without an
// explicit weight get weight 1; with no weights this is the arithmetic mean.
inline double ensemble_risk(const std::map<std::string, double>& scores,
                            const std::map<std::string, double>& weights = {}) {
  if (scores.empty()) throw DataError("ensemble risk needs at least one classifier score");
  double num = 0.0;
  double den = 0.0;
  for (const auto& [name, s] : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw DataError("classifier '" + name + "' score outside [0, 1]");
    auto it = weights.find(name);
    const double w = it == weights.end() ? 1.0 : it->second;
    if (w < 0.0) throw UsageError("classifier weight for '" + name + "' is negative");
    num += w * s;
    den += w;
  }
  if (den <= 0.0) throw UsageError("classifier weights sum to zero");
  return num / den;
}

// ---------------------------------------------------------------------------
// Dedup and sampling

// Drops records whose normalized text repeats an earlier record.
inline std::vector<PromptRecord> dedup_records(std::span<const PromptRecord> records) {
  std::unordered_set<std::string> seen;
  std::vector<PromptRecord> out;
  for (const auto& r : records) {
    if (seen.insert(normalize_text(r.text)).second) out.push_back(r);
  }
  return out;
}

namespace detail {

// Unbiased draw in [0, bound) from mt19937_64 by rejecting the top partial
// block of the 64-bit range.
inline std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  for (;;) {
    const std::uint64_t x = gen();
    if (x <= limit) return x % bound;
  }
}

}  // namespace detail

// Sample order is fixed by this algorithm:
//   gen = std::mt19937_64(rng_seed)
//   for i in 0 .. n-1: j = i + bounded_draw(gen, size - i); swap(pool[i], pool[j])
// and the first n entries of the pool are returned in draw order. Both the
// generator and the draw are pinned, so results match across platforms.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n, std::uint64_t rng_seed) {
  if (n > population) {
    throw DataError("cannot sample " + std::to_string(n) + " seeds from " + std::to_string(population) +
                    " distinct records");
  }
  std::vector<std::size_t> pool(population);
  for (std::size_t i = 0; i < population; ++i) pool[i] = i;
  std::mt19937_64 gen(rng_seed);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(detail::bounded_draw(gen, population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n);
  return pool;
}

inline std::vector<PromptRecord> dedup_and_sample(std::span<const PromptRecord> records,
                                                  std::size_t n_seeds = kDefaultSeedCount,
                                                  std::uint64_t rng_seed = 42) {
  const auto distinct = dedup_records(records);
  std::vector<PromptRecord> out;
  for (std::size_t idx : sample_indices(distinct.size(), n_seeds, rng_seed)) out.push_back(distinct[idx]);
  return out;
}

// ---------------------------------------------------------------------------
// Candidates and cluster assembly

struct Candidate {
  std::string candidate_id;
  std::string seed_id;
  std::string text;
  std::vector<double> embedding;
  std::map<std::string, double> risk_scores;  // per classifier
};

// candidates.jsonl: {"candidate_id", "seed_id", "text", "embedding": [...],
// "risk_scores": {"classifier": score, ...}}
inline std::vector<Candidate> load_candidates(std::istream& in, std::string_view source_name) {
  std::vector<Candidate> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const detail::LineContext ctx(source_name, lineno);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(ctx.where() + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw DataError(ctx.where() + ": expected a JSON object");
    Candidate c;
    c.candidate_id = ctx.string_field(obj, "candidate_id");
    c.seed_id = ctx.string_field(obj, "seed_id");
    c.text = ctx.string_field(obj, "text");
    c.embedding = ctx.as_vector(ctx.require(obj, "embedding"), "embedding");
    const auto& rs = ctx.require(obj, "risk_scores");
    if (!rs.is_object() || rs.empty()) ctx.fail("risk_scores", "expected non-empty object of classifier scores");
    for (auto it = rs.begin(); it != rs.end(); ++it) {
      const double s = ctx.as_number(it.value(), "risk_scores");
      if (s < 0.0 || s > 1.0) ctx.fail("risk_scores", "score for '" + it.key() + "' outside [0, 1]");
      c.risk_scores[it.key()] = s;
    }
    if (!ids.insert(c.candidate_id).second) {
      throw DataError(ctx.where() + ": duplicate candidate_id '" + c.candidate_id + "'");
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open candidates file: " + path.string());
  return load_candidates(in, path.string());
}

struct GatedVariant {
  std::string seed_id;
  std::string text;
  GateVerdict verdict;
};

struct AssemblyResult {
  std::vector<PromptRecord> records;
  std::vector<std::string> warnings;
};

// Seeds plus their passed variants, annotated with the measured gate values.
inline AssemblyResult assemble_clusters(std::span<const PromptRecord> seeds, std::span<const GatedVariant> variants) {
  std::map<std::string, const PromptRecord*> by_id;
  for (const auto& s : seeds) by_id.emplace(s.prompt_id, &s);
  std::map<std::string, std::size_t> passed;
  AssemblyResult out;
  for (const auto& s : seeds) {
    PromptRecord r = s;
    r.is_seed = true;
    r.seed_similarity = 1.0;
    r.lexical_overlap = 1.0;
    out.records.push_back(std::move(r));
    passed[s.prompt_id] = 0;
  }
  for (const auto& v : variants) {
    auto it = by_id.find(v.seed_id);
    if (it == by_id.end()) {
      throw DataError("variant '" + v.verdict.candidate_id + "' references unknown seed '" + v.seed_id + "'");
    }
    if (!v.verdict.passed) continue;
    const PromptRecord& seed = *it->second;
    PromptRecord r;
    r.prompt_id = v.verdict.candidate_id;
    r.cluster_id = seed.cluster_id;
    r.is_seed = false;
    r.text = v.text;
    r.seed_similarity = v.verdict.measured.sim;
    r.lexical_overlap = v.verdict.measured.jaccard;
    r.risk_score = v.verdict.measured.risk;
    r.source = seed.source;
    out.records.push_back(std::move(r));
    ++passed[v.seed_id];
  }
  for (const auto& [seed_id, n] : passed) {
    if (n != kVariantsPerSeed) {
      out.warnings.push_back("seed '" + seed_id + "' has " + std::to_string(n) + " passed variants (expected " +
                             std::to_string(kVariantsPerSeed) + ")");
    }
  }
  return out;
}

}  // namespace semconf
