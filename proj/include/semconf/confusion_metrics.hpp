#pragma once

// Confusion Score, per-rejection Confusion Index, and the dataset summary
// (CI mean, CR@tau, CD, FRR), plus the end-to-end scoring pipeline.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semconf/error.hpp"
#include "semconf/neighbor_index.hpp"
#include "semconf/token_signals.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/detail/numeric.hpp"
#include "semconf/detail/parallel.hpp"

namespace semconf {

inline constexpr double kDefaultTau = 0.75;
inline constexpr double kWeightSumTol = 1e-9;

struct Weights {
  double w_d = 0.4;   // drift
  double w_p = 0.1;   // probability shift
  double w_pi = 0.5;  // perplexity contrast

  void validate() const {
    if (!(w_d >= 0.0 && w_p >= 0.0 && w_pi >= 0.0)) throw UsageError("confusion weights must be non-negative");
    if (std::abs(w_d + w_p + w_pi - 1.0) > kWeightSumTol) {
      throw UsageError("confusion weights must sum to 1 (got " + detail::format_double(w_d + w_p + w_pi) + ")");
    }
  }

  friend bool operator==(const Weights&, const Weights&) = default;
};

struct NormalizationStats {
  double ppl_min = 0.0;
  double ppl_max = 0.0;
  std::size_t pair_count = 0;

  friend bool operator==(const NormalizationStats&, const NormalizationStats&) = default;
};

// Min-max maps ppl_delta_raw onto [0, 1] over exactly these pairs. When every
// raw delta is equal the normalized value is 0 for all pairs.
inline NormalizationStats normalize_ppl_in_place(std::span<PairSignals> pairs) {
  if (pairs.empty()) throw DataError("cannot normalize perplexity contrast over zero pairs");
  NormalizationStats st{pairs.front().ppl_delta_raw, pairs.front().ppl_delta_raw, pairs.size()};
  for (const auto& p : pairs) {
    st.ppl_min = std::min(st.ppl_min, p.ppl_delta_raw);
    st.ppl_max = std::max(st.ppl_max, p.ppl_delta_raw);
  }
  const double range = st.ppl_max - st.ppl_min;
  for (auto& p : pairs) {
    p.ppl_delta_norm = range > 0.0 ? std::clamp((p.ppl_delta_raw - st.ppl_min) / range, 0.0, 1.0) : 0.0;
  }
  return st;
}

inline std::pair<std::vector<PairSignals>, NormalizationStats> normalize_ppl(std::vector<PairSignals> pairs) {
  const auto st = normalize_ppl_in_place(pairs);
  return {std::move(pairs), st};
}

inline double confusion_score(const PairSignals& p, const Weights& w, ProbShiftMode mode = ProbShiftMode::scalar) {
  w.validate();
  double shift = p.prob_shift;
  if (mode == ProbShiftMode::distribution) {
    if (!p.prob_shift_dist) {
      throw DataError("pair (" + p.accepted_id + ", " + p.rejected_id + ") has no distribution prob-shift");
    }
    shift = *p.prob_shift_dist;
  }
  return std::clamp(w.w_d * p.drift + w.w_p * shift + w.w_pi * p.ppl_delta_norm, 0.0, 1.0);
}

// Mean confusion score over the retrieved neighbors, in neighbor order.
inline double confusion_index(const NeighborSet& neighbors, const std::map<std::string, double>& pair_scores) {
  if (neighbors.neighbors.empty()) {
    throw DataError("rejection '" + neighbors.rejected_id + "' has no accepted neighborhood");
  }
  double s = 0.0;
  for (const auto& n : neighbors.neighbors) {
    auto it = pair_scores.find(n.accepted_id);
    if (it == pair_scores.end()) {
      throw DataError("no confusion score for pair (" + n.accepted_id + ", " + neighbors.rejected_id + ")");
    }
    s += it->second;
  }
  return s / static_cast<double>(neighbors.neighbors.size());
}

inline double false_rejection_rate(std::size_t n_accepted, std::size_t n_rejected) {
  if (n_accepted + n_rejected == 0) throw DataError("false rejection rate undefined for an empty decision set");
  return static_cast<double>(n_rejected) / static_cast<double>(n_accepted + n_rejected);
}

// ci_mean and cd are empty when there are no rejections.
struct ConfusionSummary {
  std::optional<double> ci_mean;
  double cr_at_tau = 0.0;
  std::optional<double> cd;
  double tau = kDefaultTau;
  double frr = 0.0;
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  std::map<std::string, double> per_rejection_ci;

  friend bool operator==(const ConfusionSummary&, const ConfusionSummary&) = default;
};

inline double confusion_rate(const std::map<std::string, double>& per_rejection_ci, double tau) {
  if (per_rejection_ci.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& [id, ci] : per_rejection_ci) hits += ci >= tau ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(per_rejection_ci.size());
}

inline ConfusionSummary summarize(std::map<std::string, double> per_rejection_ci, double tau, std::size_t n_accepted) {
  ConfusionSummary s;
  s.tau = tau;
  s.n_accepted = n_accepted;
  s.n_rejected = per_rejection_ci.size();
  s.frr = false_rejection_rate(n_accepted, s.n_rejected);
  s.cr_at_tau = confusion_rate(per_rejection_ci, tau);
  if (!per_rejection_ci.empty()) {
    std::vector<double> values;
    values.reserve(per_rejection_ci.size());
    for (const auto& [id, ci] : per_rejection_ci) values.push_back(ci);
    const auto ms = detail::mean_std(values);
    s.ci_mean = ms.mean;
    s.cd = ms.stdev;
  }
  s.per_rejection_ci = std::move(per_rejection_ci);
  return s;
}

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineConfig {
  std::size_t k = kDefaultNeighbors;
  Weights weights;
  double tau = kDefaultTau;
  ProbShiftMode prob_shift_mode = ProbShiftMode::scalar;
  unsigned threads = 1;
};

struct RejectionResult {
  std::string rejected_id;
  NeighborSet neighbors;
  std::vector<PairSignals> pairs;  // one per neighbor, same order
  double ci = 0.0;

  // Mean prompt-embedding similarity to the retrieved neighbors.
  double prompt_level_similarity() const {
    double s = 0.0;
    for (const auto& n : neighbors.neighbors) s += n.similarity;
    return s / static_cast<double>(neighbors.neighbors.size());
  }
};

struct PipelineResult {
  ConfusionSummary summary;
  NormalizationStats normalization;
  std::vector<RejectionResult> rejections;  // sorted by rejected_id
};

namespace detail {

inline const TokenTrace& trace_for(const Corpus& c, const std::string& id) {
  auto it = c.traces.find(id);
  if (it == c.traces.end()) throw DataError("missing trace for prompt '" + id + "'");
  return it->second;
}

inline const PromptEmbedding& embedding_for(const Corpus& c, const std::string& id) {
  auto it = c.embeddings.find(id);
  if (it == c.embeddings.end()) throw DataError("missing embedding for prompt '" + id + "'");
  return it->second;
}

struct DecisionSplit {
  std::vector<std::string> accepted;
  std::vector<std::string> rejected;
};

inline DecisionSplit split_decisions(const Corpus& c) {
  DecisionSplit out;
  for (const auto& r : c.records) {
    auto d = c.decision_of(r.prompt_id);
    if (!d) throw DataError("prompt '" + r.prompt_id + "' has no decision");
    (*d == Decision::accept ? out.accepted : out.rejected).push_back(r.prompt_id);
  }
  return out;
}

// Fills cs and ci from already-normalized pairs, then summarizes.
inline void score_rejections(PipelineResult& res, std::size_t n_accepted, const Weights& w, double tau,
                             ProbShiftMode mode) {
  w.validate();
  std::map<std::string, double> per_ci;
  for (auto& rej : res.rejections) {
    std::map<std::string, double> scores;
    for (auto& p : rej.pairs) {
      p.cs = confusion_score(p, w, mode);
      scores.emplace(p.accepted_id, p.cs);
    }
    rej.ci = confusion_index(rej.neighbors, scores);
    per_ci.emplace(rej.rejected_id, rej.ci);
  }
  res.summary = summarize(std::move(per_ci), tau, n_accepted);
}

}  // namespace detail

// Retrieval, pair signals, per-run perplexity normalization, scoring and
// aggregation. `cached` may supply a prebuilt index; it is used only when its
// rows are exactly the normalized accepted embeddings of this corpus.
inline PipelineResult run_pipeline(const Corpus& corpus, const PipelineConfig& cfg,
                                   const NeighborIndex* cached = nullptr) {
  cfg.weights.validate();
  if (cfg.k == 0) throw UsageError("neighbor count k must be positive");
  const auto split = detail::split_decisions(corpus);

  std::map<std::string, PromptEmbedding> accepted;
  for (const auto& id : split.accepted) accepted.emplace(id, detail::embedding_for(corpus, id));
  std::optional<NeighborIndex> built;
  if (!cached || !cached->matches(accepted)) built = NeighborIndex::build(accepted);
  const NeighborIndex& index = built ? *built : *cached;

  PipelineResult res;
  res.rejections.resize(split.rejected.size());
  detail::parallel_for(split.rejected.size(), cfg.threads, [&](std::size_t i) {
    const std::string& rid = split.rejected[i];
    RejectionResult& out = res.rejections[i];
    out.rejected_id = rid;
    out.neighbors = index.query(detail::embedding_for(corpus, rid), cfg.k);
    const TokenTrace& rt = detail::trace_for(corpus, rid);
    out.pairs.reserve(out.neighbors.neighbors.size());
    for (const auto& n : out.neighbors.neighbors) {
      out.pairs.push_back(
          compute_pair_signals(detail::trace_for(corpus, n.accepted_id), rt, n.similarity, cfg.prob_shift_mode));
    }
  });

  // Barrier: normalization needs every raw delta of the run.
  std::vector<PairSignals> flat;
  for (const auto& rej : res.rejections) flat.insert(flat.end(), rej.pairs.begin(), rej.pairs.end());
  if (!flat.empty()) {
    res.normalization = normalize_ppl_in_place(flat);
    std::size_t i = 0;
    for (auto& rej : res.rejections) {
      for (auto& p : rej.pairs) p.ppl_delta_norm = flat[i++].ppl_delta_norm;
    }
  }
  detail::score_rejections(res, split.accepted.size(), cfg.weights, cfg.tau, cfg.prob_shift_mode);
  return res;
}

// Re-weights an existing run without re-retrieving or re-normalizing.
inline PipelineResult rescore(PipelineResult res, const Weights& w, double tau,
                              ProbShiftMode mode = ProbShiftMode::scalar) {
  detail::score_rejections(res, res.summary.n_accepted, w, tau, mode);
  return res;
}

// ---------------------------------------------------------------------------
// Weight / threshold sensitivity grid

struct GridSpec {
  int weight_steps = 10;  // each weight in {0, 1/steps, ..., 1}, filtered to the simplex
  std::vector<double> taus = {0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9};
};

struct SensitivityRow {
  Weights weights;
  double tau = 0.0;
  std::optional<double> ci_mean;
  double cr_at_tau = 0.0;
  std::optional<double> cd;
};

inline std::vector<SensitivityRow> grid_search(const PipelineResult& base, const GridSpec& grid,
                                               ProbShiftMode mode = ProbShiftMode::scalar) {
  if (grid.weight_steps < 1) throw UsageError("grid weight_steps must be >= 1");
  if (grid.taus.empty()) throw UsageError("grid needs at least one tau");
  std::vector<SensitivityRow> rows;
  const double steps = grid.weight_steps;
  for (int i = 0; i <= grid.weight_steps; ++i) {
    for (int j = 0; i + j <= grid.weight_steps; ++j) {
      const Weights w{i / steps, j / steps, (grid.weight_steps - i - j) / steps};
      const PipelineResult scored = rescore(base, w, grid.taus.front(), mode);
      for (double tau : grid.taus) {
        SensitivityRow row;
        row.weights = w;
        row.tau = tau;
        row.ci_mean = scored.summary.ci_mean;
        row.cd = scored.summary.cd;
        row.cr_at_tau = confusion_rate(scored.summary.per_rejection_ci, tau);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace semconf
