#pragma once

// Token-level signals for one (accepted, rejected) pair, plus the per-token
// manifold density score CI_tok.
//
// Tokens are aligned by position: only the first min(n_a, n_r) positions of
// the two traces are compared.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semconf/error.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/detail/numeric.hpp"

namespace semconf {

enum class ProbShiftMode { scalar, distribution };

inline std::string_view to_string(ProbShiftMode m) {
  return m == ProbShiftMode::scalar ? "scalar" : "distribution";
}

inline ProbShiftMode parse_prob_shift_mode(std::string_view s) {
  if (s == "scalar") return ProbShiftMode::scalar;
  if (s == "distribution") return ProbShiftMode::distribution;
  throw UsageError("unknown prob-shift mode '" + std::string(s) + "' (expected scalar or distribution)");
}

struct PairSignals {
  std::string accepted_id;
  std::string rejected_id;
  double similarity = 0.0;  // prompt-level cosine from retrieval
  double drift = 0.0;       // per-position distance clamped to [0, 1]
  double drift_raw = 0.0;   // unclamped mean of 1 - cos, in [0, 2]
  double prob_shift = 0.0;  // scalar realized-probability shift
  std::optional<double> prob_shift_dist;  // halved L1 over next-token dists
  double ppl_delta_raw = 0.0;
  double ppl_delta_norm = 0.0;  // filled by normalize_ppl
  double cs = 0.0;              // filled by confusion scoring

  friend bool operator==(const PairSignals&, const PairSignals&) = default;
};

namespace detail {

inline std::size_t aligned_length(const TokenTrace& a, const TokenTrace& r) {
  const std::size_t m = std::min(a.size(), r.size());
  if (m == 0) {
    throw DataError("token signals need non-empty traces ('" + a.prompt_id + "', '" + r.prompt_id + "')");
  }
  return m;
}

struct DriftPair {
  double clamped = 0.0;
  double raw = 0.0;
};

inline DriftPair drift_both(const TokenTrace& a, const TokenTrace& r) {
  const std::size_t m = aligned_length(a, r);
  double clamped = 0.0;
  double raw = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ea = a.token_embeddings.at(i);
    const auto& er = r.token_embeddings.at(i);
    if (ea.size() != er.size()) {
      throw DataError("token embedding dimension mismatch between '" + a.prompt_id + "' (" +
                      std::to_string(ea.size()) + ") and '" + r.prompt_id + "' (" + std::to_string(er.size()) + ")");
    }
    const double d = 1.0 - cosine(ea, er);
    raw += d;
    clamped += std::clamp(d, 0.0, 1.0);
  }
  return {clamped / static_cast<double>(m), raw / static_cast<double>(m)};
}

}  // namespace detail

inline double drift(const TokenTrace& a, const TokenTrace& r) { return detail::drift_both(a, r).clamped; }

inline double drift_unclamped(const TokenTrace& a, const TokenTrace& r) { return detail::drift_both(a, r).raw; }

// Halved L1 distance between two sparse distributions over the union support.
inline double half_l1(const TokenDistribution& p, const TokenDistribution& q) {
  double s = 0.0;
  auto ip = p.begin();
  auto iq = q.begin();
  while (ip != p.end() || iq != q.end()) {
    if (iq == q.end() || (ip != p.end() && ip->first < iq->first)) {
      s += std::abs(ip->second);
      ++ip;
    } else if (ip == p.end() || iq->first < ip->first) {
      s += std::abs(iq->second);
      ++iq;
    } else {
      s += std::abs(ip->second - iq->second);
      ++ip;
      ++iq;
    }
  }
  return std::clamp(0.5 * s, 0.0, 1.0);
}

inline double prob_shift(const TokenTrace& a, const TokenTrace& r, ProbShiftMode mode = ProbShiftMode::scalar) {
  const std::size_t m = detail::aligned_length(a, r);
  double s = 0.0;
  if (mode == ProbShiftMode::scalar) {
    for (std::size_t i = 0; i < m; ++i) s += std::abs(a.realized_probs.at(i) - r.realized_probs.at(i));
  } else {
    if (!a.next_token_dists || !r.next_token_dists) {
      throw DataError("distribution prob-shift needs next_token_dists on both '" + a.prompt_id + "' and '" +
                      r.prompt_id + "'");
    }
    for (std::size_t i = 0; i < m; ++i) s += half_l1(a.next_token_dists->at(i), r.next_token_dists->at(i));
  }
  return std::clamp(s / static_cast<double>(m), 0.0, 1.0);
}

inline double ppl_delta_raw(const TokenTrace& a, const TokenTrace& r) {
  return std::abs(a.perplexity - r.perplexity);
}

// All signals for one pair. The distribution shift is filled whenever both
// traces carry next-token distributions; `mode` only decides whether its
// absence is an error.
inline PairSignals compute_pair_signals(const TokenTrace& accepted, const TokenTrace& rejected, double similarity,
                                        ProbShiftMode mode = ProbShiftMode::scalar) {
  PairSignals p;
  p.accepted_id = accepted.prompt_id;
  p.rejected_id = rejected.prompt_id;
  p.similarity = similarity;
  const auto d = detail::drift_both(accepted, rejected);
  p.drift = d.clamped;
  p.drift_raw = d.raw;
  p.prob_shift = prob_shift(accepted, rejected, ProbShiftMode::scalar);
  if (accepted.next_token_dists && rejected.next_token_dists) {
    p.prob_shift_dist = prob_shift(accepted, rejected, ProbShiftMode::distribution);
  } else if (mode == ProbShiftMode::distribution) {
    prob_shift(accepted, rejected, ProbShiftMode::distribution);  // throws with context
  }
  p.ppl_delta_raw = ppl_delta_raw(accepted, rejected);
  return p;
}

// ---------------------------------------------------------------------------
// Token manifold confusion

struct TokenManifoldScore {
  std::size_t token_index = 0;
  std::string token;
  double ci_tok = 0.0;

  friend bool operator==(const TokenManifoldScore&, const TokenManifoldScore&) = default;
};

inline constexpr std::size_t kDefaultTokenNeighbors = 10;

// For every token, the mean cosine similarity to its K most similar other
// tokens (exact search, ties broken by ascending token index).
inline std::vector<TokenManifoldScore> token_manifold_ci(std::span<const std::string> tokens,
                                                         std::span<const std::vector<double>> embeddings,
                                                         std::size_t K) {
  if (K == 0) throw UsageError("token neighbor count K must be positive");
  if (tokens.size() != embeddings.size()) {
    throw DataError("token_manifold_ci: " + std::to_string(tokens.size()) + " tokens but " +
                    std::to_string(embeddings.size()) + " embeddings");
  }
  const std::size_t n = embeddings.size();
  if (n < K + 1) {
    throw DataError("token_manifold_ci needs at least K+1 = " + std::to_string(K + 1) + " tokens, got " +
                    std::to_string(n));
  }
  std::vector<std::vector<double>> unit;
  unit.reserve(n);
  for (const auto& e : embeddings) {
    if (e.size() != embeddings.front().size()) throw DataError("token_manifold_ci: mixed embedding dimensions");
    unit.push_back(detail::normalized(e));
  }
  std::vector<double> sims(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = std::clamp(detail::dot(unit[i], unit[j]), -1.0, 1.0);
      sims[i * n + j] = c;
      sims[j * n + i] = c;
    }
  }
  std::vector<TokenManifoldScore> out;
  out.reserve(n);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    const double* row = sims.data() + i * n;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(K), order.end(),
                      [&](std::size_t a, std::size_t b) { return row[a] > row[b] || (row[a] == row[b] && a < b); });
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += row[order[k]];
    out.push_back({i, tokens[i], s / static_cast<double>(K)});
  }
  return out;
}

inline std::vector<TokenManifoldScore> token_manifold_ci(const TokenTrace& trace, std::size_t K) {
  return token_manifold_ci(trace.tokens, trace.token_embeddings, K);
}

}  // namespace semconf
