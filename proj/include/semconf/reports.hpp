#pragma once

// JSON and CSV report writers. Column sets are fixed; undefined values are
// written as JSON null and as "NA" in CSV. Floats use the shortest text that
// round-trips to the same double.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "semconf/cohort_analysis.hpp"
#include "semconf/confusion_metrics.hpp"
#include "semconf/dataset_gates.hpp"
#include "semconf/guard_audit.hpp"
#include "semconf/token_signals.hpp"
#include "semconf/detail/numeric.hpp"

namespace semconf {

namespace csv {

inline std::string field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string num(double v) { return detail::format_double(v); }
inline std::string num(std::optional<double> v) { return v ? detail::format_double(*v) : "NA"; }
inline std::string num(std::size_t v) { return std::to_string(v); }
inline std::string flag(bool b) { return b ? "true" : "false"; }

inline void row(std::ostream& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out << ',';
    out << c;
    first = false;
  }
  out << '\n';
}

}  // namespace csv

namespace detail {

inline nlohmann::ordered_json opt(std::optional<double> v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Audit bundle

inline nlohmann::ordered_json summary_json(const nlohmann::ordered_json& config, const PipelineResult& res) {
  nlohmann::ordered_json j;
  j["config"] = config;
  const auto& s = res.summary;
  nlohmann::ordered_json sum;
  sum["ci_mean"] = detail::opt(s.ci_mean);
  sum["cr_at_tau"] = s.cr_at_tau;
  sum["cd"] = detail::opt(s.cd);
  sum["tau"] = s.tau;
  sum["frr"] = s.frr;
  sum["n_accepted"] = s.n_accepted;
  sum["n_rejected"] = s.n_rejected;
  j["summary"] = std::move(sum);
  j["normalization"] = {{"ppl_min", res.normalization.ppl_min},
                        {"ppl_max", res.normalization.ppl_max},
                        {"pair_count", res.normalization.pair_count}};
  nlohmann::ordered_json per = nlohmann::ordered_json::object();
  for (const auto& [id, ci] : s.per_rejection_ci) per[id] = ci;
  j["per_rejection_ci"] = std::move(per);
  return j;
}

inline void write_per_rejection_csv(std::ostream& out, std::span<const RejectionResult> rejections) {
  csv::row(out, {"prompt_id", "ci", "prompt_level_similarity", "neighbor_ids", "neighbor_similarities",
                 "mean_drift", "mean_prob_shift", "mean_ppl_delta_norm"});
  for (const auto& r : rejections) {
    std::string ids, sims;
    double drift = 0.0, shift = 0.0, ppl = 0.0;
    for (std::size_t i = 0; i < r.pairs.size(); ++i) {
      if (i) {
        ids += ';';
        sims += ';';
      }
      ids += r.neighbors.neighbors[i].accepted_id;
      sims += csv::num(r.neighbors.neighbors[i].similarity);
      drift += r.pairs[i].drift;
      shift += r.pairs[i].prob_shift;
      ppl += r.pairs[i].ppl_delta_norm;
    }
    const double n = static_cast<double>(r.pairs.size());
    csv::row(out, {csv::field(r.rejected_id), csv::num(r.ci), csv::num(r.prompt_level_similarity()), csv::field(ids),
                   sims, csv::num(drift / n), csv::num(shift / n), csv::num(ppl / n)});
  }
}

inline void write_pairs_csv(std::ostream& out, std::span<const RejectionResult> rejections) {
  csv::row(out, {"rejected_id", "accepted_id", "similarity", "drift", "drift_raw", "prob_shift", "prob_shift_dist",
                 "ppl_delta_raw", "ppl_delta_norm", "cs"});
  for (const auto& r : rejections) {
    for (const auto& p : r.pairs) {
      csv::row(out, {csv::field(p.rejected_id), csv::field(p.accepted_id), csv::num(p.similarity), csv::num(p.drift),
                     csv::num(p.drift_raw), csv::num(p.prob_shift), csv::num(p.prob_shift_dist),
                     csv::num(p.ppl_delta_raw), csv::num(p.ppl_delta_norm), csv::num(p.cs)});
    }
  }
}

inline void write_cohorts_csv(std::ostream& out, std::span<const CohortReport> cohorts) {
  csv::row(out, {"cohort", "n", "n_rejected", "frr", "cr_rej", "ci_rej", "cd_rej"});
  for (const auto& c : cohorts) {
    const auto& s = c.stats;
    csv::row(out, {csv::field(c.name), csv::num(s.n), csv::num(s.n_rejected), csv::num(s.frr), csv::num(s.cr_rej),
                   csv::num(s.ci_rej), csv::num(s.cd_rej)});
  }
}

inline void write_bands_csv(std::ostream& out, const OrthogonalityTable& t) {
  csv::row(out, {"band_lo", "band_hi", "count", "ci_min", "ci_q1", "ci_median", "ci_q3", "ci_max"});
  for (const auto& b : t.bands) {
    csv::row(out, {csv::num(b.lo), csv::num(b.hi), csv::num(b.count), csv::num(b.min), csv::num(b.q1),
                   csv::num(b.median), csv::num(b.q3), csv::num(b.max)});
  }
}

inline void write_scatter_csv(std::ostream& out, const OrthogonalityTable& t) {
  csv::row(out, {"prompt_id", "prompt_level_similarity", "ci"});
  for (const auto& p : t.points) csv::row(out, {csv::field(p.prompt_id), csv::num(p.prompt_level), csv::num(p.ci)});
}

inline void write_heatmap_csv(std::ostream& out, std::span<const HeatmapCell> cells) {
  csv::row(out, {"risk_bin", "sim_bin", "n", "n_rejected", "frr", "cr_rej"});
  for (const auto& c : cells) {
    csv::row(out, {std::string(to_string(c.risk)), std::string(to_string(c.sim)), csv::num(c.stats.n),
                   csv::num(c.stats.n_rejected), csv::num(c.stats.frr), csv::num(c.stats.cr_rej)});
  }
}

inline void write_sensitivity_csv(std::ostream& out, std::span<const SensitivityRow> rows) {
  csv::row(out, {"w_d", "w_p", "w_pi", "tau", "ci_mean", "cr_at_tau", "cd"});
  for (const auto& r : rows) {
    csv::row(out, {csv::num(r.weights.w_d), csv::num(r.weights.w_p), csv::num(r.weights.w_pi), csv::num(r.tau),
                   csv::num(r.ci_mean), csv::num(r.cr_at_tau), csv::num(r.cd)});
  }
}

// ---------------------------------------------------------------------------
// Gate and guard reports

inline void write_gate_csv(std::ostream& out, std::span<const GatedVariant> variants) {
  csv::row(out, {"candidate_id", "seed_id", "sim", "jaccard", "risk", "sim_ok", "lex_ok", "risk_ok", "passed"});
  for (const auto& v : variants) {
    const auto& g = v.verdict;
    csv::row(out, {csv::field(g.candidate_id), csv::field(v.seed_id), csv::num(g.measured.sim),
                   csv::num(g.measured.jaccard), csv::num(g.measured.risk), csv::flag(g.sim_ok), csv::flag(g.lex_ok),
                   csv::flag(g.risk_ok), csv::flag(g.passed)});
  }
}

inline nlohmann::ordered_json guard_json(const GuardReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["tau_accept"] = detail::opt(r.tau_accept);
  j["n"] = r.n;
  j["n_accepted"] = r.n_accepted;
  j["n_rejected"] = r.n_rejected;
  j["frr"] = r.frr;
  j["no_accepted_set"] = r.no_accepted_set;
  j["ci_mean_rej"] = detail::opt(r.ci_mean_rej);
  j["ci_std_rej"] = detail::opt(r.ci_std_rej);
  j["cr_threshold"] = r.cr_threshold;
  j["cr_rej_at_threshold"] = detail::opt(r.cr_rej_at_threshold);
  j["vetoed"] = r.vetoed;
  j["frr_after_veto"] = r.frr_after_veto;
  return j;
}

inline void write_guard_csv(std::ostream& out, std::span<const GuardReport> reports) {
  csv::row(out, {"name", "tau_accept", "n", "n_accepted", "n_rejected", "frr", "no_accepted_set", "ci_mean_rej",
                 "ci_std_rej", "cr_rej_at_threshold", "vetoed", "frr_after_veto"});
  for (const auto& r : reports) {
    csv::row(out, {csv::field(r.name), csv::num(r.tau_accept), csv::num(r.n), csv::num(r.n_accepted),
                   csv::num(r.n_rejected), csv::num(r.frr), csv::flag(r.no_accepted_set), csv::num(r.ci_mean_rej),
                   csv::num(r.ci_std_rej), csv::num(r.cr_rej_at_threshold), csv::num(r.vetoed),
                   csv::num(r.frr_after_veto)});
  }
}

// ---------------------------------------------------------------------------
// Token manifold export

struct PooledToken {
  std::string prompt_id;
  std::size_t position = 0;
};

inline void write_ci_tok_csv(std::ostream& out, std::span<const TokenManifoldScore> scores) {
  csv::row(out, {"token_index", "token", "ci_tok"});
  for (const auto& s : scores) csv::row(out, {csv::num(s.token_index), csv::field(s.token), csv::num(s.ci_tok)});
}

inline void write_token_embeddings_csv(std::ostream& out, std::span<const PooledToken> origin,
                                       std::span<const std::vector<double>> embeddings) {
  const std::size_t dim = embeddings.empty() ? 0 : embeddings.front().size();
  out << "token_index,prompt_id,position";
  for (std::size_t d = 0; d < dim; ++d) out << ",e" << d;
  out << '\n';
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    out << i << ',' << csv::field(origin[i].prompt_id) << ',' << origin[i].position;
    for (double v : embeddings[i]) out << ',' << csv::num(v);
    out << '\n';
  }
}

}  // namespace semconf
