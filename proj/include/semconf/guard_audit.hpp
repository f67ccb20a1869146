#pragma once

// Confusion-aware audit of threshold guards: decisions from benignness
// scores, rejected-set confusion, and a single-pass CI veto.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semconf/confusion_metrics.hpp"
#include "semconf/error.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/detail/parallel.hpp"

namespace semconf {

inline constexpr double kDefaultGuardCrThreshold = 0.60;

struct GuardConfig {
  std::string name = "guard";
  double tau_accept = 0.5;
  double cr_threshold = kDefaultGuardCrThreshold;
  std::optional<double> veto_ci;

  void validate() const {
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(tau_accept)) throw UsageError("guard tau_accept must lie in [0, 1]");
    if (!unit(cr_threshold)) throw UsageError("guard cr_threshold must lie in [0, 1]");
    if (veto_ci && !unit(*veto_ci)) throw UsageError("guard veto_ci must lie in [0, 1]");
  }
};

struct GuardReport {
  std::string name;
  std::optional<double> tau_accept;  // empty when decisions were injected
  std::size_t n = 0;
  std::size_t n_accepted = 0;
  std::size_t n_rejected = 0;
  double frr = 0.0;
  bool no_accepted_set = false;  // every prompt rejected: confusion undefined
  std::optional<double> ci_mean_rej;
  std::optional<double> ci_std_rej;
  std::optional<double> cr_rej_at_threshold;
  double cr_threshold = kDefaultGuardCrThreshold;
  std::size_t vetoed = 0;
  double frr_after_veto = 0.0;
  std::map<std::string, Decision> final_decisions;  // after veto
  std::map<std::string, double> per_rejection_ci;
};

inline std::map<std::string, Decision> apply_guard(const std::map<std::string, double>& scores,
                                                   const GuardConfig& cfg) {
  cfg.validate();
  std::map<std::string, Decision> out;
  for (const auto& [id, s] : scores) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw DataError("guard score for '" + id + "' is " + detail::format_double(s) + ", outside [0, 1]");
    }
    out.emplace(id, s >= cfg.tau_accept ? Decision::accept : Decision::reject);
  }
  return out;
}

// Guard scores: one {"prompt_id": ..., "score": ...} object per line.
inline std::map<std::string, double> load_guard_scores(std::istream& in, std::string_view source_name) {
  std::map<std::string, double> out;
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
    const std::string id = ctx.string_field(obj, "prompt_id");
    const double s = ctx.unit_field(obj, "score", 0.0, 1.0);
    if (!out.emplace(id, s).second) throw DataError(ctx.where() + ": duplicate score for '" + id + "'");
  }
  return out;
}

inline std::map<std::string, double> load_guard_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open guard scores file: " + path.string());
  return load_guard_scores(in, path.string());
}

// Replaces the corpus decisions. Every record must receive one.
inline Corpus with_decisions(Corpus corpus, const std::map<std::string, Decision>& decisions) {
  std::vector<std::string> missing;
  for (const auto& r : corpus.records) {
    if (!decisions.count(r.prompt_id)) missing.push_back(r.prompt_id);
  }
  if (!missing.empty()) throw DataError("no guard decision for prompts: " + detail::join_ids(missing));
  for (const auto& [id, d] : decisions) {
    if (!corpus.find_record(id)) throw DataError("guard decision for unknown prompt '" + id + "'");
    auto& rec = corpus.decisions[id];
    rec.prompt_id = id;
    rec.decision = d;
  }
  return corpus;
}

// Shared audit path for guards and models: uses the corpus's own decisions.
inline GuardReport audit_decisions(const Corpus& corpus, const GuardConfig& cfg, const PipelineConfig& pipeline) {
  cfg.validate();
  GuardReport rep;
  rep.name = cfg.name;
  rep.cr_threshold = cfg.cr_threshold;
  for (const auto& r : corpus.records) {
    auto d = corpus.decision_of(r.prompt_id);
    if (!d) throw DataError("prompt '" + r.prompt_id + "' has no decision");
    rep.final_decisions.emplace(r.prompt_id, *d);
    ++(*d == Decision::accept ? rep.n_accepted : rep.n_rejected);
  }
  rep.n = rep.n_accepted + rep.n_rejected;
  rep.frr = false_rejection_rate(rep.n_accepted, rep.n_rejected);
  rep.frr_after_veto = rep.frr;
  if (rep.n_accepted == 0) {
    rep.no_accepted_set = true;
    return rep;
  }
  PipelineConfig pc = pipeline;
  pc.tau = cfg.cr_threshold;
  const PipelineResult res = run_pipeline(corpus, pc);
  rep.per_rejection_ci = res.summary.per_rejection_ci;
  if (rep.n_rejected > 0) {
    rep.ci_mean_rej = res.summary.ci_mean;
    rep.ci_std_rej = res.summary.cd;
    rep.cr_rej_at_threshold = res.summary.cr_at_tau;
  }
  if (cfg.veto_ci) {
    for (const auto& [id, ci] : res.summary.per_rejection_ci) {
      if (ci >= *cfg.veto_ci) {
        rep.final_decisions[id] = Decision::accept;
        ++rep.vetoed;
      }
    }
    rep.frr_after_veto = static_cast<double>(rep.n_rejected - rep.vetoed) / static_cast<double>(rep.n);
  }
  return rep;
}

inline GuardReport audit_guard(const Corpus& corpus, const std::map<std::string, double>& scores,
                               const GuardConfig& cfg, const PipelineConfig& pipeline) {
  GuardReport rep = audit_decisions(with_decisions(corpus, apply_guard(scores, cfg)), cfg, pipeline);
  rep.tau_accept = cfg.tau_accept;
  return rep;
}

// One report per threshold, ordered by ascending tau.
inline std::vector<GuardReport> threshold_sweep(const Corpus& corpus, const std::map<std::string, double>& scores,
                                                std::vector<double> taus, const GuardConfig& cfg,
                                                const PipelineConfig& pipeline) {
  if (taus.empty()) throw UsageError("threshold sweep needs at least one tau");
  std::sort(taus.begin(), taus.end());
  taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
  for (double t : taus) {
    if (!(t >= 0.0 && t <= 1.0)) throw UsageError("sweep tau " + detail::format_double(t) + " outside [0, 1]");
  }
  std::vector<GuardReport> out(taus.size());
  PipelineConfig inner = pipeline;
  inner.threads = 1;
  detail::parallel_for(taus.size(), pipeline.threads, [&](std::size_t i) {
    GuardConfig c = cfg;
    c.tau_accept = taus[i];
    out[i] = audit_guard(corpus, scores, c, inner);
  });
  return out;
}

}  // namespace semconf
