#pragma once

// Command-line front end. Subcommands:
//
//   label     label responses with refusal cues        -> decisions.jsonl
//   audit     confusion pipeline + cohort analysis     -> summary.json, per_rejection.csv,
//                                                         pairs.csv, cohorts.csv, bands.csv,
//                                                         scatter.csv, heatmap.csv
//   gate      three-layer variant gate + assembly      -> gate_report.csv, gated_records.jsonl
//   guard     threshold-guard audit (optional sweep)   -> guard_report.json, guard_report.csv,
//                                                         guard_decisions.jsonl
//   sweep     weight / tau sensitivity grid            -> sensitivity.csv
//   tokens    per-token manifold confusion             -> ci_tok.csv, token_embeddings.csv
//   validate  trace lint                               -> stdout
//
// Exit codes: 0 success, 1 usage or config error, 2 data or precondition error.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "semconf/cohort_analysis.hpp"
#include "semconf/config.hpp"
#include "semconf/confusion_metrics.hpp"
#include "semconf/dataset_gates.hpp"
#include "semconf/guard_audit.hpp"
#include "semconf/neighbor_index.hpp"
#include "semconf/refusal_labeler.hpp"
#include "semconf/reports.hpp"
#include "semconf/token_signals.hpp"
#include "semconf/trace_model.hpp"

namespace semconf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

namespace detail {

namespace fs = std::filesystem;

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write output file: " + path.string());
  out << content;
  if (!out) throw DataError("failed writing output file: " + path.string());
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream s;
  fn(s);
  write_file(path, s.str());
}

inline fs::path prepare_output_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

inline std::vector<fs::path> existing_inputs(const std::vector<std::string>& inputs, std::string_view what) {
  std::vector<fs::path> out;
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw UsageError(std::string(what) + " file not found: " + p);
    out.emplace_back(p);
  }
  return out;
}

inline Corpus load_inputs(const RunConfig& cfg, LoadOptions opts = {}) {
  if (cfg.inputs.empty()) throw UsageError("no input files given (use --input or config 'inputs')");
  return load_corpus(existing_inputs(cfg.inputs, "input"), opts);
}

inline std::string fmt(std::optional<double> v) { return v ? semconf::detail::format_double(*v) : "NA"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Commands. Each takes the fully resolved configuration.

inline int cmd_label(const RunConfig& cfg, std::ostream& out) {
  const CueLexicon lexicon = cfg.lexicon();
  const auto res = label_corpus(detail::load_inputs(cfg), lexicon);
  const auto dir = detail::prepare_output_dir(cfg);
  detail::write_with(dir / "decisions.jsonl", [&](std::ostream& s) { write_decisions(res.corpus.decisions, s); });
  out << "labeled " << res.n_accept + res.n_reject << " responses: ACCEPT=" << res.n_accept
      << " REJECT=" << res.n_reject << '\n';
  return kExitOk;
}

inline int cmd_audit(const RunConfig& cfg, std::ostream& out,
                     const std::optional<std::string>& index_cache = std::nullopt) {
  const Corpus corpus = detail::load_inputs(cfg);
  std::optional<NeighborIndex> cached;
  if (index_cache && std::filesystem::exists(*index_cache)) cached = NeighborIndex::load(*index_cache);
  const PipelineResult res = run_pipeline(corpus, cfg.pipeline(), cached ? &*cached : nullptr);
  if (index_cache && !cached) {
    std::map<std::string, PromptEmbedding> accepted;
    for (const auto& [id, d] : corpus.decisions) {
      if (d.decision == Decision::accept) accepted.emplace(id, corpus.embeddings.at(id));
    }
    NeighborIndex::build(accepted).save(*index_cache);
  }

  const auto assignment = assign_cohorts(corpus, cfg.cohorts);
  const auto cohorts = cohort_report(corpus, assignment, cfg.cohorts, res.summary.per_rejection_ci, cfg.tau);
  const auto bands = orthogonality_table(res.rejections, cfg.band_width);
  const auto heat = grid_heatmap(corpus, res.summary.per_rejection_ci, cfg.tau);

  const auto dir = detail::prepare_output_dir(cfg);
  detail::write_file(dir / "summary.json", summary_json(config_to_json(cfg), res).dump(2) + "\n");
  detail::write_with(dir / "per_rejection.csv", [&](std::ostream& s) { write_per_rejection_csv(s, res.rejections); });
  detail::write_with(dir / "pairs.csv", [&](std::ostream& s) { write_pairs_csv(s, res.rejections); });
  detail::write_with(dir / "cohorts.csv", [&](std::ostream& s) { write_cohorts_csv(s, cohorts); });
  detail::write_with(dir / "bands.csv", [&](std::ostream& s) { write_bands_csv(s, bands); });
  detail::write_with(dir / "scatter.csv", [&](std::ostream& s) { write_scatter_csv(s, bands); });
  detail::write_with(dir / "heatmap.csv", [&](std::ostream& s) { write_heatmap_csv(s, heat); });

  const auto& s = res.summary;
  out << "CI=" << detail::fmt(s.ci_mean) << " CR@" << semconf::detail::format_double(s.tau) << "="
      << semconf::detail::format_double(s.cr_at_tau) << " CD=" << detail::fmt(s.cd)
      << " FRR=" << semconf::detail::format_double(s.frr) << " accepted=" << s.n_accepted
      << " rejected=" << s.n_rejected << '\n';
  return kExitOk;
}

// With `sample`, seeds are deduplicated and sampled (cfg.n_seeds, cfg.rng_seed)
// first; candidates of unsampled seeds are skipped and counted.
inline int cmd_gate(const RunConfig& cfg, const std::string& candidates_path, std::ostream& out,
                    std::ostream& err, bool sample = false) {
  const Corpus seeds = detail::load_inputs(cfg);
  detail::existing_inputs({candidates_path}, "candidates");
  const auto all_candidates = load_candidates(std::filesystem::path(candidates_path));

  std::vector<PromptRecord> seed_records;
  for (const auto& r : seeds.records) {
    if (r.is_seed) seed_records.push_back(r);
  }
  if (sample) seed_records = dedup_and_sample(seed_records, cfg.n_seeds, cfg.rng_seed);
  std::set<std::string> kept_seeds;
  for (const auto& r : seed_records) kept_seeds.insert(r.prompt_id);

  std::set<std::string> seen;
  for (const auto& r : seeds.records) seen.insert(r.prompt_id);
  std::vector<Candidate> candidates;
  std::vector<const PromptRecord*> seed_of;
  std::vector<const std::vector<double>*> seed_embedding;
  std::vector<double> risks;
  std::size_t skipped = 0;
  for (const auto& c : all_candidates) {
    if (seen.count(c.candidate_id)) {
      throw DataError("candidate_id '" + c.candidate_id + "' collides with an existing prompt_id");
    }
    const PromptRecord* seed = seeds.find_record(c.seed_id);
    if (!seed) throw DataError("candidate '" + c.candidate_id + "' references unknown seed '" + c.seed_id + "'");
    auto emb = seeds.embeddings.find(c.seed_id);
    if (emb == seeds.embeddings.end()) throw DataError("seed '" + c.seed_id + "' has no embedding");
    if (!seed->is_seed) throw DataError("candidate '" + c.candidate_id + "' references non-seed '" + c.seed_id + "'");
    if (!kept_seeds.count(c.seed_id)) {
      ++skipped;
      continue;
    }
    risks.push_back(ensemble_risk(c.risk_scores, cfg.classifier_weights));
    seed_of.push_back(seed);
    seed_embedding.push_back(&emb->second.vector);
    candidates.push_back(c);
  }

  std::vector<GatedVariant> gated(candidates.size());
  semconf::detail::parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
    const auto& c = candidates[i];
    gated[i] = {c.seed_id, c.text,
                gate_candidate(*seed_of[i], c.candidate_id, c.text, c.embedding, *seed_embedding[i], risks[i], cfg.gates)};
  });

  const auto assembled = assemble_clusters(seed_records, gated);
  for (const auto& w : assembled.warnings) err << "warning: " << w << '\n';

  Corpus out_corpus;
  out_corpus.records = assembled.records;
  std::sort(out_corpus.records.begin(), out_corpus.records.end(),
            [](const auto& a, const auto& b) { return a.prompt_id < b.prompt_id; });
  for (const auto& r : seed_records) {
    if (auto it = seeds.embeddings.find(r.prompt_id); it != seeds.embeddings.end()) {
      out_corpus.embeddings.emplace(r.prompt_id, it->second);
    }
  }
  std::size_t passed = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!gated[i].verdict.passed) continue;
    ++passed;
    out_corpus.embeddings.emplace(candidates[i].candidate_id,
                                  PromptEmbedding{candidates[i].candidate_id, candidates[i].embedding});
  }

  const auto dir = detail::prepare_output_dir(cfg);
  detail::write_with(dir / "gate_report.csv", [&](std::ostream& s) { write_gate_csv(s, gated); });
  detail::write_with(dir / "gated_records.jsonl", [&](std::ostream& s) { write_corpus(out_corpus, s); });
  out << "passed " << passed << "/" << candidates.size() << " candidates; " << assembled.records.size()
      << " records in " << seed_records.size() << " clusters";
  if (sample) out << "; " << skipped << " candidates of unsampled seeds skipped";
  out << '\n';
  return kExitOk;
}

inline int cmd_guard(const RunConfig& cfg, const std::optional<std::string>& scores_path, bool sweep,
                     std::ostream& out) {
  const Corpus corpus = detail::load_inputs(cfg);
  std::vector<GuardReport> reports;
  if (scores_path) {
    detail::existing_inputs({*scores_path}, "guard scores");
    const auto scores = load_guard_scores(std::filesystem::path(*scores_path));
    if (sweep) {
      reports = threshold_sweep(corpus, scores, cfg.sweep_taus, cfg.guard(), cfg.pipeline());
    } else {
      reports.push_back(audit_guard(corpus, scores, cfg.guard(), cfg.pipeline()));
    }
  } else {
    if (sweep) throw UsageError("--sweep needs --scores");
    reports.push_back(audit_decisions(corpus, cfg.guard(), cfg.pipeline()));
  }

  const auto dir = detail::prepare_output_dir(cfg);
  nlohmann::ordered_json j;
  j["config"] = config_to_json(cfg);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(guard_json(r));
  j["reports"] = std::move(arr);
  detail::write_file(dir / "guard_report.json", j.dump(2) + "\n");
  detail::write_with(dir / "guard_report.csv", [&](std::ostream& s) { write_guard_csv(s, reports); });
  if (!sweep) {
    std::map<std::string, DecisionRecord> decisions;
    for (const auto& [id, d] : reports.front().final_decisions) decisions.emplace(id, DecisionRecord{id, d, {}, {}});
    detail::write_with(dir / "guard_decisions.jsonl", [&](std::ostream& s) { write_decisions(decisions, s); });
  }
  for (const auto& r : reports) {
    out << r.name << " tau=" << detail::fmt(r.tau_accept) << " N=" << r.n << " accepted=" << r.n_accepted
        << " rejected=" << r.n_rejected << " FRR=" << semconf::detail::format_double(r.frr);
    if (r.no_accepted_set) {
      out << " (no accepted set: confusion undefined)";
    } else {
      out << " CI_rej=" << detail::fmt(r.ci_mean_rej) << " CR@" << semconf::detail::format_double(r.cr_threshold)
          << "=" << detail::fmt(r.cr_rej_at_threshold) << " vetoed=" << r.vetoed
          << " FRR_after_veto=" << semconf::detail::format_double(r.frr_after_veto);
    }
    out << '\n';
  }
  return kExitOk;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const Corpus corpus = detail::load_inputs(cfg);
  const PipelineResult base = run_pipeline(corpus, cfg.pipeline());
  const auto rows = grid_search(base, cfg.grid, cfg.prob_shift_mode);
  const auto dir = detail::prepare_output_dir(cfg);
  detail::write_with(dir / "sensitivity.csv", [&](std::ostream& s) { write_sensitivity_csv(s, rows); });
  out << "wrote " << rows.size() << " sensitivity rows\n";
  return kExitOk;
}

inline int cmd_tokens(const RunConfig& cfg, const std::vector<std::string>& prompt_ids, std::ostream& out) {
  const Corpus corpus = detail::load_inputs(cfg);
  std::vector<std::string> tokens;
  std::vector<std::vector<double>> embeddings;
  std::vector<PooledToken> origin;
  auto add = [&](const TokenTrace& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      tokens.push_back(t.tokens[i]);
      embeddings.push_back(t.token_embeddings[i]);
      origin.push_back({t.prompt_id, i});
    }
  };
  if (prompt_ids.empty()) {
    for (const auto& [id, t] : corpus.traces) add(t);
  } else {
    std::set<std::string> wanted(prompt_ids.begin(), prompt_ids.end());
    for (const auto& id : wanted) {
      auto it = corpus.traces.find(id);
      if (it == corpus.traces.end()) throw DataError("no trace for prompt '" + id + "'");
      add(it->second);
    }
  }
  const auto scores = token_manifold_ci(tokens, embeddings, cfg.token_neighbors);
  const auto dir = detail::prepare_output_dir(cfg);
  detail::write_with(dir / "ci_tok.csv", [&](std::ostream& s) { write_ci_tok_csv(s, scores); });
  detail::write_with(dir / "token_embeddings.csv",
                     [&](std::ostream& s) { write_token_embeddings_csv(s, origin, embeddings); });
  out << "scored " << scores.size() << " tokens (K=" << cfg.token_neighbors << ")\n";
  return kExitOk;
}

inline int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const Corpus corpus = detail::load_inputs(cfg, LoadOptions{.validate_traces = false});
  std::size_t n = 0;
  for (const auto& [id, t] : corpus.traces) {
    for (const auto& v : validate_trace(t)) {
      out << v.prompt_id << ": " << v.code << ": " << v.message << '\n';
      ++n;
    }
  }
  out << corpus.records.size() << " records, " << corpus.traces.size() << " traces, " << n << " violations\n";
  return n == 0 ? kExitOk : kExitData;
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace detail {

inline Weights parse_weights(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (semconf::detail::trim(part.substr(used)).size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("--weights expects three numbers w_d,w_p,w_pi; got '" + s + "'");
    }
  }
  if (v.size() != 3) throw UsageError("--weights expects three numbers w_d,w_p,w_pi; got '" + s + "'");
  return {v[0], v[1], v[2]};
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"semantic-confusion audits of refusal decisions", "semconf"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  std::vector<std::string> inputs;
  std::string out_dir;
  unsigned threads = 1;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

  // Options shared by several subcommands.
  std::size_t k = 0;
  double tau = 0.0, cr_threshold = 0.0, band_width = 0.0, tau_accept = 0.0, veto_ci = 0.0;
  std::string weights, prob_shift_mode, lexicon, match_mode, scores, candidates, name, index_cache;
  std::size_t token_k = 0;
  std::vector<double> sweep_taus;
  std::vector<std::string> prompt_ids;
  bool sweep = false;
  double min_sim = 0.0, max_jac = 0.0, risk_min = 0.0, risk_max = 0.0;
  std::size_t ngram = 0;

  std::map<std::string, CLI::Option*> opts;
  auto add_io = [&](CLI::App* sub) {
    opts[sub->get_name() + ".input"] = sub->add_option("-i,--input", inputs, "corpus JSONL files");
    opts[sub->get_name() + ".out"] = sub->add_option("-o,--out", out_dir, "output directory");
  };
  auto add_scoring = [&](CLI::App* sub) {
    opts[sub->get_name() + ".k"] = sub->add_option("-k,--k", k, "accepted neighbors per rejection")->check(CLI::PositiveNumber);
    opts[sub->get_name() + ".tau"] = sub->add_option("--tau", tau, "confusion severity threshold");
    opts[sub->get_name() + ".weights"] = sub->add_option("--weights", weights, "w_d,w_p,w_pi");
    opts[sub->get_name() + ".prob_shift_mode"] =
        sub->add_option("--prob-shift-mode", prob_shift_mode, "scalar or distribution");
  };

  auto* label = app.add_subcommand("label", "label responses by refusal cues");
  add_io(label);
  opts["label.lexicon"] = label->add_option("--lexicon", lexicon, "cue file, one cue per line");
  opts["label.match_mode"] = label->add_option("--match-mode", match_mode, "substring or word_boundary");

  auto* audit = app.add_subcommand("audit", "run the confusion pipeline and cohort analysis");
  add_io(audit);
  add_scoring(audit);
  opts["audit.band_width"] = audit->add_option("--band-width", band_width, "similarity band width");
  opts["audit.index_cache"] = audit->add_option("--index-cache", index_cache, "binary cache of the accepted index");

  auto* gate = app.add_subcommand("gate", "apply the variant quality gate");
  add_io(gate);
  gate->add_option("--candidates", candidates, "candidates JSONL")->required();
  opts["gate.min_sim"] = gate->add_option("--min-similarity", min_sim);
  opts["gate.max_jac"] = gate->add_option("--max-jaccard", max_jac);
  opts["gate.risk_min"] = gate->add_option("--risk-min", risk_min);
  opts["gate.risk_max"] = gate->add_option("--risk-max", risk_max);
  opts["gate.ngram"] = gate->add_option("--ngram", ngram)->check(CLI::PositiveNumber);
  bool sample = false;
  std::size_t n_seeds = 0;
  std::uint64_t rng_seed = 0;
  gate->add_flag("--sample", sample, "dedup and sample seeds before gating");
  opts["gate.n_seeds"] = gate->add_option("--n-seeds", n_seeds, "seeds to sample")->check(CLI::PositiveNumber);
  opts["gate.rng_seed"] = gate->add_option("--rng-seed", rng_seed, "sampling seed");

  auto* guard = app.add_subcommand("guard", "audit a threshold guard");
  add_io(guard);
  add_scoring(guard);
  opts["guard.scores"] = guard->add_option("--scores", scores, "guard scores JSONL (prompt_id, score)");
  opts["guard.name"] = guard->add_option("--name", name, "guard name");
  opts["guard.tau_accept"] = guard->add_option("--tau-accept", tau_accept, "accept iff score >= tau_accept");
  opts["guard.cr_threshold"] = guard->add_option("--cr-threshold", cr_threshold, "CR threshold on the rejected set");
  opts["guard.veto_ci"] = guard->add_option("--veto-ci", veto_ci, "overturn rejections with CI >= this");
  guard->add_flag("--sweep", sweep, "sweep tau_accept");
  opts["guard.sweep_taus"] = guard->add_option("--sweep-taus", sweep_taus, "thresholds for --sweep")->delimiter(',');

  auto* grid = app.add_subcommand("sweep", "weight / tau sensitivity grid");
  add_io(grid);
  add_scoring(grid);

  auto* tokens = app.add_subcommand("tokens", "per-token manifold confusion");
  add_io(tokens);
  opts["tokens.K"] = tokens->add_option("-K,--token-neighbors", token_k, "token neighbors")->check(CLI::PositiveNumber);
  tokens->add_option("--prompt-id", prompt_ids, "restrict to these prompts");

  auto* validate = app.add_subcommand("validate", "lint trace files");
  add_io(validate);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    auto set = [&](const std::string& sub, const std::string& key) {
      auto it = opts.find(sub + "." + key);
      return it != opts.end() && it->second->count() > 0;
    };
    CLI::App* active = app.get_subcommands().front();
    const std::string sub = active->get_name();
    if (threads_opt->count()) cfg.threads = threads;
    if (set(sub, "input")) cfg.inputs = inputs;
    if (set(sub, "out")) cfg.output_dir = out_dir;
    if (set(sub, "k")) cfg.k = k;
    if (set(sub, "tau")) cfg.tau = tau;
    if (set(sub, "weights")) cfg.weights = detail::parse_weights(weights);
    if (set(sub, "prob_shift_mode")) cfg.prob_shift_mode = parse_prob_shift_mode(prob_shift_mode);
    if (set(sub, "lexicon")) cfg.lexicon_path = lexicon;
    if (set(sub, "match_mode")) cfg.match_mode = parse_match_mode(match_mode);
    if (set(sub, "band_width")) cfg.band_width = band_width;
    if (set(sub, "min_sim")) cfg.gates.min_similarity = min_sim;
    if (set(sub, "max_jac")) cfg.gates.max_jaccard = max_jac;
    if (set(sub, "risk_min")) cfg.gates.risk_min = risk_min;
    if (set(sub, "risk_max")) cfg.gates.risk_max = risk_max;
    if (set(sub, "ngram")) cfg.gates.ngram = ngram;
    if (set(sub, "n_seeds")) cfg.n_seeds = n_seeds;
    if (set(sub, "rng_seed")) cfg.rng_seed = rng_seed;
    if (set(sub, "name")) cfg.guard_name = name;
    if (set(sub, "tau_accept")) cfg.guard_tau_accept = tau_accept;
    if (set(sub, "cr_threshold")) cfg.cr_threshold = cr_threshold;
    if (set(sub, "veto_ci")) cfg.veto_ci = veto_ci;
    if (set(sub, "sweep_taus")) cfg.sweep_taus = sweep_taus;
    if (set(sub, "K")) cfg.token_neighbors = token_k;
    cfg.validate();

    if (sub == "label") return cmd_label(cfg, out);
    if (sub == "audit") {
      return cmd_audit(cfg, out, set(sub, "index_cache") ? std::optional<std::string>(index_cache) : std::nullopt);
    }
    if (sub == "gate") return cmd_gate(cfg, candidates, out, err, sample);
    if (sub == "guard") {
      return cmd_guard(cfg, set(sub, "scores") ? std::optional<std::string>(scores) : std::nullopt, sweep, out);
    }
    if (sub == "sweep") return cmd_sweep(cfg, out);
    if (sub == "tokens") return cmd_tokens(cfg, prompt_ids, out);
    if (sub == "validate") return cmd_validate(cfg, out);
    throw UsageError("unknown subcommand " + sub);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

inline int run_cli(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace semconf::cli
