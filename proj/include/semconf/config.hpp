#pragma once

// Run configuration shared by every CLI command. Resolution order is
// command-line flags, then the config file, then these defaults.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semconf/cohort_analysis.hpp"
#include "semconf/confusion_metrics.hpp"
#include "semconf/dataset_gates.hpp"
#include "semconf/error.hpp"
#include "semconf/guard_audit.hpp"
#include "semconf/refusal_labeler.hpp"
#include "semconf/token_signals.hpp"

namespace semconf {

struct RunConfig {
  std::size_t k = kDefaultNeighbors;
  Weights weights;
  double tau = kDefaultTau;
  double cr_threshold = kDefaultGuardCrThreshold;
  ProbShiftMode prob_shift_mode = ProbShiftMode::scalar;
  std::optional<std::string> lexicon_path;
  MatchMode match_mode = MatchMode::substring;
  std::size_t token_neighbors = kDefaultTokenNeighbors;
  double band_width = 0.1;
  std::vector<CohortSpec> cohorts = default_cohort_specs();
  GateThresholds gates;
  std::map<std::string, double> classifier_weights;
  std::size_t n_seeds = kDefaultSeedCount;
  std::uint64_t rng_seed = 42;
  std::string guard_name = "guard";
  double guard_tau_accept = 0.5;
  std::optional<double> veto_ci;
  std::vector<double> sweep_taus = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  GridSpec grid;
  std::vector<std::string> inputs;
  std::string output_dir = "out";
  unsigned threads = 1;

  PipelineConfig pipeline() const { return {k, weights, tau, prob_shift_mode, threads}; }

  GuardConfig guard() const { return {guard_name, guard_tau_accept, cr_threshold, veto_ci}; }

  CueLexicon lexicon() const {
    return lexicon_path ? CueLexicon::from_file(*lexicon_path, match_mode) : CueLexicon::defaults(match_mode);
  }

  void validate() const {
    if (k == 0) throw UsageError("k must be positive");
    weights.validate();
    if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("tau must lie in [0, 1]");
    guard().validate();
    if (token_neighbors == 0) throw UsageError("token_neighbors must be positive");
    if (!(band_width > 0.0 && band_width <= 1.0)) throw UsageError("band_width must lie in (0, 1]");
    if (gates.ngram < 1) throw UsageError("gates.ngram must be >= 1");
    if (threads == 0) throw UsageError("threads must be positive");
  }
};

namespace detail {

using ojson = nlohmann::ordered_json;

template <typename T>
T config_value(const nlohmann::json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError("config key '" + std::string(key) + "' has the wrong type");
  }
}

inline void reject_unknown(const nlohmann::json& obj, std::initializer_list<std::string_view> known,
                           std::string_view where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto k : known) ok = ok || it.key() == k;
    if (!ok) throw UsageError("unknown config key '" + std::string(where) + it.key() + "'");
  }
}

}  // namespace detail

inline RunConfig config_from_json(const nlohmann::json& j) {
  using detail::config_value;
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  detail::reject_unknown(j,
                         {"k", "weights", "tau", "cr_threshold", "prob_shift_mode", "normalization", "lexicon_path",
                          "lexicon_version", "match_mode", "token_neighbors", "band_width", "cohorts", "gates",
                          "n_seeds", "rng_seed", "guard", "grid", "inputs", "output_dir", "threads"},
                         "");
  RunConfig c;
  if (j.contains("k")) c.k = config_value<std::size_t>(j["k"], "k");
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    detail::reject_unknown(w, {"w_d", "w_p", "w_pi"}, "weights.");
    if (w.contains("w_d")) c.weights.w_d = config_value<double>(w["w_d"], "weights.w_d");
    if (w.contains("w_p")) c.weights.w_p = config_value<double>(w["w_p"], "weights.w_p");
    if (w.contains("w_pi")) c.weights.w_pi = config_value<double>(w["w_pi"], "weights.w_pi");
  }
  if (j.contains("tau")) c.tau = config_value<double>(j["tau"], "tau");
  if (j.contains("cr_threshold")) c.cr_threshold = config_value<double>(j["cr_threshold"], "cr_threshold");
  if (j.contains("prob_shift_mode")) {
    c.prob_shift_mode = parse_prob_shift_mode(config_value<std::string>(j["prob_shift_mode"], "prob_shift_mode"));
  }
  if (j.contains("normalization") && config_value<std::string>(j["normalization"], "normalization") != "per_run") {
    throw UsageError("config key 'normalization' supports only \"per_run\"");
  }
  if (j.contains("lexicon_version") &&
      config_value<std::string>(j["lexicon_version"], "lexicon_version") != kDefaultLexiconVersion) {
    throw UsageError("config lexicon_version does not match this build (" + std::string(kDefaultLexiconVersion) + ")");
  }
  if (j.contains("lexicon_path") && !j["lexicon_path"].is_null()) {
    c.lexicon_path = config_value<std::string>(j["lexicon_path"], "lexicon_path");
  }
  if (j.contains("match_mode")) c.match_mode = parse_match_mode(config_value<std::string>(j["match_mode"], "match_mode"));
  if (j.contains("token_neighbors")) c.token_neighbors = config_value<std::size_t>(j["token_neighbors"], "token_neighbors");
  if (j.contains("band_width")) c.band_width = config_value<double>(j["band_width"], "band_width");
  if (j.contains("cohorts")) {
    c.cohorts.clear();
    for (const auto& s : j["cohorts"]) {
      detail::reject_unknown(s, {"name", "sim", "lex", "risk"}, "cohorts[].");
      CohortSpec spec;
      spec.name = config_value<std::string>(s.at("name"), "cohorts[].name");
      if (spec.name == kOtherCohort) throw UsageError("cohort name 'Other' is reserved");
      if (s.contains("sim")) spec.sim_bin = parse_bin(config_value<std::string>(s["sim"], "cohorts[].sim"));
      if (s.contains("lex")) spec.lex_bin = parse_bin(config_value<std::string>(s["lex"], "cohorts[].lex"));
      if (s.contains("risk")) spec.risk_bin = parse_bin(config_value<std::string>(s["risk"], "cohorts[].risk"));
      c.cohorts.push_back(std::move(spec));
    }
  }
  if (j.contains("gates")) {
    const auto& g = j["gates"];
    detail::reject_unknown(g, {"min_similarity", "max_jaccard", "risk_min", "risk_max", "ngram", "classifier_weights"},
                           "gates.");
    if (g.contains("min_similarity")) c.gates.min_similarity = config_value<double>(g["min_similarity"], "gates.min_similarity");
    if (g.contains("max_jaccard")) c.gates.max_jaccard = config_value<double>(g["max_jaccard"], "gates.max_jaccard");
    if (g.contains("risk_min")) c.gates.risk_min = config_value<double>(g["risk_min"], "gates.risk_min");
    if (g.contains("risk_max")) c.gates.risk_max = config_value<double>(g["risk_max"], "gates.risk_max");
    if (g.contains("ngram")) c.gates.ngram = config_value<std::size_t>(g["ngram"], "gates.ngram");
    if (g.contains("classifier_weights")) {
      c.classifier_weights =
          config_value<std::map<std::string, double>>(g["classifier_weights"], "gates.classifier_weights");
    }
  }
  if (j.contains("n_seeds")) c.n_seeds = config_value<std::size_t>(j["n_seeds"], "n_seeds");
  if (j.contains("rng_seed")) c.rng_seed = config_value<std::uint64_t>(j["rng_seed"], "rng_seed");
  if (j.contains("guard")) {
    const auto& g = j["guard"];
    detail::reject_unknown(g, {"name", "tau_accept", "veto_ci", "sweep_taus"}, "guard.");
    if (g.contains("name")) c.guard_name = config_value<std::string>(g["name"], "guard.name");
    if (g.contains("tau_accept")) c.guard_tau_accept = config_value<double>(g["tau_accept"], "guard.tau_accept");
    if (g.contains("veto_ci") && !g["veto_ci"].is_null()) c.veto_ci = config_value<double>(g["veto_ci"], "guard.veto_ci");
    if (g.contains("sweep_taus")) c.sweep_taus = config_value<std::vector<double>>(g["sweep_taus"], "guard.sweep_taus");
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    detail::reject_unknown(g, {"weight_steps", "taus"}, "grid.");
    if (g.contains("weight_steps")) c.grid.weight_steps = config_value<int>(g["weight_steps"], "grid.weight_steps");
    if (g.contains("taus")) c.grid.taus = config_value<std::vector<double>>(g["taus"], "grid.taus");
  }
  if (j.contains("inputs")) c.inputs = config_value<std::vector<std::string>>(j["inputs"], "inputs");
  if (j.contains("output_dir")) c.output_dir = config_value<std::string>(j["output_dir"], "output_dir");
  if (j.contains("threads")) c.threads = config_value<unsigned>(j["threads"], "threads");
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("malformed config file " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// The fully resolved configuration, as embedded in every report. Where the
// reports go (output_dir) and how many threads ran are left out: neither
// changes any reported value.
inline nlohmann::ordered_json config_to_json(const RunConfig& c) {
  detail::ojson j;
  j["k"] = c.k;
  j["weights"] = {{"w_d", c.weights.w_d}, {"w_p", c.weights.w_p}, {"w_pi", c.weights.w_pi}};
  j["tau"] = c.tau;
  j["cr_threshold"] = c.cr_threshold;
  j["prob_shift_mode"] = std::string(to_string(c.prob_shift_mode));
  j["normalization"] = "per_run";
  j["lexicon_path"] = c.lexicon_path ? detail::ojson(*c.lexicon_path) : detail::ojson(nullptr);
  j["lexicon_version"] = std::string(kDefaultLexiconVersion);
  j["match_mode"] = std::string(to_string(c.match_mode));
  j["token_neighbors"] = c.token_neighbors;
  j["band_width"] = c.band_width;
  auto cohorts = detail::ojson::array();
  for (const auto& s : c.cohorts) {
    cohorts.push_back({{"name", s.name},
                       {"sim", std::string(to_string(s.sim_bin))},
                       {"lex", std::string(to_string(s.lex_bin))},
                       {"risk", std::string(to_string(s.risk_bin))}});
  }
  j["cohorts"] = std::move(cohorts);
  detail::ojson gates;
  gates["min_similarity"] = c.gates.min_similarity;
  gates["max_jaccard"] = c.gates.max_jaccard;
  gates["risk_min"] = c.gates.risk_min;
  gates["risk_max"] = c.gates.risk_max;
  gates["ngram"] = c.gates.ngram;
  gates["classifier_weights"] = detail::ojson::object();
  for (const auto& [name, w] : c.classifier_weights) gates["classifier_weights"][name] = w;
  j["gates"] = std::move(gates);
  j["n_seeds"] = c.n_seeds;
  j["rng_seed"] = c.rng_seed;
  detail::ojson guard;
  guard["name"] = c.guard_name;
  guard["tau_accept"] = c.guard_tau_accept;
  guard["veto_ci"] = c.veto_ci ? detail::ojson(*c.veto_ci) : detail::ojson(nullptr);
  guard["sweep_taus"] = c.sweep_taus;
  j["guard"] = std::move(guard);
  j["grid"] = {{"weight_steps", c.grid.weight_steps}, {"taus", c.grid.taus}};
  j["inputs"] = c.inputs;
  return j;
}

}  // namespace semconf
