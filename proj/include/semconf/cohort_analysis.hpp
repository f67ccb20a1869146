#pragma once

// Cohort slicing by similarity / overlap / risk tertiles, similarity-band
// tables for the prompt-vs-token comparison, and the 2x2 risk x similarity
// heatmap.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semconf/confusion_metrics.hpp"
#include "semconf/error.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/detail/numeric.hpp"

namespace semconf {

enum class Bin { low, mid, high, any };

inline std::string_view to_string(Bin b) {
  switch (b) {
    case Bin::low: return "low";
    case Bin::mid: return "mid";
    case Bin::high: return "high";
    case Bin::any: return "any";
  }
  return "any";
}

inline Bin parse_bin(std::string_view s) {
  if (s == "low") return Bin::low;
  if (s == "mid") return Bin::mid;
  if (s == "high") return Bin::high;
  if (s == "any") return Bin::any;
  throw UsageError("unknown bin '" + std::string(s) + "' (expected low, mid, high or any)");
}

struct Tertiles {
  double t1 = 0.0;
  double t2 = 0.0;

  // low: v < t1, mid: t1 <= v < t2, high: v >= t2.
  Bin bin(double v) const {
    if (v >= t2) return Bin::high;
    if (v >= t1) return Bin::mid;
    return Bin::low;
  }
};

inline Tertiles tertile_bins(std::span<const double> values) {
  if (values.size() < 3) {
    throw DataError("tertile binning needs at least 3 values, got " + std::to_string(values.size()));
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return {detail::quantile_sorted(sorted, 1.0 / 3.0), detail::quantile_sorted(sorted, 2.0 / 3.0)};
}

struct CohortSpec {
  std::string name;
  Bin sim_bin = Bin::any;
  Bin lex_bin = Bin::any;
  Bin risk_bin = Bin::any;

  friend bool operator==(const CohortSpec&, const CohortSpec&) = default;
};

inline constexpr std::string_view kOtherCohort = "Other";

inline std::vector<CohortSpec> default_cohort_specs() {
  return {
      {"HiSim-HiLex-LowRisk", Bin::high, Bin::high, Bin::low},
      {"HiSim-LowLex-LowRisk", Bin::high, Bin::low, Bin::low},
      {"HiSim-LowLex-HighRisk", Bin::high, Bin::low, Bin::high},
      {"LowSim-HiLex", Bin::low, Bin::high, Bin::any},
  };
}

struct CohortAssignment {
  std::map<std::string, std::string> cohort_of;  // prompt_id -> cohort name
  std::optional<Tertiles> sim;
  std::optional<Tertiles> lex;
  std::optional<Tertiles> risk;
};

// First matching spec wins; unmatched prompts go to "Other". Corpora with
// fewer than three records cannot be binned and land entirely in "Other".
inline CohortAssignment assign_cohorts(const Corpus& corpus, const std::vector<CohortSpec>& specs) {
  CohortAssignment out;
  if (corpus.records.size() >= 3) {
    std::vector<double> sim, lex, risk;
    for (const auto& r : corpus.records) {
      sim.push_back(r.seed_similarity);
      lex.push_back(r.lexical_overlap);
      risk.push_back(r.risk_score);
    }
    out.sim = tertile_bins(sim);
    out.lex = tertile_bins(lex);
    out.risk = tertile_bins(risk);
  }
  auto matches = [](Bin want, Bin got) { return want == Bin::any || want == got; };
  for (const auto& r : corpus.records) {
    std::string name(kOtherCohort);
    if (out.sim) {
      const Bin s = out.sim->bin(r.seed_similarity);
      const Bin l = out.lex->bin(r.lexical_overlap);
      const Bin k = out.risk->bin(r.risk_score);
      for (const auto& spec : specs) {
        if (matches(spec.sim_bin, s) && matches(spec.lex_bin, l) && matches(spec.risk_bin, k)) {
          name = spec.name;
          break;
        }
      }
    }
    out.cohort_of.emplace(r.prompt_id, std::move(name));
  }
  return out;
}

// Confusion statistics over the rejected members of a group.
struct RejectedStats {
  std::size_t n = 0;
  std::size_t n_rejected = 0;
  std::optional<double> frr;
  std::optional<double> cr_rej;
  std::optional<double> ci_rej;
  std::optional<double> cd_rej;
};

namespace detail {

inline RejectedStats rejected_stats(const Corpus& corpus, const std::vector<std::string>& members,
                                    const std::map<std::string, double>& per_rejection_ci, double tau) {
  RejectedStats s;
  s.n = members.size();
  std::vector<double> cis;
  for (const auto& id : members) {
    if (corpus.decision_of(id) != Decision::reject) continue;
    ++s.n_rejected;
    if (auto it = per_rejection_ci.find(id); it != per_rejection_ci.end()) cis.push_back(it->second);
  }
  if (s.n > 0) s.frr = static_cast<double>(s.n_rejected) / static_cast<double>(s.n);
  if (!cis.empty()) {
    const auto ms = mean_std(cis);
    s.ci_rej = ms.mean;
    s.cd_rej = ms.stdev;
    std::size_t hits = 0;
    for (double c : cis) hits += c >= tau ? 1 : 0;
    s.cr_rej = static_cast<double>(hits) / static_cast<double>(cis.size());
  }
  return s;
}

}  // namespace detail

struct CohortReport {
  std::string name;
  RejectedStats stats;
};

// One report per spec in spec order, then "Other".
inline std::vector<CohortReport> cohort_report(const Corpus& corpus, const CohortAssignment& assignment,
                                               const std::vector<CohortSpec>& specs,
                                               const std::map<std::string, double>& per_rejection_ci, double tau) {
  std::vector<std::string> names;
  for (const auto& s : specs) names.push_back(s.name);
  names.emplace_back(kOtherCohort);
  std::map<std::string, std::vector<std::string>> members;
  for (const auto& [id, name] : assignment.cohort_of) members[name].push_back(id);
  std::vector<CohortReport> out;
  for (const auto& name : names) {
    out.push_back({name, detail::rejected_stats(corpus, members[name], per_rejection_ci, tau)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prompt-level vs token-level confusion

struct ScatterPoint {
  std::string prompt_id;
  double prompt_level = 0.0;  // mean neighbor cosine
  double ci = 0.0;
};

struct BandRow {
  double lo = 0.0;
  double hi = 0.0;  // the top band is closed at 1.0, all others [lo, hi)
  std::size_t count = 0;
  std::optional<double> min, q1, median, q3, max;
};

struct OrthogonalityTable {
  std::vector<ScatterPoint> points;  // sorted by prompt_id
  std::vector<BandRow> bands;        // descending from the [1 - w, 1] band
};

inline OrthogonalityTable orthogonality_table(std::span<const RejectionResult> rejections, double band_width) {
  if (!(band_width > 0.0 && band_width <= 1.0)) {
    throw UsageError("band width must lie in (0, 1], got " + detail::format_double(band_width));
  }
  OrthogonalityTable t;
  for (const auto& r : rejections) t.points.push_back({r.rejected_id, r.prompt_level_similarity(), r.ci});
  std::sort(t.points.begin(), t.points.end(), [](const auto& a, const auto& b) { return a.prompt_id < b.prompt_id; });
  if (t.points.empty()) return t;

  auto lower_edge = [&](std::size_t band) { return 1.0 - static_cast<double>(band + 1) * band_width; };
  auto band_of = [&](double x) {
    std::size_t b = 0;
    while (x < lower_edge(b)) ++b;
    return b;
  };
  std::size_t deepest = 0;
  for (const auto& p : t.points) deepest = std::max(deepest, band_of(p.prompt_level));
  std::vector<std::vector<double>> buckets(deepest + 1);
  for (const auto& p : t.points) buckets[band_of(p.prompt_level)].push_back(p.ci);
  for (std::size_t b = 0; b <= deepest; ++b) {
    BandRow row;
    row.lo = lower_edge(b);
    row.hi = b == 0 ? 1.0 : lower_edge(b - 1);
    auto& v = buckets[b];
    row.count = v.size();
    if (!v.empty()) {
      std::sort(v.begin(), v.end());
      row.min = v.front();
      row.q1 = detail::quantile_sorted(v, 0.25);
      row.median = detail::quantile_sorted(v, 0.5);
      row.q3 = detail::quantile_sorted(v, 0.75);
      row.max = v.back();
    }
    t.bands.push_back(row);
  }
  return t;
}

// ---------------------------------------------------------------------------
// 2x2 heatmap: risk (low/high) x seed similarity (low/high), median splits.

struct HeatmapCell {
  Bin risk = Bin::low;
  Bin sim = Bin::low;
  RejectedStats stats;
};

inline std::array<HeatmapCell, 4> grid_heatmap(const Corpus& corpus,
                                               const std::map<std::string, double>& per_rejection_ci, double tau) {
  std::array<HeatmapCell, 4> cells{{{Bin::low, Bin::low, {}},
                                    {Bin::low, Bin::high, {}},
                                    {Bin::high, Bin::low, {}},
                                    {Bin::high, Bin::high, {}}}};
  std::array<std::vector<std::string>, 4> members;
  if (!corpus.records.empty()) {
    std::vector<double> risk, sim;
    for (const auto& r : corpus.records) {
      risk.push_back(r.risk_score);
      sim.push_back(r.seed_similarity);
    }
    std::sort(risk.begin(), risk.end());
    std::sort(sim.begin(), sim.end());
    const double risk_median = detail::quantile_sorted(risk, 0.5);
    const double sim_median = detail::quantile_sorted(sim, 0.5);
    for (const auto& r : corpus.records) {
      const std::size_t cell = (r.risk_score >= risk_median ? 2 : 0) + (r.seed_similarity >= sim_median ? 1 : 0);
      members[cell].push_back(r.prompt_id);
    }
  }
  for (std::size_t i = 0; i < 4; ++i) cells[i].stats = detail::rejected_stats(corpus, members[i], per_rejection_ci, tau);
  return cells;
}

}  // namespace semconf
