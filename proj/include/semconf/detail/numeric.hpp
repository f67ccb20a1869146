#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "semconf/error.hpp"

namespace semconf::detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

// Cosine similarity clamped to [-1, 1]. Throws on zero-norm input.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DataError("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  }
  const double na2 = dot(a, a);
  const double nb2 = dot(b, b);
  if (na2 == 0.0 || nb2 == 0.0) throw DataError("cosine of zero-norm vector");
  // sqrt(x * x) == x exactly, so identical inputs give exactly 1.
  return std::clamp(dot(a, b) / std::sqrt(na2 * nb2), -1.0, 1.0);
}

inline std::vector<double> normalized(std::span<const double> v) {
  const double n = norm(v);
  if (n == 0.0) throw DataError("cannot normalize zero-norm vector");
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

// Quantile with linear interpolation between order statistics
// (h = (n - 1) p). `sorted` must be ascending and non-empty.
inline double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Mean and population standard deviation. Identical inputs give exactly the
// shared value and exactly zero spread.
struct MeanStd {
  double mean = 0.0;
  double stdev = 0.0;
};

inline MeanStd mean_std(std::span<const double> values) {
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) return {*mn, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  const double mean = std::clamp(sum / n, *mn, *mx);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / n)};
}

// Shortest representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace semconf::detail
