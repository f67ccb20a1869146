#pragma once

// Exact top-k cosine retrieval over accepted prompt embeddings.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "semconf/error.hpp"
#include "semconf/trace_model.hpp"
#include "semconf/detail/numeric.hpp"
#include "semconf/detail/parallel.hpp"

namespace semconf {

struct Neighbor {
  std::string accepted_id;
  double similarity = 0.0;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Sorted by similarity descending, ties by ascending accepted_id.
struct NeighborSet {
  std::string rejected_id;
  std::vector<Neighbor> neighbors;

  friend bool operator==(const NeighborSet&, const NeighborSet&) = default;
};

inline constexpr std::size_t kDefaultNeighbors = 5;

// Cache layout (little-endian):
//   8 bytes   magic "SCNIDX01"
//   uint64    row count
//   uint64    dimension
//   per row   uint32 id length, id bytes
//   rows*dim  float64 row-major unit-norm matrix
inline constexpr char kIndexMagic[8] = {'S', 'C', 'N', 'I', 'D', 'X', '0', '1'};

class NeighborIndex {
 public:
  static NeighborIndex build(const std::map<std::string, PromptEmbedding>& accepted) {
    std::vector<const PromptEmbedding*> rows;
    rows.reserve(accepted.size());
    for (const auto& [id, e] : accepted) rows.push_back(&e);
    return build_sorted(rows);
  }

  static NeighborIndex build(std::span<const PromptEmbedding> accepted) {
    std::vector<const PromptEmbedding*> rows;
    rows.reserve(accepted.size());
    for (const auto& e : accepted) rows.push_back(&e);
    std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->prompt_id < b->prompt_id; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i]->prompt_id == rows[i - 1]->prompt_id) {
        throw DataError("duplicate accepted prompt_id '" + rows[i]->prompt_id + "' in index");
      }
    }
    return build_sorted(rows);
  }

  std::size_t size() const { return ids_.size(); }
  std::size_t dim() const { return dim_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const double> row(std::size_t i) const { return {matrix_.data() + i * dim_, dim_}; }

  NeighborSet query(std::string_view rejected_id, std::span<const double> vector, std::size_t k) const {
    if (k == 0) throw UsageError("neighbor count k must be positive");
    if (vector.size() != dim_) {
      throw DataError("query '" + std::string(rejected_id) + "' has dimension " + std::to_string(vector.size()) +
                      ", index has " + std::to_string(dim_));
    }
    const std::vector<double> q = detail::normalized(vector);
    std::vector<double> sims(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) sims[i] = std::clamp(detail::dot(row(i), q), -1.0, 1.0);

    std::vector<std::size_t> order;
    order.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (ids_[i] != rejected_id) order.push_back(i);
    }
    // Rows are stored in id order, so the row index breaks ties by id.
    auto better = [&](std::size_t a, std::size_t b) { return sims[a] > sims[b] || (sims[a] == sims[b] && a < b); };
    const std::size_t take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);

    NeighborSet out;
    out.rejected_id = std::string(rejected_id);
    out.neighbors.reserve(take);
    for (std::size_t i = 0; i < take; ++i) out.neighbors.push_back({ids_[order[i]], sims[order[i]]});
    return out;
  }

  NeighborSet query(const PromptEmbedding& rejected, std::size_t k) const {
    return query(rejected.prompt_id, rejected.vector, k);
  }

  std::vector<NeighborSet> query_batch(std::span<const PromptEmbedding> rejected, std::size_t k,
                                       unsigned threads = 1) const {
    std::vector<NeighborSet> out(rejected.size());
    detail::parallel_for(rejected.size(), threads, [&](std::size_t i) { out[i] = query(rejected[i], k); });
    return out;
  }

  void save(const std::filesystem::path& path) const {
    static_assert(std::endian::native == std::endian::little, "index cache assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write index cache: " + path.string());
    out.write(kIndexMagic, sizeof(kIndexMagic));
    const std::uint64_t rows = ids_.size();
    const std::uint64_t dim = dim_;
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    for (const auto& id : ids_) {
      const auto len = static_cast<std::uint32_t>(id.size());
      out.write(reinterpret_cast<const char*>(&len), sizeof(len));
      out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    out.write(reinterpret_cast<const char*>(matrix_.data()),
              static_cast<std::streamsize>(matrix_.size() * sizeof(double)));
    if (!out) throw DataError("failed writing index cache: " + path.string());
  }

  static NeighborIndex load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open index cache: " + path.string());
    char magic[sizeof(kIndexMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kIndexMagic, sizeof(magic)) != 0) {
      throw DataError("not an index cache (bad magic): " + path.string());
    }
    std::uint64_t rows = 0;
    std::uint64_t dim = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    if (!in || rows == 0 || dim == 0) throw DataError("truncated index cache header: " + path.string());
    NeighborIndex idx;
    idx.dim_ = static_cast<std::size_t>(dim);
    idx.ids_.resize(rows);
    for (auto& id : idx.ids_) {
      std::uint32_t len = 0;
      in.read(reinterpret_cast<char*>(&len), sizeof(len));
      id.resize(len);
      in.read(id.data(), len);
    }
    idx.matrix_.resize(rows * dim);
    in.read(reinterpret_cast<char*>(idx.matrix_.data()),
            static_cast<std::streamsize>(idx.matrix_.size() * sizeof(double)));
    if (!in) throw DataError("truncated index cache: " + path.string());
    if (!std::is_sorted(idx.ids_.begin(), idx.ids_.end())) {
      throw DataError("index cache rows are not in id order: " + path.string());
    }
    return idx;
  }

  // True when this index holds exactly these embeddings (same ids, same
  // normalized rows), so a cached copy can stand in for a rebuild.
  bool matches(const std::map<std::string, PromptEmbedding>& accepted) const {
    if (accepted.size() != ids_.size()) return false;
    std::size_t i = 0;
    for (const auto& [id, e] : accepted) {
      if (id != ids_[i] || e.vector.size() != dim_) return false;
      const auto unit = detail::normalized(e.vector);
      if (!std::equal(unit.begin(), unit.end(), row(i).begin())) return false;
      ++i;
    }
    return true;
  }

  friend bool operator==(const NeighborIndex&, const NeighborIndex&) = default;

 private:
  NeighborIndex() = default;

  static NeighborIndex build_sorted(const std::vector<const PromptEmbedding*>& rows) {
    if (rows.empty()) throw DataError("no accepted prompts: confusion metrics undefined");
    NeighborIndex idx;
    idx.dim_ = rows.front()->vector.size();
    idx.ids_.reserve(rows.size());
    idx.matrix_.reserve(rows.size() * idx.dim_);
    for (const auto* e : rows) {
      if (e->vector.size() != idx.dim_) {
        throw DataError("embedding dimension mismatch: expected " + std::to_string(idx.dim_) + ", '" +
                        e->prompt_id + "' has " + std::to_string(e->vector.size()));
      }
      const auto unit = detail::normalized(e->vector);
      idx.ids_.push_back(e->prompt_id);
      idx.matrix_.insert(idx.matrix_.end(), unit.begin(), unit.end());
    }
    return idx;
  }

  std::vector<std::string> ids_;
  std::vector<double> matrix_;
  std::size_t dim_ = 0;
};

}  // namespace semconf
