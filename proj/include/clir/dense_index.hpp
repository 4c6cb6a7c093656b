#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clir/detail/binary_io.hpp"
#include "clir/detail/topk.hpp"
#include "clir/types.hpp"

namespace clir {

/// Exact (flat) inner-product search over pre-computed embeddings.
/// Single-precision storage, double-precision accumulation. Immutable after
/// build; concurrent queries are safe.
class FlatIndex {
  public:
    std::size_t size() const { return doc_ids_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }

    std::optional<std::uint32_t> internal_id(const std::string& doc_id) const {
        auto it = lookup_.find(doc_id);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    std::span<const float> vector_of(std::uint32_t doc) const {
        return {data_.data() + static_cast<std::size_t>(doc) * dim_, dim_};
    }

    /// Top-k by exact inner product; ties by ascending doc_id. Every stored
    /// vector is scored (a zero query returns all scores 0 in doc_id order).
    RankedList search(const DenseVector& query, std::size_t k) const {
        if (query.size() != dim_ && size() > 0)
            throw Error("query dimension " + std::to_string(query.size()) +
                        " does not match index dimension " + std::to_string(dim_));
        if (k == 0) throw Error("k must be positive");

        std::vector<std::pair<double, std::uint32_t>> candidates;
        candidates.reserve(size());
        for (std::uint32_t doc = 0; doc < size(); ++doc) {
            const float* row = data_.data() + static_cast<std::size_t>(doc) * dim_;
            double acc = 0.0;
            for (std::size_t j = 0; j < dim_; ++j)
                acc += static_cast<double>(query[j]) * static_cast<double>(row[j]);
            candidates.emplace_back(acc, doc);
        }
        RankedList result;
        result.entries = detail::select_top_k(std::move(candidates), k, doc_ids_);
        return result;
    }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error("cannot open snapshot for writing: " + path);
        detail::BinaryWriter w(out);
        w.str(kMagic);
        w.u32(kVersion);
        w.u32(static_cast<std::uint32_t>(dim_));
        w.u64(doc_ids_.size());
        for (const auto& id : doc_ids_) w.str(id);
        for (float v : data_) w.f32(v);
        if (!w.good()) throw Error("failed writing snapshot: " + path);
    }

    static FlatIndex load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open snapshot: " + path);
        detail::BinaryReader r(in);
        if (r.str() != kMagic) throw Error("not a dense index snapshot: " + path);
        if (const auto version = r.u32(); version != kVersion)
            throw Error("unsupported dense snapshot version " + std::to_string(version));

        FlatIndex index;
        index.dim_ = r.u32();
        const auto count = r.u64();
        index.doc_ids_.reserve(count);
        for (std::uint64_t d = 0; d < count; ++d) {
            index.doc_ids_.push_back(r.str());
            index.lookup_.emplace(index.doc_ids_.back(), static_cast<std::uint32_t>(d));
        }
        index.data_.resize(count * index.dim_);
        for (auto& v : index.data_) v = r.f32();
        return index;
    }

  private:
    template <StreamingSource Source>
    friend FlatIndex build_flat(Source&& vectors);

    static constexpr const char* kMagic = "CLIRDIDX";
    static constexpr std::uint32_t kVersion = 1;

    std::size_t dim_ = 0;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> lookup_;
    std::vector<float> data_;  // row-major, size() x dim()
};

/// Builds a flat index from any source with
/// `std::optional<std::pair<std::string, DenseVector>> next()`.
template <StreamingSource Source>
FlatIndex build_flat(Source&& vectors) {
    FlatIndex index;
    while (auto record = vectors.next()) {
        const auto& [id, values] = *record;
        if (id.empty()) throw Error("doc_id must be non-empty");
        if (values.empty()) throw Error("dense vector for " + id + " is empty");
        for (float v : values)
            if (!std::isfinite(v)) throw Error("dense vector for " + id + " has non-finite entries");
        if (index.doc_ids_.empty()) {
            index.dim_ = values.size();
        } else if (values.size() != index.dim_) {
            throw Error("dimension mismatch for " + id + ": expected " +
                        std::to_string(index.dim_) + ", got " + std::to_string(values.size()));
        }
        const auto doc = static_cast<std::uint32_t>(index.doc_ids_.size());
        if (!index.lookup_.emplace(id, doc).second) throw Error("duplicate doc_id: " + id);
        index.doc_ids_.push_back(id);
        index.data_.insert(index.data_.end(), values.begin(), values.end());
    }
    return index;
}

inline FlatIndex build_flat(const std::vector<std::pair<std::string, DenseVector>>& vectors) {
    struct VectorSource {
        const std::vector<std::pair<std::string, DenseVector>>* vecs;
        std::size_t i = 0;
        std::optional<std::pair<std::string, DenseVector>> next() {
            if (i >= vecs->size()) return std::nullopt;
            return (*vecs)[i++];
        }
    } source{&vectors};
    return build_flat(source);
}

inline RankedList search_dense(const FlatIndex& index, const DenseVector& query, std::size_t k) {
    return index.search(query, k);
}

}  // namespace clir
