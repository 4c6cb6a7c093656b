#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clir/types.hpp"

namespace clir::detail {

/// Exact top-k over (score, internal doc) candidates: score descending, ties
/// by ascending doc_id. The (score, doc_id) pair is a total order, so the
/// result matches a full sort of all candidates.
inline std::vector<ScoredDoc> select_top_k(std::vector<std::pair<double, std::uint32_t>> candidates,
                                           std::size_t k,
                                           const std::vector<std::string>& doc_ids) {
    const auto better = [&doc_ids](const std::pair<double, std::uint32_t>& a,
                                   const std::pair<double, std::uint32_t>& b) {
        if (a.first != b.first) return a.first > b.first;
        return doc_ids[a.second] < doc_ids[b.second];
    };
    if (candidates.size() > k) {
        std::nth_element(candidates.begin(),
                         candidates.begin() + static_cast<std::ptrdiff_t>(k),
                         candidates.end(), better);
        candidates.resize(k);
    }
    std::sort(candidates.begin(), candidates.end(), better);

    std::vector<ScoredDoc> out;
    out.reserve(candidates.size());
    for (const auto& [score, doc] : candidates) out.push_back({doc_ids[doc], score});
    return out;
}

}  // namespace clir::detail
