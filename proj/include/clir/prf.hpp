#pragma once

#include <algorithm>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clir/dense_index.hpp"
#include "clir/sparse_index.hpp"
#include "clir/types.hpp"

namespace clir {

/// Rocchio pseudo-relevance feedback parameters. gamma weights the
/// non-relevant set, which is empty under PRF, so its term vanishes.
struct RocchioParams {
    std::size_t depth = 10;
    double alpha = 1.0;
    double beta = 0.75;
    double gamma = 0.0;
    std::size_t top_terms = 128;  // sparse only

    void validate() const {
        if (depth < 1) throw Error("PRF depth must be >= 1");
        if (top_terms < 1) throw Error("PRF top_terms must be >= 1");
        if (alpha < 0 || beta < 0 || gamma < 0)
            throw Error("Rocchio weights must be non-negative");
    }
};

/// q' = alpha*q + beta*mean(feedback docs), truncated to the top_terms
/// highest-weight terms; the original query terms are always retained.
/// Negative weights are clamped to 0 and zero weights dropped.
inline SparseVector rocchio_sparse(const SparseVector& query,
                                   const std::vector<SparseVector>& feedback_docs,
                                   const RocchioParams& params) {
    params.validate();
    if (feedback_docs.empty()) return query;

    SparseVector blended;
    blended.reserve(query.size());
    for (const auto& [term, weight] : query) blended[term] = params.alpha * weight;

    const double beta_over_n = params.beta / static_cast<double>(feedback_docs.size());
    for (const auto& doc : feedback_docs)
        for (const auto& [term, weight] : doc) blended[term] += beta_over_n * weight;

    for (auto& [term, weight] : blended)
        if (weight < 0) weight = 0;

    if (blended.size() > params.top_terms) {
        std::vector<std::pair<std::string, double>> ranked(blended.begin(), blended.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        SparseVector kept;
        kept.reserve(params.top_terms + query.size());
        for (std::size_t i = 0; i < params.top_terms; ++i)
            kept.insert(ranked[i]);
        for (const auto& [term, weight] : query) {
            auto it = blended.find(term);
            if (it != blended.end()) kept.emplace(it->first, it->second);
        }
        blended = std::move(kept);
    }
    prune_zero_weights(blended);
    return blended;
}

/// q' = alpha*q + beta*mean(feedback vectors), componentwise; no clamping.
inline DenseVector rocchio_dense(const DenseVector& query,
                                 const std::vector<DenseVector>& feedback_vectors,
                                 const RocchioParams& params) {
    params.validate();
    if (feedback_vectors.empty()) return query;
    for (const auto& v : feedback_vectors)
        if (v.size() != query.size())
            throw Error("feedback vector dimension does not match the query");

    const double beta_over_n = params.beta / static_cast<double>(feedback_vectors.size());
    DenseVector result(query.size());
    for (std::size_t j = 0; j < query.size(); ++j) {
        double acc = params.alpha * static_cast<double>(query[j]);
        for (const auto& v : feedback_vectors) acc += beta_over_n * static_cast<double>(v[j]);
        result[j] = static_cast<float>(acc);
    }
    return result;
}

/// Two-pass BM25 retrieval: retrieve depth docs, expand with their stored
/// term frequencies, re-retrieve at depth k with real-valued query weights.
inline RankedList prf_search_bm25(const InvertedIndex& index,
                                  const std::vector<std::string>& query_tokens, std::size_t k,
                                  const RocchioParams& params, const Bm25Params& bm25 = {}) {
    params.validate();
    RankedList first = index.search_bm25(query_tokens, params.depth, bm25);
    if (first.entries.empty()) return first;

    std::vector<SparseVector> feedback;
    feedback.reserve(first.entries.size());
    for (const auto& entry : first.entries)
        feedback.push_back(index.doc_vector(*index.internal_id(entry.doc_id)));

    SparseVector query;
    for (const auto& token : query_tokens) query[token] += 1.0;
    const SparseVector expanded = rocchio_sparse(query, feedback, params);
    return index.search_bm25_weighted(expanded, k, bm25);
}

/// Two-pass impact retrieval; feedback vectors are the quantized index-side
/// weights and the expanded query is re-quantized by the second pass.
inline RankedList prf_search_impact(const InvertedIndex& index, const SparseVector& query,
                                    std::size_t k, const RocchioParams& params) {
    params.validate();
    RankedList first = index.search_impact(query, params.depth);
    if (first.entries.empty()) return first;

    std::vector<SparseVector> feedback;
    feedback.reserve(first.entries.size());
    for (const auto& entry : first.entries)
        feedback.push_back(index.doc_vector(*index.internal_id(entry.doc_id)));

    const SparseVector expanded = rocchio_sparse(query, feedback, params);
    return index.search_impact(expanded, k);
}

/// Two-pass dense retrieval over the stored document vectors.
inline RankedList prf_search_dense(const FlatIndex& index, const DenseVector& query,
                                   std::size_t k, const RocchioParams& params) {
    params.validate();
    RankedList first = index.search(query, params.depth);
    if (first.entries.empty()) return first;

    std::vector<DenseVector> feedback;
    feedback.reserve(first.entries.size());
    for (const auto& entry : first.entries) {
        const auto row = index.vector_of(*index.internal_id(entry.doc_id));
        feedback.emplace_back(row.begin(), row.end());
    }
    const DenseVector expanded = rocchio_dense(query, feedback, params);
    return index.search(expanded, k);
}

}  // namespace clir
