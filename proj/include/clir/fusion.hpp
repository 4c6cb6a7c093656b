#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "clir/rerank.hpp"
#include "clir/types.hpp"

namespace clir {

struct RrfParams {
    double k_rrf = 60.0;
    std::size_t input_depth = 1000;
    std::size_t output_depth = 1000;

    void validate() const {
        if (k_rrf <= 0) throw Error("RRF k must be positive");
        if (input_depth < 1 || output_depth < 1) throw Error("RRF depths must be >= 1");
    }
};

/// Reciprocal rank fusion: per topic, fused(d) = sum over runs that contain
/// d within input_depth of 1 / (k_rrf + rank(d)). Topics are the union of
/// the input runs' topics; a run that misses a topic contributes nothing.
/// Per-document contributions are summed in sorted order, so the result does
/// not depend on the order of the input runs.
inline Run rrf(const std::vector<Run>& runs, const RrfParams& params = {}) {
    params.validate();
    if (runs.empty()) throw Error("rrf needs at least one input run");

    std::set<std::string> topics;
    for (const auto& run : runs)
        for (const auto& topic : run.topic_ids()) topics.insert(topic);

    Run fused("rrf");
    for (const auto& topic : topics) {
        std::map<std::string, std::vector<double>> contributions;
        for (const auto& run : runs) {
            const auto& entries = run.entries(topic);
            const std::size_t depth = std::min(params.input_depth, entries.size());
            for (std::size_t i = 0; i < depth; ++i)
                contributions[entries[i].doc_id].push_back(
                    1.0 / (params.k_rrf + static_cast<double>(i + 1)));
        }

        std::vector<ScoredDoc> scored;
        scored.reserve(contributions.size());
        for (auto& [doc_id, terms] : contributions) {
            std::sort(terms.begin(), terms.end());
            double score = 0.0;
            for (double t : terms) score += t;
            scored.push_back({doc_id, score});
        }
        std::sort(scored.begin(), scored.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.doc_id < b.doc_id;
        });
        if (scored.size() > params.output_depth) scored.resize(params.output_depth);
        fused.add_topic(topic, std::move(scored));
    }
    return fused;
}

/// Fuse first, then rerank the fused run: one oracle pass over the fused
/// candidates.
inline Run early_fusion(const std::vector<Run>& first_stage_runs, const ScoreSource& oracle,
                        const RrfParams& params, std::size_t rerank_depth) {
    Run out = rerank(rrf(first_stage_runs, params), oracle, rerank_depth);
    out.set_tag("early-fusion");
    return out;
}

/// Rerank every input run, then fuse: one oracle pass per input run, which
/// is what makes late fusion the more expensive pipeline.
inline Run late_fusion(const std::vector<Run>& first_stage_runs, const ScoreSource& oracle,
                       const RrfParams& params, std::size_t rerank_depth) {
    std::vector<Run> reranked;
    reranked.reserve(first_stage_runs.size());
    for (const auto& run : first_stage_runs) reranked.push_back(rerank(run, oracle, rerank_depth));
    Run out = rrf(reranked, params);
    out.set_tag("late-fusion");
    return out;
}

}  // namespace clir
