#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clir/analysis.hpp"
#include "clir/io.hpp"
#include "clir/types.hpp"

namespace clir {

/// Anything that can score a (topic, doc) pair. Implementations must be
/// usable concurrently; rerank consults the source exactly once per entry
/// within the rerank depth.
class ScoreSource {
  public:
    virtual ~ScoreSource() = default;
    virtual std::optional<double> score(const std::string& topic_id,
                                        const std::string& doc_id) const = 0;
};

/// File-backed score map, the contract for externally produced cross-encoder
/// scores. Missing pairs are permitted.
class ScoreOracle final : public ScoreSource {
  public:
    void set(const std::string& topic_id, const std::string& doc_id, double value) {
        scores_[topic_id][doc_id] = value;
    }

    std::optional<double> score(const std::string& topic_id,
                                const std::string& doc_id) const override {
        auto t = scores_.find(topic_id);
        if (t == scores_.end()) return std::nullopt;
        auto d = t->second.find(doc_id);
        if (d == t->second.end()) return std::nullopt;
        return d->second;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [topic, docs] : scores_) n += docs.size();
        return n;
    }

  private:
    std::unordered_map<std::string, std::unordered_map<std::string, double>> scores_;
};

struct OracleLoadResult {
    ScoreOracle oracle;
    std::size_t duplicates = 0;  // pairs that appeared more than once (last wins)
};

/// Score TSV: "topic_id doc_id score", whitespace-separated.
inline OracleLoadResult load_score_oracle(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open score file: " + path);

    OracleLoadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::blank_line(line)) continue;
        const auto fields = detail::split_ws(line);
        if (fields.size() != 3)
            throw ParseError("expected 3 fields 'topic_id doc_id score'", line_no);
        double value = 0.0;
        try {
            std::size_t pos = 0;
            value = std::stod(fields[2], &pos);
            if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
        } catch (const std::exception&) {
            throw ParseError("score is not numeric: '" + fields[2] + "'", line_no);
        }
        if (!std::isfinite(value)) throw ParseError("score must be finite", line_no);
        if (result.oracle.score(fields[0], fields[1])) ++result.duplicates;
        result.oracle.set(fields[0], fields[1], value);
    }
    return result;
}

/// Spacing of the synthetic scores assigned below the scored block.
inline constexpr double kSyntheticScoreStep = 1e-6;

/// Reorders the top-depth entries of each topic by descending oracle score.
/// Unscored entries follow all scored ones in first-stage order; entries
/// beyond depth keep their relative order after the reranked block. Scored
/// docs take their oracle scores; the remaining docs get a strictly
/// decreasing synthetic sequence below the minimum scored value so the run
/// stays rank-consistent. Never adds or removes documents.
inline Run rerank(const Run& run, const ScoreSource& oracle, std::size_t depth = 1000) {
    if (depth < 1) throw Error("rerank depth must be >= 1");

    Run out(run.tag());
    for (const auto& topic_id : run.topic_ids()) {
        const auto& entries = run.entries(topic_id);
        const std::size_t block = std::min(depth, entries.size());

        std::vector<std::pair<double, ScoredDoc>> scored;
        std::vector<ScoredDoc> rest;
        scored.reserve(block);
        for (std::size_t i = 0; i < block; ++i) {
            if (auto s = oracle.score(topic_id, entries[i].doc_id))
                scored.emplace_back(*s, entries[i]);
            else
                rest.push_back(entries[i]);
        }
        for (std::size_t i = block; i < entries.size(); ++i) rest.push_back(entries[i]);

        if (scored.empty()) {
            out.add_topic(topic_id, std::vector<ScoredDoc>(entries));
            continue;
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });

        std::vector<ScoredDoc> reranked;
        reranked.reserve(entries.size());
        for (const auto& [value, entry] : scored) reranked.push_back({entry.doc_id, value});
        const double floor_score = scored.back().first;
        for (std::size_t i = 0; i < rest.size(); ++i)
            reranked.push_back({rest[i].doc_id,
                                floor_score - static_cast<double>(i + 1) * kSyntheticScoreStep});
        out.add_topic(topic_id, std::move(reranked));
    }
    return out;
}

/// Emits "topic_id doc_id doc_text" TSV for the top-depth candidates of each
/// topic, the input half of the external-scorer subprocess contract. Tabs
/// and newlines inside the text are flattened to spaces.
inline void write_rerank_pairs(const Run& run,
                               const std::unordered_map<std::string, std::string>& doc_texts,
                               std::size_t depth, std::ostream& out) {
    auto sanitize = [](std::string text) {
        for (auto& c : text)
            if (c == '\t' || c == '\n' || c == '\r') c = ' ';
        return text;
    };
    for (const auto& topic_id : run.topic_ids()) {
        const auto& entries = run.entries(topic_id);
        const std::size_t block = std::min(depth, entries.size());
        for (std::size_t i = 0; i < block; ++i) {
            auto it = doc_texts.find(entries[i].doc_id);
            if (it == doc_texts.end())
                throw Error("document " + entries[i].doc_id + " is not in the corpus");
            out << topic_id << '\t' << entries[i].doc_id << '\t' << sanitize(it->second) << '\n';
        }
    }
}

/// Reference scorer used in tests and demos: token overlap between the query
/// and the document, |q ∩ d| / |q| over unique analyzed tokens. Scores every
/// pair it knows both sides of.
class LexicalOverlapScorer final : public ScoreSource {
  public:
    LexicalOverlapScorer(const std::vector<Topic>& topics, const std::vector<Document>& docs,
                         const std::string& variant, QueryFields fields,
                         const AnalyzerConfig& config) {
        for (const auto& topic : topics) {
            if (!topic.has_variant(variant)) continue;
            auto tokens = analyze(build_query_text(topic, variant, fields), config);
            query_tokens_[topic.topic_id] = {tokens.begin(), tokens.end()};
        }
        for (const auto& doc : docs) {
            const std::string contents =
                doc.title.empty() ? doc.text : doc.title + " " + doc.text;
            auto tokens = analyze(contents, config);
            doc_tokens_[doc.doc_id] = {tokens.begin(), tokens.end()};
        }
    }

    std::optional<double> score(const std::string& topic_id,
                                const std::string& doc_id) const override {
        auto q = query_tokens_.find(topic_id);
        auto d = doc_tokens_.find(doc_id);
        if (q == query_tokens_.end() || d == doc_tokens_.end()) return std::nullopt;
        if (q->second.empty()) return 0.0;
        std::size_t overlap = 0;
        for (const auto& token : q->second)
            if (d->second.count(token) > 0) ++overlap;
        return static_cast<double>(overlap) / static_cast<double>(q->second.size());
    }

  private:
    std::unordered_map<std::string, std::unordered_set<std::string>> query_tokens_;
    std::unordered_map<std::string, std::unordered_set<std::string>> doc_tokens_;
};

}  // namespace clir
