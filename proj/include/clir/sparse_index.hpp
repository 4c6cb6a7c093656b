#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clir/analysis.hpp"
#include "clir/detail/binary_io.hpp"
#include "clir/detail/topk.hpp"
#include "clir/types.hpp"

namespace clir {

enum class IndexMode : std::uint8_t { TextBm25 = 0, Impact = 1 };

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

inline constexpr std::uint32_t kDefaultQuantizationScale = 100;

/// floor(weight * scale + 0.5); monotone non-decreasing in weight.
inline std::uint32_t quantize(double weight, std::uint32_t scale) {
    if (!std::isfinite(weight)) throw Error("cannot quantize a non-finite weight");
    if (weight < 0) throw Error("cannot quantize a negative weight");
    if (scale == 0) throw Error("quantization scale must be positive");
    return static_cast<std::uint32_t>(std::floor(weight * scale + 0.5));
}

struct Posting {
    std::uint32_t doc;
    std::uint32_t tf;
};

/// In-memory inverted index. In text mode the tf slots hold token counts and
/// BM25 scoring applies; in impact mode they hold quantized learned weights
/// and ranking is the integer inner product ("sum of term frequency").
/// Immutable after construction; concurrent searches are safe.
class InvertedIndex {
  public:
    IndexMode mode() const { return mode_; }
    std::size_t doc_count() const { return doc_ids_.size(); }
    double avg_doc_length() const { return avg_doc_length_; }
    std::uint32_t scale() const { return scale_; }
    const AnalyzerConfig& analyzer() const { return analyzer_; }
    const std::vector<std::string>& doc_ids() const { return doc_ids_; }
    std::uint64_t doc_length(std::uint32_t doc) const { return doc_lengths_[doc]; }
    std::size_t term_count() const { return term_names_.size(); }

    std::optional<std::uint32_t> internal_id(const std::string& doc_id) const {
        auto it = doc_lookup_.find(doc_id);
        if (it == doc_lookup_.end()) return std::nullopt;
        return it->second;
    }

    std::span<const Posting> postings(const std::string& token) const {
        auto it = term_lookup_.find(token);
        if (it == term_lookup_.end()) return {};
        return postings_[it->second];
    }

    /// Stored representation of a document: token -> tf (text mode) or
    /// token -> quantized weight (impact mode). This is what PRF feeds on.
    SparseVector doc_vector(std::uint32_t doc) const {
        SparseVector v;
        v.reserve(forward_[doc].size());
        for (const auto& [term, tf] : forward_[doc])
            v.emplace(term_names_[term], static_cast<double>(tf));
        return v;
    }

    /// BM25 over analyzed query tokens; qtf is the token multiplicity.
    RankedList search_bm25(const std::vector<std::string>& query_tokens, std::size_t k,
                           const Bm25Params& params = {}) const {
        std::map<std::string, double> weights;
        for (const auto& token : query_tokens) weights[token] += 1.0;
        return search_bm25_canonical(weights, k, params);
    }

    /// BM25 with real-valued query-side weights (Rocchio-expanded queries);
    /// document-side scoring is unchanged.
    RankedList search_bm25_weighted(const SparseVector& query_weights, std::size_t k,
                                    const Bm25Params& params = {}) const {
        std::map<std::string, double> weights(query_weights.begin(), query_weights.end());
        return search_bm25_canonical(weights, k, params);
    }

    /// Impact ranking: score(d) = sum of quantize(query[t]) * tf(t, d),
    /// exactly the inner product of the quantized integer vectors.
    RankedList search_impact(const SparseVector& query, std::size_t k) const {
        if (mode_ != IndexMode::Impact)
            throw Error("impact search requires an impact-mode index");
        if (k == 0) throw Error("k must be positive");

        std::unordered_map<std::uint32_t, std::int64_t> acc;
        for (const auto& [token, weight] : query) {
            const std::int64_t qw = quantize(weight, scale_);
            if (qw == 0) continue;
            for (const auto& posting : postings(token))
                acc[posting.doc] += qw * static_cast<std::int64_t>(posting.tf);
        }
        std::vector<std::pair<double, std::uint32_t>> candidates;
        candidates.reserve(acc.size());
        for (const auto& [doc, score] : acc)
            candidates.emplace_back(static_cast<double>(score), doc);

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
        w.u8(static_cast<std::uint8_t>(mode_));
        w.u32(scale_);
        w.u8(static_cast<std::uint8_t>(analyzer_.language));
        w.u8(analyzer_.lowercase ? 1 : 0);
        w.u8(static_cast<std::uint8_t>(analyzer_.stemmer));
        w.u8(analyzer_.fa_normalization ? 1 : 0);
        std::vector<std::string> stopwords(analyzer_.stopwords.begin(),
                                           analyzer_.stopwords.end());
        std::sort(stopwords.begin(), stopwords.end());
        w.u64(stopwords.size());
        for (const auto& s : stopwords) w.str(s);

        w.u64(doc_ids_.size());
        for (const auto& id : doc_ids_) w.str(id);
        for (auto len : doc_lengths_) w.u64(len);
        w.u64(term_names_.size());
        for (std::size_t t = 0; t < term_names_.size(); ++t) {
            w.str(term_names_[t]);
            w.u64(postings_[t].size());
            for (const auto& p : postings_[t]) {
                w.u32(p.doc);
                w.u32(p.tf);
            }
        }
        if (!w.good()) throw Error("failed writing snapshot: " + path);
    }

    static InvertedIndex load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error("cannot open snapshot: " + path);
        detail::BinaryReader r(in);
        if (r.str() != kMagic) throw Error("not a sparse index snapshot: " + path);
        if (const auto version = r.u32(); version != kVersion)
            throw Error("unsupported sparse snapshot version " + std::to_string(version));

        InvertedIndex index;
        index.mode_ = static_cast<IndexMode>(r.u8());
        index.scale_ = r.u32();
        index.analyzer_.language = static_cast<Language>(r.u8());
        index.analyzer_.lowercase = r.u8() != 0;
        index.analyzer_.stemmer = static_cast<Stemmer>(r.u8());
        index.analyzer_.fa_normalization = r.u8() != 0;
        const auto stopword_count = r.u64();
        for (std::uint64_t i = 0; i < stopword_count; ++i) index.analyzer_.stopwords.insert(r.str());

        const auto doc_count = r.u64();
        index.doc_ids_.reserve(doc_count);
        for (std::uint64_t d = 0; d < doc_count; ++d) {
            index.doc_ids_.push_back(r.str());
            index.doc_lookup_.emplace(index.doc_ids_.back(), static_cast<std::uint32_t>(d));
        }
        index.doc_lengths_.reserve(doc_count);
        std::uint64_t total_len = 0;
        for (std::uint64_t d = 0; d < doc_count; ++d) {
            index.doc_lengths_.push_back(r.u64());
            total_len += index.doc_lengths_.back();
        }
        index.avg_doc_length_ =
            doc_count == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(doc_count);

        index.forward_.resize(doc_count);
        const auto term_count = r.u64();
        index.term_names_.reserve(term_count);
        index.postings_.reserve(term_count);
        for (std::uint64_t t = 0; t < term_count; ++t) {
            index.term_names_.push_back(r.str());
            index.term_lookup_.emplace(index.term_names_.back(), static_cast<std::uint32_t>(t));
            const auto n = r.u64();
            std::vector<Posting> list;
            list.reserve(n);
            for (std::uint64_t i = 0; i < n; ++i) {
                const auto doc = r.u32();
                const auto tf = r.u32();
                if (doc >= doc_count) throw Error("snapshot posting references unknown doc");
                list.push_back({doc, tf});
                index.forward_[doc].emplace_back(static_cast<std::uint32_t>(t), tf);
            }
            index.postings_.push_back(std::move(list));
        }
        return index;
    }

  private:
    friend class IndexBuilder;

    static constexpr const char* kMagic = "CLIRSIDX";
    static constexpr std::uint32_t kVersion = 1;

    RankedList search_bm25_canonical(const std::map<std::string, double>& query_weights,
                                     std::size_t k, const Bm25Params& params) const {
        if (mode_ != IndexMode::TextBm25)
            throw Error("BM25 search requires a text-mode index");
        if (k == 0) throw Error("k must be positive");

        const double n = static_cast<double>(doc_count());
        std::unordered_map<std::uint32_t, double> acc;
        for (const auto& [token, qw] : query_weights) {
            if (qw == 0.0) continue;
            const auto list = postings(token);
            if (list.empty()) continue;
            const double df = static_cast<double>(list.size());
            const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
            for (const auto& posting : list) {
                const double tf = static_cast<double>(posting.tf);
                const double len_norm =
                    params.k1 * (1.0 - params.b +
                                 params.b * static_cast<double>(doc_lengths_[posting.doc]) /
                                     avg_doc_length_);
                acc[posting.doc] += qw * idf * tf / (tf + len_norm);
            }
        }
        std::vector<std::pair<double, std::uint32_t>> candidates;
        candidates.reserve(acc.size());
        for (const auto& [doc, score] : acc) candidates.emplace_back(score, doc);

        RankedList result;
        result.entries = detail::select_top_k(std::move(candidates), k, doc_ids_);
        return result;
    }

    IndexMode mode_ = IndexMode::TextBm25;
    AnalyzerConfig analyzer_;
    std::uint32_t scale_ = kDefaultQuantizationScale;
    std::vector<std::string> doc_ids_;
    std::unordered_map<std::string, std::uint32_t> doc_lookup_;
    std::vector<std::uint64_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::vector<std::string> term_names_;
    std::unordered_map<std::string, std::uint32_t> term_lookup_;
    std::vector<std::vector<Posting>> postings_;
    // doc -> (term, tf), sorted by term id
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> forward_;
};

class IndexBuilder {
  public:
    explicit IndexBuilder(IndexMode mode) { index_.mode_ = mode; }

    void set_analyzer(AnalyzerConfig config) {
        config.validate();
        index_.analyzer_ = std::move(config);
    }

    void set_scale(std::uint32_t scale) {
        if (scale == 0) throw Error("quantization scale must be positive");
        index_.scale_ = scale;
    }

    /// Adds one document's term multiset. Terms are registered in sorted
    /// order so snapshots are reproducible for identical inputs.
    void add(const std::string& doc_id, const std::map<std::string, std::uint32_t>& term_counts) {
        if (doc_id.empty()) throw Error("doc_id must be non-empty");
        const auto doc = static_cast<std::uint32_t>(index_.doc_ids_.size());
        if (!index_.doc_lookup_.emplace(doc_id, doc).second)
            throw Error("duplicate doc_id: " + doc_id);
        index_.doc_ids_.push_back(doc_id);

        std::uint64_t length = 0;
        index_.forward_.emplace_back();
        for (const auto& [term, tf] : term_counts) {
            if (tf == 0) continue;
            auto [it, inserted] =
                index_.term_lookup_.emplace(term, static_cast<std::uint32_t>(index_.term_names_.size()));
            if (inserted) {
                index_.term_names_.push_back(term);
                index_.postings_.emplace_back();
            }
            index_.postings_[it->second].push_back({doc, tf});
            index_.forward_.back().emplace_back(it->second, tf);
            length += tf;
        }
        std::sort(index_.forward_.back().begin(), index_.forward_.back().end());
        index_.doc_lengths_.push_back(length);
        total_length_ += length;
    }

    InvertedIndex finish() {
        index_.avg_doc_length_ = index_.doc_ids_.empty()
                                     ? 0.0
                                     : static_cast<double>(total_length_) /
                                           static_cast<double>(index_.doc_ids_.size());
        return std::move(index_);
    }

  private:
    InvertedIndex index_;
    std::uint64_t total_length_ = 0;
};

/// Builds a text-mode BM25 index from any document source with
/// `std::optional<Document> next()`.
template <StreamingSource DocSource>
InvertedIndex index_text(DocSource&& docs, const AnalyzerConfig& config) {
    IndexBuilder builder(IndexMode::TextBm25);
    builder.set_analyzer(config);
    while (auto doc = docs.next()) {
        const std::string contents =
            doc->title.empty() ? doc->text : doc->title + " " + doc->text;
        std::map<std::string, std::uint32_t> counts;
        for (auto& token : analyze(contents, config)) ++counts[std::move(token)];
        builder.add(doc->doc_id, counts);
    }
    return builder.finish();
}

inline InvertedIndex index_text(const std::vector<Document>& docs, const AnalyzerConfig& config) {
    struct VectorSource {
        const std::vector<Document>* docs;
        std::size_t i = 0;
        std::optional<Document> next() {
            if (i >= docs->size()) return std::nullopt;
            return (*docs)[i++];
        }
    } source{&docs};
    return index_text(source, config);
}

/// Builds an impact-mode index: tf of (token, doc) is the quantized learned
/// weight; zero-quantized entries are dropped.
template <StreamingSource VectorSource>
InvertedIndex index_impact(VectorSource&& vectors,
                           std::uint32_t scale = kDefaultQuantizationScale) {
    IndexBuilder builder(IndexMode::Impact);
    builder.set_scale(scale);
    AnalyzerConfig none;
    none.stemmer = Stemmer::None;
    builder.set_analyzer(none);
    while (auto record = vectors.next()) {
        std::map<std::string, std::uint32_t> counts;
        for (const auto& [token, weight] : record->second) {
            const auto q = quantize(weight, scale);
            if (q > 0) counts.emplace(token, q);
        }
        builder.add(record->first, counts);
    }
    return builder.finish();
}

inline InvertedIndex index_impact(const std::vector<std::pair<std::string, SparseVector>>& vectors,
                                  std::uint32_t scale = kDefaultQuantizationScale) {
    struct VectorSource {
        const std::vector<std::pair<std::string, SparseVector>>* vecs;
        std::size_t i = 0;
        std::optional<std::pair<std::string, SparseVector>> next() {
            if (i >= vecs->size()) return std::nullopt;
            return (*vecs)[i++];
        }
    } source{&vectors};
    return index_impact(source, scale);
}

}  // namespace clir
