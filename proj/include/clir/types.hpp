#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace clir {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Error tied to a specific line of an input file.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

struct Document {
    std::string doc_id;
    std::string title;  // may be empty
    std::string text;
};

struct TopicVariant {
    std::string title;
    std::string description;
};

/// Multi-translation topic. Variant labels: "original", "human", "machine".
struct Topic {
    std::string topic_id;
    std::map<std::string, TopicVariant> variants;

    bool has_variant(const std::string& label) const { return variants.count(label) > 0; }
};

/// Graded relevance judgments keyed by (topic, doc). Unjudged pairs are
/// absent; downstream treats absence as grade 0.
class Qrels {
  public:
    void add(const std::string& topic_id, const std::string& doc_id, int grade) {
        if (grade < 0) throw Error("qrels grade must be non-negative");
        auto [it, inserted] = judgments_[topic_id].emplace(doc_id, grade);
        if (!inserted) throw Error("duplicate qrels pair (" + topic_id + ", " + doc_id + ")");
    }

    /// Grade for a pair; absent pairs are grade 0.
    int grade(const std::string& topic_id, const std::string& doc_id) const {
        auto t = judgments_.find(topic_id);
        if (t == judgments_.end()) return 0;
        auto d = t->second.find(doc_id);
        return d == t->second.end() ? 0 : d->second;
    }

    bool has_topic(const std::string& topic_id) const { return judgments_.count(topic_id) > 0; }

    /// Number of relevant (grade > 0) documents for a topic.
    std::size_t relevant_count(const std::string& topic_id) const {
        auto t = judgments_.find(topic_id);
        if (t == judgments_.end()) return 0;
        std::size_t n = 0;
        for (const auto& [doc, g] : t->second)
            if (g > 0) ++n;
        return n;
    }

    /// Judged topic ids, sorted.
    std::vector<std::string> topic_ids() const {
        std::vector<std::string> ids;
        ids.reserve(judgments_.size());
        for (const auto& [topic, docs] : judgments_) ids.push_back(topic);
        return ids;
    }

    const std::map<std::string, std::unordered_map<std::string, int>>& judgments() const {
        return judgments_;
    }

    std::size_t size() const {
        std::size_t n = 0;
        for (const auto& [topic, docs] : judgments_) n += docs.size();
        return n;
    }

  private:
    std::map<std::string, std::unordered_map<std::string, int>> judgments_;
};

struct ScoredDoc {
    std::string doc_id;
    double score = 0.0;

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Per-topic ranked result list. Scores are non-increasing; ties broken by
/// ascending doc_id at construction time.
struct RankedList {
    std::string topic_id;
    std::vector<ScoredDoc> entries;
};

/// A TREC-style run: one ranked list per topic plus a tag. Topic blocks keep
/// their insertion order so that write(load(file)) reproduces the file.
class Run {
  public:
    Run() = default;
    explicit Run(std::string tag) : tag_(std::move(tag)) {}

    const std::string& tag() const { return tag_; }
    void set_tag(std::string tag) { tag_ = std::move(tag); }

    bool has_topic(const std::string& topic_id) const { return index_.count(topic_id) > 0; }

    /// Entries for a topic in rank order; empty list if absent.
    const std::vector<ScoredDoc>& entries(const std::string& topic_id) const {
        static const std::vector<ScoredDoc> kEmpty;
        auto it = index_.find(topic_id);
        return it == index_.end() ? kEmpty : topics_[it->second].second;
    }

    /// Topic ids in insertion order.
    std::vector<std::string> topic_ids() const {
        std::vector<std::string> ids;
        ids.reserve(topics_.size());
        for (const auto& [topic, entries] : topics_) ids.push_back(topic);
        return ids;
    }

    /// Appends a complete topic block. Scores must be non-increasing and
    /// doc_ids unique; ranks are implicit in the order.
    void add_topic(const std::string& topic_id, std::vector<ScoredDoc> entries) {
        if (index_.count(topic_id) > 0)
            throw Error("duplicate or non-contiguous topic block: " + topic_id);
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!seen.insert(entries[i].doc_id).second)
                throw Error("duplicate doc " + entries[i].doc_id + " in topic " + topic_id);
            if (i > 0 && entries[i].score > entries[i - 1].score)
                throw Error("scores increase with rank in topic " + topic_id);
        }
        index_.emplace(topic_id, topics_.size());
        topics_.emplace_back(topic_id, std::move(entries));
    }

    void add_topic(RankedList list) { add_topic(list.topic_id, std::move(list.entries)); }

    std::size_t topic_count() const { return topics_.size(); }

    std::size_t total_entries() const {
        std::size_t n = 0;
        for (const auto& [topic, entries] : topics_) n += entries.size();
        return n;
    }

  private:
    std::string tag_ = "clir";
    std::vector<std::pair<std::string, std::vector<ScoredDoc>>> topics_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Term -> weight map shared by bag-of-words queries and learned-impact
/// vectors. Zero-weight entries are never stored.
using SparseVector = std::unordered_map<std::string, double>;

/// Fixed-dimension embedding vector (single-precision storage).
using DenseVector = std::vector<float>;

/// Anything with `std::optional<T> next()`: file readers and test stubs that
/// feed the index builders one record at a time.
template <typename S>
concept StreamingSource = requires(S s) {
    s.next();
};

/// Drops zero-weight entries in place.
inline void prune_zero_weights(SparseVector& v) {
    for (auto it = v.begin(); it != v.end();) {
        if (it->second == 0.0)
            it = v.erase(it);
        else
            ++it;
    }
}

}  // namespace clir
