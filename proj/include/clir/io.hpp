#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "clir/types.hpp"

namespace clir {

enum class QueryFields { Title, Description, Both };

inline std::string query_fields_name(QueryFields f) {
    switch (f) {
        case QueryFields::Title: return "title";
        case QueryFields::Description: return "description";
        case QueryFields::Both: return "both";
    }
    return "both";
}

inline QueryFields parse_query_fields(std::string_view name) {
    if (name == "title") return QueryFields::Title;
    if (name == "description" || name == "desc") return QueryFields::Description;
    if (name == "both") return QueryFields::Both;
    throw Error("unknown query fields selector: " + std::string(name));
}

/// Query text for one topic variant. "both" is title, one space, description.
inline std::string build_query_text(const Topic& topic, const std::string& variant,
                                    QueryFields fields) {
    auto it = topic.variants.find(variant);
    if (it == topic.variants.end())
        throw Error("topic " + topic.topic_id + " has no '" + variant + "' variant");
    switch (fields) {
        case QueryFields::Title: return it->second.title;
        case QueryFields::Description: return it->second.description;
        case QueryFields::Both: return it->second.title + " " + it->second.description;
    }
    return {};
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) fields.emplace_back(line, start, i - start);
    }
    return fields;
}

inline bool blank_line(const std::string& line) {
    for (char c : line)
        if (c != ' ' && c != '\t' && c != '\r') return false;
    return true;
}

/// getline that tolerates both \n and \r\n endings.
inline bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

inline nlohmann::json parse_json_line(const std::string& line, std::size_t line_no) {
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object())
        throw ParseError("malformed JSON record", line_no);
    return record;
}

}  // namespace detail

/// Streaming JSONL corpus reader. Each line is an object with "id" and
/// either "contents" or "title"+"text".
class CorpusReader {
  public:
    explicit CorpusReader(const std::string& path) : in_(path), path_(path) {
        if (!in_) throw Error("cannot open corpus file: " + path);
    }

    std::optional<Document> next() {
        std::string line;
        if (!detail::next_line(in_, line)) return std::nullopt;
        ++line_;
        const auto record = detail::parse_json_line(line, line_);

        Document doc;
        if (auto id = record.find("id"); id != record.end() && id->is_string())
            doc.doc_id = id->get<std::string>();
        if (doc.doc_id.empty()) throw ParseError("document is missing a non-empty \"id\"", line_);

        if (auto contents = record.find("contents"); contents != record.end()) {
            if (!contents->is_string()) throw ParseError("\"contents\" must be a string", line_);
            doc.text = contents->get<std::string>();
        } else if (auto text = record.find("text"); text != record.end()) {
            if (!text->is_string()) throw ParseError("\"text\" must be a string", line_);
            doc.text = text->get<std::string>();
            if (auto title = record.find("title"); title != record.end() && title->is_string())
                doc.title = title->get<std::string>();
        } else {
            throw ParseError("document needs \"contents\" or \"text\"", line_);
        }

        if (!seen_.insert(doc.doc_id).second)
            throw ParseError("duplicate doc_id: " + doc.doc_id, line_);
        return doc;
    }

    std::size_t lines_read() const { return line_; }

  private:
    std::ifstream in_;
    std::string path_;
    std::size_t line_ = 0;
    std::unordered_set<std::string> seen_;
};

inline std::vector<Document> load_corpus(const std::string& path) {
    CorpusReader reader(path);
    std::vector<Document> docs;
    while (auto doc = reader.next()) docs.push_back(std::move(*doc));
    return docs;
}

/// Topics JSONL: {"topic_id": ..., "variants": {"original"|"human"|"machine":
/// {"title": ..., "description": ...}}}. Description defaults to "".
inline std::vector<Topic> load_topics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open topics file: " + path);

    std::vector<Topic> topics;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (detail::next_line(in, line)) {
        ++line_no;
        const auto record = detail::parse_json_line(line, line_no);

        Topic topic;
        if (auto id = record.find("topic_id"); id != record.end() && id->is_string())
            topic.topic_id = id->get<std::string>();
        if (topic.topic_id.empty())
            throw ParseError("topic is missing a non-empty \"topic_id\"", line_no);
        if (!seen.insert(topic.topic_id).second)
            throw ParseError("duplicate topic_id: " + topic.topic_id, line_no);

        auto variants = record.find("variants");
        if (variants == record.end() || !variants->is_object() || variants->empty())
            throw ParseError("topic " + topic.topic_id + " needs at least one variant", line_no);
        for (const auto& [label, body] : variants->items()) {
            if (label != "original" && label != "human" && label != "machine")
                throw ParseError("topic " + topic.topic_id + " has unknown variant '" + label + "'",
                                 line_no);
            if (!body.is_object())
                throw ParseError("variant '" + label + "' must be an object", line_no);
            TopicVariant variant;
            if (auto title = body.find("title"); title != body.end() && title->is_string())
                variant.title = title->get<std::string>();
            if (variant.title.empty())
                throw ParseError(
                    "topic " + topic.topic_id + " variant '" + label + "' is missing a title",
                    line_no);
            if (auto desc = body.find("description"); desc != body.end() && desc->is_string())
                variant.description = desc->get<std::string>();
            topic.variants.emplace(label, std::move(variant));
        }
        topics.push_back(std::move(topic));
    }
    return topics;
}

/// TREC qrels: "topic 0 docid grade", whitespace-separated.
inline Qrels load_qrels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open qrels file: " + path);

    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::blank_line(line)) continue;
        const auto fields = detail::split_ws(line);
        if (fields.size() != 4)
            throw ParseError("expected 4 fields 'topic 0 docid grade'", line_no);
        int grade = 0;
        try {
            std::size_t pos = 0;
            grade = std::stoi(fields[3], &pos);
            if (pos != fields[3].size()) throw std::invalid_argument(fields[3]);
        } catch (const std::exception&) {
            throw ParseError("grade is not an integer: '" + fields[3] + "'", line_no);
        }
        if (grade < 0) throw ParseError("grade must be non-negative", line_no);
        try {
            qrels.add(fields[0], fields[2], grade);
        } catch (const Error& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return qrels;
}

/// TREC run: "topic Q0 docid rank score tag". Ranks must be consecutive from
/// 1 and scores non-increasing within a topic; topic blocks must be
/// contiguous. The run tag is taken from the first line.
inline Run load_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open run file: " + path);

    Run run;
    std::string line;
    std::size_t line_no = 0;
    std::string current_topic;
    std::vector<ScoredDoc> entries;
    std::unordered_set<std::string> topic_docs;
    std::unordered_set<std::string> closed_topics;
    bool tag_set = false;

    auto flush = [&]() {
        if (current_topic.empty()) return;
        run.add_topic(current_topic, std::move(entries));
        closed_topics.insert(current_topic);
        entries.clear();
        topic_docs.clear();
    };

    while (detail::next_line(in, line)) {
        ++line_no;
        if (detail::blank_line(line)) continue;
        const auto fields = detail::split_ws(line);
        if (fields.size() != 6)
            throw ParseError("expected 6 fields 'topic Q0 docid rank score tag'", line_no);

        const std::string& topic = fields[0];
        const std::string& doc = fields[2];

        long rank = 0;
        try {
            std::size_t pos = 0;
            rank = std::stol(fields[3], &pos);
            if (pos != fields[3].size()) throw std::invalid_argument(fields[3]);
        } catch (const std::exception&) {
            throw ParseError("rank is not an integer: '" + fields[3] + "'", line_no);
        }
        double score = 0.0;
        try {
            std::size_t pos = 0;
            score = std::stod(fields[4], &pos);
            if (pos != fields[4].size()) throw std::invalid_argument(fields[4]);
        } catch (const std::exception&) {
            throw ParseError("score is not numeric: '" + fields[4] + "'", line_no);
        }
        if (!std::isfinite(score)) throw ParseError("score must be finite", line_no);

        if (topic != current_topic) {
            flush();
            if (closed_topics.count(topic) > 0)
                throw ParseError("topic " + topic + " appears in two separate blocks", line_no);
            current_topic = topic;
        }
        if (rank != static_cast<long>(entries.size()) + 1)
            throw ParseError("rank " + std::to_string(rank) + " breaks the consecutive sequence " +
                                 "(expected " + std::to_string(entries.size() + 1) + ")",
                             line_no);
        if (!entries.empty() && score > entries.back().score)
            throw ParseError("score increases with rank in topic " + topic, line_no);
        if (!topic_docs.insert(doc).second)
            throw ParseError("duplicate doc " + doc + " in topic " + topic, line_no);
        entries.push_back({doc, score});
        if (!tag_set) {
            run.set_tag(fields[5]);
            tag_set = true;
        }
    }
    try {
        flush();
    } catch (const Error& e) {
        throw ParseError(e.what(), line_no);
    }
    return run;
}

/// Writes TREC run format. Ranks are recomputed from entry order and scores
/// serialized with 6 decimal places.
inline void write_run(const Run& run, std::ostream& out) {
    char score_buf[64];
    for (const auto& topic_id : run.topic_ids()) {
        const auto& entries = run.entries(topic_id);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            std::snprintf(score_buf, sizeof(score_buf), "%.6f", entries[i].score);
            out << topic_id << " Q0 " << entries[i].doc_id << ' ' << (i + 1) << ' ' << score_buf
                << ' ' << run.tag() << '\n';
        }
    }
}

inline void write_run(const Run& run, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open run file for writing: " + path);
    write_run(run, out);
    if (!out) throw Error("failed writing run file: " + path);
}

/// Streaming reader for sparse term-weight vectors:
/// {"id": ..., "vector": {token: weight}}. Weights must be finite and
/// non-negative; zero weights are dropped.
class SparseVectorReader {
  public:
    explicit SparseVectorReader(const std::string& path) : in_(path) {
        if (!in_) throw Error("cannot open sparse vector file: " + path);
    }

    std::optional<std::pair<std::string, SparseVector>> next() {
        std::string line;
        if (!detail::next_line(in_, line)) return std::nullopt;
        ++line_;
        const auto record = detail::parse_json_line(line, line_);

        std::string id;
        if (auto it = record.find("id"); it != record.end() && it->is_string())
            id = it->get<std::string>();
        if (id.empty()) throw ParseError("vector record is missing a non-empty \"id\"", line_);
        if (!seen_.insert(id).second) throw ParseError("duplicate vector id: " + id, line_);

        auto vec = record.find("vector");
        if (vec == record.end() || !vec->is_object())
            throw ParseError("sparse record needs an object \"vector\"", line_);

        SparseVector weights;
        weights.reserve(vec->size());
        for (const auto& [token, value] : vec->items()) {
            if (!value.is_number())
                throw ParseError("weight of '" + token + "' is not a number", line_);
            const double w = value.get<double>();
            if (!std::isfinite(w)) throw ParseError("weight of '" + token + "' is not finite", line_);
            if (w < 0) throw ParseError("negative weight for token '" + token + "'", line_);
            if (w > 0) weights.emplace(token, w);
        }
        return std::make_pair(std::move(id), std::move(weights));
    }

  private:
    std::ifstream in_;
    std::size_t line_ = 0;
    std::unordered_set<std::string> seen_;
};

/// Streaming reader for dense vectors: {"id": ..., "vector": [floats]}.
/// All vectors in a file must share one dimension.
class DenseVectorReader {
  public:
    explicit DenseVectorReader(const std::string& path) : in_(path) {
        if (!in_) throw Error("cannot open dense vector file: " + path);
    }

    std::optional<std::pair<std::string, DenseVector>> next() {
        std::string line;
        if (!detail::next_line(in_, line)) return std::nullopt;
        ++line_;
        const auto record = detail::parse_json_line(line, line_);

        std::string id;
        if (auto it = record.find("id"); it != record.end() && it->is_string())
            id = it->get<std::string>();
        if (id.empty()) throw ParseError("vector record is missing a non-empty \"id\"", line_);
        if (!seen_.insert(id).second) throw ParseError("duplicate vector id: " + id, line_);

        auto vec = record.find("vector");
        if (vec == record.end() || !vec->is_array() || vec->empty())
            throw ParseError("dense record needs a non-empty array \"vector\"", line_);

        DenseVector values;
        values.reserve(vec->size());
        for (const auto& value : *vec) {
            if (!value.is_number())
                throw ParseError("dense vector has a non-numeric entry", line_);
            const double v = value.get<double>();
            if (!std::isfinite(v)) throw ParseError("dense vector entry is not finite", line_);
            values.push_back(static_cast<float>(v));
        }
        if (dim_ == 0)
            dim_ = values.size();
        else if (values.size() != dim_)
            throw ParseError("dimension mismatch: expected " + std::to_string(dim_) + ", got " +
                                 std::to_string(values.size()),
                             line_);
        return std::make_pair(std::move(id), std::move(values));
    }

    std::size_t dim() const { return dim_; }

  private:
    std::ifstream in_;
    std::size_t line_ = 0;
    std::size_t dim_ = 0;
    std::unordered_set<std::string> seen_;
};

inline std::vector<std::pair<std::string, SparseVector>> load_sparse_vectors(
    const std::string& path) {
    SparseVectorReader reader(path);
    std::vector<std::pair<std::string, SparseVector>> out;
    while (auto v = reader.next()) out.push_back(std::move(*v));
    return out;
}

inline std::vector<std::pair<std::string, DenseVector>> load_dense_vectors(
    const std::string& path) {
    DenseVectorReader reader(path);
    std::vector<std::pair<std::string, DenseVector>> out;
    while (auto v = reader.next()) out.push_back(std::move(*v));
    return out;
}

}  // namespace clir
