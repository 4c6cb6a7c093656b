#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clir/analysis.hpp"
#include "clir/detail/parallel.hpp"
#include "clir/dense_index.hpp"
#include "clir/eval.hpp"
#include "clir/fusion.hpp"
#include "clir/io.hpp"
#include "clir/prf.hpp"
#include "clir/rerank.hpp"
#include "clir/sparse_index.hpp"
#include "clir/types.hpp"
#include "clir/version.hpp"

namespace clir::cli {

enum class PipelineMode { DtBm25, DtImpact, QtBm25, QtImpact, Dense };

inline PipelineMode parse_mode(const std::string& name) {
    if (name == "dt-bm25") return PipelineMode::DtBm25;
    if (name == "dt-impact") return PipelineMode::DtImpact;
    if (name == "qt-bm25") return PipelineMode::QtBm25;
    if (name == "qt-impact") return PipelineMode::QtImpact;
    if (name == "dense") return PipelineMode::Dense;
    throw Error("unknown pipeline mode: " + name);
}

namespace detail {

inline std::string snapshot_magic(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index file: " + path);
    clir::detail::BinaryReader r(in);
    return r.str();
}

/// The paper's condition grid: document translation pairs with the original
/// English topics, query translation with a translated variant, and the
/// language-independent (dense) route accepts all three.
inline void check_mode_variant(PipelineMode mode, const std::string& variant) {
    const bool dt = mode == PipelineMode::DtBm25 || mode == PipelineMode::DtImpact;
    const bool qt = mode == PipelineMode::QtBm25 || mode == PipelineMode::QtImpact;
    if (dt && variant != "original")
        throw Error("document-translation modes use --variant original");
    if (qt && variant == "original")
        throw Error("query-translation modes need --variant human or machine");
}

inline std::string default_tag(const std::string& mode, const std::string& fields, bool prf) {
    std::string tag = mode + "." + fields;
    if (prf) tag += ".prf";
    return tag;
}

struct AnalyzerFlags {
    std::string language = "en";
    std::string stopwords_path;
    std::string stemmer = "default";
    bool no_lowercase = false;
    bool no_fa_normalization = false;

    AnalyzerConfig build() const {
        auto config = AnalyzerConfig::defaults_for(parse_language(language));
        if (stemmer != "default") config.stemmer = parse_stemmer(stemmer);
        config.lowercase = !no_lowercase;
        config.fa_normalization = !no_fa_normalization;
        if (!stopwords_path.empty()) config.stopwords = load_stopwords(stopwords_path);
        config.validate();
        return config;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--language", language, "Corpus language: en, fa, ru or zh")
            ->check(CLI::IsMember({"en", "fa", "ru", "zh"}));
        cmd->add_option("--stopwords", stopwords_path, "Stopword file, one token per line");
        cmd->add_option("--stemmer", stemmer,
                        "Stemmer override (default picks by language)")
            ->check(CLI::IsMember({"default", "none", "english-porter", "russian-light"}));
        cmd->add_flag("--no-lowercase", no_lowercase, "Disable lowercasing");
        cmd->add_flag("--no-fa-normalization", no_fa_normalization,
                      "Disable Persian character normalization");
    }
};

struct PrfFlags {
    bool enabled = false;
    RocchioParams params;

    void attach(CLI::App* cmd) {
        cmd->add_flag("--prf", enabled, "Apply Rocchio pseudo-relevance feedback");
        cmd->add_option("--prf-depth", params.depth, "Feedback documents (default 10)");
        cmd->add_option("--prf-alpha", params.alpha, "Original query weight (default 1.0)");
        cmd->add_option("--prf-beta", params.beta, "Feedback centroid weight (default 0.75)");
        cmd->add_option("--prf-gamma", params.gamma,
                        "Non-relevant weight; unused under PRF (default 0)");
        cmd->add_option("--prf-terms", params.top_terms,
                        "Expansion terms kept, sparse only (default 128)");
    }
};

}  // namespace detail

struct IndexOptions {
    std::string type;  // text | impact | dense
    std::string input;
    std::string output;
    detail::AnalyzerFlags analyzer;
    std::uint32_t scale = kDefaultQuantizationScale;
};

inline void cmd_index(const IndexOptions& opt) {
    if (opt.type == "text") {
        CorpusReader reader(opt.input);
        const auto index = index_text(reader, opt.analyzer.build());
        index.save(opt.output);
        std::cerr << "indexed " << index.doc_count() << " documents, " << index.term_count()
                  << " terms -> " << opt.output << "\n";
    } else if (opt.type == "impact") {
        SparseVectorReader reader(opt.input);
        const auto index = index_impact(reader, opt.scale);
        index.save(opt.output);
        std::cerr << "indexed " << index.doc_count() << " impact vectors (scale " << opt.scale
                  << "), " << index.term_count() << " terms -> " << opt.output << "\n";
    } else if (opt.type == "dense") {
        DenseVectorReader reader(opt.input);
        const auto index = build_flat(reader);
        index.save(opt.output);
        std::cerr << "indexed " << index.size() << " dense vectors (dim " << index.dim()
                  << ") -> " << opt.output << "\n";
    } else {
        throw Error("unknown index type: " + opt.type);
    }
}

struct SearchOptions {
    std::string index_path;
    std::string output;
    std::string mode;
    std::string topics_path;
    std::string query_vectors_path;
    std::string fields = "both";
    std::string variant = "original";
    std::size_t k = 1000;
    Bm25Params bm25;
    detail::PrfFlags prf;
    std::string tag;
};

inline void cmd_search(const SearchOptions& opt) {
    const PipelineMode mode = parse_mode(opt.mode);
    detail::check_mode_variant(mode, opt.variant);
    const QueryFields fields = parse_query_fields(opt.fields);
    const std::string magic = detail::snapshot_magic(opt.index_path);

    Run run(opt.tag.empty() ? detail::default_tag(opt.mode, opt.fields, opt.prf.enabled)
                            : opt.tag);

    if (mode == PipelineMode::DtBm25 || mode == PipelineMode::QtBm25) {
        if (magic != "CLIRSIDX") throw Error("BM25 modes need a sparse text index");
        if (opt.topics_path.empty()) throw Error("BM25 modes need --topics");
        const auto index = InvertedIndex::load(opt.index_path);
        if (index.mode() != IndexMode::TextBm25)
            throw Error("BM25 modes need a text index, got an impact index");

        const auto topics = load_topics(opt.topics_path);
        std::vector<RankedList> results(topics.size());
        clir::detail::parallel_for(topics.size(), [&](std::size_t i) {
            const auto query = analyze(build_query_text(topics[i], opt.variant, fields),
                                       index.analyzer());
            results[i] = opt.prf.enabled
                             ? prf_search_bm25(index, query, opt.k, opt.prf.params, opt.bm25)
                             : index.search_bm25(query, opt.k, opt.bm25);
            results[i].topic_id = topics[i].topic_id;
        });
        for (auto& list : results) run.add_topic(std::move(list));
    } else if (mode == PipelineMode::DtImpact || mode == PipelineMode::QtImpact) {
        if (magic != "CLIRSIDX") throw Error("impact modes need a sparse impact index");
        if (opt.query_vectors_path.empty()) throw Error("impact modes need --query-vectors");
        const auto index = InvertedIndex::load(opt.index_path);
        if (index.mode() != IndexMode::Impact)
            throw Error("impact modes need an impact index, got a text index");

        const auto queries = load_sparse_vectors(opt.query_vectors_path);
        std::vector<RankedList> results(queries.size());
        clir::detail::parallel_for(queries.size(), [&](std::size_t i) {
            results[i] = opt.prf.enabled
                             ? prf_search_impact(index, queries[i].second, opt.k, opt.prf.params)
                             : index.search_impact(queries[i].second, opt.k);
            results[i].topic_id = queries[i].first;
        });
        for (auto& list : results) run.add_topic(std::move(list));
    } else {
        if (magic != "CLIRDIDX") throw Error("dense mode needs a dense index");
        if (opt.query_vectors_path.empty()) throw Error("dense mode needs --query-vectors");
        const auto index = FlatIndex::load(opt.index_path);

        const auto queries = load_dense_vectors(opt.query_vectors_path);
        std::vector<RankedList> results(queries.size());
        clir::detail::parallel_for(queries.size(), [&](std::size_t i) {
            results[i] = opt.prf.enabled
                             ? prf_search_dense(index, queries[i].second, opt.k, opt.prf.params)
                             : index.search(queries[i].second, opt.k);
            results[i].topic_id = queries[i].first;
        });
        for (auto& list : results) run.add_topic(std::move(list));
    }

    write_run(run, opt.output);
    std::cerr << "wrote " << run.total_entries() << " entries for " << run.topic_count()
              << " topics -> " << opt.output << " (tag " << run.tag() << ")\n";
}

struct FuseOptions {
    std::vector<std::string> run_paths;
    std::string output;
    std::string strategy = "rrf";
    RrfParams params;
    std::string scores_path;
    std::size_t rerank_depth = 1000;
    std::string tag;
};

inline void cmd_fuse(const FuseOptions& opt) {
    if (opt.run_paths.empty()) throw Error("fuse needs at least one input run");
    std::vector<Run> runs;
    runs.reserve(opt.run_paths.size());
    for (const auto& path : opt.run_paths) runs.push_back(load_run(path));

    Run fused;
    if (opt.strategy == "rrf") {
        fused = rrf(runs, opt.params);
    } else {
        if (opt.scores_path.empty())
            throw Error("early/late fusion needs --scores for the reranking stage");
        const auto oracle = load_score_oracle(opt.scores_path);
        if (oracle.duplicates > 0)
            std::cerr << "warning: " << oracle.duplicates << " duplicate score pairs\n";
        fused = opt.strategy == "early"
                    ? early_fusion(runs, oracle.oracle, opt.params, opt.rerank_depth)
                    : late_fusion(runs, oracle.oracle, opt.params, opt.rerank_depth);
    }
    if (!opt.tag.empty()) fused.set_tag(opt.tag);
    write_run(fused, opt.output);
    std::cerr << "fused " << runs.size() << " runs (" << opt.strategy << ") -> " << opt.output
              << "\n";
}

struct RerankOptions {
    std::string run_path;
    std::string output;
    std::string scores_path;
    std::string emit_pairs_path;
    std::string corpus_path;
    std::string topics_path;
    std::string fields = "both";
    std::string variant = "original";
    detail::AnalyzerFlags analyzer;
    bool overlap = false;
    std::size_t depth = 1000;
    std::string tag;
};

inline void cmd_rerank(const RerankOptions& opt) {
    const Run run = load_run(opt.run_path);

    if (!opt.emit_pairs_path.empty()) {
        if (opt.corpus_path.empty()) throw Error("--emit-pairs needs --corpus for document text");
        std::unordered_map<std::string, std::string> texts;
        CorpusReader reader(opt.corpus_path);
        while (auto doc = reader.next())
            texts.emplace(doc->doc_id,
                          doc->title.empty() ? doc->text : doc->title + " " + doc->text);
        std::ofstream out(opt.emit_pairs_path);
        if (!out) throw Error("cannot open pairs file for writing: " + opt.emit_pairs_path);
        write_rerank_pairs(run, texts, opt.depth, out);
        std::cerr << "wrote candidate pairs -> " << opt.emit_pairs_path << "\n";
        return;
    }

    std::unique_ptr<ScoreSource> source;
    if (opt.overlap) {
        if (opt.corpus_path.empty() || opt.topics_path.empty())
            throw Error("--overlap needs --corpus and --topics");
        source = std::make_unique<LexicalOverlapScorer>(
            load_topics(opt.topics_path), load_corpus(opt.corpus_path), opt.variant,
            parse_query_fields(opt.fields), opt.analyzer.build());
    } else {
        if (opt.scores_path.empty())
            throw Error("rerank needs --scores, --overlap or --emit-pairs");
        auto loaded = load_score_oracle(opt.scores_path);
        if (loaded.duplicates > 0)
            std::cerr << "warning: " << loaded.duplicates << " duplicate score pairs\n";
        source = std::make_unique<ScoreOracle>(std::move(loaded.oracle));
    }
    if (opt.output.empty()) throw Error("rerank needs --output");

    Run reranked = rerank(run, *source, opt.depth);
    reranked.set_tag(opt.tag.empty() ? run.tag() + ".rerank" : opt.tag);
    write_run(reranked, opt.output);
    std::cerr << "reranked " << run.topic_count() << " topics (depth " << opt.depth << ") -> "
              << opt.output << "\n";
}

inline GainFunction parse_gain(const std::string& name) {
    if (name == "linear") return GainFunction::Linear;
    if (name == "exp") return GainFunction::Exponential;
    throw Error("unknown gain function: " + name);
}

struct EvalOptions {
    std::string run_path;
    std::string qrels_path;
    std::string output;
    std::string gain = "linear";
    EvalParams params;
};

inline void cmd_eval(const EvalOptions& opt) {
    const Run run = load_run(opt.run_path);
    const Qrels qrels = load_qrels(opt.qrels_path);
    EvalParams params = opt.params;
    params.gain = parse_gain(opt.gain);
    const EvalReport report = evaluate(run, qrels, params);
    if (opt.output.empty()) {
        write_eval_report(report, std::cout);
    } else {
        std::ofstream out(opt.output);
        if (!out) throw Error("cannot open report file for writing: " + opt.output);
        write_eval_report(report, out);
        std::cerr << "wrote metric report -> " << opt.output << "\n";
    }
}

struct SignificanceOptions {
    std::vector<std::string> run_paths;
    std::string qrels_path;
    std::string metric = "ndcg";
    std::string output;
    EvalParams params;
};

inline void cmd_significance(const SignificanceOptions& opt) {
    if (opt.run_paths.size() < 2) throw Error("significance needs at least two runs");
    const Qrels qrels = load_qrels(opt.qrels_path);

    std::vector<std::map<std::string, double>> scores;
    scores.reserve(opt.run_paths.size());
    for (const auto& path : opt.run_paths) {
        const Run run = load_run(path);
        if (opt.metric == "ndcg")
            scores.push_back(ndcg_at_k(run, qrels, opt.params.ndcg_k));
        else if (opt.metric == "recall")
            scores.push_back(recall_at_k(run, qrels, opt.params.recall_k));
        else if (opt.metric == "map")
            scores.push_back(average_precision(run, qrels));
        else
            throw Error("unknown metric: " + opt.metric);
    }

    struct Comparison {
        std::size_t a, b;
        TTestResult test;
    };
    std::vector<Comparison> comparisons;
    for (std::size_t i = 0; i < scores.size(); ++i)
        for (std::size_t j = i + 1; j < scores.size(); ++j)
            comparisons.push_back({i, j, paired_t_test(scores[i], scores[j])});

    std::vector<double> raw;
    raw.reserve(comparisons.size());
    for (const auto& c : comparisons) raw.push_back(c.test.p);
    const auto adjusted = bonferroni(raw);

    auto write_report = [&](std::ostream& out) {
        char buf[96];
        out << "metric\trun_a\trun_b\tt\tp\tp_bonferroni\n";
        for (std::size_t i = 0; i < comparisons.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.6f\t%.6g\t%.6g", comparisons[i].test.t,
                          comparisons[i].test.p, adjusted[i]);
            out << opt.metric << '\t' << opt.run_paths[comparisons[i].a] << '\t'
                << opt.run_paths[comparisons[i].b] << '\t' << buf << '\n';
        }
    };
    if (opt.output.empty()) {
        write_report(std::cout);
    } else {
        std::ofstream out(opt.output);
        if (!out) throw Error("cannot open report file for writing: " + opt.output);
        write_report(out);
        std::cerr << "wrote significance report -> " << opt.output << "\n";
    }
}

/// Builds the CLI and runs one command. Returns the process exit code.
inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Multi-stage cross-lingual retrieval engine"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "Plain-text config file supplying any flag");
    app.require_subcommand(1);

    IndexOptions index_opt;
    auto* index_cmd = app.add_subcommand("index", "Build a sparse, impact or dense index");
    index_cmd->add_option("--type", index_opt.type, "Index type: text, impact or dense")
        ->required()
        ->check(CLI::IsMember({"text", "impact", "dense"}));
    index_cmd->add_option("--input", index_opt.input, "Corpus or vector JSONL")->required();
    index_cmd->add_option("--output", index_opt.output, "Index snapshot path")->required();
    index_opt.analyzer.attach(index_cmd);
    index_cmd->add_option("--scale", index_opt.scale,
                          "Quantization scale for impact indexing (default 100)");
    index_cmd->callback([&]() { cmd_index(index_opt); });

    SearchOptions search_opt;
    auto* search_cmd = app.add_subcommand("search", "Run first-stage retrieval, optionally with PRF");
    search_cmd->add_option("--index", search_opt.index_path, "Index snapshot")->required();
    search_cmd->add_option("--output", search_opt.output, "TREC run output path")->required();
    search_cmd
        ->add_option("--mode", search_opt.mode,
                     "Condition: dt-bm25, dt-impact, qt-bm25, qt-impact or dense")
        ->required()
        ->check(CLI::IsMember({"dt-bm25", "dt-impact", "qt-bm25", "qt-impact", "dense"}));
    search_cmd->add_option("--topics", search_opt.topics_path, "Topics JSONL (BM25 modes)");
    search_cmd->add_option("--query-vectors", search_opt.query_vectors_path,
                           "Query vector JSONL keyed by topic_id (impact/dense modes)");
    search_cmd->add_option("--fields", search_opt.fields, "Query fields: title, description, both")
        ->check(CLI::IsMember({"title", "description", "both"}));
    search_cmd
        ->add_option("--variant", search_opt.variant,
                     "Translation variant: original, human, machine")
        ->check(CLI::IsMember({"original", "human", "machine"}));
    search_cmd->add_option("--k", search_opt.k, "Results per topic (default 1000)");
    search_cmd->add_option("--k1", search_opt.bm25.k1, "BM25 k1 (default 0.9)");
    search_cmd->add_option("--b", search_opt.bm25.b, "BM25 b (default 0.4)");
    search_opt.prf.attach(search_cmd);
    search_cmd->add_option("--tag", search_opt.tag, "Run tag (default: condition string)");
    search_cmd->callback([&]() { cmd_search(search_opt); });

    FuseOptions fuse_opt;
    auto* fuse_cmd = app.add_subcommand("fuse", "Reciprocal rank fusion / fusion pipelines");
    fuse_cmd->add_option("--runs", fuse_opt.run_paths, "Input TREC runs")
        ->required()
        ->expected(-1);
    fuse_cmd->add_option("--output", fuse_opt.output, "Fused run output path")->required();
    fuse_cmd->add_option("--strategy", fuse_opt.strategy, "rrf, early or late (default rrf)")
        ->check(CLI::IsMember({"rrf", "early", "late"}));
    fuse_cmd->add_option("--k-rrf", fuse_opt.params.k_rrf, "RRF constant (default 60)");
    fuse_cmd->add_option("--input-depth", fuse_opt.params.input_depth,
                         "Entries considered per input run (default 1000)");
    fuse_cmd->add_option("--output-depth", fuse_opt.params.output_depth,
                         "Entries kept per topic (default 1000)");
    fuse_cmd->add_option("--scores", fuse_opt.scores_path, "Score TSV for early/late reranking");
    fuse_cmd->add_option("--rerank-depth", fuse_opt.rerank_depth,
                         "Rerank depth for early/late (default 1000)");
    fuse_cmd->add_option("--tag", fuse_opt.tag, "Run tag for the fused output");
    fuse_cmd->callback([&]() { cmd_fuse(fuse_opt); });

    RerankOptions rerank_opt;
    auto* rerank_cmd = app.add_subcommand("rerank", "Apply an external score oracle to a run");
    rerank_cmd->add_option("--run", rerank_opt.run_path, "First-stage TREC run")->required();
    rerank_cmd->add_option("--output", rerank_opt.output, "Reranked run output path");
    rerank_cmd->add_option("--scores", rerank_opt.scores_path,
                           "Score TSV 'topic_id doc_id score'");
    rerank_cmd->add_option("--emit-pairs", rerank_opt.emit_pairs_path,
                           "Emit 'topic_id doc_id doc_text' TSV for an external scorer");
    rerank_cmd->add_option("--corpus", rerank_opt.corpus_path,
                           "Corpus JSONL (for --emit-pairs / --overlap)");
    rerank_cmd->add_option("--topics", rerank_opt.topics_path, "Topics JSONL (for --overlap)");
    rerank_cmd->add_flag("--overlap", rerank_opt.overlap,
                         "Use the bundled lexical-overlap reference scorer");
    rerank_cmd->add_option("--fields", rerank_opt.fields, "Query fields for --overlap")
        ->check(CLI::IsMember({"title", "description", "both"}));
    rerank_cmd->add_option("--variant", rerank_opt.variant, "Topic variant for --overlap")
        ->check(CLI::IsMember({"original", "human", "machine"}));
    rerank_opt.analyzer.attach(rerank_cmd);
    rerank_cmd->add_option("--depth", rerank_opt.depth, "Rerank depth (default 1000)");
    rerank_cmd->add_option("--tag", rerank_opt.tag, "Run tag (default: input tag + .rerank)");
    rerank_cmd->callback([&]() { cmd_rerank(rerank_opt); });

    EvalOptions eval_opt;
    auto* eval_cmd = app.add_subcommand("eval", "Score a run against qrels");
    eval_cmd->add_option("--run", eval_opt.run_path, "TREC run")->required();
    eval_cmd->add_option("--qrels", eval_opt.qrels_path, "TREC qrels")->required();
    eval_cmd->add_option("--ndcg-k", eval_opt.params.ndcg_k, "nDCG cutoff (default 20)");
    eval_cmd->add_option("--recall-k", eval_opt.params.recall_k, "Recall cutoff (default 1000)");
    eval_cmd->add_option("--gain", eval_opt.gain, "nDCG gain: linear (grade) or exp (2^grade-1)")
        ->check(CLI::IsMember({"linear", "exp"}));
    eval_cmd->add_option("--output", eval_opt.output, "Report TSV (default: stdout)");
    eval_cmd->callback([&]() { cmd_eval(eval_opt); });

    SignificanceOptions sig_opt;
    auto* sig_cmd = app.add_subcommand("significance",
                                       "Pairwise paired t-tests with Bonferroni correction");
    sig_cmd->add_option("--runs", sig_opt.run_paths, "Two or more TREC runs")
        ->required()
        ->expected(-1);
    sig_cmd->add_option("--qrels", sig_opt.qrels_path, "TREC qrels")->required();
    sig_cmd->add_option("--metric", sig_opt.metric, "ndcg, recall or map (default ndcg)")
        ->check(CLI::IsMember({"ndcg", "recall", "map"}));
    sig_cmd->add_option("--ndcg-k", sig_opt.params.ndcg_k, "nDCG cutoff (default 20)");
    sig_cmd->add_option("--recall-k", sig_opt.params.recall_k, "Recall cutoff (default 1000)");
    sig_cmd->add_option("--output", sig_opt.output, "Report TSV (default: stdout)");
    sig_cmd->callback([&]() { cmd_significance(sig_opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace clir::cli
