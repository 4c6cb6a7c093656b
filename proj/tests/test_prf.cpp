#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "clir/prf.hpp"

using namespace clir;

namespace {

AnalyzerConfig plain_config() {
    auto config = AnalyzerConfig::defaults_for(Language::English);
    config.stemmer = Stemmer::None;
    return config;
}

/// Impact corpus where the relevant document shares a term only with the
/// top-ranked block: feedback docs carry both "q" and "s", the relevant doc
/// carries "s" but almost no "q", and the fillers carry only "q".
std::vector<std::pair<std::string, SparseVector>> recall_fixture(std::size_t fillers) {
    std::vector<std::pair<std::string, SparseVector>> vectors;
    for (int i = 0; i < 10; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "top%02d", i);
        vectors.emplace_back(id, SparseVector{{"q", 100.0}, {"s", 100.0}});
    }
    for (std::size_t i = 0; i < fillers; ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "fill%04zu", i);
        vectors.emplace_back(id, SparseVector{{"q", 2.0}});
    }
    vectors.emplace_back("relevant", SparseVector{{"q", 1.0}, {"s", 100.0}});
    return vectors;
}

std::size_t rank_of(const RankedList& list, const std::string& doc_id) {
    for (std::size_t i = 0; i < list.entries.size(); ++i)
        if (list.entries[i].doc_id == doc_id) return i + 1;
    return 0;  // not retrieved
}

}  // namespace

TEST_CASE("rocchio_sparse blends the query with the feedback centroid") {
    SECTION("beta = 0 returns the query exactly") {
        const SparseVector query{{"a", 1.0}, {"b", 2.5}};
        RocchioParams params;
        params.alpha = 1.0;
        params.beta = 0.0;
        const auto result = rocchio_sparse(query, {SparseVector{{"c", 9.0}}}, params);
        CHECK(result == query);
    }

    SECTION("empty feedback returns the query unchanged") {
        const SparseVector query{{"a", 1.0}};
        CHECK(rocchio_sparse(query, {}, RocchioParams{}) == query);
    }

    SECTION("hand-evaluated blend") {
        RocchioParams params;
        params.alpha = 1.0;
        params.beta = 0.5;
        const auto result = rocchio_sparse(SparseVector{{"a", 1.0}},
                                           {SparseVector{{"b", 2.0}}, SparseVector{{"b", 4.0}}},
                                           params);
        REQUIRE(result.size() == 2);
        CHECK(result.at("a") == Catch::Approx(1.0));
        CHECK(result.at("b") == Catch::Approx(1.5));
    }

    SECTION("original terms survive top_terms truncation") {
        RocchioParams params;
        params.alpha = 1.0;
        params.beta = 0.5;
        params.top_terms = 1;
        const auto result = rocchio_sparse(SparseVector{{"a", 1.0}},
                                           {SparseVector{{"b", 2.0}}, SparseVector{{"b", 4.0}}},
                                           params);
        REQUIRE(result.size() == 2);
        CHECK(result.at("a") == Catch::Approx(1.0));
        CHECK(result.at("b") == Catch::Approx(1.5));
    }

    SECTION("expansion terms beyond top_terms are dropped") {
        RocchioParams params;
        params.top_terms = 2;
        params.alpha = 1.0;
        params.beta = 1.0;
        const auto result = rocchio_sparse(
            SparseVector{{"a", 5.0}},
            {SparseVector{{"x", 3.0}, {"y", 2.0}, {"z", 1.0}}}, params);
        // kept: top-2 by weight (a:5, x:3) plus the original term a
        REQUIRE(result.size() == 2);
        CHECK(result.count("a") == 1);
        CHECK(result.count("x") == 1);
        CHECK(result.count("z") == 0);
    }

    SECTION("results never contain negative or zero weights") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> w(0.0, 5.0);
        for (int trial = 0; trial < 30; ++trial) {
            SparseVector query;
            for (int t = 0; t < 4; ++t) query["q" + std::to_string(rng() % 6)] = w(rng);
            std::vector<SparseVector> docs(1 + rng() % 4);
            for (auto& doc : docs)
                for (int t = 0; t < 5; ++t) doc["d" + std::to_string(rng() % 8)] = w(rng);
            RocchioParams params;
            params.alpha = w(rng);
            params.beta = w(rng);
            params.top_terms = 1 + rng() % 6;
            const auto result = rocchio_sparse(query, docs, params);
            CHECK(result.size() <= params.top_terms + query.size());
            for (const auto& [term, weight] : result) CHECK(weight > 0.0);
        }
    }
}

TEST_CASE("rocchio_dense blends componentwise") {
    RocchioParams params;

    SECTION("beta = 0 returns the query") {
        params.beta = 0.0;
        const DenseVector query{0.5f, -1.0f};
        CHECK(rocchio_dense(query, {DenseVector{3.0f, 3.0f}}, params) == query);
    }

    SECTION("hand-evaluated blend") {
        params.alpha = 1.0;
        params.beta = 0.5;
        const auto result = rocchio_dense(DenseVector{0, 0}, {DenseVector{2, 4}}, params);
        CHECK(result == DenseVector{1.0f, 2.0f});
    }

    SECTION("pure centroid") {
        params.alpha = 0.0;
        params.beta = 1.0;
        const auto result =
            rocchio_dense(DenseVector{9, 9}, {DenseVector{1, 0}, DenseVector{0, 1}}, params);
        CHECK(result == DenseVector{0.5f, 0.5f});
    }

    SECTION("dimension mismatch is rejected") {
        CHECK_THROWS_AS(rocchio_dense(DenseVector{1, 2}, {DenseVector{1, 2, 3}}, params), Error);
    }

    SECTION("linearity in the query") {
        params.alpha = 0.75;
        params.beta = 0.5;
        std::mt19937 rng(9);
        std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
        DenseVector query(6);
        for (auto& x : query) x = dist(rng);
        std::vector<DenseVector> docs(3, DenseVector(6));
        for (auto& doc : docs)
            for (auto& x : doc) x = dist(rng);

        DenseVector scaled(query);
        for (auto& x : scaled) x *= 2.0f;
        const auto lhs = rocchio_dense(scaled, docs, params);
        const auto base = rocchio_dense(query, docs, params);
        // c*alpha*q + beta*centroid, componentwise
        for (std::size_t j = 0; j < lhs.size(); ++j) {
            const double centroid_part =
                static_cast<double>(base[j]) - params.alpha * static_cast<double>(query[j]);
            const double expected =
                2.0 * params.alpha * static_cast<double>(query[j]) + centroid_part;
            CHECK(static_cast<double>(lhs[j]) == Catch::Approx(expected).margin(1e-6));
        }
    }
}

TEST_CASE("prf_search degenerates to plain search when beta = 0") {
    RocchioParams degenerate;
    degenerate.alpha = 1.0;
    degenerate.beta = 0.0;
    degenerate.depth = 5;

    SECTION("impact engine") {
        const auto index = index_impact(recall_fixture(50), 1);
        const SparseVector query{{"q", 10.0}};
        const auto plain = index.search_impact(query, 30);
        const auto prf = prf_search_impact(index, query, 30, degenerate);
        REQUIRE(prf.entries.size() == plain.entries.size());
        for (std::size_t i = 0; i < plain.entries.size(); ++i) {
            CHECK(prf.entries[i].doc_id == plain.entries[i].doc_id);
            CHECK(prf.entries[i].score == plain.entries[i].score);
        }
    }

    SECTION("bm25 engine") {
        const std::vector<Document> docs = {{"d0", "", "apple banana apple"},
                                            {"d1", "", "banana cherry"},
                                            {"d2", "", "apple cherry date"},
                                            {"d3", "", "date egg fig"}};
        const auto index = index_text(docs, plain_config());
        const std::vector<std::string> query = {"apple", "cherry"};
        const auto plain = index.search_bm25(query, 4);
        const auto prf = prf_search_bm25(index, query, 4, degenerate);
        REQUIRE(prf.entries.size() == plain.entries.size());
        for (std::size_t i = 0; i < plain.entries.size(); ++i) {
            CHECK(prf.entries[i].doc_id == plain.entries[i].doc_id);
            CHECK(prf.entries[i].score == plain.entries[i].score);
        }
    }

    SECTION("dense engine") {
        const auto index = build_flat({{"a", {1, 0, 0}}, {"b", {0, 1, 0}}, {"c", {1, 1, 0}}});
        const DenseVector query{0.3f, 0.7f, 0.1f};
        const auto plain = index.search(query, 3);
        const auto prf = prf_search_dense(index, query, 3, degenerate);
        REQUIRE(prf.entries.size() == plain.entries.size());
        for (std::size_t i = 0; i < plain.entries.size(); ++i) {
            CHECK(prf.entries[i].doc_id == plain.entries[i].doc_id);
            CHECK(prf.entries[i].score == plain.entries[i].score);
        }
    }
}

TEST_CASE("prf_search with an empty first pass returns the empty result") {
    const auto index = index_impact(recall_fixture(10), 1);
    RocchioParams params;
    CHECK(prf_search_impact(index, SparseVector{{"nowhere", 5.0}}, 10, params).entries.empty());
}

TEST_CASE("PRF pulls up a relevant document ranked 900") {
    // 10 top docs + 889 fillers + the relevant doc = 900 candidates for "q";
    // the relevant doc shares "s" with the top block only.
    const auto index = index_impact(recall_fixture(889), 1);
    const SparseVector query{{"q", 10.0}};

    const auto before = index.search_impact(query, 1000);
    REQUIRE(rank_of(before, "relevant") == 900);

    RocchioParams params;
    params.depth = 10;
    params.alpha = 1.0;
    params.beta = 0.5;
    const auto after = prf_search_impact(index, query, 1000, params);
    const auto new_rank = rank_of(after, "relevant");
    REQUIRE(new_rank != 0);
    CHECK(new_rank < 900);  // strictly improves
    CHECK(new_rank == 11);  // right behind the feedback block
}
