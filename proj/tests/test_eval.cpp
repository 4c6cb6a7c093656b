#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "clir/eval.hpp"

using namespace clir;

namespace {

Run single_topic_run(const std::vector<std::string>& docs, const std::string& topic = "1") {
    std::vector<ScoredDoc> entries;
    for (std::size_t i = 0; i < docs.size(); ++i)
        entries.push_back({docs[i], 100.0 - static_cast<double>(i)});
    Run out("eval");
    out.add_topic(topic, std::move(entries));
    return out;
}

/// Brute-force evaluator written independently of eval.hpp: natural logs,
/// explicit sorting, no shared helpers.
struct BruteForce {
    static double dcg(const std::vector<int>& gains) {
        double total = 0.0;
        for (std::size_t i = 0; i < gains.size(); ++i)
            total += gains[i] * std::log(2.0) / std::log(static_cast<double>(i) + 2.0);
        return total;
    }

    static double ndcg(const Run& run, const Qrels& qrels, const std::string& topic,
                       std::size_t k) {
        std::vector<int> gains;
        const auto& entries = run.entries(topic);
        for (std::size_t i = 0; i < entries.size() && i < k; ++i)
            gains.push_back(qrels.grade(topic, entries[i].doc_id));
        std::vector<int> ideal;
        for (const auto& [doc, grade] : qrels.judgments().at(topic)) ideal.push_back(grade);
        std::sort(ideal.begin(), ideal.end(), std::greater<>());
        if (ideal.size() > k) ideal.resize(k);
        const double best = dcg(ideal);
        return best > 0 ? dcg(gains) / best : 0.0;
    }

    static double recall(const Run& run, const Qrels& qrels, const std::string& topic,
                         std::size_t k) {
        std::size_t total = 0;
        for (const auto& [doc, grade] : qrels.judgments().at(topic))
            if (grade > 0) ++total;
        if (total == 0) return 0.0;
        std::size_t found = 0;
        const auto& entries = run.entries(topic);
        for (std::size_t i = 0; i < entries.size() && i < k; ++i)
            if (qrels.grade(topic, entries[i].doc_id) > 0) ++found;
        return static_cast<double>(found) / static_cast<double>(total);
    }

    static double ap(const Run& run, const Qrels& qrels, const std::string& topic) {
        std::size_t total = 0;
        for (const auto& [doc, grade] : qrels.judgments().at(topic))
            if (grade > 0) ++total;
        if (total == 0) return 0.0;
        const auto& entries = run.entries(topic);
        double sum = 0.0;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (qrels.grade(topic, entries[i].doc_id) > 0) {
                ++hits;
                sum += static_cast<double>(hits) / (static_cast<double>(i) + 1.0);
            }
        }
        return sum / static_cast<double>(total);
    }
};

}  // namespace

TEST_CASE("ndcg_at_k follows the graded-gain formula") {
    SECTION("ideal ordering scores exactly 1") {
        Qrels qrels;
        qrels.add("1", "d1", 3);
        qrels.add("1", "d2", 1);
        const Run run = single_topic_run({"d1", "d2"});
        CHECK(ndcg_at_k(run, qrels, 20).at("1") == 1.0);
    }

    SECTION("all retrieved docs unjudged scores 0") {
        Qrels qrels;
        qrels.add("1", "relevant", 2);
        const Run run = single_topic_run({"x", "y", "z"});
        CHECK(ndcg_at_k(run, qrels, 20).at("1") == 0.0);
    }

    SECTION("hand-evaluated swap case") {
        // DCG = 1/log2(2) + 3/log2(3), IDCG = 3 + 1/log2(3)
        Qrels qrels;
        qrels.add("1", "d1", 3);
        qrels.add("1", "d2", 1);
        const Run run = single_topic_run({"d2", "d1"});
        CHECK(ndcg_at_k(run, qrels, 2).at("1") ==
              Catch::Approx(0.7967075809905066).epsilon(1e-12));
    }

    SECTION("exponential gain is switchable") {
        // gains become 2^grade - 1: DCG = 1 + 7/log2(3), IDCG = 7 + 1/log2(3)
        Qrels qrels;
        qrels.add("1", "d1", 3);
        qrels.add("1", "d2", 1);
        const Run run = single_topic_run({"d2", "d1"});
        CHECK(ndcg_at_k(run, qrels, 2, GainFunction::Exponential).at("1") ==
              Catch::Approx(0.7098097413968655).epsilon(1e-12));
    }

    SECTION("a topic missing from the run scores 0") {
        Qrels qrels;
        qrels.add("1", "d1", 1);
        qrels.add("2", "d2", 1);
        const Run run = single_topic_run({"d1"}, "1");
        const auto scores = ndcg_at_k(run, qrels, 20);
        CHECK(scores.at("1") == 1.0);
        CHECK(scores.at("2") == 0.0);
    }
}

TEST_CASE("recall_at_k counts relevant docs in the cutoff") {
    Qrels qrels;
    qrels.add("1", "r1", 2);
    qrels.add("1", "r2", 1);
    qrels.add("1", "r3", 3);
    qrels.add("1", "r4", 1);
    qrels.add("1", "junk", 0);  // judged non-relevant

    SECTION("all relevant retrieved") {
        const Run run = single_topic_run({"r1", "r2", "r3", "r4"});
        CHECK(recall_at_k(run, qrels, 10).at("1") == 1.0);
    }

    SECTION("none retrieved") {
        const Run run = single_topic_run({"x", "y"});
        CHECK(recall_at_k(run, qrels, 10).at("1") == 0.0);
    }

    SECTION("2 of 4 relevant in the cutoff") {
        const Run run = single_topic_run({"r1", "x", "r2", "r3"});
        CHECK(recall_at_k(run, qrels, 3).at("1") == 0.5);
    }
}

TEST_CASE("average precision over the full run depth") {
    Qrels qrels;
    qrels.add("1", "rel", 1);

    SECTION("single relevant doc at rank 1") {
        CHECK(average_precision(single_topic_run({"rel", "x"}), qrels).at("1") == 1.0);
    }

    SECTION("single relevant doc at rank 2") {
        CHECK(average_precision(single_topic_run({"x", "rel"}), qrels).at("1") == 0.5);
    }

    SECTION("relevant docs at ranks 1 and 3 with R = 2") {
        Qrels two;
        two.add("1", "a", 1);
        two.add("1", "b", 2);
        const Run run = single_topic_run({"a", "x", "b"});
        CHECK(average_precision(run, two).at("1") ==
              Catch::Approx((1.0 + 2.0 / 3.0) / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("metrics match the brute-force evaluator on random fixtures") {
    std::mt19937 rng(71);
    for (int trial = 0; trial < 40; ++trial) {
        Qrels qrels;
        const std::string topic = "t" + std::to_string(trial);
        const std::size_t judged = 5 + rng() % 20;
        for (std::size_t d = 0; d < judged; ++d)
            qrels.add(topic, "doc" + std::to_string(d), static_cast<int>(rng() % 4));

        std::vector<std::string> retrieved;
        const std::size_t depth = 1 + rng() % 40;
        for (std::size_t i = 0; i < depth; ++i) retrieved.push_back("doc" + std::to_string(rng() % 40));
        std::sort(retrieved.begin(), retrieved.end());
        retrieved.erase(std::unique(retrieved.begin(), retrieved.end()), retrieved.end());
        std::shuffle(retrieved.begin(), retrieved.end(), rng);
        const Run run = single_topic_run(retrieved, topic);

        const std::size_t k = 1 + rng() % 15;
        CHECK(ndcg_at_k(run, qrels, k).at(topic) ==
              Catch::Approx(BruteForce::ndcg(run, qrels, topic, k)).margin(1e-9));
        CHECK(recall_at_k(run, qrels, k).at(topic) ==
              Catch::Approx(BruteForce::recall(run, qrels, topic, k)).margin(1e-9));
        CHECK(average_precision(run, qrels).at(topic) ==
              Catch::Approx(BruteForce::ap(run, qrels, topic)).margin(1e-9));

        // range and monotonicity properties
        const double r_small = recall_at_k(run, qrels, k).at(topic);
        const double r_large = recall_at_k(run, qrels, k + 10).at(topic);
        CHECK(r_small <= r_large);
        const double n = ndcg_at_k(run, qrels, k).at(topic);
        CHECK(n >= 0.0);
        CHECK(n <= 1.0);
    }
}

TEST_CASE("evaluate aggregates means over judged topics only") {
    Qrels qrels;
    qrels.add("1", "d1", 1);
    qrels.add("2", "d2", 1);
    Run run("r");
    run.add_topic("1", {{"d1", 1.0}});
    run.add_topic("99", {{"d1", 1.0}});  // unjudged topic, ignored

    const auto report = evaluate(run, qrels);
    CHECK(report.topics.size() == 2);
    CHECK(report.topics.count("99") == 0);
    CHECK(report.mean.ndcg == Catch::Approx(0.5));  // topic 1 scores 1, topic 2 scores 0

    std::ostringstream out;
    write_eval_report(report, out);
    CHECK(out.str().find("ndcg@20\tall\t0.5000") != std::string::npos);
    CHECK(out.str().find("map\t1\t1.0000") != std::string::npos);
}

TEST_CASE("paired t-test") {
    SECTION("identical inputs give p = 1 by convention") {
        const std::vector<double> a = {0.2, 0.4, 0.6};
        const auto result = paired_t_test(a, a);
        CHECK(result.t == 0.0);
        CHECK(result.p == 1.0);
    }

    SECTION("antisymmetry") {
        const std::vector<double> a = {0.1, 0.5, 0.4, 0.8};
        const std::vector<double> b = {0.2, 0.3, 0.6, 0.7};
        const auto ab = paired_t_test(a, b);
        const auto ba = paired_t_test(b, a);
        CHECK(ab.t == Catch::Approx(-ba.t).epsilon(1e-12));
        CHECK(ab.p == Catch::Approx(ba.p).epsilon(1e-12));
    }

    SECTION("matches the reference statistics oracle on a 45-sample fixture") {
        const std::vector<double> a = {
            0.7074, 0.1529, 0.6846, 0.6149, 0.8516, 0.685,  0.5631, 0.6811, 0.5653,
            0.8241, 0.1931, 0.7348, 0.8807, 0.7542, 0.2543, 0.913,  0.4662, 0.4222,
            0.1911, 0.611,  0.3072, 0.8821, 0.5948, 0.7413, 0.8683, 0.3077, 0.1937,
            0.2876, 0.8752, 0.8052, 0.6302, 0.4244, 0.3166, 0.8048, 0.1792, 0.6646,
            0.7264, 0.0877, 0.5706, 0.7532, 0.4003, 0.6438, 0.6565, 0.9483, 0.2521};
        const std::vector<double> b = {
            0.6811, 0.0887, 0.6394, 0.7071, 0.987,  0.5404, 0.6478, 0.6278, 0.6195,
            0.817,  0.1817, 0.7358, 0.9876, 0.6785, 0.3342, 0.9479, 0.6408, 0.3848,
            0.092,  0.5751, 0.4544, 1.0,    0.6038, 0.704,  0.85,   0.2598, 0.1749,
            0.3706, 0.8408, 0.9228, 0.6287, 0.4927, 0.3957, 0.9532, 0.2606, 0.7218,
            0.6715, 0.0966, 0.5219, 0.7777, 0.3942, 0.6085, 0.7279, 0.829,  0.3541};
        REQUIRE(a.size() == 45);
        const auto result = paired_t_test(a, b);
        CHECK(result.t == Catch::Approx(-1.6586894519187556).margin(1e-6));
        CHECK(result.p == Catch::Approx(0.10429132840652523).margin(1e-6));

        // strong-effect variant of the same fixture
        const std::vector<double> c = {
            0.7506, 0.231,  0.88,   0.7045, 0.9559, 0.8428, 0.6274, 0.7541, 0.6508,
            0.9324, 0.2343, 0.851,  0.9659, 0.7983, 0.4104, 1.0,    0.5274, 0.6411,
            0.2364, 0.7317, 0.3871, 0.9688, 0.7742, 0.8686, 0.9883, 0.4875, 0.2752,
            0.4234, 1.0,    0.8989, 0.678,  0.5909, 0.4635, 0.9551, 0.3067, 0.8071,
            0.8182, 0.1691, 0.6186, 0.8316, 0.4854, 0.7712, 0.758,  1.0,    0.343};
        const auto strong = paired_t_test(a, c);
        CHECK(strong.t == Catch::Approx(-16.01572546834264).margin(1e-6));
        CHECK(strong.p == Catch::Approx(5.672694390033087e-20).margin(1e-24));
    }

    SECTION("small-sample cross-check") {
        const std::vector<double> a = {0.1, 0.4, 0.35, 0.8, 0.25};
        const std::vector<double> b = {0.15, 0.5, 0.3, 0.9, 0.45};
        const auto result = paired_t_test(a, b);
        CHECK(result.t == Catch::Approx(-1.9694638556693234).margin(1e-9));
        CHECK(result.p == Catch::Approx(0.12024334063356451).margin(1e-9));
    }

    SECTION("per-topic maps must align") {
        std::map<std::string, double> a{{"1", 0.5}, {"2", 0.6}};
        std::map<std::string, double> b{{"1", 0.4}, {"3", 0.6}};
        CHECK_THROWS_AS(paired_t_test(a, b), Error);
        std::map<std::string, double> c{{"1", 0.4}};
        CHECK_THROWS_AS(paired_t_test(a, c), Error);
    }

    SECTION("fewer than two pairs is rejected") {
        CHECK_THROWS_AS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{2.0}), Error);
    }
}

TEST_CASE("bonferroni caps adjusted p-values at 1") {
    CHECK(bonferroni({0.01}, 5) == std::vector<double>{0.05});
    CHECK(bonferroni({0.5}, 3) == std::vector<double>{1.0});
    const auto adjusted = bonferroni({0.02, 0.04});  // m defaults to 2
    REQUIRE(adjusted.size() == 2);
    CHECK(adjusted[0] == Catch::Approx(0.04));
    CHECK(adjusted[1] == Catch::Approx(0.08));
}
