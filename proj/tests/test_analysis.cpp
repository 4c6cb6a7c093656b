#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "clir/analysis.hpp"
#include "test_util.hpp"

using namespace clir;

namespace {

std::string join(const std::vector<std::string>& tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace

TEST_CASE("english analyzer splits, lowercases and stems") {
    const auto config = AnalyzerConfig::defaults_for(Language::English);

    CHECK(analyze("Cars running", config) == std::vector<std::string>{"car", "run"});
    CHECK(analyze("", config).empty());
    CHECK(analyze("   \t\n ", config).empty());
    CHECK(analyze("state-of-the-art", config) ==
          std::vector<std::string>{"state", "of", "the", "art"});
}

TEST_CASE("porter stemmer matches the classic behaviour") {
    const auto stem = [](const std::string& w) { return detail::PorterStemmer::stem(w); };

    CHECK(stem("caresses") == "caress");
    CHECK(stem("ponies") == "poni");
    CHECK(stem("cats") == "cat");
    CHECK(stem("feed") == "feed");
    CHECK(stem("agreed") == "agre");
    CHECK(stem("plastered") == "plaster");
    CHECK(stem("motoring") == "motor");
    CHECK(stem("sing") == "sing");
    CHECK(stem("sized") == "size");
    CHECK(stem("hopping") == "hop");
    CHECK(stem("troubled") == "troubl");
    CHECK(stem("filing") == "file");
    CHECK(stem("happy") == "happi");
    CHECK(stem("sky") == "sky");
    CHECK(stem("relational") == "relat");
    CHECK(stem("conflated") == "conflat");
    CHECK(stem("generalizations") == "gener");
    CHECK(stem("oscillators") == "oscil");
    // short and non-alpha tokens pass through
    CHECK(stem("as") == "as");
    CHECK(stem("2023") == "2023");
}

TEST_CASE("english stopwords are removed before stemming") {
    auto config = AnalyzerConfig::defaults_for(Language::English);
    config.stopwords = {"the", "is"};
    CHECK(analyze("The car is running", config) == std::vector<std::string>{"car", "run"});
}

TEST_CASE("russian analyzer lowercases and strips suffixes") {
    const auto config = AnalyzerConfig::defaults_for(Language::Russian);

    CHECK(analyze("Книгами", config) == std::vector<std::string>{"книг"});
    CHECK(analyze("красивый", config) == std::vector<std::string>{"красив"});
    CHECK(analyze("иностранный", config) == std::vector<std::string>{"иностран"});
    // ё folds to е
    CHECK(analyze("Ёлка", config) == std::vector<std::string>{"елк"});
    // stopwords apply to the stemmed form
    auto with_stop = config;
    with_stop.stopwords = {"книг"};
    CHECK(analyze("книгами остаются", with_stop) == std::vector<std::string>{"остаютс"});
}

TEST_CASE("persian analyzer folds characters and strips diacritics") {
    const auto config = AnalyzerConfig::defaults_for(Language::Persian);

    // Arabic Yeh (U+064A) folds to Farsi Yeh (U+06CC)
    CHECK(analyze("علي", config) == analyze("علی", config));
    // Arabic Kaf (U+0643) folds to Keheh (U+06A9)
    CHECK(analyze("كتاب", config) ==
          analyze("کتاب", config));
    // fatha/kasra diacritics are stripped
    CHECK(analyze("مَرد", config) == analyze("مرد", config));
    // disabled normalization keeps the raw forms distinct
    auto raw = config;
    raw.fa_normalization = false;
    CHECK(analyze("علي", raw) != analyze("علی", raw));
}

TEST_CASE("chinese analyzer emits unigrams then bigrams") {
    const auto config = AnalyzerConfig::defaults_for(Language::Chinese);

    CHECK(analyze("你好", config) == std::vector<std::string>{"你", "好", "你好"});
    CHECK(analyze("", config).empty());
    // punctuation splits nothing: characters left after stripping still pair up
    CHECK(analyze("你，好", config) == std::vector<std::string>{"你", "好", "你好"});
    CHECK(analyze("你", config) == std::vector<std::string>{"你"});
}

TEST_CASE("chinese token count is 2n-1 for punctuation-free text") {
    const std::vector<std::string> chars = {"你", "好", "世", "界", "搜", "索", "引", "擎"};
    std::mt19937 rng(13);
    const auto config = AnalyzerConfig::defaults_for(Language::Chinese);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        std::string text;
        for (std::size_t i = 0; i < n; ++i) text += chars[rng() % chars.size()];
        CHECK(analyze(text, config).size() == 2 * n - 1);
    }
}

TEST_CASE("zh config rejects stemmers") {
    auto config = AnalyzerConfig::defaults_for(Language::Chinese);
    config.stemmer = Stemmer::EnglishPorter;
    CHECK_THROWS_AS(analyze("你好", config), Error);
}

TEST_CASE("analysis is idempotent with stemming disabled") {
    auto config = AnalyzerConfig::defaults_for(Language::English);
    config.stemmer = Stemmer::None;

    std::mt19937 rng(17);
    const std::string alphabet = "abcdefghij KLMNOP.,;-42";
    for (int trial = 0; trial < 60; ++trial) {
        std::string text;
        const std::size_t len = rng() % 40;
        for (std::size_t i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
        const auto once = analyze(text, config);
        CHECK(analyze(join(once), config) == once);
    }
}

TEST_CASE("analyze is pure") {
    const auto config = AnalyzerConfig::defaults_for(Language::English);
    const std::string text = "Determinism matters for reproducible experiments";
    CHECK(analyze(text, config) == analyze(text, config));
}

TEST_CASE("stopword files load one token per line") {
    testutil::TempDir dir;
    testutil::write_file(dir.file("stop.txt"), "# comment\nthe\n\nand\n");
    const auto words = load_stopwords(dir.file("stop.txt"));
    CHECK(words.size() == 2);
    CHECK(words.count("the") == 1);
    CHECK(words.count("and") == 1);
}
