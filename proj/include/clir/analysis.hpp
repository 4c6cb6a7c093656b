#pragma once

#include <fstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clir/detail/porter.hpp"
#include "clir/detail/russian.hpp"
#include "clir/detail/utf8.hpp"
#include "clir/types.hpp"

namespace clir {

enum class Language { English, Persian, Russian, Chinese };
enum class Stemmer { None, EnglishPorter, RussianLight };

inline std::string language_code(Language lang) {
    switch (lang) {
        case Language::English: return "en";
        case Language::Persian: return "fa";
        case Language::Russian: return "ru";
        case Language::Chinese: return "zh";
    }
    return "en";
}

inline Language parse_language(std::string_view code) {
    if (code == "en") return Language::English;
    if (code == "fa") return Language::Persian;
    if (code == "ru") return Language::Russian;
    if (code == "zh") return Language::Chinese;
    throw Error("unknown language code: " + std::string(code));
}

inline std::string stemmer_name(Stemmer s) {
    switch (s) {
        case Stemmer::None: return "none";
        case Stemmer::EnglishPorter: return "english-porter";
        case Stemmer::RussianLight: return "russian-light";
    }
    return "none";
}

inline Stemmer parse_stemmer(std::string_view name) {
    if (name == "none") return Stemmer::None;
    if (name == "english-porter" || name == "porter") return Stemmer::EnglishPorter;
    if (name == "russian-light") return Stemmer::RussianLight;
    throw Error("unknown stemmer: " + std::string(name));
}

/// Per-language text analysis configuration.
///
/// Pipelines:
///   en: split on non-alphanumerics -> lowercase -> stopword removal -> stem
///   fa: unicode normalization (Yeh/Kaf folding, diacritic strip) -> split
///       -> lowercase -> stopword removal
///   ru: split -> lowercase -> stem -> stopword removal
///   zh: strip whitespace/punctuation -> every character unigram followed by
///       every adjacent character bigram (the stopword list does not apply;
///       a punctuation-free string of n chars always yields 2n-1 tokens)
struct AnalyzerConfig {
    Language language = Language::English;
    bool lowercase = true;
    std::unordered_set<std::string> stopwords;
    Stemmer stemmer = Stemmer::EnglishPorter;
    bool fa_normalization = true;  // fa only

    static AnalyzerConfig defaults_for(Language lang) {
        AnalyzerConfig cfg;
        cfg.language = lang;
        switch (lang) {
            case Language::English: cfg.stemmer = Stemmer::EnglishPorter; break;
            case Language::Russian: cfg.stemmer = Stemmer::RussianLight; break;
            case Language::Persian:
            case Language::Chinese: cfg.stemmer = Stemmer::None; break;
        }
        return cfg;
    }

    void validate() const {
        if (language == Language::Chinese && stemmer != Stemmer::None)
            throw Error("zh analyzer does not support stemming");
    }
};

/// Stopword file: one token per line, UTF-8. Blank lines and lines starting
/// with '#' are skipped.
inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open stopword file: " + path);
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        words.insert(line);
    }
    return words;
}

namespace detail {

inline std::string fa_normalize(std::string_view text) {
    auto cps = utf8_decode(text);
    std::vector<char32_t> out;
    out.reserve(cps.size());
    for (char32_t cp : cps) {
        if (cp == 0x064A) cp = 0x06CC;  // Arabic Yeh -> Farsi Yeh
        if (cp == 0x0643) cp = 0x06A9;  // Arabic Kaf -> Keheh
        if (cp >= 0x064B && cp <= 0x065F) continue;  // harakat and combining marks
        if (cp == 0x0670) continue;                  // superscript alef
        if (cp == 0x0640) continue;                  // tatweel
        out.push_back(cp);
    }
    return utf8_encode(out);
}

inline std::vector<std::vector<char32_t>> split_words(const std::vector<char32_t>& cps) {
    std::vector<std::vector<char32_t>> words;
    std::vector<char32_t> current;
    for (char32_t cp : cps) {
        if (is_word_char(cp)) {
            current.push_back(cp);
        } else if (!current.empty()) {
            words.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

inline std::vector<std::string> analyze_cjk(std::string_view text, const AnalyzerConfig& config) {
    auto cps = utf8_decode(text);
    std::vector<char32_t> chars;
    chars.reserve(cps.size());
    for (char32_t cp : cps) {
        if (is_cjk_separator(cp)) continue;
        chars.push_back(config.lowercase ? to_lower(cp) : cp);
    }
    std::vector<std::string> tokens;
    if (chars.empty()) return tokens;
    tokens.reserve(2 * chars.size() - 1);
    for (char32_t c : chars) {
        std::string t;
        utf8_append(t, c);
        tokens.push_back(std::move(t));
    }
    for (std::size_t i = 0; i + 1 < chars.size(); ++i) {
        std::string t;
        utf8_append(t, chars[i]);
        utf8_append(t, chars[i + 1]);
        tokens.push_back(std::move(t));
    }
    return tokens;
}

}  // namespace detail

/// Converts raw text into a token stream. Pure and deterministic; empty
/// input yields an empty list.
inline std::vector<std::string> analyze(std::string_view text, const AnalyzerConfig& config) {
    config.validate();
    if (config.language == Language::Chinese) return detail::analyze_cjk(text, config);

    std::string normalized;
    if (config.language == Language::Persian && config.fa_normalization) {
        normalized = detail::fa_normalize(text);
        text = normalized;
    }
    auto words = detail::split_words(detail::utf8_decode(text));

    std::vector<std::string> tokens;
    tokens.reserve(words.size());
    for (auto& word : words) {
        if (config.lowercase)
            for (auto& cp : word) cp = detail::to_lower(cp);

        if (config.language == Language::Russian && config.stemmer == Stemmer::RussianLight)
            detail::russian_light_stem(word);

        std::string token = detail::utf8_encode(word);

        // en removes stopwords before stemming, ru after.
        if (config.language != Language::Russian && config.stopwords.count(token) > 0) continue;
        if (config.language == Language::English && config.stemmer == Stemmer::EnglishPorter)
            token = detail::PorterStemmer::stem(std::move(token));
        if (config.language == Language::Russian && config.stopwords.count(token) > 0) continue;

        if (!token.empty()) tokens.push_back(std::move(token));
    }
    return tokens;
}

}  // namespace clir
