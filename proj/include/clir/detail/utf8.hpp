#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace clir::detail {

/// Decodes UTF-8 into codepoints. Malformed bytes decode to U+FFFD so that
/// downstream tokenizers treat them as separators.
inline std::vector<char32_t> utf8_decode(std::string_view text) {
    std::vector<char32_t> out;
    out.reserve(text.size());
    std::size_t i = 0;
    const auto n = text.size();
    while (i < n) {
        const auto b0 = static_cast<unsigned char>(text[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            if (i + 1 < n && (static_cast<unsigned char>(text[i + 1]) & 0xC0) == 0x80) {
                cp = (char32_t(b0 & 0x1F) << 6) | (static_cast<unsigned char>(text[i + 1]) & 0x3F);
                if (cp < 0x80) cp = 0xFFFD;  // overlong
            } else {
                len = 1;
            }
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            if (i + 2 < n && (static_cast<unsigned char>(text[i + 1]) & 0xC0) == 0x80 &&
                (static_cast<unsigned char>(text[i + 2]) & 0xC0) == 0x80) {
                cp = (char32_t(b0 & 0x0F) << 12) |
                     (char32_t(static_cast<unsigned char>(text[i + 1]) & 0x3F) << 6) |
                     (static_cast<unsigned char>(text[i + 2]) & 0x3F);
                if (cp < 0x800) cp = 0xFFFD;
            } else {
                len = 1;
            }
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            if (i + 3 < n && (static_cast<unsigned char>(text[i + 1]) & 0xC0) == 0x80 &&
                (static_cast<unsigned char>(text[i + 2]) & 0xC0) == 0x80 &&
                (static_cast<unsigned char>(text[i + 3]) & 0xC0) == 0x80) {
                cp = (char32_t(b0 & 0x07) << 18) |
                     (char32_t(static_cast<unsigned char>(text[i + 1]) & 0x3F) << 12) |
                     (char32_t(static_cast<unsigned char>(text[i + 2]) & 0x3F) << 6) |
                     (static_cast<unsigned char>(text[i + 3]) & 0x3F);
                if (cp < 0x10000 || cp > 0x10FFFF) cp = 0xFFFD;
            } else {
                len = 1;
            }
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string utf8_encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) utf8_append(out, cp);
    return out;
}

inline bool is_ascii_alnum(char32_t cp) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

/// Word characters for the split-based tokenizers: ASCII alphanumerics plus
/// any non-ASCII codepoint except U+FFFD. Covers Latin, Cyrillic and
/// Arabic-script text without full Unicode category tables.
inline bool is_word_char(char32_t cp) {
    if (cp < 0x80) return is_ascii_alnum(cp);
    return cp != 0xFFFD;
}

/// ASCII + Cyrillic lowercasing; other codepoints pass through.
inline char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0x0410 && cp <= 0x042F) return cp + 0x20;       // А..Я
    if (cp >= 0x0400 && cp <= 0x040F) return cp + 0x50;       // Ѐ..Џ (incl. Ё)
    return cp;
}

/// Punctuation / whitespace stripped by the CJK analyzer: ASCII
/// non-alphanumerics, general punctuation, CJK symbols and fullwidth forms.
inline bool is_cjk_separator(char32_t cp) {
    if (cp < 0x80) return !is_ascii_alnum(cp);
    if (cp == 0xFFFD) return true;
    if (cp >= 0x2000 && cp <= 0x206F) return true;   // general punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return true;   // CJK symbols and punctuation
    if (cp >= 0xFF00 && cp <= 0xFF0F) return true;   // fullwidth ! .. /
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;   // fullwidth : .. @
    if (cp >= 0xFF3B && cp <= 0xFF40) return true;   // fullwidth [ .. `
    if (cp >= 0xFF5B && cp <= 0xFF65) return true;   // fullwidth { .. halfwidth .
    return false;
}

}  // namespace clir::detail
