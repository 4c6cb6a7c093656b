#pragma once

#include <string_view>
#include <vector>

namespace clir::detail {

/// Light suffix-stripping stemmer for lowercased Russian tokens, in the
/// spirit of the light stemmers used for morphologically rich languages:
/// fold ё to е, strip the longest matching inflectional ending that leaves a
/// stem of at least three codepoints, then trim a trailing soft sign and
/// collapse a final double н. One pass, no dictionaries.
inline void russian_light_stem(std::vector<char32_t>& w) {
    for (auto& cp : w)
        if (cp == U'ё') cp = U'е';
    if (w.size() <= 3) return;

    static const std::u32string_view kSuffixes[] = {
        // case/number endings of nouns, adjectives and participles
        U"иями", U"оями",
        U"иях",  U"оях",  U"иям", U"оям", U"ями", U"ами", U"его", U"ого",
        U"ему",  U"ому",  U"ыми", U"ими", U"оев", U"еев",
        U"ая", U"яя", U"ую", U"юю", U"ее", U"ие", U"ые", U"ое", U"ей", U"ий",
        U"ый", U"ой", U"ем", U"им", U"ым", U"ом", U"их", U"ых", U"ах", U"ях",
        U"ов", U"ев", U"ам", U"ям", U"ью", U"ия", U"ья", U"еи", U"ии",
        U"а", U"я", U"о", U"е", U"у", U"ю", U"ы", U"и", U"й", U"ь",
    };
    for (const auto& suffix : kSuffixes) {
        if (w.size() < suffix.size() + 3) continue;
        if (std::u32string_view(w.data() + w.size() - suffix.size(), suffix.size()) == suffix) {
            w.resize(w.size() - suffix.size());
            break;
        }
    }
    if (w.size() > 3 && w.back() == U'ь') w.pop_back();
    if (w.size() > 3 && w[w.size() - 1] == U'н' && w[w.size() - 2] == U'н') w.pop_back();
}

}  // namespace clir::detail
