#include "promptclass/stemmer.hpp"

#include <algorithm>
#include <cstring>

#include "promptclass/text.hpp"

namespace promptclass {

namespace {

// State for one stemming pass: b[0..k] is the word, b[0..j] the stem left of
// a candidate suffix.
struct PorterState {
    std::string b;
    int k = 0;
    int j = 0;

    bool cons(int i) const {
        switch (b[static_cast<std::size_t>(i)]) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of consonant-vowel sequences in b[0..j]: [C](VC)^m[V].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_cons(int i) const {
        if (i < 1) return false;
        if (b[static_cast<std::size_t>(i)] != b[static_cast<std::size_t>(i - 1)]) return false;
        return cons(i);
    }

    // consonant-vowel-consonant ending at i, final consonant not w, x or y.
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        char ch = b[static_cast<std::size_t>(i)];
        return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        if (len > k + 1) return false;
        if (b.compare(static_cast<std::size_t>(k + 1 - len), static_cast<std::size_t>(len), s) != 0) return false;
        j = k - len;
        return true;
    }

    void set_to(const char* s) {
        int len = static_cast<int>(std::strlen(s));
        b.replace(static_cast<std::size_t>(j + 1), static_cast<std::size_t>(k - j), s);
        k = j + len;
    }

    void replace_if_m(const char* s) {
        if (m() > 0) set_to(s);
    }

    // Longest matching suffix from `rules` (pairs of suffix/replacement),
    // applied when the measure condition holds. At most one rule fires.
    void longest_rule(std::initializer_list<std::pair<const char*, const char*>> rules, int min_m) {
        const std::pair<const char*, const char*>* best = nullptr;
        std::size_t best_len = 0;
        int best_j = 0;
        for (const auto& rule : rules) {
            std::size_t len = std::strlen(rule.first);
            if (len <= best_len) continue;
            if (ends(rule.first)) {
                best = &rule;
                best_len = len;
                best_j = j;
            }
        }
        if (best == nullptr) return;
        j = best_j;
        if (m() > min_m - 1) set_to(best->second);
    }

    // Plurals and -ed / -ing.
    void step1ab() {
        if (b[static_cast<std::size_t>(k)] == 's') {
            if (ends("sses")) {
                k -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b[static_cast<std::size_t>(k - 1)] != 's') {
                --k;
            }
        }
        if (ends("eed")) {
            if (m() > 0) --k;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k = j;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_cons(k)) {
                char ch = b[static_cast<std::size_t>(k)];
                if (ch != 'l' && ch != 's' && ch != 'z') --k;
            } else {
                j = k;
                if (m() == 1 && cvc(k)) set_to("e");
            }
        }
    }

    // Terminal y -> i when there is another vowel in the stem.
    void step1c() {
        if (ends("y") && vowel_in_stem()) b[static_cast<std::size_t>(k)] = 'i';
    }

    void step2() {
        longest_rule({{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
                      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
                      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
                      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"}},
                     1);
    }

    void step3() {
        longest_rule({{"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
                      {"ical", "ic"},  {"ful", ""},   {"ness", ""}},
                     1);
    }

    // Suffixes dropped when the measure of the remaining stem exceeds one.
    void step4() {
        static const char* suffixes[] = {"al",  "ance", "ence", "er",  "ic",  "able", "ible",
                                         "ant", "ement", "ment", "ent", "ion", "ou",   "ism",
                                         "ate", "iti",   "ous",  "ive", "ize"};
        const char* best = nullptr;
        std::size_t best_len = 0;
        int best_j = 0;
        for (const char* s : suffixes) {
            std::size_t len = std::strlen(s);
            if (len <= best_len) continue;
            if (ends(s)) {
                best = s;
                best_len = len;
                best_j = j;
            }
        }
        if (best == nullptr) return;
        j = best_j;
        if (std::strcmp(best, "ion") == 0) {
            char ch = j >= 0 ? b[static_cast<std::size_t>(j)] : '\0';
            if (ch != 's' && ch != 't') return;
        }
        if (m() > 1) k = j;
    }

    // Remove a final -e and reduce -ll where the measure allows.
    void step5() {
        j = k;
        if (b[static_cast<std::size_t>(k)] == 'e') {
            int a = m();
            if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
        }
        if (b[static_cast<std::size_t>(k)] == 'l' && double_cons(k) && m() > 1) --k;
    }
};

}  // namespace

std::string porter_stem(std::string_view word) {
    std::string w = text::fold_case(word);
    if (w.size() < 3) return w;
    if (!std::all_of(w.begin(), w.end(), [](char c) { return c >= 'a' && c <= 'z'; })) return w;

    PorterState s;
    s.b = w;
    s.k = static_cast<int>(w.size()) - 1;
    s.step1ab();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5();
    s.b.resize(static_cast<std::size_t>(s.k + 1));
    return s.b;
}

bool is_derivation_of(std::string_view word, std::string_view base) {
    std::string w = text::fold_case(word);
    std::string b = text::fold_case(base);
    if (w == b) return false;
    return porter_stem(w) == porter_stem(b);
}

}  // namespace promptclass
