#include "promptclass/text.hpp"

#include <cctype>

namespace promptclass::text {

bool is_word_byte(unsigned char c) {
    return std::isalnum(c) != 0 || c >= 0x80;
}

std::string fold_case(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
    }
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string normalize_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = true;  // swallow leading whitespace
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!in_space) out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(static_cast<char>(c));
            in_space = false;
        }
    }
    if (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

std::vector<WordSpan> word_spans(std::string_view s) {
    std::vector<WordSpan> spans;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_word_byte(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < s.size() && is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
        spans.push_back({b, i});
    }
    return spans;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        out.emplace_back(s.substr(b, i - b));
    }
    return out;
}

std::string strip_edge_punct(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && !is_word_byte(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && !is_word_byte(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace promptclass::text
