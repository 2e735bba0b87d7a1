#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace promptclass::text {

// A word byte is an ASCII alphanumeric or any byte >= 0x80, so multi-byte
// UTF-8 sequences stay inside words. Everything else separates words.
bool is_word_byte(unsigned char c);

// ASCII-only lowercasing; non-ASCII bytes pass through unchanged.
std::string fold_case(std::string_view s);

std::string trim(std::string_view s);

// Trim plus collapsing of internal whitespace runs to a single space.
std::string normalize_ws(std::string_view s);

struct WordSpan {
    std::size_t begin;
    std::size_t end;  // exclusive
};

// Maximal runs of word bytes, in order of appearance.
std::vector<WordSpan> word_spans(std::string_view s);

std::vector<std::string> whitespace_tokens(std::string_view s);

// Strips leading/trailing non-word bytes ("rise." -> "rise").
std::string strip_edge_punct(std::string_view s);

}  // namespace promptclass::text
