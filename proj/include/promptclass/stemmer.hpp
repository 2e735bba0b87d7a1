#pragma once

#include <string>
#include <string_view>

namespace promptclass {

// Porter (1980) suffix-stripping stemmer. Input is case-folded first; words
// shorter than three letters or containing non-ASCII-alphabetic characters
// are returned unchanged (folded). Deterministic by construction.
std::string porter_stem(std::string_view word);

// A word counts as a morphological derivation of `base` iff the two stem to
// the same string and the word is not `base` itself (case-folded comparison).
bool is_derivation_of(std::string_view word, std::string_view base);

}  // namespace promptclass
