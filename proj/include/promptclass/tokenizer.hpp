#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptclass {

using TokenId = std::int32_t;

// Tokenization side of a scoring oracle: everything prompt rendering needs
// without pulling in prediction.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    // Raw tokenization of a text fragment, no sequence-start/end specials.
    virtual std::vector<TokenId> tokenize(std::string_view fragment) const = 0;

    // The id of `word` iff it maps to exactly one vocabulary token, matched
    // case-insensitively with the lowercase form preferred. nullopt otherwise.
    virtual std::optional<TokenId> single_token_id(std::string_view word) const = 0;

    virtual TokenId mask_token_id() const = 0;
    virtual std::size_t max_sequence_length() const = 0;

    // Tokens the oracle expects at the start/end of every sequence.
    virtual std::vector<TokenId> sequence_start_tokens() const = 0;
    virtual std::vector<TokenId> sequence_end_tokens() const = 0;

    virtual std::size_t vocab_size() const = 0;
    virtual std::string token_string(TokenId id) const = 0;
};

}  // namespace promptclass
