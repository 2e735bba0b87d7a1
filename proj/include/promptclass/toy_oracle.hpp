#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "promptclass/oracle.hpp"

namespace promptclass {

// Declarative description of a deterministic test oracle: a fixed small
// vocabulary, planted mask distributions keyed by trigger words, seeded
// pseudo-random embeddings, whitespace tokenization.
struct ToyOracleSpec {
    std::vector<std::string> words;  // content vocabulary, lowercase
    // trigger word -> distribution over content words, each summing to 1
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, double>>>> triggers;
    std::size_t embedding_dim = 16;
    std::uint32_t seed = 1;
    std::size_t max_len = 64;

    static ToyOracleSpec from_json_file(const std::filesystem::path& path);
};

// predict() depends only on the trigger words present in the prompt's text
// slot: the planted distributions of the distinct triggers found are
// averaged; with no trigger present the distribution is uniform over the
// whole vocabulary. Pure and safe for concurrent calls.
class ToyOracle final : public ScoringOracle {
public:
    explicit ToyOracle(ToyOracleSpec spec);

    std::vector<TokenId> tokenize(std::string_view fragment) const override;
    std::optional<TokenId> single_token_id(std::string_view word) const override;
    TokenId mask_token_id() const override { return kMask; }
    std::size_t max_sequence_length() const override { return spec_.max_len; }
    std::vector<TokenId> sequence_start_tokens() const override { return {kBos}; }
    std::vector<TokenId> sequence_end_tokens() const override { return {kEos}; }
    std::size_t vocab_size() const override { return id_to_word_.size(); }
    std::string token_string(TokenId id) const override;

    VocabDistribution predict(const RenderedPrompt& prompt) const override;
    std::vector<double> embed(TokenId id) const override;
    bool concurrent_predict_safe() const override { return true; }

    static constexpr TokenId kBos = 0;
    static constexpr TokenId kEos = 1;
    static constexpr TokenId kMask = 2;
    static constexpr TokenId kUnk = 3;

private:
    ToyOracleSpec spec_;
    std::vector<std::string> id_to_word_;
    std::unordered_map<std::string, TokenId> word_to_id_;
    std::unordered_map<std::string, std::vector<double>> trigger_dists_;  // dense over vocab
};

}  // namespace promptclass
