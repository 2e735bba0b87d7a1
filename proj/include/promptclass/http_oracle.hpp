#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "promptclass/oracle.hpp"

namespace promptclass {

// Scoring oracle backed by a model server over HTTP with a small JSON
// protocol:
//
//   GET  /meta             → vocab size, mask id, length limit, boundary
//                            tokens, concurrency capability
//   POST /tokenize         {"text": …}                → {"tokens": […]}
//   POST /single_token_id  {"word": …}                → {"id": int|null}
//   POST /predict          {"tokens": […],
//                           "mask_index": n}          → {"probabilities": […]}
//   POST /embed            {"id": n}                  → {"vector": […]}
//   POST /token_string     {"id": n}                  → {"token": …}
//
// Vocabulary lookups and embeddings are immutable per model, so they are
// cached locally.  Each request uses its own connection, which keeps the
// adapter safe for the concurrent batch scoring the harness may run when
// the server's meta allows it.
class HttpOracle : public ScoringOracle {
public:
    explicit HttpOracle(std::string base_url, int timeout_seconds = 120);

    std::vector<TokenId> tokenize(std::string_view text) const override;
    std::optional<TokenId> single_token_id(std::string_view word) const override;
    TokenId mask_token_id() const override { return mask_id_; }
    std::size_t max_sequence_length() const override { return max_len_; }
    std::vector<TokenId> sequence_start_tokens() const override { return start_tokens_; }
    std::vector<TokenId> sequence_end_tokens() const override { return end_tokens_; }
    std::size_t vocab_size() const override { return vocab_size_; }
    std::string token_string(TokenId id) const override;

    VocabDistribution predict(const RenderedPrompt& prompt) const override;
    std::vector<double> embed(TokenId id) const override;
    bool concurrent_predict_safe() const override { return concurrent_; }

private:
    std::string get_json(const std::string& path) const;
    std::string post_json(const std::string& path, const std::string& body) const;

    std::string base_url_;
    int timeout_seconds_;
    std::size_t vocab_size_ = 0;
    TokenId mask_id_ = 0;
    std::size_t max_len_ = 0;
    std::vector<TokenId> start_tokens_;
    std::vector<TokenId> end_tokens_;
    bool concurrent_ = false;

    mutable std::mutex cache_mutex_;
    mutable std::map<std::string, std::optional<TokenId>, std::less<>> word_cache_;
    mutable std::map<TokenId, std::vector<double>> embed_cache_;
};

}  // namespace promptclass
