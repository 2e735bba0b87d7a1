#include "promptclass/http_oracle.hpp"

#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

#include "promptclass/error.hpp"

namespace promptclass {

namespace {

using nlohmann::json;

json parse_body(const std::string& body, const std::string& path) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) {
        throw std::runtime_error("oracle server returned invalid JSON from " + path);
    }
    return parsed;
}

std::vector<TokenId> token_list(const json& value, const std::string& what) {
    if (!value.is_array()) throw std::runtime_error("oracle server: " + what + " is not a list");
    std::vector<TokenId> out;
    out.reserve(value.size());
    for (const auto& v : value) out.push_back(v.get<TokenId>());
    return out;
}

}  // namespace

HttpOracle::HttpOracle(std::string base_url, int timeout_seconds)
    : base_url_(std::move(base_url)), timeout_seconds_(timeout_seconds) {
    if (base_url_.empty()) throw InputError("oracle server URL is empty");
    while (base_url_.size() > 1 && base_url_.back() == '/') base_url_.pop_back();

    json meta = parse_body(get_json("/meta"), "/meta");
    vocab_size_ = meta.at("vocab_size").get<std::size_t>();
    mask_id_ = meta.at("mask_token_id").get<TokenId>();
    max_len_ = meta.at("max_sequence_length").get<std::size_t>();
    start_tokens_ = token_list(meta.at("sequence_start_tokens"), "sequence_start_tokens");
    end_tokens_ = token_list(meta.at("sequence_end_tokens"), "sequence_end_tokens");
    concurrent_ = meta.value("concurrent_predict_safe", false);
    if (vocab_size_ == 0) throw std::runtime_error("oracle server reports an empty vocabulary");
}

std::string HttpOracle::get_json(const std::string& path) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    auto res = client.Get(path);
    if (!res) {
        throw std::runtime_error("cannot reach oracle server at " + base_url_ + path + ": " +
                                 httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw std::runtime_error("oracle server " + path + " returned status " +
                                 std::to_string(res->status) + ": " + res->body);
    }
    return res->body;
}

std::string HttpOracle::post_json(const std::string& path, const std::string& body) const {
    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    auto res = client.Post(path, body, "application/json");
    if (!res) {
        throw std::runtime_error("cannot reach oracle server at " + base_url_ + path + ": " +
                                 httplib::to_string(res.error()));
    }
    if (res->status != 200) {
        throw std::runtime_error("oracle server " + path + " returned status " +
                                 std::to_string(res->status) + ": " + res->body);
    }
    return res->body;
}

std::vector<TokenId> HttpOracle::tokenize(std::string_view text) const {
    json request{{"text", std::string(text)}};
    json response = parse_body(post_json("/tokenize", request.dump()), "/tokenize");
    return token_list(response.at("tokens"), "tokens");
}

std::optional<TokenId> HttpOracle::single_token_id(std::string_view word) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = word_cache_.find(word);
        if (it != word_cache_.end()) return it->second;
    }
    json request{{"word", std::string(word)}};
    json response = parse_body(post_json("/single_token_id", request.dump()), "/single_token_id");
    std::optional<TokenId> id;
    if (!response.at("id").is_null()) id = response.at("id").get<TokenId>();
    std::lock_guard<std::mutex> lock(cache_mutex_);
    word_cache_.emplace(std::string(word), id);
    return id;
}

std::string HttpOracle::token_string(TokenId id) const {
    json request{{"id", id}};
    json response = parse_body(post_json("/token_string", request.dump()), "/token_string");
    return response.at("token").get<std::string>();
}

VocabDistribution HttpOracle::predict(const RenderedPrompt& prompt) const {
    json request{{"tokens", prompt.tokens}, {"mask_index", prompt.mask_index}};
    json response = parse_body(post_json("/predict", request.dump()), "/predict");
    const json& probs = response.at("probabilities");
    if (!probs.is_array() || probs.size() != vocab_size_) {
        throw std::runtime_error("oracle server returned a distribution of wrong size");
    }
    std::vector<double> values;
    values.reserve(probs.size());
    for (const auto& p : probs) values.push_back(p.get<double>());
    return VocabDistribution(std::move(values));
}

std::vector<double> HttpOracle::embed(TokenId id) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = embed_cache_.find(id);
        if (it != embed_cache_.end()) return it->second;
    }
    json request{{"id", id}};
    json response = parse_body(post_json("/embed", request.dump()), "/embed");
    const json& vec = response.at("vector");
    if (!vec.is_array() || vec.empty()) {
        throw std::runtime_error("oracle server returned an empty embedding");
    }
    std::vector<double> values;
    values.reserve(vec.size());
    for (const auto& v : vec) values.push_back(v.get<double>());
    std::lock_guard<std::mutex> lock(cache_mutex_);
    embed_cache_.emplace(id, values);
    return values;
}

}  // namespace promptclass
