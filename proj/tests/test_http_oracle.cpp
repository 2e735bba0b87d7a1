#include <atomic>
#include <memory>
#include <stdexcept>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "promptclass/error.hpp"
#include "promptclass/http_oracle.hpp"
#include "promptclass/scoring.hpp"
#include "test_support.hpp"

using namespace promptclass;
using namespace promptclass::testing;
using nlohmann::json;

namespace {

// In-process HTTP server exposing a ToyOracle over the wire protocol the
// adapter speaks, so the adapter can be checked against a reference oracle
// without anything external.
class OracleServer {
public:
    explicit OracleServer(ToyOracleSpec spec) : oracle_(std::move(spec)) {
        server_.Get("/meta", [this](const httplib::Request&, httplib::Response& res) {
            json meta{{"vocab_size", oracle_.vocab_size()},
                      {"mask_token_id", oracle_.mask_token_id()},
                      {"max_sequence_length", oracle_.max_sequence_length()},
                      {"sequence_start_tokens", oracle_.sequence_start_tokens()},
                      {"sequence_end_tokens", oracle_.sequence_end_tokens()},
                      {"concurrent_predict_safe", true}};
            res.set_content(meta.dump(), "application/json");
        });
        server_.Post("/tokenize", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            json out{{"tokens", oracle_.tokenize(body.at("text").get<std::string>())}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/single_token_id",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         json body = json::parse(req.body);
                         auto id = oracle_.single_token_id(body.at("word").get<std::string>());
                         json out{{"id", nullptr}};
                         if (id.has_value()) out["id"] = *id;
                         res.set_content(out.dump(), "application/json");
                         ++word_lookups_;
                     });
        server_.Post("/token_string", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            json out{{"token", oracle_.token_string(body.at("id").get<TokenId>())}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/predict", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            RenderedPrompt prompt;
            prompt.tokens = body.at("tokens").get<std::vector<TokenId>>();
            prompt.mask_index = body.at("mask_index").get<std::size_t>();
            // Reconstruct the text slot the way a standalone server would:
            // from the token strings.
            for (TokenId id : prompt.tokens) {
                if (id >= 4) {
                    if (!prompt.source_text.empty()) prompt.source_text += ' ';
                    prompt.source_text += oracle_.token_string(id);
                }
            }
            if (truncate_predictions_) {
                json out{{"probabilities", std::vector<double>{0.5, 0.5}}};
                res.set_content(out.dump(), "application/json");
                return;
            }
            json out{{"probabilities", oracle_.predict(prompt).probabilities()}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body);
            json out{{"vector", oracle_.embed(body.at("id").get<TokenId>())}};
            res.set_content(out.dump(), "application/json");
        });

        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~OracleServer() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    const ToyOracle& reference() const { return oracle_; }
    int word_lookups() const { return word_lookups_.load(); }
    void break_predictions() { truncate_predictions_ = true; }

private:
    ToyOracle oracle_;
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::atomic<int> word_lookups_{0};
    bool truncate_predictions_ = false;
};

}  // namespace

TEST_CASE("the http adapter mirrors the server's oracle") {
    OracleServer server(two_class_spec());
    HttpOracle oracle(server.url());
    const ToyOracle& reference = server.reference();

    CHECK(oracle.vocab_size() == reference.vocab_size());
    CHECK(oracle.mask_token_id() == reference.mask_token_id());
    CHECK(oracle.max_sequence_length() == reference.max_sequence_length());
    CHECK(oracle.sequence_start_tokens() == reference.sequence_start_tokens());
    CHECK(oracle.sequence_end_tokens() == reference.sequence_end_tokens());
    CHECK(oracle.concurrent_predict_safe());

    CHECK(oracle.tokenize("ford market day") == reference.tokenize("ford market day"));
    CHECK(oracle.single_token_id("business") == reference.single_token_id("business"));
    CHECK(oracle.single_token_id("absent-word") == std::nullopt);
    CHECK(oracle.token_string(*oracle.single_token_id("ford")) == "ford");

    for (TokenId id : {4, 5, 6}) {
        CHECK(oracle.embed(id) == reference.embed(id));
    }
}

TEST_CASE("classification through the adapter equals classification in process") {
    OracleServer server(two_class_spec());
    HttpOracle remote(server.url());
    const ToyOracle& local = server.reference();

    Verbalizer v({{"business", {"business", "company"}}, {"sports", {"sports", "game"}}}, {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");

    for (const char* text : {"ford market report", "stadium team night", "plain words only"}) {
        Prediction via_http = classify(remote, tmpl, v, text);
        Prediction direct = classify(local, tmpl, v, text);
        CHECK(via_http.label == direct.label);
        REQUIRE(via_http.class_scores.size() == direct.class_scores.size());
        for (std::size_t i = 0; i < direct.class_scores.size(); ++i) {
            CHECK(via_http.class_scores[i].score ==
                  doctest::Approx(direct.class_scores[i].score).epsilon(1e-12));
        }
    }
}

TEST_CASE("word lookups are cached") {
    OracleServer server(two_class_spec());
    HttpOracle oracle(server.url());
    (void)oracle.single_token_id("business");
    (void)oracle.single_token_id("business");
    (void)oracle.single_token_id("business");
    CHECK(server.word_lookups() == 1);
}

TEST_CASE("trailing slashes in the base URL are tolerated") {
    OracleServer server(two_class_spec());
    HttpOracle oracle(server.url() + "///");
    CHECK(oracle.vocab_size() == server.reference().vocab_size());
}

TEST_CASE("an unreachable server fails loudly") {
    CHECK_THROWS_AS(HttpOracle("http://127.0.0.1:9", 1), std::runtime_error);
    CHECK_THROWS_AS(HttpOracle(""), InputError);
}

TEST_CASE("a distribution of the wrong size is rejected") {
    OracleServer server(two_class_spec());
    HttpOracle oracle(server.url());
    server.break_predictions();

    RenderedPrompt prompt;
    prompt.tokens = {ToyOracle::kBos, ToyOracle::kMask, ToyOracle::kEos};
    prompt.mask_index = 1;
    CHECK_THROWS_WITH_AS((void)oracle.predict(prompt),
                         doctest::Contains("wrong size"), std::runtime_error);
}
