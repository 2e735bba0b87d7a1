#include <cmath>

#include "doctest.h"
#include "promptclass/error.hpp"
#include "promptclass/toy_oracle.hpp"
#include "test_support.hpp"

using namespace promptclass;
using namespace promptclass::testing;

namespace {

RenderedPrompt prompt_for(const ToyOracle& oracle, const std::string& text) {
    PromptTemplate t = PromptTemplate::parse("X This topic is about [mask]");
    return render(t, text, oracle);
}

}  // namespace

TEST_CASE("spec validation") {
    ToyOracleSpec bad = two_class_spec();
    bad.triggers[0].second[0].second = 0.9;  // mass no longer sums to 1
    CHECK_THROWS_AS((void)ToyOracle(std::move(bad)), InputError);

    ToyOracleSpec dup = two_class_spec();
    dup.words.push_back("business");
    CHECK_THROWS_AS((void)ToyOracle(std::move(dup)), InputError);

    ToyOracleSpec unknown = two_class_spec();
    unknown.triggers.push_back({"new", {{"not-in-vocab", 1.0}}});
    CHECK_THROWS_AS((void)ToyOracle(std::move(unknown)), InputError);

    ToyOracleSpec dup_trigger = two_class_spec();
    dup_trigger.triggers.push_back({"FORD", {{"company", 1.0}}});  // folds onto "ford"
    CHECK_THROWS_AS((void)ToyOracle(std::move(dup_trigger)), InputError);
}

TEST_CASE("tokenization strips edge punctuation and folds case") {
    ToyOracle oracle(two_class_spec());
    auto ids = oracle.tokenize("Ford, TEAM news!");
    REQUIRE(ids.size() == 3);
    CHECK(ids[0] == *oracle.single_token_id("ford"));
    CHECK(ids[1] == *oracle.single_token_id("team"));
    CHECK(ids[2] == *oracle.single_token_id("news"));

    auto unk = oracle.tokenize("zzz-unknown ford");
    REQUIRE(unk.size() == 2);
    CHECK(unk[0] == ToyOracle::kUnk);
}

TEST_CASE("single_token_id is case-insensitive and misses are nullopt") {
    ToyOracle oracle(two_class_spec());
    CHECK(oracle.single_token_id("Business") == oracle.single_token_id("business"));
    CHECK_FALSE(oracle.single_token_id("absent").has_value());
    CHECK_FALSE(oracle.single_token_id("two words").has_value());
}

TEST_CASE("planted distribution surfaces at the mask for a trigger text") {
    ToyOracle oracle(two_class_spec());
    VocabDistribution d = oracle.predict(prompt_for(oracle, "ford cuts production"));
    CHECK(d.prob(*oracle.single_token_id("company")) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.prob(*oracle.single_token_id("business")) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d.prob(*oracle.single_token_id("sports")) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("multiple triggers average their distributions") {
    ToyOracle oracle(two_class_spec());
    VocabDistribution d = oracle.predict(prompt_for(oracle, "ford at the stadium"));
    // mean of ford{company .5, business .4, sports .1} and stadium{sports .7, game .3}
    CHECK(d.prob(*oracle.single_token_id("company")) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(d.prob(*oracle.single_token_id("sports")) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(d.prob(*oracle.single_token_id("game")) == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("no trigger present yields the uniform distribution") {
    ToyOracle oracle(two_class_spec());
    VocabDistribution d = oracle.predict(prompt_for(oracle, "nothing matches here"));
    const double u = 1.0 / static_cast<double>(oracle.vocab_size());
    for (std::size_t id = 0; id < oracle.vocab_size(); ++id) {
        CHECK(d.prob(static_cast<TokenId>(id)) == doctest::Approx(u).epsilon(1e-12));
    }
}

TEST_CASE("identical prompts yield identical distributions") {
    ToyOracle oracle(two_class_spec());
    auto p = prompt_for(oracle, "ford market game");
    VocabDistribution a = oracle.predict(p);
    VocabDistribution b = oracle.predict(p);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.probabilities()[i] == b.probabilities()[i]);
    }
}

TEST_CASE("property: predict mass sums to 1 on random prompts") {
    ToyOracle oracle(two_class_spec());
    std::mt19937 gen(99);
    const std::vector<std::string> pool = {"ford",  "market", "stadium", "team", "news",
                                           "other", "random", "words",   "game"};
    for (int trial = 0; trial < 100; ++trial) {
        std::string text;
        std::size_t len = 1 + uniform_below(gen, 6);
        for (std::size_t i = 0; i < len; ++i) {
            if (!text.empty()) text += ' ';
            text += pool[uniform_below(gen, static_cast<std::uint32_t>(pool.size()))];
        }
        VocabDistribution d = oracle.predict(prompt_for(oracle, text));
        CHECK(std::abs(d.total() - 1.0) <= 1e-6);
    }
}

TEST_CASE("embeddings are deterministic, sized, and bounded") {
    ToyOracle a(two_class_spec());
    ToyOracle b(two_class_spec());
    for (TokenId id = 0; id < static_cast<TokenId>(a.vocab_size()); ++id) {
        auto va = a.embed(id);
        auto vb = b.embed(id);
        REQUIRE(va.size() == 16);
        CHECK(va == vb);
        for (double x : va) {
            CHECK(x >= -1.0);
            CHECK(x < 1.0);
        }
    }
    // Different seeds change the embedding table.
    ToyOracleSpec reseeded = two_class_spec();
    reseeded.seed = 2;
    ToyOracle c(std::move(reseeded));
    CHECK(a.embed(4) != c.embed(4));
}

TEST_CASE("distribution construction validates range and mass") {
    // A bad distribution means the oracle broke its contract, so this is a
    // runtime failure rather than an input error.
    CHECK_THROWS_AS((void)VocabDistribution({0.5, 0.6}), std::runtime_error);
    CHECK_THROWS_AS((void)VocabDistribution({1.2, -0.2}), std::runtime_error);
    VocabDistribution ok({0.25, 0.75});
    CHECK(ok.prob(1) == 0.75);
    CHECK_THROWS_AS((void)ok.prob(7), std::exception);
}

TEST_CASE("cosine distance basics") {
    CHECK(cosine_distance({1.0, 0.0}, {1.0, 0.0}) == doctest::Approx(0.0));
    CHECK(cosine_distance({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(2.0));
    CHECK(cosine_distance({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
    CHECK(cosine_distance({0.0, 0.0}, {1.0, 0.0}) == 2.0);  // zero norm ranks last
    CHECK_THROWS_AS((void)cosine_distance({1.0}, {1.0, 2.0}), std::exception);
}
