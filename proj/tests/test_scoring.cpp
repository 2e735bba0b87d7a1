#include <cmath>
#include <random>

#include "doctest.h"
#include "promptclass/error.hpp"
#include "promptclass/rng.hpp"
#include "promptclass/scoring.hpp"
#include "promptclass/toy_oracle.hpp"
#include "test_support.hpp"

using namespace promptclass;
using namespace promptclass::testing;

namespace {

ToyOracle make_oracle() { return ToyOracle(two_class_spec()); }

// Distribution over the oracle's vocabulary placing `mass` on each listed
// word and spreading the remainder uniformly over the rest.
VocabDistribution planted(const ToyOracle& oracle,
                          const std::vector<std::pair<std::string, double>>& mass) {
    std::vector<double> p(oracle.vocab_size(), 0.0);
    double used = 0.0;
    std::size_t planted_count = 0;
    for (const auto& [word, m] : mass) {
        p[static_cast<std::size_t>(*oracle.single_token_id(word))] = m;
        used += m;
        ++planted_count;
    }
    double rest = (1.0 - used) / static_cast<double>(oracle.vocab_size() - planted_count);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) p[i] = rest;
    }
    return VocabDistribution(std::move(p));
}

}  // namespace

TEST_CASE("class score is the mean mask probability over the label words") {
    ToyOracle oracle = make_oracle();

    SUBCASE("singleton set passes the probability through") {
        auto dist = planted(oracle, {{"business", 0.4}});
        CHECK(class_score(dist, {"business"}, oracle) == doctest::Approx(0.4).epsilon(1e-12));
    }

    SUBCASE("two words average") {
        auto dist = planted(oracle, {{"business", 0.4}, {"company", 0.2}});
        CHECK(class_score(dist, {"business", "company"}, oracle) ==
              doctest::Approx(0.3).epsilon(1e-12));
    }

    SUBCASE("uniform distribution scores 1 over vocabulary size for any word set") {
        std::vector<double> p(oracle.vocab_size(), 1.0 / static_cast<double>(oracle.vocab_size()));
        VocabDistribution dist(std::move(p));
        double expected = 1.0 / static_cast<double>(oracle.vocab_size());
        CHECK(class_score(dist, {"business"}, oracle) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(class_score(dist, {"business", "company", "game"}, oracle) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("class score rejects empty or unresolvable word sets") {
    ToyOracle oracle = make_oracle();
    auto dist = planted(oracle, {{"business", 0.4}});
    CHECK_THROWS_AS((void)class_score(dist, {}, oracle), InputError);
    CHECK_THROWS_AS((void)class_score(dist, {"business", "nonexistentword"}, oracle), InputError);
}

TEST_CASE("class score equals the brute-force sum within 1e-12") {
    ToyOracle oracle = make_oracle();
    std::mt19937 gen = make_substream(99, "score-prop", 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<std::string> pool = {"business", "sports", "company", "industry",
                                           "game",     "ford",   "stadium", "market"};
    for (int trial = 0; trial < 200; ++trial) {
        // Random distribution over the vocabulary.
        std::vector<double> raw(oracle.vocab_size());
        double total = 0.0;
        for (double& x : raw) {
            x = unit(gen) + 1e-9;
            total += x;
        }
        for (double& x : raw) x /= total;
        VocabDistribution dist(raw);

        // Random non-empty word subset.
        std::size_t k = 1 + uniform_below(gen, static_cast<std::uint32_t>(pool.size()));
        std::vector<std::string> words;
        for (std::size_t idx : sample_indices(pool.size(), k, gen)) words.push_back(pool[idx]);

        double expected = 0.0;
        for (const auto& w : words) {
            expected += raw[static_cast<std::size_t>(*oracle.single_token_id(w))];
        }
        expected /= static_cast<double>(words.size());
        CHECK(std::abs(class_score(dist, words, oracle) - expected) <= 1e-12);
    }
}

TEST_CASE("scaling every word probability equally never changes the argmax") {
    ToyOracle oracle = make_oracle();
    // Two classes with singleton word sets; scale both probabilities by the
    // same factor (renormalizing the remainder) and check order stability.
    for (double scale : {0.5, 1.0, 2.0}) {
        double a = 0.30 * scale;
        double b = 0.20 * scale;
        auto dist = planted(oracle, {{"business", a}, {"sports", b}});
        double sa = class_score(dist, {"business"}, oracle);
        double sb = class_score(dist, {"sports"}, oracle);
        CHECK(sa > sb);
    }
}

TEST_CASE("adding a higher-probability word raises the class score") {
    ToyOracle oracle = make_oracle();
    auto dist = planted(oracle, {{"business", 0.4}, {"company", 0.1}});
    double base = class_score(dist, {"company"}, oracle);
    double with_better = class_score(dist, {"company", "business"}, oracle);
    CHECK(with_better > base);
    // ... and adding a lower-probability word lowers it.
    CHECK(class_score(dist, {"business", "company"}, oracle) <
          class_score(dist, {"business"}, oracle));
}

TEST_CASE("classify picks the argmax class and keeps declaration order") {
    ToyOracle oracle = make_oracle();
    Verbalizer v({{"business", {"business", "company"}}, {"sports", {"sports", "game"}}}, {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");

    Prediction p = classify(oracle, tmpl, v, "ford announces market plans");
    CHECK(p.label == "business");
    REQUIRE(p.class_scores.size() == 2);
    CHECK(p.class_scores[0].label == "business");
    CHECK(p.class_scores[1].label == "sports");
    REQUIRE(p.class_scores[0].per_word.size() == 2);
    CHECK(p.class_scores[0].per_word[0].first == "business");

    Prediction q = classify(oracle, tmpl, v, "stadium team");
    CHECK(q.label == "sports");

    const ClassScore* found = q.find("business");
    REQUIRE(found != nullptr);
    CHECK(found->label == "business");
    CHECK(q.find("nope") == nullptr);
}

TEST_CASE("classify resolves score ties in favour of the first declared class") {
    ToyOracle oracle = make_oracle();
    // Identical word lists give identical scores for every text.
    Verbalizer v({{"zeta", {"news"}}, {"alpha", {"news"}}}, {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");
    Prediction p = classify(oracle, tmpl, v, "ford market stadium");
    CHECK(p.class_scores[0].score == p.class_scores[1].score);
    CHECK(p.label == "zeta");
}

TEST_CASE("classify requires at least two classes") {
    ToyOracle oracle = make_oracle();
    Verbalizer v({{"business", {"business"}}}, {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");
    CHECK_THROWS_AS((void)classify(oracle, tmpl, v, "ford"), InputError);
}

TEST_CASE("classify computes exactly the mean over the mask distribution") {
    ToyOracle oracle = make_oracle();
    Verbalizer v({{"business", {"business", "company", "market"}}, {"sports", {"sports", "game"}}},
                 {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");
    const std::string text = "ford stadium team market";

    Prediction p = classify(oracle, tmpl, v, text);

    RenderedPrompt rendered = render(tmpl, text, oracle);
    VocabDistribution dist = oracle.predict(rendered);
    for (const auto& cs : p.class_scores) {
        double expected = 0.0;
        for (const auto& [word, prob] : cs.per_word) {
            double direct = dist.prob(*oracle.single_token_id(word));
            CHECK(prob == direct);
            expected += direct;
        }
        expected /= static_cast<double>(cs.per_word.size());
        CHECK(std::abs(cs.score - expected) <= 1e-12);
    }
}

TEST_CASE("single-name word lists reduce to the bare mask probability of the class name") {
    ToyOracle oracle = make_oracle();
    Verbalizer v({{"business", {"business"}}, {"sports", {"sports"}}}, {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");
    const std::string text = "ford market report";

    Prediction p = classify(oracle, tmpl, v, text);
    VocabDistribution dist = oracle.predict(render(tmpl, text, oracle));
    CHECK(p.class_scores[0].score == dist.prob(*oracle.single_token_id("business")));
    CHECK(p.class_scores[1].score == dist.prob(*oracle.single_token_id("sports")));
}

TEST_CASE("classify surfaces truncation of long inputs") {
    ToyOracleSpec spec = two_class_spec();
    spec.max_len = 12;
    ToyOracle oracle(spec);
    Verbalizer v({{"business", {"business"}}, {"sports", {"sports"}}}, {});
    PromptTemplate tmpl = PromptTemplate::parse("X This topic is about [mask]");

    std::string longtext = "ford";
    for (int i = 0; i < 30; ++i) longtext += " market";
    Prediction p = classify(oracle, tmpl, v, longtext);
    CHECK(p.truncated);
    CHECK(p.dropped_text_tokens > 0);

    Prediction q = classify(oracle, tmpl, v, "ford market");
    CHECK_FALSE(q.truncated);
    CHECK(q.dropped_text_tokens == 0);
}

TEST_CASE("prediction lines are tab-separated with fixed six-decimal scores") {
    Prediction p;
    p.label = "business";
    p.class_scores = {{"business", 0.5, {}}, {"sports", 0.125, {}}};
    CHECK(format_prediction_line("7", p) == "7\tbusiness\tbusiness=0.500000\tsports=0.125000");

    p.class_scores[0].score = 1.0 / 3.0;
    CHECK(format_prediction_line("id-x", p) ==
          "id-x\tbusiness\tbusiness=0.333333\tsports=0.125000");
}
