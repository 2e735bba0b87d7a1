#include "doctest.h"
#include "promptclass/text.hpp"

using namespace promptclass;

TEST_CASE("fold_case lowers ASCII only") {
    CHECK(text::fold_case("Ford CUTS Production") == "ford cuts production");
    CHECK(text::fold_case("Caf\xc3\xa9") == "caf\xc3\xa9");  // UTF-8 bytes untouched
    CHECK(text::fold_case("") == "");
}

TEST_CASE("trim and normalize_ws") {
    CHECK(text::trim("  a b  ") == "a b");
    CHECK(text::trim("\t\n") == "");
    CHECK(text::normalize_ws("  ford \t cuts\n\nproduction ") == "ford cuts production");
    CHECK(text::normalize_ws("one") == "one");
}

TEST_CASE("word_spans finds maximal alphanumeric runs") {
    auto spans = text::word_spans("Ford's sales, 2024!");
    REQUIRE(spans.size() == 4);
    CHECK(spans[0].begin == 0);
    CHECK(spans[0].end == 4);   // Ford
    CHECK(spans[1].begin == 5);
    CHECK(spans[1].end == 6);   // s
    CHECK(spans[2].begin == 7);
    CHECK(spans[2].end == 12);  // sales
    CHECK(spans[3].begin == 14);
    CHECK(spans[3].end == 18);  // 2024
    CHECK(text::word_spans("...").empty());
}

TEST_CASE("whitespace_tokens splits on runs of whitespace") {
    auto tokens = text::whitespace_tokens(" a  bb\tccc ");
    REQUIRE(tokens.size() == 3);
    CHECK(tokens[0] == "a");
    CHECK(tokens[1] == "bb");
    CHECK(tokens[2] == "ccc");
    CHECK(text::whitespace_tokens("   ").empty());
}

TEST_CASE("strip_edge_punct removes only leading/trailing separators") {
    CHECK(text::strip_edge_punct("rise.") == "rise");
    CHECK(text::strip_edge_punct("\"quoted\"") == "quoted");
    CHECK(text::strip_edge_punct("chrysler's") == "chrysler's");  // internal kept
    CHECK(text::strip_edge_punct("!!!") == "");
}
