#include <sstream>

#include "doctest.h"
#include "promptclass/dataset.hpp"
#include "promptclass/error.hpp"
#include "test_support.hpp"

using namespace promptclass;
using namespace promptclass::testing;

namespace {

Dataset load_tsv(const std::string& content, DatasetSpec spec = {}) {
    std::istringstream in(content);
    return load_dataset(in, spec, "mem");
}

}  // namespace

TEST_CASE("format names round-trip") {
    CHECK(parse_dataset_format("tsv") == DatasetFormat::LabelTabText);
    CHECK(parse_dataset_format("agnews-csv") == DatasetFormat::AgNewsCsv);
    CHECK(dataset_format_name(DatasetFormat::LabelTabText) == "tsv");
    CHECK(dataset_format_name(DatasetFormat::AgNewsCsv) == "agnews-csv");
    CHECK_THROWS_AS((void)parse_dataset_format("xml"), InputError);
}

TEST_CASE("tab-separated datasets load with classes in first-appearance order") {
    Dataset d = load_tsv(
        "sports\tThe match went to overtime.\n"
        "business\tShares fell sharply.\n"
        "sports\tA record sprint.\n");
    CHECK(d.classes == std::vector<std::string>{"sports", "business"});
    REQUIRE(d.size() == 3);
    CHECK(d.examples[1].label == "business");
    CHECK(d.examples[1].text == "Shares fell sharply.");
    CHECK(d.indices_of("sports") == std::vector<std::size_t>{0, 2});
    CHECK(d.indices_of("business") == std::vector<std::size_t>{1});
    CHECK(d.indices_of("absent").empty());
}

TEST_CASE("expected classes pin the order and reject strangers") {
    DatasetSpec spec;
    spec.expected_classes = {"business", "sports"};
    Dataset d = load_tsv("sports\tgame on\nbusiness\tdeal done\n", spec);
    CHECK(d.classes == std::vector<std::string>{"business", "sports"});

    std::istringstream bad("sports\tok\nweather\train\n");
    try {
        (void)load_dataset(bad, spec, "mem");
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("mem:2") != std::string::npos);
        CHECK(std::string(e.what()).find("weather") != std::string::npos);
    }
}

TEST_CASE("malformed tab-separated lines report their line number") {
    auto reject_with = [](const std::string& content, const std::string& needle) {
        std::istringstream in(content);
        DatasetSpec spec;
        try {
            (void)load_dataset(in, spec, "mem");
            FAIL("expected InputError for: " << content);
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    reject_with("sports\tok\nno-tab-here\n", "mem:2");
    reject_with("\tmissing label\n", "mem:1");
    reject_with("sports\t\n", "mem:1");      // empty text
    reject_with("sports\t   \n", "mem:1");   // whitespace-only text
    reject_with("", "no examples");           // empty input
}

TEST_CASE("blank lines are skipped, surrounding whitespace is trimmed") {
    Dataset d = load_tsv("\nsports\t  spaced out \n\n");
    REQUIRE(d.size() == 1);
    CHECK(d.examples[0].text == "spaced out");
}

TEST_CASE("news CSV loads via the fixed four-class index") {
    DatasetSpec spec;
    spec.format = DatasetFormat::AgNewsCsv;
    std::string csv =
        "\"3\",\"Wall St. Bears Claw Back\",\"Short-sellers see green again.\"\n"
        "\"1\",\"Peace talks resume\",\"Negotiators met on Tuesday.\"\n"
        "\"2\",\"Cup final tonight\",\"Kickoff at nine.\"\n"
        "\"4\",\"New chip unveiled\",\"Fabbed at 3nm.\"\n";

    SUBCASE("title only by default") {
        Dataset d = load_tsv(csv, spec);
        // Classes register in order of first appearance unless pinned.
        CHECK(d.classes ==
              std::vector<std::string>{"Business", "World", "Sports", "Sci/Tech"});
        REQUIRE(d.size() == 4);
        CHECK(d.examples[0].label == "Business");
        CHECK(d.examples[0].text == "Wall St. Bears Claw Back");
        CHECK(d.examples[1].label == "World");
    }

    SUBCASE("expected classes pin the canonical order") {
        spec.expected_classes = {"World", "Sports", "Business", "Sci/Tech"};
        Dataset d = load_tsv(csv, spec);
        CHECK(d.classes ==
              std::vector<std::string>{"World", "Sports", "Business", "Sci/Tech"});
        CHECK(d.examples[0].label == "Business");
    }

    SUBCASE("title plus description when requested") {
        spec.title_only = false;
        Dataset d = load_tsv(csv, spec);
        CHECK(d.examples[0].text == "Wall St. Bears Claw Back Short-sellers see green again.");
    }
}

TEST_CASE("news CSV unescapes doubled quotes inside quoted fields") {
    DatasetSpec spec;
    spec.format = DatasetFormat::AgNewsCsv;
    Dataset d = load_tsv("\"2\",\"He said \"\"play on\"\"\",\"body\"\n", spec);
    REQUIRE(d.size() == 1);
    CHECK(d.examples[0].text == "He said \"play on\"");
}

TEST_CASE("news CSV rejects malformed rows with line numbers") {
    DatasetSpec spec;
    spec.format = DatasetFormat::AgNewsCsv;
    auto reject_with = [&spec](const std::string& content, const std::string& needle) {
        std::istringstream in(content);
        try {
            (void)load_dataset(in, spec, "mem");
            FAIL("expected InputError for: " << content);
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    reject_with("\"9\",\"title\",\"body\"\n", "mem:1");   // index out of range
    reject_with("\"zero\",\"title\",\"body\"\n", "mem:1");  // not a number
    reject_with("\"1\"\n", "mem:1");                        // title column missing
    reject_with("\"1\",\"no closing quote\n", "unterminated");
}

TEST_CASE("datasets round-trip through save_examples") {
    TempDir dir("dataset");
    Dataset d = load_tsv("sports\tfirst game\nbusiness\tbig merger\n");
    save_examples(d.examples, dir.file("out.tsv"));
    CHECK(read_file(dir.file("out.tsv")) == "sports\tfirst game\nbusiness\tbig merger\n");

    Dataset reloaded = load_dataset(dir.file("out.tsv"), {});
    REQUIRE(reloaded.size() == 2);
    CHECK(reloaded.examples[0].text == d.examples[0].text);
    CHECK(reloaded.examples[1].label == d.examples[1].label);
}

TEST_CASE("loading a missing file names the path") {
    try {
        (void)load_dataset("/nonexistent/definitely-missing.tsv", {});
        FAIL("expected InputError");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("definitely-missing.tsv") != std::string::npos);
    }
}
