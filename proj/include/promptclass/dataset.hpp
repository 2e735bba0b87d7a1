#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace promptclass {

struct Example {
    std::string text;
    std::string label;
};

// A labelled corpus with an ordered, duplicate-free class list.  Every
// example's label is a member of `classes`.
struct Dataset {
    std::string name;
    std::vector<std::string> classes;
    std::vector<Example> examples;

    std::size_t size() const { return examples.size(); }
    // Indices of the examples carrying `label`, in corpus order.
    std::vector<std::size_t> indices_of(std::string_view label) const;
};

enum class DatasetFormat {
    LabelTabText,  // one example per line: label \t text
    AgNewsCsv,     // quoted CSV: class index, title, description
};

DatasetFormat parse_dataset_format(std::string_view name);
std::string_view dataset_format_name(DatasetFormat format);

struct DatasetSpec {
    DatasetFormat format = DatasetFormat::LabelTabText;
    std::string name = "dataset";
    // When non-empty, fixes the class order and makes any other label an
    // error.  Empty means classes appear in order of first occurrence.
    std::vector<std::string> expected_classes;
    // AgNewsCsv only: keep just the headline column, dropping the body.
    bool title_only = true;
};

Dataset load_dataset(const std::filesystem::path& path, const DatasetSpec& spec);
Dataset load_dataset(std::istream& in, const DatasetSpec& spec, std::string_view origin);

// Writes examples one per line as label \t text (the LabelTabText format).
void save_examples(const std::vector<Example>& examples, const std::filesystem::path& path);

}  // namespace promptclass
