#include "promptclass/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "promptclass/error.hpp"
#include "promptclass/text.hpp"

namespace promptclass {

namespace {

// Class names for the four-way news corpus, indexed by the 1-based class
// ids used in its CSV distribution.
const std::vector<std::string> kAgNewsClasses = {"World", "Sports", "Business", "Sci/Tech"};

// Splits one CSV record into fields, honouring double-quoted fields with
// "" escapes.  Returns false on a malformed record (unterminated quote).
bool split_csv(const std::string& line, std::vector<std::string>& fields) {
    fields.clear();
    std::string cur;
    std::size_t i = 0;
    while (i <= line.size()) {
        if (i == line.size()) {
            fields.push_back(cur);
            break;
        }
        if (line[i] == ',') {
            fields.push_back(cur);
            cur.clear();
            ++i;
            continue;
        }
        if (line[i] == '"' && cur.empty()) {
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cur += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    closed = true;
                    break;
                }
                cur += line[i++];
            }
            if (!closed) return false;
            continue;
        }
        cur += line[i++];
    }
    return true;
}

}  // namespace

std::vector<std::size_t> Dataset::indices_of(std::string_view label) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (examples[i].label == label) out.push_back(i);
    }
    return out;
}

DatasetFormat parse_dataset_format(std::string_view name) {
    if (name == "tsv") return DatasetFormat::LabelTabText;
    if (name == "agnews-csv") return DatasetFormat::AgNewsCsv;
    throw InputError("unknown dataset format '" + std::string(name) +
                     "' (expected tsv or agnews-csv)");
}

std::string_view dataset_format_name(DatasetFormat format) {
    switch (format) {
        case DatasetFormat::LabelTabText: return "tsv";
        case DatasetFormat::AgNewsCsv: return "agnews-csv";
    }
    return "tsv";
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetSpec& spec) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path.string());
    return load_dataset(in, spec, path.string());
}

Dataset load_dataset(std::istream& in, const DatasetSpec& spec, std::string_view origin) {
    Dataset ds;
    ds.name = spec.name;

    const bool fixed_classes = !spec.expected_classes.empty();
    if (fixed_classes) {
        ds.classes = spec.expected_classes;
        for (const auto& c : ds.classes) {
            if (std::count(ds.classes.begin(), ds.classes.end(), c) != 1) {
                throw InputError("class list repeats label '" + c + "'");
            }
        }
    }
    auto known = [&](const std::string& label) {
        return std::find(ds.classes.begin(), ds.classes.end(), label) != ds.classes.end();
    };

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    auto fail = [&](const std::string& what) {
        throw InputError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        Example ex;
        if (spec.format == DatasetFormat::LabelTabText) {
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos) fail("expected label\\ttext");
            ex.label = line.substr(0, tab);
            ex.text = text::normalize_ws(line.substr(tab + 1));
            if (ex.label.empty()) fail("empty label");
            if (ex.text.empty()) fail("empty text");
            if (fixed_classes) {
                if (!known(ex.label)) fail("unknown label '" + ex.label + "'");
            } else if (!known(ex.label)) {
                ds.classes.push_back(ex.label);
            }
        } else {
            if (!split_csv(line, fields)) fail("unterminated quoted field");
            if (fields.size() < 2) fail("expected class index, title[, description]");
            int idx = 0;
            try {
                std::size_t used = 0;
                idx = std::stoi(fields[0], &used);
                if (used != fields[0].size()) throw std::invalid_argument("trailing junk");
            } catch (const std::exception&) {
                fail("malformed class index '" + fields[0] + "'");
            }
            if (idx < 1 || idx > static_cast<int>(kAgNewsClasses.size())) {
                fail("class index " + std::to_string(idx) + " out of range 1.." +
                     std::to_string(kAgNewsClasses.size()));
            }
            ex.label = kAgNewsClasses[static_cast<std::size_t>(idx - 1)];
            std::string body = fields[1];
            if (!spec.title_only && fields.size() > 2 && !fields[2].empty()) {
                body += ' ';
                body += fields[2];
            }
            ex.text = text::normalize_ws(body);
            if (ex.text.empty()) fail("empty text");
            if (fixed_classes && !known(ex.label)) fail("unknown label '" + ex.label + "'");
            if (!fixed_classes && !known(ex.label)) ds.classes.push_back(ex.label);
        }
        ds.examples.push_back(std::move(ex));
    }

    if (ds.examples.empty()) {
        throw InputError(std::string(origin) + ": dataset file has no examples");
    }
    return ds;
}

void save_examples(const std::vector<Example>& examples, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write example file: " + path.string());
    for (const Example& ex : examples) {
        out << ex.label << '\t' << ex.text << '\n';
    }
}

}  // namespace promptclass
