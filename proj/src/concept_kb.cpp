#include "promptclass/concept_kb.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "promptclass/error.hpp"
#include "promptclass/text.hpp"

namespace promptclass {

namespace {

std::size_t count_words(std::string_view s) {
    return text::word_spans(s).size();
}

double parse_weight(std::string_view field, std::string_view origin, std::size_t line_no) {
    double w = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), w);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw InputError(std::string(origin) + ":" + std::to_string(line_no) +
                         ": weight does not parse as a number: '" + std::string(field) + "'");
    }
    if (w < 0.0) {
        throw InputError(std::string(origin) + ":" + std::to_string(line_no) +
                         ": negative weight " + std::string(field));
    }
    return w;
}

}  // namespace

ConceptKb ConceptKb::ingest(std::vector<ConceptEntry> records) {
    for (auto& r : records) {
        r.instance = text::normalize_ws(text::fold_case(r.instance));
        r.concept_name = text::normalize_ws(text::fold_case(r.concept_name));
        if (r.instance.empty() || r.concept_name.empty()) {
            throw InputError("KB record has empty instance or concept after whitespace normalization");
        }
        if (!(r.weight >= 0.0)) {
            throw InputError("KB record for '" + r.instance + "' has negative or NaN weight");
        }
    }

    // Canonical order before any floating-point accumulation: permuting the
    // input records must yield a bit-identical KB.
    std::sort(records.begin(), records.end(), [](const ConceptEntry& a, const ConceptEntry& b) {
        if (a.instance != b.instance) return a.instance < b.instance;
        if (a.concept_name != b.concept_name) return a.concept_name < b.concept_name;
        return a.weight < b.weight;
    });

    ConceptKb kb;
    std::size_t i = 0;
    while (i < records.size()) {
        std::size_t j = i;
        const std::string& instance = records[i].instance;
        std::vector<RankedConcept> merged;  // concept ascending at this point
        while (j < records.size() && records[j].instance == instance) {
            if (!merged.empty() && merged.back().concept_name == records[j].concept_name) {
                merged.back().probability += records[j].weight;
            } else {
                merged.push_back({records[j].concept_name, records[j].weight});
            }
            ++j;
        }
        double total = 0.0;
        for (const auto& c : merged) total += c.probability;
        if (total > 0.0) {
            for (auto& c : merged) c.probability /= total;
        } else {
            // All-zero weights carry no ranking signal; fall back to uniform.
            for (auto& c : merged) c.probability = 1.0 / static_cast<double>(merged.size());
        }
        std::sort(merged.begin(), merged.end(), [](const RankedConcept& a, const RankedConcept& b) {
            if (a.probability != b.probability) return a.probability > b.probability;
            return a.concept_name < b.concept_name;
        });
        kb.entry_count_ += merged.size();
        kb.max_instance_words_ = std::max(kb.max_instance_words_, count_words(instance));
        kb.instances_.push_back(instance);
        kb.table_.emplace(instance, std::move(merged));
        i = j;
    }
    return kb;
}

ConceptKb ConceptKb::ingest_stream(std::istream& in, std::string_view origin) {
    std::vector<ConceptEntry> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw InputError(std::string(origin) + ":" + std::to_string(line_no) +
                             ": expected instance\\tconcept\\tweight");
        }
        std::string instance = text::normalize_ws(line.substr(0, t1));
        std::string concept_name = text::normalize_ws(line.substr(t1 + 1, t2 - t1 - 1));
        std::string weight_field = text::trim(line.substr(t2 + 1));
        if (instance.empty() || concept_name.empty()) {
            throw InputError(std::string(origin) + ":" + std::to_string(line_no) +
                             ": empty instance or concept");
        }
        double w = parse_weight(weight_field, origin, line_no);
        records.push_back({std::move(instance), std::move(concept_name), w});
    }
    return ingest(std::move(records));
}

ConceptKb ConceptKb::ingest_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open KB file: " + path.string());
    return ingest_stream(in, path.string());
}

void ConceptKb::save(std::ostream& out) const {
    char buf[64];
    for (const auto& instance : instances_) {
        for (const auto& c : table_.at(instance)) {
            std::snprintf(buf, sizeof(buf), "%.17g", c.probability);
            out << instance << '\t' << c.concept_name << '\t' << buf << '\n';
        }
    }
}

void ConceptKb::save_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write KB file: " + path.string());
    save(out);
}

std::vector<RankedConcept> ConceptKb::top_n_concepts(std::string_view instance, std::size_t n) const {
    if (n < 1) throw InputError("top_n_concepts requires n >= 1");
    const auto* all = all_concepts(instance);
    if (all == nullptr) return {};
    std::size_t take = std::min(n, all->size());
    return std::vector<RankedConcept>(all->begin(), all->begin() + static_cast<std::ptrdiff_t>(take));
}

const std::vector<RankedConcept>* ConceptKb::all_concepts(std::string_view instance) const {
    auto it = table_.find(text::normalize_ws(text::fold_case(instance)));
    return it == table_.end() ? nullptr : &it->second;
}

bool ConceptKb::contains(std::string_view instance) const {
    return all_concepts(instance) != nullptr;
}

std::vector<EntityMention> ConceptKb::detect_entities(std::string_view original) const {
    std::vector<EntityMention> mentions;
    if (max_instance_words_ == 0) return mentions;

    std::string folded = text::fold_case(original);
    std::vector<text::WordSpan> words = text::word_spans(folded);

    std::size_t w = 0;
    while (w < words.size()) {
        std::size_t matched_len = 0;
        std::size_t limit = std::min(max_instance_words_, words.size() - w);
        // Longest candidate first; spans run word-start to word-end, so a
        // match can never sit inside a larger word.
        for (std::size_t len = limit; len >= 1; --len) {
            std::size_t b = words[w].begin;
            std::size_t e = words[w + len - 1].end;
            std::string_view slice(folded.data() + b, e - b);
            auto it = table_.find(std::string(slice));
            if (it != table_.end()) {
                mentions.push_back({std::string(slice), b, e});
                matched_len = len;
                break;
            }
        }
        w += matched_len > 0 ? matched_len : 1;
    }
    return mentions;
}

}  // namespace promptclass
