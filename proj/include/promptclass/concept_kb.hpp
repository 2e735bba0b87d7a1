#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace promptclass {

// One (instance, concept, weight) triple as read from a knowledge source.
// Instance and concept are folded to lowercase and whitespace-normalized at
// ingest; weight is a non-negative co-occurrence count or probability mass.
struct ConceptEntry {
    std::string instance;
    std::string concept_name;
    double weight = 0.0;
};

struct RankedConcept {
    std::string concept_name;
    double probability = 0.0;
};

// A dictionary hit inside a text. `surface` is the case-folded slice
// [begin, end) of the original text and is always a KB instance.
struct EntityMention {
    std::string surface;
    std::size_t begin = 0;
    std::size_t end = 0;
};

// IsA store mapping instance strings to probability-ranked concept lists.
// Immutable after ingest; all queries are const and safe to call from
// concurrent threads.
class ConceptKb {
public:
    ConceptKb() = default;

    // Builds a KB from raw triples. Duplicate (instance, concept) pairs are
    // merged by weight summation, then each instance's weights are normalized
    // to a probability distribution. Records are canonically ordered before
    // accumulation, so any permutation of the input yields an identical KB.
    static ConceptKb ingest(std::vector<ConceptEntry> records);

    // Loads the tab-separated triple format: instance \t concept \t weight,
    // one per line, '#' lines ignored. Throws InputError with the offending
    // line number on malformed records.
    static ConceptKb ingest_file(const std::filesystem::path& path);
    static ConceptKb ingest_stream(std::istream& in, std::string_view origin);

    // Writes the normalized KB in the same triple format with probabilities
    // as weights. Instances ascending, concepts in rank order; output is
    // byte-stable across runs.
    void save(std::ostream& out) const;
    void save_file(const std::filesystem::path& path) const;

    // Top-n concepts for an instance, probability descending, ties broken by
    // concept string ascending. Unknown instance yields an empty list.
    std::vector<RankedConcept> top_n_concepts(std::string_view instance, std::size_t n) const;

    // Full ranked concept list, or nullptr for an unknown instance.
    const std::vector<RankedConcept>* all_concepts(std::string_view instance) const;

    bool contains(std::string_view instance) const;

    // Greedy left-to-right longest match of KB instances against the text at
    // word boundaries, case-folded. Mentions are non-overlapping and ordered
    // by start offset.
    std::vector<EntityMention> detect_entities(std::string_view text) const;

    std::size_t instance_count() const { return instances_.size(); }
    std::size_t entry_count() const { return entry_count_; }
    const std::vector<std::string>& instances() const { return instances_; }

private:
    std::unordered_map<std::string, std::vector<RankedConcept>> table_;
    std::vector<std::string> instances_;   // sorted ascending
    std::size_t entry_count_ = 0;          // (instance, concept) pairs after merging
    std::size_t max_instance_words_ = 0;
};

}  // namespace promptclass
