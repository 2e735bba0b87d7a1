#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "promptclass/concept_kb.hpp"
#include "promptclass/oracle.hpp"

namespace promptclass {

enum class Provenance { ClassAnchor, TextEntity };

struct Candidate {
    std::string word;
    double retrieval_prob = 0.0;
    Provenance provenance = Provenance::ClassAnchor;
};

// Unrefined expansion pool for one class. The class label itself is always
// the first member; inserting a word twice keeps the first occurrence.
class CandidateSet {
public:
    explicit CandidateSet(std::string_view label);

    const std::string& label() const { return label_; }
    const std::vector<Candidate>& candidates() const { return candidates_; }

    // Returns false when the word was already present.
    bool insert(std::string word, double retrieval_prob, Provenance provenance);

    // Union with another pool for the same label; first occurrence wins.
    void merge(const CandidateSet& other);

    bool contains(std::string_view word) const;

    void note_shape_drop() { ++dropped_multiword_; }
    std::size_t dropped_multiword() const { return dropped_multiword_; }

private:
    std::string label_;
    std::vector<Candidate> candidates_;
    std::size_t dropped_multiword_ = 0;
};

enum class VerbalizerMode { Plain, AnchorOnly, Full };

VerbalizerMode parse_verbalizer_mode(std::string_view name);
std::string_view verbalizer_mode_name(VerbalizerMode mode);

struct VerbalizerEntry {
    std::string label;
    std::vector<std::string> words;  // label words, class-name words first
};

struct VerbalizerMeta {
    int concept_top_n = 5;   // retrieval width per anchor/entity
    int refine_top_m = 50;   // expansion words kept per class
    VerbalizerMode mode = VerbalizerMode::Full;
    int template_id = 0;
};

// Counters surfaced by construction; all drops are reported, never silent.
struct BuildStats {
    std::size_t dropped_multiword = 0;   // concept was not a single word
    std::size_t dropped_vocab = 0;       // not a single vocabulary token
    std::size_t dropped_derivation = 0;  // morphological derivation of the class name
    std::size_t cross_class_overlap = 0; // words appearing in more than one class
};

// The per-class label-word lists plus the construction parameters.
// Immutable; persists to a tab-separated key-value document that
// round-trips byte-identically.
class Verbalizer {
public:
    Verbalizer(std::vector<VerbalizerEntry> entries, VerbalizerMeta meta);

    const std::vector<VerbalizerEntry>& entries() const { return entries_; }
    const VerbalizerEntry* find(std::string_view label) const;
    const VerbalizerMeta& meta() const { return meta_; }

    void save(std::ostream& out) const;
    void save_file(const std::filesystem::path& path) const;
    std::string to_string() const;
    static Verbalizer load(std::istream& in, std::string_view origin);
    static Verbalizer load_file(const std::filesystem::path& path);

private:
    std::vector<VerbalizerEntry> entries_;
    VerbalizerMeta meta_;
};

// Class-name sub-words: the case-folded label split on non-alphanumerics.
std::vector<std::string> label_subwords(std::string_view label);

// The class name as scoreable label words: the folded label itself when it
// is a single vocabulary token, otherwise its resolvable sub-words. Throws
// InputError when nothing resolves.
std::vector<std::string> resolve_label_words(std::string_view label, const ScoringOracle& oracle);

// Concept retrieval keyed on the class name (every sub-word of the label
// acts as an anchor instance).
CandidateSet expand_anchor(const ConceptKb& kb, std::string_view label_name, std::size_t top_n);

// Concept retrieval keyed on the entities detected in the class's texts.
CandidateSet expand_from_texts(const ConceptKb& kb, std::string_view label_name,
                               const std::vector<std::string>& texts, std::size_t top_n);

// Ranks candidates by cosine distance between word embedding and class-name
// embedding (mean of sub-word embeddings for multi-word names), drops
// morphological derivations of the class name, keeps the closest
// `top_m` words. Returns the class-name words followed by the kept words.
std::vector<std::string> refine(const CandidateSet& candidates, std::string_view label_name,
                                const ScoringOracle& embedder, std::size_t top_m,
                                BuildStats* stats = nullptr);

// plain: class name only. anchor-only: refine(expand_anchor).
// full: refine(expand_anchor merged with expand_from_texts).
// `texts_by_class` must cover every class in Full mode.
Verbalizer build_verbalizer(const ConceptKb& kb, const std::vector<std::string>& class_labels,
                            const std::map<std::string, std::vector<std::string>>& texts_by_class,
                            const ScoringOracle& oracle, std::size_t top_n, std::size_t top_m,
                            VerbalizerMode mode, int template_id, BuildStats* stats = nullptr);

}  // namespace promptclass
