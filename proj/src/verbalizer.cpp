#include "promptclass/verbalizer.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "promptclass/error.hpp"
#include "promptclass/stemmer.hpp"
#include "promptclass/text.hpp"

namespace promptclass {

namespace {

bool is_single_word(std::string_view w) {
    return !w.empty() && w.find(' ') == std::string_view::npos;
}

void insert_concepts(CandidateSet& cs, const std::vector<RankedConcept>& concepts,
                     Provenance provenance) {
    for (const auto& c : concepts) {
        if (!is_single_word(c.concept_name)) {
            cs.note_shape_drop();
            continue;
        }
        cs.insert(c.concept_name, c.probability, provenance);
    }
}

}  // namespace

CandidateSet::CandidateSet(std::string_view label)
    : label_(text::normalize_ws(text::fold_case(label))) {
    if (label_.empty()) throw InputError("class label is empty");
    candidates_.push_back({label_, 1.0, Provenance::ClassAnchor});
}

bool CandidateSet::insert(std::string word, double retrieval_prob, Provenance provenance) {
    if (contains(word)) return false;
    candidates_.push_back({std::move(word), retrieval_prob, provenance});
    return true;
}

void CandidateSet::merge(const CandidateSet& other) {
    if (other.label_ != label_) {
        throw InputError("cannot merge candidate sets for different labels: '" + label_ +
                         "' vs '" + other.label_ + "'");
    }
    for (const auto& c : other.candidates_) {
        insert(c.word, c.retrieval_prob, c.provenance);
    }
    dropped_multiword_ += other.dropped_multiword_;
}

bool CandidateSet::contains(std::string_view word) const {
    for (const auto& c : candidates_) {
        if (c.word == word) return true;
    }
    return false;
}

VerbalizerMode parse_verbalizer_mode(std::string_view name) {
    if (name == "plain") return VerbalizerMode::Plain;
    if (name == "anchor-only") return VerbalizerMode::AnchorOnly;
    if (name == "full") return VerbalizerMode::Full;
    throw InputError("unknown verbalizer mode '" + std::string(name) +
                     "' (expected plain, anchor-only or full)");
}

std::string_view verbalizer_mode_name(VerbalizerMode mode) {
    switch (mode) {
        case VerbalizerMode::Plain: return "plain";
        case VerbalizerMode::AnchorOnly: return "anchor-only";
        case VerbalizerMode::Full: return "full";
    }
    return "full";
}

std::vector<std::string> label_subwords(std::string_view label) {
    std::string folded = text::fold_case(label);
    std::vector<std::string> out;
    for (const auto& span : text::word_spans(folded)) {
        std::string w = folded.substr(span.begin, span.end - span.begin);
        if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
    }
    if (out.empty()) throw InputError("class label '" + std::string(label) + "' has no word characters");
    return out;
}

std::vector<std::string> resolve_label_words(std::string_view label, const ScoringOracle& oracle) {
    std::string folded = text::normalize_ws(text::fold_case(label));
    if (oracle.single_token_id(folded).has_value()) return {folded};
    std::vector<std::string> out;
    for (const std::string& sub : label_subwords(label)) {
        if (oracle.single_token_id(sub).has_value()) out.push_back(sub);
    }
    if (out.empty()) {
        throw InputError("class name '" + std::string(label) +
                         "' is not representable in the oracle vocabulary");
    }
    return out;
}

CandidateSet expand_anchor(const ConceptKb& kb, std::string_view label_name, std::size_t top_n) {
    if (top_n < 1) throw InputError("anchor expansion requires top_n >= 1");
    CandidateSet cs(label_name);
    for (const std::string& anchor : label_subwords(label_name)) {
        insert_concepts(cs, kb.top_n_concepts(anchor, top_n), Provenance::ClassAnchor);
    }
    return cs;
}

CandidateSet expand_from_texts(const ConceptKb& kb, std::string_view label_name,
                               const std::vector<std::string>& texts, std::size_t top_n) {
    if (top_n < 1) throw InputError("text expansion requires top_n >= 1");
    if (texts.empty()) throw InputError("text expansion requires a non-empty text list");
    CandidateSet cs(label_name);
    for (const std::string& t : texts) {
        for (const EntityMention& mention : kb.detect_entities(t)) {
            insert_concepts(cs, kb.top_n_concepts(mention.surface, top_n), Provenance::TextEntity);
        }
    }
    return cs;
}

std::vector<std::string> refine(const CandidateSet& candidates, std::string_view label_name,
                                const ScoringOracle& embedder, std::size_t top_m,
                                BuildStats* stats) {
    if (top_m < 1) throw InputError("refinement requires top_m >= 1");

    std::vector<std::string> label_words = resolve_label_words(label_name, embedder);
    std::vector<std::string> subwords = label_subwords(label_name);

    // Class-name vector: mean of the resolvable sub-word embeddings (the
    // single embedding for one-word names).
    std::vector<double> anchor_vec;
    std::size_t contributing = 0;
    for (const std::string& w : label_words) {
        auto id = embedder.single_token_id(w);
        std::vector<double> v = embedder.embed(*id);
        if (anchor_vec.empty()) anchor_vec.assign(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) anchor_vec[i] += v[i];
        ++contributing;
    }
    for (double& x : anchor_vec) x /= static_cast<double>(contributing);

    std::string folded_label = text::normalize_ws(text::fold_case(label_name));
    auto is_label_word = [&](const std::string& w) {
        if (w == folded_label) return true;
        if (std::find(label_words.begin(), label_words.end(), w) != label_words.end()) return true;
        return std::find(subwords.begin(), subwords.end(), w) != subwords.end();
    };

    struct Scored {
        double distance;
        std::string word;
    };
    std::vector<Scored> scored;
    for (const Candidate& c : candidates.candidates()) {
        if (is_label_word(c.word)) continue;
        auto id = embedder.single_token_id(c.word);
        if (!id.has_value()) {
            if (stats != nullptr) ++stats->dropped_vocab;
            continue;
        }
        bool derivation = false;
        for (const std::string& sub : subwords) {
            if (is_derivation_of(c.word, sub)) {
                derivation = true;
                break;
            }
        }
        if (derivation) {
            if (stats != nullptr) ++stats->dropped_derivation;
            continue;
        }
        scored.push_back({cosine_distance(embedder.embed(*id), anchor_vec), c.word});
    }
    if (stats != nullptr) stats->dropped_multiword += candidates.dropped_multiword();

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.word < b.word;
    });

    std::vector<std::string> out = label_words;
    std::size_t take = std::min(top_m, scored.size());
    for (std::size_t i = 0; i < take; ++i) out.push_back(scored[i].word);
    return out;
}

Verbalizer build_verbalizer(const ConceptKb& kb, const std::vector<std::string>& class_labels,
                            const std::map<std::string, std::vector<std::string>>& texts_by_class,
                            const ScoringOracle& oracle, std::size_t top_n, std::size_t top_m,
                            VerbalizerMode mode, int template_id, BuildStats* stats) {
    if (class_labels.empty()) throw InputError("verbalizer needs at least one class");
    {
        std::set<std::string> folded;
        for (const auto& label : class_labels) {
            if (!folded.insert(text::normalize_ws(text::fold_case(label))).second) {
                throw InputError("duplicate class label '" + label + "'");
            }
        }
    }

    std::vector<VerbalizerEntry> entries;
    entries.reserve(class_labels.size());
    for (const std::string& label : class_labels) {
        std::vector<std::string> words;
        switch (mode) {
            case VerbalizerMode::Plain:
                words = resolve_label_words(label, oracle);
                break;
            case VerbalizerMode::AnchorOnly:
                words = refine(expand_anchor(kb, label, top_n), label, oracle, top_m, stats);
                break;
            case VerbalizerMode::Full: {
                auto it = texts_by_class.find(label);
                if (it == texts_by_class.end() || it->second.empty()) {
                    throw InputError("full mode needs texts for class '" + label + "'");
                }
                CandidateSet pool = expand_anchor(kb, label, top_n);
                pool.merge(expand_from_texts(kb, label, it->second, top_n));
                words = refine(pool, label, oracle, top_m, stats);
                break;
            }
        }
        entries.push_back({label, std::move(words)});
    }

    if (stats != nullptr) {
        // Words shared by several classes are allowed; report how many.
        std::map<std::string, int> uses;
        for (const auto& e : entries) {
            for (const auto& w : e.words) ++uses[w];
        }
        for (const auto& [w, count] : uses) {
            if (count > 1) ++stats->cross_class_overlap;
        }
    }

    VerbalizerMeta meta;
    meta.concept_top_n = static_cast<int>(top_n);
    meta.refine_top_m = static_cast<int>(top_m);
    meta.mode = mode;
    meta.template_id = template_id;
    return Verbalizer(std::move(entries), meta);
}

Verbalizer::Verbalizer(std::vector<VerbalizerEntry> entries, VerbalizerMeta meta)
    : entries_(std::move(entries)), meta_(meta) {
    if (entries_.empty()) throw InputError("verbalizer has no classes");
    std::set<std::string> labels;
    for (const auto& e : entries_) {
        if (!labels.insert(e.label).second) throw InputError("duplicate class label '" + e.label + "'");
        if (e.words.empty()) throw InputError("class '" + e.label + "' has no label words");
        std::set<std::string> words;
        for (const auto& w : e.words) {
            if (w.empty() || w.find_first_of(" \t") != std::string::npos) {
                throw InputError("class '" + e.label + "' has a malformed label word '" + w + "'");
            }
            if (!words.insert(w).second) {
                throw InputError("class '" + e.label + "' repeats label word '" + w + "'");
            }
        }
    }
}

const VerbalizerEntry* Verbalizer::find(std::string_view label) const {
    for (const auto& e : entries_) {
        if (e.label == label) return &e;
    }
    return nullptr;
}

void Verbalizer::save(std::ostream& out) const {
    out << "# promptclass verbalizer v1\n";
    out << "n\t" << meta_.concept_top_n << '\n';
    out << "m\t" << meta_.refine_top_m << '\n';
    out << "mode\t" << verbalizer_mode_name(meta_.mode) << '\n';
    out << "template_id\t" << meta_.template_id << '\n';
    for (const auto& e : entries_) {
        out << "class\t" << e.label << '\t';
        for (std::size_t i = 0; i < e.words.size(); ++i) {
            if (i > 0) out << ' ';
            out << e.words[i];
        }
        out << '\n';
    }
}

void Verbalizer::save_file(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write verbalizer file: " + path.string());
    save(out);
}

std::string Verbalizer::to_string() const {
    std::ostringstream out;
    save(out);
    return out.str();
}

Verbalizer Verbalizer::load(std::istream& in, std::string_view origin) {
    std::vector<VerbalizerEntry> entries;
    VerbalizerMeta meta;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) {
        throw InputError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos) fail("expected key\\tvalue");
        std::string key = line.substr(0, tab);
        std::string value = line.substr(tab + 1);
        if (key == "n") {
            meta.concept_top_n = std::stoi(value);
        } else if (key == "m") {
            meta.refine_top_m = std::stoi(value);
        } else if (key == "mode") {
            meta.mode = parse_verbalizer_mode(value);
        } else if (key == "template_id") {
            meta.template_id = std::stoi(value);
        } else if (key == "class") {
            std::size_t tab2 = value.find('\t');
            if (tab2 == std::string::npos) fail("expected class\\tlabel\\twords");
            VerbalizerEntry e;
            e.label = value.substr(0, tab2);
            e.words = text::whitespace_tokens(value.substr(tab2 + 1));
            entries.push_back(std::move(e));
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (entries.empty()) {
        throw InputError(std::string(origin) + ": verbalizer file has no class entries");
    }
    return Verbalizer(std::move(entries), meta);
}

Verbalizer Verbalizer::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open verbalizer file: " + path.string());
    return load(in, path.string());
}

}  // namespace promptclass
