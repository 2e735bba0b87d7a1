#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "promptclass/oracle.hpp"
#include "promptclass/prompting.hpp"
#include "promptclass/verbalizer.hpp"

namespace promptclass {

// Mean mask-position probability over one class's label words together with
// the per-word breakdown that produced it.
struct ClassScore {
    std::string label;
    double score = 0.0;
    std::vector<std::pair<std::string, double>> per_word;
};

// Outcome of scoring one text against every class.  Classes keep the
// verbalizer's declaration order; `label` is the argmax with ties resolved
// in favour of the earliest class.
struct Prediction {
    std::string label;
    std::vector<ClassScore> class_scores;
    bool truncated = false;
    std::size_t dropped_text_tokens = 0;

    const ClassScore* find(std::string_view class_label) const;
};

// Mean probability assigned to `words` by `dist`.  Every word must resolve
// to a single vocabulary token; a miss is an upstream contract breach and
// raises instead of being skipped.
double class_score(const VocabDistribution& dist, const std::vector<std::string>& words,
                   const ScoringOracle& oracle);

// Renders the prompt once, queries the oracle once at the mask position and
// scores every class in the verbalizer.
Prediction classify(const ScoringOracle& oracle, const PromptTemplate& tmpl,
                    const Verbalizer& verbalizer, std::string_view text);

// One tab-separated output line: id, predicted label, then one
// `class=probability` field per class with fixed 6-decimal formatting.
std::string format_prediction_line(std::string_view text_id, const Prediction& prediction);

}  // namespace promptclass
