#include "promptclass/scoring.hpp"

#include <cstdio>
#include <stdexcept>

#include "promptclass/error.hpp"

namespace promptclass {

const ClassScore* Prediction::find(std::string_view class_label) const {
    for (const auto& cs : class_scores) {
        if (cs.label == class_label) return &cs;
    }
    return nullptr;
}

double class_score(const VocabDistribution& dist, const std::vector<std::string>& words,
                   const ScoringOracle& oracle) {
    if (words.empty()) throw InputError("class_score needs at least one label word");
    double total = 0.0;
    for (const std::string& w : words) {
        auto id = oracle.single_token_id(w);
        if (!id.has_value()) {
            throw InputError("label word '" + w + "' is not a single vocabulary token");
        }
        total += dist.prob(*id);
    }
    return total / static_cast<double>(words.size());
}

Prediction classify(const ScoringOracle& oracle, const PromptTemplate& tmpl,
                    const Verbalizer& verbalizer, std::string_view text) {
    if (verbalizer.entries().size() < 2) {
        throw InputError("classification needs a verbalizer with at least two classes");
    }

    RenderInfo info;
    RenderedPrompt prompt = render(tmpl, text, oracle, &info);

    VocabDistribution dist = [&] {
        try {
            return oracle.predict(prompt);
        } catch (const std::exception& e) {
            throw std::runtime_error(std::string("oracle failed on prompt built from \"") +
                                     prompt.source_text + "\": " + e.what());
        }
    }();

    Prediction out;
    out.truncated = info.truncated;
    out.dropped_text_tokens = info.dropped_text_tokens;
    out.class_scores.reserve(verbalizer.entries().size());
    for (const VerbalizerEntry& entry : verbalizer.entries()) {
        ClassScore cs;
        cs.label = entry.label;
        for (const std::string& w : entry.words) {
            auto id = oracle.single_token_id(w);
            if (!id.has_value()) {
                throw InputError("label word '" + w + "' of class '" + entry.label +
                                 "' is not a single vocabulary token");
            }
            cs.per_word.emplace_back(w, dist.prob(*id));
        }
        cs.score = class_score(dist, entry.words, oracle);
        out.class_scores.push_back(std::move(cs));
    }
    // Strict > keeps the earliest class on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.class_scores.size(); ++i) {
        if (out.class_scores[i].score > out.class_scores[best].score) best = i;
    }
    out.label = out.class_scores[best].label;
    return out;
}

std::string format_prediction_line(std::string_view text_id, const Prediction& prediction) {
    std::string line(text_id);
    line += '\t';
    line += prediction.label;
    char buf[32];
    for (const ClassScore& cs : prediction.class_scores) {
        std::snprintf(buf, sizeof buf, "%.6f", cs.score);
        line += '\t';
        line += cs.label;
        line += '=';
        line += buf;
    }
    return line;
}

}  // namespace promptclass
