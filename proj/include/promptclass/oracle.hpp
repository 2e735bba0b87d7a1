#pragma once

#include <vector>

#include "promptclass/prompting.hpp"
#include "promptclass/tokenizer.hpp"

namespace promptclass {

// Probability distribution over the oracle's vocabulary at the mask
// position. Construction validates that every probability lies in [0, 1]
// and the total mass is 1 within 1e-6.
class VocabDistribution {
public:
    explicit VocabDistribution(std::vector<double> probabilities);

    double prob(TokenId id) const;
    double total() const { return total_; }
    std::size_t size() const { return probabilities_.size(); }
    const std::vector<double>& probabilities() const { return probabilities_; }

private:
    std::vector<double> probabilities_;
    double total_ = 0.0;
};

// A masked-LM behind a uniform contract: tokenization, mask prediction and
// a static input embedding per vocabulary token. Implementations must be
// deterministic: identical prompts yield identical distributions.
class ScoringOracle : public Tokenizer {
public:
    virtual VocabDistribution predict(const RenderedPrompt& prompt) const = 0;
    virtual std::vector<double> embed(TokenId id) const = 0;

    // Whether predict() may be called from several threads at once.
    virtual bool concurrent_predict_safe() const { return false; }
};

// Cosine distance in [0, 2]; pairs involving a zero-norm vector rank last
// with distance 2.
double cosine_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace promptclass
