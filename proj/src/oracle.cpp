#include "promptclass/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace promptclass {

VocabDistribution::VocabDistribution(std::vector<double> probabilities)
    : probabilities_(std::move(probabilities)) {
    double total = 0.0;
    for (double p : probabilities_) {
        if (!(p >= 0.0) || p > 1.0) {
            throw std::runtime_error("vocab distribution has probability outside [0, 1]: " +
                                     std::to_string(p));
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::runtime_error("vocab distribution mass is " + std::to_string(total) +
                                 ", expected 1 within 1e-6");
    }
    total_ = total;
}

double VocabDistribution::prob(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= probabilities_.size()) {
        throw std::runtime_error("token id " + std::to_string(id) +
                                 " outside vocabulary of size " + std::to_string(probabilities_.size()));
    }
    return probabilities_[static_cast<std::size_t>(id)];
}

double cosine_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::runtime_error("cosine_distance: dimension mismatch");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 2.0;
    return 1.0 - dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace promptclass
