#include "promptclass/rng.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace promptclass {

std::uint32_t phase_hash(std::string_view phase) {
    std::uint32_t h = 2166136261u;
    for (unsigned char c : phase) {
        h ^= c;
        h *= 16777619u;
    }
    return h;
}

std::mt19937 make_substream(std::uint32_t seed, std::string_view phase, std::uint32_t index) {
    std::seed_seq seq{seed, phase_hash(phase), index};
    return std::mt19937(seq);
}

std::uint32_t uniform_below(std::mt19937& gen, std::uint32_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be nonzero");
    // Reject draws from the tail that would bias small residues.
    const std::uint32_t limit =
        std::numeric_limits<std::uint32_t>::max() - std::numeric_limits<std::uint32_t>::max() % bound;
    std::uint32_t draw;
    do {
        draw = gen();
    } while (draw >= limit);
    return draw % bound;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, std::mt19937& gen) {
    if (k >= population) {
        std::vector<std::size_t> all(population);
        for (std::size_t i = 0; i < population; ++i) all[i] = i;
        return all;
    }
    std::vector<std::size_t> reservoir(k);
    for (std::size_t i = 0; i < k; ++i) reservoir[i] = i;
    for (std::size_t i = k; i < population; ++i) {
        std::size_t j = uniform_below(gen, static_cast<std::uint32_t>(i + 1));
        if (j < k) reservoir[j] = i;
    }
    std::sort(reservoir.begin(), reservoir.end());
    return reservoir;
}

}  // namespace promptclass
