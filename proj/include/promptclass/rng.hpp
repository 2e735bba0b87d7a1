#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace promptclass {

// All sampling below is built from std::mt19937 seeded via std::seed_seq and
// rejection sampling, so the same seeds produce the same draws on every
// platform and standard library.

// FNV-1a over a label, used to derive independent substreams per phase.
std::uint32_t phase_hash(std::string_view phase);

// Generator for one (seed, phase, index) substream, e.g. the train draw of
// class 3.  Distinct phases never share a stream, so enlarging one sample
// (say the support set) cannot perturb another.
std::mt19937 make_substream(std::uint32_t seed, std::string_view phase, std::uint32_t index);

// Uniform draw from [0, bound) by rejection; bound must be nonzero.
std::uint32_t uniform_below(std::mt19937& gen, std::uint32_t bound);

// Reservoir sampling (Algorithm R): picks k of the indices [0, population)
// with equal probability, returned in ascending order.  k may exceed the
// population, in which case every index is returned.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k, std::mt19937& gen);

}  // namespace promptclass
