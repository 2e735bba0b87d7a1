#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "promptclass/dataset.hpp"

namespace promptclass {

// One seeded experiment split: k training examples per class, up to S
// support examples per class disjoint from them, and a held-out test set.
struct KShotSplit {
    std::vector<std::string> classes;
    std::vector<Example> train;
    std::vector<Example> support;
    std::vector<Example> test;
    std::uint32_t seed = 0;
    int k = 0;
    int support_size = 0;
    // Classes whose population could not cover the request (all their
    // examples were taken instead).
    std::vector<std::string> warnings;

    std::vector<std::string> train_texts_of(std::string_view label) const;
};

// Samples train and support per class from `pool`; the remainder of the
// pool becomes the test set.  Identical (pool, k, support_size, seed)
// always produce identical splits, and the train draw does not depend on
// support_size.
KShotSplit sample_kshot(const Dataset& pool, int k, int support_size, std::uint32_t seed);

// Same sampling, but evaluation uses a separate held-out corpus (the usual
// train-file / test-file arrangement).  Test classes must match the pool's.
KShotSplit sample_kshot(const Dataset& pool, const Dataset& test, int k, int support_size,
                        std::uint32_t seed);

// Records a split as three label\ttext files (train/support/test) under
// `dir`, creating it if needed.
void save_split(const KShotSplit& split, const std::filesystem::path& dir);

}  // namespace promptclass
