#include "promptclass/kshot.hpp"

#include <algorithm>
#include <set>

#include "promptclass/error.hpp"
#include "promptclass/rng.hpp"

namespace promptclass {

namespace {

KShotSplit sample_train_support(const Dataset& pool, int k, int support_size, std::uint32_t seed,
                                std::vector<std::size_t>* taken_out) {
    if (k < 1) throw InputError("k must be at least 1");
    if (support_size < 0) throw InputError("support size must not be negative");

    KShotSplit split;
    split.classes = pool.classes;
    split.seed = seed;
    split.k = k;
    split.support_size = support_size;

    std::vector<std::size_t> taken;
    for (std::size_t ci = 0; ci < pool.classes.size(); ++ci) {
        const std::string& label = pool.classes[ci];
        std::vector<std::size_t> population = pool.indices_of(label);
        if (population.empty()) {
            throw InputError("class '" + label + "' has no training examples");
        }

        auto train_gen = make_substream(seed, "train", static_cast<std::uint32_t>(ci));
        std::vector<std::size_t> train_pick =
            sample_indices(population.size(), static_cast<std::size_t>(k), train_gen);
        if (train_pick.size() < static_cast<std::size_t>(k)) {
            split.warnings.push_back("class '" + label + "' has only " +
                                     std::to_string(population.size()) + " examples for k=" +
                                     std::to_string(k) + "; using all of them");
        }
        std::set<std::size_t> in_train(train_pick.begin(), train_pick.end());
        for (std::size_t local : train_pick) {
            split.train.push_back(pool.examples[population[local]]);
            taken.push_back(population[local]);
        }

        // The support draw runs on its own substream over the leftover
        // examples, so the train pick above is unaffected by support_size.
        std::vector<std::size_t> remaining;
        for (std::size_t local = 0; local < population.size(); ++local) {
            if (in_train.count(local) == 0) remaining.push_back(local);
        }
        auto support_gen = make_substream(seed, "support", static_cast<std::uint32_t>(ci));
        std::vector<std::size_t> support_pick = sample_indices(
            remaining.size(), static_cast<std::size_t>(support_size), support_gen);
        if (support_size > 0 && support_pick.size() < static_cast<std::size_t>(support_size)) {
            split.warnings.push_back("class '" + label + "' has only " +
                                     std::to_string(remaining.size()) +
                                     " examples left for the support set (wanted " +
                                     std::to_string(support_size) + ")");
        }
        for (std::size_t ri : support_pick) {
            split.support.push_back(pool.examples[population[remaining[ri]]]);
            taken.push_back(population[remaining[ri]]);
        }
    }

    if (taken_out != nullptr) *taken_out = std::move(taken);
    return split;
}

}  // namespace

std::vector<std::string> KShotSplit::train_texts_of(std::string_view label) const {
    std::vector<std::string> out;
    for (const Example& ex : train) {
        if (ex.label == label) out.push_back(ex.text);
    }
    return out;
}

KShotSplit sample_kshot(const Dataset& pool, int k, int support_size, std::uint32_t seed) {
    std::vector<std::size_t> taken;
    KShotSplit split = sample_train_support(pool, k, support_size, seed, &taken);
    std::sort(taken.begin(), taken.end());
    std::size_t next = 0;
    for (std::size_t i = 0; i < pool.examples.size(); ++i) {
        if (next < taken.size() && taken[next] == i) {
            ++next;
            continue;
        }
        split.test.push_back(pool.examples[i]);
    }
    return split;
}

KShotSplit sample_kshot(const Dataset& pool, const Dataset& test, int k, int support_size,
                        std::uint32_t seed) {
    if (std::set<std::string>(pool.classes.begin(), pool.classes.end()) !=
        std::set<std::string>(test.classes.begin(), test.classes.end())) {
        throw InputError("train pool and test corpus disagree on the class set");
    }
    KShotSplit split = sample_train_support(pool, k, support_size, seed, nullptr);
    split.test = test.examples;
    return split;
}

void save_split(const KShotSplit& split, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_examples(split.train, dir / "train.tsv");
    save_examples(split.support, dir / "support.tsv");
    save_examples(split.test, dir / "test.tsv");
}

}  // namespace promptclass
