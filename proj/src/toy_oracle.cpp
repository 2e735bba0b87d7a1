#include "promptclass/toy_oracle.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "promptclass/error.hpp"
#include "promptclass/text.hpp"

namespace promptclass {

ToyOracleSpec ToyOracleSpec::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open toy oracle spec: " + path.string());
    nlohmann::ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("toy oracle spec " + path.string() + ": " + e.what());
    }
    ToyOracleSpec spec;
    for (const auto& w : j.at("words")) spec.words.push_back(w.get<std::string>());
    if (j.contains("embedding_dim")) spec.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint32_t>();
    if (j.contains("max_len")) spec.max_len = j.at("max_len").get<std::size_t>();
    if (j.contains("triggers")) {
        for (const auto& [trigger, dist] : j.at("triggers").items()) {
            std::vector<std::pair<std::string, double>> entries;
            for (const auto& [word, p] : dist.items()) {
                entries.emplace_back(word, p.get<double>());
            }
            spec.triggers.emplace_back(trigger, std::move(entries));
        }
    }
    return spec;
}

ToyOracle::ToyOracle(ToyOracleSpec spec) : spec_(std::move(spec)) {
    id_to_word_ = {"<s>", "</s>", "<mask>", "<unk>"};
    for (const std::string& raw : spec_.words) {
        std::string w = text::fold_case(raw);
        if (w.empty()) throw InputError("toy oracle vocabulary contains an empty word");
        if (word_to_id_.count(w) != 0) throw InputError("toy oracle vocabulary duplicates '" + w + "'");
        word_to_id_.emplace(w, static_cast<TokenId>(id_to_word_.size()));
        id_to_word_.push_back(w);
    }

    for (const auto& [trigger_raw, entries] : spec_.triggers) {
        std::string trigger = text::fold_case(trigger_raw);
        std::vector<double> dense(id_to_word_.size(), 0.0);
        double total = 0.0;
        for (const auto& [word, p] : entries) {
            auto it = word_to_id_.find(text::fold_case(word));
            if (it == word_to_id_.end()) {
                throw InputError("toy oracle trigger '" + trigger + "' references unknown word '" +
                                 word + "'");
            }
            if (p < 0.0) throw InputError("toy oracle trigger '" + trigger + "' has negative mass");
            dense[static_cast<std::size_t>(it->second)] += p;
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw InputError("toy oracle trigger '" + trigger + "' distribution sums to " +
                             std::to_string(total) + ", expected 1");
        }
        if (trigger_dists_.count(trigger) != 0) {
            throw InputError("toy oracle duplicates trigger '" + trigger + "'");
        }
        trigger_dists_.emplace(std::move(trigger), std::move(dense));
    }
}

std::vector<TokenId> ToyOracle::tokenize(std::string_view fragment) const {
    std::vector<TokenId> out;
    for (const std::string& raw : text::whitespace_tokens(fragment)) {
        std::string w = text::strip_edge_punct(text::fold_case(raw));
        if (w.empty()) continue;
        auto it = word_to_id_.find(w);
        out.push_back(it == word_to_id_.end() ? kUnk : it->second);
    }
    return out;
}

std::optional<TokenId> ToyOracle::single_token_id(std::string_view word) const {
    std::string w = text::fold_case(word);
    auto it = word_to_id_.find(w);
    if (it == word_to_id_.end()) return std::nullopt;
    return it->second;
}

std::string ToyOracle::token_string(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_word_.size()) {
        throw std::runtime_error("toy oracle: token id out of range");
    }
    return id_to_word_[static_cast<std::size_t>(id)];
}

VocabDistribution ToyOracle::predict(const RenderedPrompt& prompt) const {
    // Triggers present in the text slot, in spec order so the mixture is
    // reproducible. Triggers are unique after construction.
    std::vector<const std::vector<double>*> active;
    std::vector<std::string> tokens;
    for (const std::string& raw : text::whitespace_tokens(prompt.source_text)) {
        tokens.push_back(text::strip_edge_punct(text::fold_case(raw)));
    }
    for (const auto& [trigger, dense] : spec_.triggers) {
        std::string folded = text::fold_case(trigger);
        bool present = false;
        for (const std::string& t : tokens) {
            if (t == folded) {
                present = true;
                break;
            }
        }
        if (present) {
            auto it = trigger_dists_.find(folded);
            active.push_back(&it->second);
        }
    }

    std::vector<double> probs(id_to_word_.size(), 0.0);
    if (active.empty()) {
        double u = 1.0 / static_cast<double>(probs.size());
        for (double& p : probs) p = u;
    } else {
        double w = 1.0 / static_cast<double>(active.size());
        for (const auto* dense : active) {
            for (std::size_t i = 0; i < probs.size(); ++i) probs[i] += w * (*dense)[i];
        }
    }
    return VocabDistribution(std::move(probs));
}

std::vector<double> ToyOracle::embed(TokenId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= id_to_word_.size()) {
        throw std::runtime_error("toy oracle: embed id out of range");
    }
    // mt19937 seeded via seed_seq is fully specified by the standard; raw
    // 32-bit draws are mapped to [-1, 1) without distribution adapters so
    // vectors are byte-identical across platforms.
    std::seed_seq seq{spec_.seed, static_cast<std::uint32_t>(id)};
    std::mt19937 gen(seq);
    std::vector<double> v(spec_.embedding_dim);
    for (double& x : v) {
        x = static_cast<double>(gen()) / 4294967296.0 * 2.0 - 1.0;
    }
    return v;
}

}  // namespace promptclass
