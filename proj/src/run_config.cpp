#include "promptclass/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "json.hpp"

#include "promptclass/error.hpp"

namespace promptclass {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& object, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (known.count(key) == 0) {
            throw InputError("config: unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_into(const json& object, const char* key, T& target) {
    auto it = object.find(key);
    if (it == object.end()) return;
    try {
        target = it->get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("config: key '") + key + "' has the wrong type");
    }
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path.string());
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw InputError("config file is not valid JSON: " + path.string());
    if (!doc.is_object()) throw InputError("config file must hold a JSON object");

    reject_unknown_keys(doc,
                        {"dataset", "kb", "templates", "template_id", "mode", "n", "m", "k",
                         "support_size", "seeds", "oracle", "output_dir", "threads",
                         "freeze_verbalizer", "select_on_support", "candidate_template_ids",
                         "candidate_top_m"},
                        "the top level");

    RunConfig config;
    if (doc.contains("dataset")) {
        const json& d = doc.at("dataset");
        if (!d.is_object()) throw InputError("config: 'dataset' must be an object");
        reject_unknown_keys(d, {"name", "train", "test", "format", "title_only", "classes"},
                            "'dataset'");
        read_into(d, "name", config.dataset.name);
        read_into(d, "train", config.dataset.train_path);
        read_into(d, "test", config.dataset.test_path);
        if (d.contains("format")) {
            config.dataset.format = parse_dataset_format(d.at("format").get<std::string>());
        }
        read_into(d, "title_only", config.dataset.title_only);
        read_into(d, "classes", config.dataset.classes);
    }
    read_into(doc, "kb", config.kb_path);
    read_into(doc, "templates", config.templates_path);
    read_into(doc, "template_id", config.template_id);
    if (doc.contains("mode")) {
        config.mode = parse_verbalizer_mode(doc.at("mode").get<std::string>());
    }
    read_into(doc, "n", config.top_n);
    read_into(doc, "m", config.top_m);
    read_into(doc, "k", config.k);
    read_into(doc, "support_size", config.support_size);
    read_into(doc, "seeds", config.seeds);
    if (doc.contains("oracle")) {
        const json& o = doc.at("oracle");
        if (!o.is_object()) throw InputError("config: 'oracle' must be an object");
        reject_unknown_keys(o, {"kind", "spec", "url"}, "'oracle'");
        read_into(o, "kind", config.oracle.kind);
        read_into(o, "spec", config.oracle.spec_path);
        read_into(o, "url", config.oracle.url);
    }
    read_into(doc, "output_dir", config.output_dir);
    read_into(doc, "threads", config.threads);
    read_into(doc, "freeze_verbalizer", config.freeze_verbalizer);
    read_into(doc, "select_on_support", config.select_on_support);
    read_into(doc, "candidate_template_ids", config.candidate_template_ids);
    read_into(doc, "candidate_top_m", config.candidate_top_m);
    return config;
}

void apply_overrides(RunConfig& config, const RunOverrides& overrides) {
    if (overrides.template_id) config.template_id = *overrides.template_id;
    if (overrides.mode) config.mode = parse_verbalizer_mode(*overrides.mode);
    if (overrides.top_n) config.top_n = *overrides.top_n;
    if (overrides.top_m) config.top_m = *overrides.top_m;
    if (overrides.k) config.k = *overrides.k;
    if (overrides.support_size) config.support_size = *overrides.support_size;
    if (overrides.seeds) config.seeds = *overrides.seeds;
    if (overrides.output_dir) config.output_dir = *overrides.output_dir;
    if (overrides.threads) config.threads = *overrides.threads;
    if (overrides.freeze_verbalizer) config.freeze_verbalizer = *overrides.freeze_verbalizer;
    if (overrides.select_on_support) config.select_on_support = *overrides.select_on_support;
}

void validate_numbers(const RunConfig& config) {
    if (config.top_n < 1) throw InputError("config: n must be at least 1");
    if (config.top_m < 1) throw InputError("config: m must be at least 1");
    if (config.k < 1) throw InputError("config: k must be at least 1");
    if (config.support_size < 0) throw InputError("config: support_size must not be negative");
    if (config.template_id < 1) throw InputError("config: template_id must be at least 1");
    if (config.seeds.empty()) throw InputError("config: seeds must not be empty");
    if (std::set<std::uint32_t>(config.seeds.begin(), config.seeds.end()).size() !=
        config.seeds.size()) {
        throw InputError("config: seeds must be distinct");
    }
    if (config.threads < 1) throw InputError("config: threads must be at least 1");
    if (config.oracle.kind != "toy" && config.oracle.kind != "http") {
        throw InputError("config: oracle kind must be toy or http");
    }
    for (int id : config.candidate_template_ids) {
        if (id < 1) throw InputError("config: candidate template ids must be at least 1");
    }
    for (int m : config.candidate_top_m) {
        if (m < 1) throw InputError("config: candidate m values must be at least 1");
    }
}

std::string canonical_config_string(const RunConfig& c) {
    std::string out;
    auto add = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    auto join_ints = [](const auto& values) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) s += ',';
            s += std::to_string(values[i]);
        }
        return s;
    };
    auto join_strings = [](const std::vector<std::string>& values) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) s += ',';
            s += values[i];
        }
        return s;
    };

    add("dataset.name", c.dataset.name);
    add("dataset.train", c.dataset.train_path);
    add("dataset.test", c.dataset.test_path);
    add("dataset.format", std::string(dataset_format_name(c.dataset.format)));
    add("dataset.title_only", c.dataset.title_only ? "true" : "false");
    add("dataset.classes", join_strings(c.dataset.classes));
    add("kb", c.kb_path);
    add("templates", c.templates_path);
    add("template_id", std::to_string(c.template_id));
    add("mode", std::string(verbalizer_mode_name(c.mode)));
    add("n", std::to_string(c.top_n));
    add("m", std::to_string(c.top_m));
    add("k", std::to_string(c.k));
    add("support_size", std::to_string(c.support_size));
    add("seeds", join_ints(c.seeds));
    add("oracle.kind", c.oracle.kind);
    add("oracle.spec", c.oracle.spec_path);
    add("oracle.url", c.oracle.url);
    add("freeze_verbalizer", c.freeze_verbalizer ? "true" : "false");
    add("select_on_support", c.select_on_support ? "true" : "false");
    add("candidate_template_ids", join_ints(c.candidate_template_ids));
    add("candidate_top_m", join_ints(c.candidate_top_m));
    return out;
}

std::string config_hash(const RunConfig& config) {
    std::string canonical = canonical_config_string(config);
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace promptclass
