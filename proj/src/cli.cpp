#include "promptclass/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>

#include "CLI11.hpp"

#include "promptclass/concept_kb.hpp"
#include "promptclass/dataset.hpp"
#include "promptclass/error.hpp"
#include "promptclass/evaluate.hpp"
#include "promptclass/http_oracle.hpp"
#include "promptclass/rng.hpp"
#include "promptclass/run_config.hpp"
#include "promptclass/scoring.hpp"
#include "promptclass/toy_oracle.hpp"

namespace promptclass {

namespace {

void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string(what) + " path is not configured");
    if (!std::filesystem::exists(path)) {
        throw InputError(std::string(what) + " not found: " + path);
    }
}

std::unique_ptr<ScoringOracle> make_oracle(const OracleConfig& config) {
    if (config.kind == "toy") {
        require_file(config.spec_path, "toy oracle spec");
        return std::make_unique<ToyOracle>(ToyOracleSpec::from_json_file(config.spec_path));
    }
    if (config.kind == "http") {
        std::string url = config.url;
        if (url.empty()) {
            if (const char* env = std::getenv("PROMPTCLASS_ORACLE_URL")) url = env;
        }
        if (url.empty()) {
            throw InputError(
                "http oracle needs a server URL (config oracle.url or PROMPTCLASS_ORACLE_URL)");
        }
        return std::make_unique<HttpOracle>(url);
    }
    throw InputError("unknown oracle kind '" + config.kind + "'");
}

std::vector<PromptTemplate> load_templates(const std::string& path) {
    require_file(path, "template file");
    std::vector<std::string> lines = PromptTemplate::read_lines(path);
    std::vector<PromptTemplate> templates;
    templates.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            templates.push_back(PromptTemplate::parse(lines[i]));
        } catch (const InputError& e) {
            throw InputError(path + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    if (templates.empty()) throw InputError("template file is empty: " + path);
    return templates;
}

DatasetSpec dataset_spec(const DatasetConfig& config, const char* suffix) {
    DatasetSpec spec;
    spec.format = config.format;
    spec.title_only = config.title_only;
    spec.expected_classes = config.classes;
    spec.name = config.name + "-" + suffix;
    return spec;
}

RepeatOptions repeat_options(const RunConfig& config) {
    RepeatOptions options;
    options.k = config.k;
    options.support_size = config.support_size;
    options.seeds = config.seeds;
    options.top_n = static_cast<std::size_t>(config.top_n);
    options.top_m = static_cast<std::size_t>(config.top_m);
    options.mode = config.mode;
    options.template_id = config.template_id;
    options.freeze_verbalizer = config.freeze_verbalizer;
    options.select_on_support = config.select_on_support;
    options.candidate_template_ids = config.candidate_template_ids;
    for (int m : config.candidate_top_m) {
        options.candidate_top_m.push_back(static_cast<std::size_t>(m));
    }
    options.threads = config.threads;
    return options;
}

// Creates <output>/<config hash>/ and drops the resolved config record
// inside, so reruns of the same experiment land in the same place and
// different experiments never collide.
std::filesystem::path prepare_run_dir(const RunConfig& config) {
    std::filesystem::path dir = std::filesystem::path(config.output_dir) / config_hash(config);
    std::filesystem::create_directories(dir);
    std::ofstream record(dir / "config.txt", std::ios::binary);
    if (!record) throw InputError("cannot write into output directory: " + dir.string());
    record << canonical_config_string(config);
    return dir;
}

// Flag values for the settings every config-driven command may override.
// Flags win over the config file.
struct CommonFlags {
    std::string config_path;
    int template_id = 0;
    std::string mode;
    int top_n = 0;
    int top_m = 0;
    int k = 0;
    int support_size = 0;
    std::vector<std::uint32_t> seeds;
    std::string output_dir;
    unsigned threads = 0;
    bool freeze_verbalizer = false;
    bool select_on_support = false;

    CLI::Option* template_id_opt = nullptr;
    CLI::Option* mode_opt = nullptr;
    CLI::Option* n_opt = nullptr;
    CLI::Option* m_opt = nullptr;
    CLI::Option* k_opt = nullptr;
    CLI::Option* support_opt = nullptr;
    CLI::Option* seeds_opt = nullptr;
    CLI::Option* output_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* freeze_opt = nullptr;
    CLI::Option* select_opt = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration")->required();
        template_id_opt =
            cmd->add_option("--template-id", template_id, "1-based template line number");
        mode_opt = cmd->add_option("--mode", mode, "verbalizer mode: plain, anchor-only or full");
        n_opt = cmd->add_option("--n", top_n, "concepts retrieved per instance");
        m_opt = cmd->add_option("--m", top_m, "expansion words kept per class");
        k_opt = cmd->add_option("--k", k, "training shots per class");
        support_opt = cmd->add_option("--support-size", support_size, "support examples per class");
        seeds_opt = cmd->add_option("--seeds", seeds, "comma-separated run seeds")->delimiter(',');
        output_opt = cmd->add_option("--output-dir", output_dir, "root directory for artifacts");
        threads_opt = cmd->add_option("--threads", threads, "worker threads for batch scoring");
        freeze_opt = cmd->add_flag("--freeze-verbalizer", freeze_verbalizer,
                                   "build the verbalizer once, from the first seed's split");
        select_opt = cmd->add_flag("--select-on-support", select_on_support,
                                   "pick template/M on the support set");
    }

    RunConfig resolve() const {
        RunConfig config = load_run_config(config_path);
        RunOverrides o;
        if (template_id_opt->count() > 0) o.template_id = template_id;
        if (mode_opt->count() > 0) o.mode = mode;
        if (n_opt->count() > 0) o.top_n = top_n;
        if (m_opt->count() > 0) o.top_m = top_m;
        if (k_opt->count() > 0) o.k = k;
        if (support_opt->count() > 0) o.support_size = support_size;
        if (seeds_opt->count() > 0) o.seeds = seeds;
        if (output_opt->count() > 0) o.output_dir = output_dir;
        if (threads_opt->count() > 0) o.threads = threads;
        if (freeze_opt->count() > 0) o.freeze_verbalizer = true;
        if (select_opt->count() > 0) o.select_on_support = true;
        apply_overrides(config, o);
        validate_numbers(config);
        return config;
    }
};

int cmd_build_kb(const std::string& input, const std::string& output) {
    require_file(input, "triple file");
    ConceptKb kb = ConceptKb::ingest_file(input);
    std::filesystem::path out_path(output);
    if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    kb.save_file(out_path);

    std::printf("%zu %s, %zu %s\n", kb.entry_count(),
                kb.entry_count() == 1 ? "entry" : "entries", kb.instance_count(),
                kb.instance_count() == 1 ? "instance" : "instances");

    // Audit: re-read the emitted artifact with an independent accumulation
    // over a ~1% instance sample and verify every distribution sums to 1.
    std::size_t sample_size = std::max<std::size_t>(1, (kb.instance_count() + 99) / 100);
    auto gen = make_substream(0, "kb-audit", 0);
    std::set<std::string> sampled;
    for (std::size_t idx : sample_indices(kb.instance_count(), sample_size, gen)) {
        sampled.insert(kb.instances()[idx]);
    }

    std::unordered_map<std::string, double> sums;
    std::ifstream emitted(out_path);
    if (!emitted) throw std::runtime_error("cannot re-open emitted KB: " + output);
    std::string line;
    while (std::getline(emitted, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::size_t t1 = line.find('\t');
        std::size_t t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw std::runtime_error("emitted KB has a malformed line: " + line);
        }
        std::string instance = line.substr(0, t1);
        if (sampled.count(instance) == 0) continue;
        double prob = 0.0;
        const char* first = line.data() + t2 + 1;
        const char* last = line.data() + line.size();
        if (std::from_chars(first, last, prob).ec != std::errc()) {
            throw std::runtime_error("emitted KB has a malformed probability: " + line);
        }
        sums[instance] += prob;
    }
    double max_dev = 0.0;
    for (const std::string& instance : sampled) {
        double dev = std::abs(sums[instance] - 1.0);
        if (dev > max_dev) max_dev = dev;
    }
    if (sums.size() != sampled.size() || max_dev > 1e-9) {
        throw std::runtime_error("KB audit failed: sampled distributions do not sum to 1");
    }
    std::printf("audit: %zu %s sampled, max deviation %.3g\n", sampled.size(),
                sampled.size() == 1 ? "instance" : "instances", max_dev);
    return 0;
}

int cmd_build_verbalizer(const RunConfig& config, const std::string& output_flag) {
    std::unique_ptr<ScoringOracle> oracle = make_oracle(config.oracle);

    std::vector<std::string> classes = config.dataset.classes;
    std::optional<Dataset> train;
    if (classes.empty() || config.mode == VerbalizerMode::Full) {
        require_file(config.dataset.train_path, "training file");
        train = load_dataset(config.dataset.train_path, dataset_spec(config.dataset, "train"));
        if (classes.empty()) classes = train->classes;
    }

    ConceptKb kb;
    if (config.mode != VerbalizerMode::Plain) {
        require_file(config.kb_path, "knowledge base");
        kb = ConceptKb::ingest_file(config.kb_path);
    }

    std::map<std::string, std::vector<std::string>> texts;
    if (config.mode == VerbalizerMode::Full) {
        for (const std::string& label : classes) texts[label] = {};
        for (const Example& ex : train->examples) texts[ex.label].push_back(ex.text);
    }

    BuildStats stats;
    Verbalizer verbalizer = build_verbalizer(
        kb, classes, texts, *oracle, static_cast<std::size_t>(config.top_n),
        static_cast<std::size_t>(config.top_m), config.mode, config.template_id, &stats);

    std::filesystem::path out_path;
    if (!output_flag.empty()) {
        out_path = output_flag;
        if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    } else {
        out_path = prepare_run_dir(config) / "verbalizer.tsv";
    }
    verbalizer.save_file(out_path);

    for (const VerbalizerEntry& entry : verbalizer.entries()) {
        std::printf("%s: %zu %s\n", entry.label.c_str(), entry.words.size(),
                    entry.words.size() == 1 ? "word" : "words");
    }
    std::printf(
        "dropped: %zu multi-word, %zu out-of-vocabulary, %zu morphological derivations; "
        "%zu words shared across classes\n",
        stats.dropped_multiword, stats.dropped_vocab, stats.dropped_derivation,
        stats.cross_class_overlap);
    std::printf("wrote %s\n", out_path.string().c_str());
    return 0;
}

int cmd_classify(const RunConfig& config, const std::string& verbalizer_path,
                 const std::vector<std::string>& inline_texts, const std::string& input_path) {
    require_file(verbalizer_path, "verbalizer file");
    Verbalizer verbalizer = Verbalizer::load_file(verbalizer_path);
    std::unique_ptr<ScoringOracle> oracle = make_oracle(config.oracle);
    std::vector<PromptTemplate> templates = load_templates(config.templates_path);
    if (config.template_id < 1 ||
        static_cast<std::size_t>(config.template_id) > templates.size()) {
        throw InputError("template id " + std::to_string(config.template_id) +
                         " is out of range 1.." + std::to_string(templates.size()));
    }
    const PromptTemplate& tmpl = templates[static_cast<std::size_t>(config.template_id) - 1];

    std::vector<std::string> texts = inline_texts;
    if (!input_path.empty()) {
        require_file(input_path, "input file");
        std::ifstream in(input_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) texts.push_back(line);
        }
    }
    if (texts.empty()) throw InputError("no input texts (use --text or --input)");

    for (std::size_t i = 0; i < texts.size(); ++i) {
        Prediction prediction = classify(*oracle, tmpl, verbalizer, texts[i]);
        if (prediction.truncated) {
            std::fprintf(stderr, "warning: input %zu truncated (%zu text tokens dropped)\n", i,
                         prediction.dropped_text_tokens);
        }
        std::printf("%s\n", format_prediction_line(std::to_string(i), prediction).c_str());
    }
    return 0;
}

// Loads everything an experiment needs and hands off to run_repeats/sweep.
struct ExperimentInputs {
    Dataset pool;
    std::optional<Dataset> test;
    ConceptKb kb;
    std::unique_ptr<ScoringOracle> oracle;
    std::vector<PromptTemplate> templates;
};

ExperimentInputs load_experiment(const RunConfig& config) {
    ExperimentInputs inputs;
    require_file(config.dataset.train_path, "training file");
    inputs.pool = load_dataset(config.dataset.train_path, dataset_spec(config.dataset, "train"));
    if (!config.dataset.test_path.empty()) {
        require_file(config.dataset.test_path, "test file");
        inputs.test = load_dataset(config.dataset.test_path, dataset_spec(config.dataset, "test"));
    }
    if (config.mode != VerbalizerMode::Plain) {
        require_file(config.kb_path, "knowledge base");
        inputs.kb = ConceptKb::ingest_file(config.kb_path);
    }
    inputs.oracle = make_oracle(config.oracle);
    inputs.templates = load_templates(config.templates_path);
    return inputs;
}

void print_result(const EvalResult& result) {
    std::printf("mean accuracy %.4f, stddev %.4f over %zu %s (n_test=%zu)\n", result.mean,
                result.stddev, result.per_run.size(),
                result.per_run.size() == 1 ? "run" : "runs", result.n_test);
    std::printf("per-run:");
    for (double acc : result.per_run) std::printf(" %.4f", acc);
    std::printf("\n");
}

int cmd_evaluate(const RunConfig& config) {
    ExperimentInputs inputs = load_experiment(config);
    std::filesystem::path run_dir = prepare_run_dir(config);

    RepeatOptions options = repeat_options(config);
    options.output_dir = run_dir;
    EvalResult result = run_repeats(inputs.kb, inputs.pool,
                                    inputs.test ? &*inputs.test : nullptr, *inputs.oracle,
                                    inputs.templates, options);

    SweepResult table;
    table.axis = SweepAxis::Shots;
    table.values = {config.k};
    table.results = {result};
    std::string rendered = sweep_table(table);
    {
        std::ofstream out(run_dir / "result.tsv", std::ios::binary);
        out << rendered;
    }
    std::fputs(rendered.c_str(), stdout);
    print_result(result);
    std::printf("artifacts: %s\n", run_dir.string().c_str());
    return 0;
}

int cmd_sweep(const RunConfig& config, const std::string& axis_name,
              const std::vector<int>& values) {
    SweepAxis axis = parse_sweep_axis(axis_name);
    ExperimentInputs inputs = load_experiment(config);
    std::filesystem::path run_dir = prepare_run_dir(config);

    RepeatOptions base = repeat_options(config);
    base.output_dir = run_dir;
    SweepResult result = sweep(inputs.kb, inputs.pool, inputs.test ? &*inputs.test : nullptr,
                               *inputs.oracle, inputs.templates, base, axis, values);

    std::string rendered = sweep_table(result);
    std::filesystem::path table_path =
        run_dir / (std::string("sweep-") + std::string(sweep_axis_name(axis)) + ".tsv");
    {
        std::ofstream out(table_path, std::ios::binary);
        out << rendered;
    }
    std::fputs(rendered.c_str(), stdout);
    std::printf("artifacts: %s\n", run_dir.string().c_str());
    return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Few-shot short-text classification with knowledge-expanded cloze prompts"};
    app.require_subcommand(1);

    auto* build_kb = app.add_subcommand(
        "build-kb", "Normalize a raw instance/concept/weight triple file into a KB artifact");
    std::string kb_input, kb_output;
    build_kb->add_option("--input", kb_input, "raw triple file (instance\\tconcept\\tweight)")
        ->required();
    build_kb->add_option("--output", kb_output, "normalized KB destination")->required();

    auto* build_verbalizer =
        app.add_subcommand("build-verbalizer", "Expand class names into label-word sets");
    CommonFlags verbalizer_flags;
    verbalizer_flags.attach(build_verbalizer);
    std::string verbalizer_output;
    build_verbalizer->add_option("--output", verbalizer_output,
                                 "verbalizer destination (default: run directory)");

    auto* classify_cmd =
        app.add_subcommand("classify", "Score texts against a saved verbalizer");
    CommonFlags classify_flags;
    classify_flags.attach(classify_cmd);
    std::string classify_verbalizer, classify_input;
    std::vector<std::string> classify_texts;
    classify_cmd->add_option("--verbalizer", classify_verbalizer, "saved verbalizer file")
        ->required();
    classify_cmd->add_option("--text", classify_texts, "text to classify (repeatable)");
    classify_cmd->add_option("--input", classify_input, "file with one text per line");

    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "Run the seeded k-shot protocol and report accuracy");
    CommonFlags evaluate_flags;
    evaluate_flags.attach(evaluate_cmd);

    auto* sweep_cmd =
        app.add_subcommand("sweep", "Repeat the protocol along one parameter axis");
    CommonFlags sweep_flags;
    sweep_flags.attach(sweep_cmd);
    std::string sweep_axis;
    std::vector<int> sweep_values;
    sweep_cmd->add_option("--axis", sweep_axis, "n, m, template, support or k")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated axis values")
        ->delimiter(',')
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*build_kb) return cmd_build_kb(kb_input, kb_output);
        if (*build_verbalizer) {
            return cmd_build_verbalizer(verbalizer_flags.resolve(), verbalizer_output);
        }
        if (*classify_cmd) {
            return cmd_classify(classify_flags.resolve(), classify_verbalizer, classify_texts,
                                classify_input);
        }
        if (*evaluate_cmd) return cmd_evaluate(evaluate_flags.resolve());
        if (*sweep_cmd) return cmd_sweep(sweep_flags.resolve(), sweep_axis, sweep_values);
        return 1;
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "failure: %s\n", e.what());
        return 2;
    }
}

}  // namespace promptclass
