#include "promptclass/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>

#include "promptclass/error.hpp"

namespace promptclass {

namespace {

void check_class_agreement(const Verbalizer& verbalizer, const std::vector<std::string>& classes) {
    std::set<std::string> v;
    for (const auto& e : verbalizer.entries()) v.insert(e.label);
    std::set<std::string> d(classes.begin(), classes.end());
    if (v != d) {
        throw InputError("verbalizer classes do not match the dataset classes");
    }
}

Prediction classify_example(const ScoringOracle& oracle, const PromptTemplate& tmpl,
                            const Verbalizer& verbalizer, const Example& ex, std::size_t index) {
    try {
        return classify(oracle, tmpl, verbalizer, ex.text);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error("test example #" + std::to_string(index) + " failed: " + e.what());
    }
}

double mean_of(const std::vector<double>& xs) {
    double total = 0.0;
    for (double x : xs) total += x;
    return total / static_cast<double>(xs.size());
}

double population_stddev(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

std::vector<PromptTemplate> const* require_template(const std::vector<PromptTemplate>& templates,
                                                    int id) {
    if (id < 1 || static_cast<std::size_t>(id) > templates.size()) {
        throw InputError("template id " + std::to_string(id) + " is out of range 1.." +
                         std::to_string(templates.size()));
    }
    return &templates;
}

Verbalizer build_for_split(const ConceptKb& kb, const KShotSplit& split,
                           const ScoringOracle& oracle, std::size_t top_n, std::size_t top_m,
                           VerbalizerMode mode, int template_id) {
    std::map<std::string, std::vector<std::string>> texts;
    for (const std::string& label : split.classes) {
        texts[label] = split.train_texts_of(label);
    }
    return build_verbalizer(kb, split.classes, texts, oracle, top_n, top_m, mode, template_id,
                            nullptr);
}

// Unsupervised fit of a (template, width) pair: mean winning-class
// probability over the support texts.  Gold labels stay untouched.
double support_confidence(const ScoringOracle& oracle, const PromptTemplate& tmpl,
                          const Verbalizer& verbalizer, const std::vector<Example>& support) {
    double total = 0.0;
    for (const Example& ex : support) {
        Prediction p = classify(oracle, tmpl, verbalizer, ex.text);
        total += p.find(p.label)->score;
    }
    return total / static_cast<double>(support.size());
}

}  // namespace

EvalResult evaluate(const ScoringOracle& oracle, const PromptTemplate& tmpl,
                    const Verbalizer& verbalizer, const KShotSplit& split,
                    const EvaluateOptions& options) {
    check_class_agreement(verbalizer, split.classes);
    if (split.test.empty()) throw InputError("split has no test examples");

    std::vector<Prediction> predictions(split.test.size());
    unsigned threads = options.threads;
    if (!oracle.concurrent_predict_safe()) threads = 1;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(split.test.size())));

    if (threads == 1) {
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            predictions[i] = classify_example(oracle, tmpl, verbalizer, split.test[i], i);
        }
    } else {
        std::atomic<std::size_t> cursor{0};
        std::mutex error_mutex;
        std::exception_ptr first_error;
        auto worker = [&] {
            for (;;) {
                std::size_t i = cursor.fetch_add(1);
                if (i >= split.test.size()) return;
                try {
                    predictions[i] = classify_example(oracle, tmpl, verbalizer, split.test[i], i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    cursor.store(split.test.size());
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    std::size_t correct = 0;
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        if (predictions[i].label == split.test[i].label) ++correct;
    }

    if (!options.predictions_path.empty()) {
        std::ofstream out(options.predictions_path, std::ios::binary);
        if (!out) {
            throw InputError("cannot write prediction file: " + options.predictions_path.string());
        }
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            out << format_prediction_line(std::to_string(i), predictions[i]) << '\n';
        }
    }

    EvalResult result;
    result.n_test = split.test.size();
    result.n_correct = correct;
    result.accuracy = static_cast<double>(correct) / static_cast<double>(result.n_test);
    result.per_run = {result.accuracy};
    result.mean = result.accuracy;
    result.stddev = 0.0;
    return result;
}

EvalResult run_repeats(const ConceptKb& kb, const Dataset& pool, const Dataset* test,
                       const ScoringOracle& oracle, const std::vector<PromptTemplate>& templates,
                       const RepeatOptions& options) {
    if (options.seeds.empty()) throw InputError("at least one seed is required");
    {
        std::set<std::uint32_t> distinct(options.seeds.begin(), options.seeds.end());
        if (distinct.size() != options.seeds.size()) {
            throw InputError("seeds must be distinct");
        }
    }
    if (options.top_n < 1) throw InputError("retrieval width must be at least 1");
    if (options.top_m < 1) throw InputError("refinement width must be at least 1");
    require_template(templates, options.template_id);
    for (int id : options.candidate_template_ids) require_template(templates, id);
    for (std::size_t m : options.candidate_top_m) {
        if (m < 1) throw InputError("refinement width must be at least 1");
    }
    if (options.select_on_support && options.support_size < 1) {
        throw InputError("support-set selection needs a support size of at least 1");
    }

    EvalResult aggregate;
    bool frozen_ready = false;
    int frozen_template = options.template_id;
    std::optional<Verbalizer> frozen;

    for (std::uint32_t seed : options.seeds) {
        KShotSplit split = (test != nullptr)
                               ? sample_kshot(pool, *test, options.k, options.support_size, seed)
                               : sample_kshot(pool, options.k, options.support_size, seed);

        std::filesystem::path seed_dir;
        if (!options.output_dir.empty()) {
            seed_dir = options.output_dir / ("seed" + std::to_string(seed));
            save_split(split, seed_dir);
        }

        int template_id = options.template_id;
        std::size_t top_m = options.top_m;
        std::optional<Verbalizer> verbalizer;

        if (frozen_ready) {
            template_id = frozen_template;
            verbalizer = frozen;
        } else if (options.select_on_support) {
            std::vector<int> template_pool = options.candidate_template_ids;
            if (template_pool.empty()) template_pool = {options.template_id};
            std::vector<std::size_t> width_pool = options.candidate_top_m;
            if (width_pool.empty()) width_pool = {options.top_m};
            if (split.support.empty()) {
                throw InputError("support set is empty; cannot select on it");
            }
            double best_fit = -1.0;
            for (int tid : template_pool) {
                for (std::size_t m : width_pool) {
                    Verbalizer candidate = build_for_split(kb, split, oracle, options.top_n, m,
                                                           options.mode, tid);
                    double fit = support_confidence(
                        oracle, templates[static_cast<std::size_t>(tid) - 1], candidate,
                        split.support);
                    if (fit > best_fit) {
                        best_fit = fit;
                        template_id = tid;
                        top_m = m;
                        verbalizer = std::move(candidate);
                    }
                }
            }
        }

        if (!verbalizer.has_value()) {
            verbalizer = build_for_split(kb, split, oracle, options.top_n, top_m, options.mode,
                                         template_id);
        }
        if (options.freeze_verbalizer && !frozen_ready) {
            frozen = verbalizer;
            frozen_template = template_id;
            frozen_ready = true;
        }

        EvaluateOptions eval_options;
        eval_options.threads = options.threads;
        if (!seed_dir.empty()) {
            eval_options.predictions_path = seed_dir / "predictions.tsv";
            verbalizer->save_file(seed_dir / "verbalizer.tsv");
        }

        EvalResult run = evaluate(oracle, templates[static_cast<std::size_t>(template_id) - 1],
                                  *verbalizer, split, eval_options);
        aggregate.per_run.push_back(run.accuracy);
        aggregate.n_test = run.n_test;
        aggregate.n_correct += run.n_correct;
    }

    aggregate.mean = mean_of(aggregate.per_run);
    aggregate.stddev = population_stddev(aggregate.per_run, aggregate.mean);
    aggregate.accuracy = aggregate.mean;
    return aggregate;
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "n") return SweepAxis::RetrievalWidth;
    if (name == "m") return SweepAxis::RefineWidth;
    if (name == "template") return SweepAxis::Template;
    if (name == "support" || name == "support_size") return SweepAxis::SupportSize;
    if (name == "k") return SweepAxis::Shots;
    throw InputError("unknown sweep axis '" + std::string(name) +
                     "' (expected n, m, template, support or k)");
}

std::string_view sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::RetrievalWidth: return "n";
        case SweepAxis::RefineWidth: return "m";
        case SweepAxis::Template: return "template";
        case SweepAxis::SupportSize: return "support_size";
        case SweepAxis::Shots: return "k";
    }
    return "n";
}

SweepResult sweep(const ConceptKb& kb, const Dataset& pool, const Dataset* test,
                  const ScoringOracle& oracle, const std::vector<PromptTemplate>& templates,
                  const RepeatOptions& base, SweepAxis axis, const std::vector<int>& values) {
    if (values.empty()) throw InputError("sweep needs at least one axis value");
    for (int v : values) {
        switch (axis) {
            case SweepAxis::RetrievalWidth:
            case SweepAxis::RefineWidth:
            case SweepAxis::Shots:
                if (v < 1) {
                    throw InputError(std::string("sweep value ") + std::to_string(v) +
                                     " is invalid for axis " +
                                     std::string(sweep_axis_name(axis)));
                }
                break;
            case SweepAxis::Template:
                require_template(templates, v);
                break;
            case SweepAxis::SupportSize:
                if (v < 0) {
                    throw InputError("support size must not be negative");
                }
                break;
        }
    }

    SweepResult result;
    result.axis = axis;
    result.values = values;
    for (int v : values) {
        RepeatOptions options = base;
        switch (axis) {
            case SweepAxis::RetrievalWidth: options.top_n = static_cast<std::size_t>(v); break;
            case SweepAxis::RefineWidth: options.top_m = static_cast<std::size_t>(v); break;
            case SweepAxis::Template: options.template_id = v; break;
            case SweepAxis::SupportSize: options.support_size = v; break;
            case SweepAxis::Shots: options.k = v; break;
        }
        if (!base.output_dir.empty()) {
            options.output_dir = base.output_dir / (std::string(sweep_axis_name(axis)) + "-" +
                                                    std::to_string(v));
        }
        result.results.push_back(run_repeats(kb, pool, test, oracle, templates, options));
    }
    return result;
}

std::string sweep_table(const SweepResult& result) {
    std::string out(sweep_axis_name(result.axis));
    out += "\tmean_accuracy\tstddev\tn_runs\n";
    char buf[64];
    for (std::size_t i = 0; i < result.values.size(); ++i) {
        const EvalResult& r = result.results[i];
        std::snprintf(buf, sizeof buf, "%d\t%.4f\t%.4f\t%zu", result.values[i], r.mean, r.stddev,
                      r.per_run.size());
        out += buf;
        out += '\n';
    }
    return out;
}

}  // namespace promptclass
