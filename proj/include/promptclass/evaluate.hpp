#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "promptclass/concept_kb.hpp"
#include "promptclass/kshot.hpp"
#include "promptclass/prompting.hpp"
#include "promptclass/scoring.hpp"
#include "promptclass/verbalizer.hpp"

namespace promptclass {

// Accuracy of one run or the aggregate of several seeded runs.
struct EvalResult {
    double accuracy = 0.0;  // single run: that accuracy; repeats: the mean
    std::size_t n_test = 0;
    std::size_t n_correct = 0;
    std::vector<double> per_run;
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation over per_run
};

struct EvaluateOptions {
    // When set, one prediction line per test example is written here.
    std::filesystem::path predictions_path;
    // Extra worker threads are used only when the oracle declares
    // concurrent predict calls safe.
    unsigned threads = 1;
};

// Classifies every test example of the split and reports exact accuracy.
EvalResult evaluate(const ScoringOracle& oracle, const PromptTemplate& tmpl,
                    const Verbalizer& verbalizer, const KShotSplit& split,
                    const EvaluateOptions& options = {});

struct RepeatOptions {
    int k = 5;
    int support_size = 1000;
    std::vector<std::uint32_t> seeds = {1, 2, 3, 4, 5};
    std::size_t top_n = 5;
    std::size_t top_m = 50;
    VerbalizerMode mode = VerbalizerMode::Full;
    int template_id = 1;  // 1-based position in the template file
    // Build the verbalizer once, from the first seed's split, instead of
    // per split.
    bool freeze_verbalizer = false;
    // Pick template id / refinement width on the support set (highest mean
    // top-class probability; labels are never consulted).
    bool select_on_support = false;
    std::vector<int> candidate_template_ids;    // selection pool; empty → fixed id
    std::vector<std::size_t> candidate_top_m;   // selection pool; empty → fixed width
    unsigned threads = 1;
    // When set, per-seed split and prediction files land under
    // <output_dir>/seed<seed>/.
    std::filesystem::path output_dir;
};

// One seeded split + verbalizer build + evaluation per seed; reports the
// per-seed accuracies with their mean and spread.
EvalResult run_repeats(const ConceptKb& kb, const Dataset& pool, const Dataset* test,
                       const ScoringOracle& oracle, const std::vector<PromptTemplate>& templates,
                       const RepeatOptions& options);

enum class SweepAxis { RetrievalWidth, RefineWidth, Template, SupportSize, Shots };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view sweep_axis_name(SweepAxis axis);

struct SweepResult {
    SweepAxis axis = SweepAxis::RetrievalWidth;
    std::vector<int> values;
    std::vector<EvalResult> results;  // aligned with values
};

// Repeats the full protocol once per axis value, all other knobs fixed.
// Every value is validated before the first run starts.
SweepResult sweep(const ConceptKb& kb, const Dataset& pool, const Dataset* test,
                  const ScoringOracle& oracle, const std::vector<PromptTemplate>& templates,
                  const RepeatOptions& base, SweepAxis axis, const std::vector<int>& values);

// Tab-separated table with a header row; accuracies use fixed 4-decimal
// formatting.
std::string sweep_table(const SweepResult& result);

}  // namespace promptclass
