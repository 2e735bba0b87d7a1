#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "promptclass/dataset.hpp"
#include "promptclass/verbalizer.hpp"

namespace promptclass {

struct OracleConfig {
    std::string kind = "toy";  // "toy" or "http"
    std::string spec_path;     // toy: planted-distribution JSON
    std::string url;           // http: server base URL (or PROMPTCLASS_ORACLE_URL)
};

struct DatasetConfig {
    std::string name = "dataset";
    std::string train_path;
    std::string test_path;  // optional; empty → test is carved from the pool
    DatasetFormat format = DatasetFormat::LabelTabText;
    bool title_only = true;
    std::vector<std::string> classes;  // optional fixed class order
};

// Declarative description of one experiment; the CLI loads it from JSON and
// lets flags override individual fields.
struct RunConfig {
    DatasetConfig dataset;
    std::string kb_path;
    std::string templates_path;
    int template_id = 1;
    VerbalizerMode mode = VerbalizerMode::Full;
    int top_n = 5;
    int top_m = 50;
    int k = 5;
    int support_size = 1000;
    std::vector<std::uint32_t> seeds = {1, 2, 3, 4, 5};
    OracleConfig oracle;
    std::string output_dir = "runs";
    unsigned threads = 1;
    bool freeze_verbalizer = false;
    bool select_on_support = false;
    std::vector<int> candidate_template_ids;
    std::vector<int> candidate_top_m;
};

// Optional per-flag overrides; set fields win over the config file.
struct RunOverrides {
    std::optional<int> template_id;
    std::optional<std::string> mode;
    std::optional<int> top_n;
    std::optional<int> top_m;
    std::optional<int> k;
    std::optional<int> support_size;
    std::optional<std::vector<std::uint32_t>> seeds;
    std::optional<std::string> output_dir;
    std::optional<unsigned> threads;
    std::optional<bool> freeze_verbalizer;
    std::optional<bool> select_on_support;
};

RunConfig load_run_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, const RunOverrides& overrides);

// Rejects out-of-range numbers before any compute; path existence is
// checked separately per command (not every command needs every path).
void validate_numbers(const RunConfig& config);

// Deterministic one-line-per-field rendering of the fields that define the
// experiment (output location and thread count are execution details and
// excluded, so reruns elsewhere still land on the same hash). Feeds the
// run-directory hash and the config record in outputs.
std::string canonical_config_string(const RunConfig& config);

// 16-hex-digit FNV-1a of the canonical string, naming the run directory.
std::string config_hash(const RunConfig& config);

}  // namespace promptclass
