#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "devstyle/model.hpp"
#include "devstyle/synthetic.hpp"

namespace devstyle {

/// Single JSON configuration for the whole pipeline. Defaults mirror the
/// reference protocol: 20 buckets, 16-change batches, the 1,000-change
/// developer filter and 30 repeated runs. Unknown keys are rejected.
struct PipelineConfig {
    // Corpus source: exactly one of the two.
    std::string repo;
    std::string branch;
    bool use_synthetic = false;
    SyntheticCorpusConfig synthetic;

    std::string out = "out";
    std::uint64_t seed = 1;

    int bucket_count = 20;
    std::size_t min_total_changes = 1000;
    std::size_t max_files_per_commit = 500;

    std::size_t max_path_length = kDefaultMaxPathLength;
    std::size_t max_path_width = kDefaultMaxPathWidth;

    std::size_t min_count = 2;
    std::size_t max_contexts = 200;
    bool direction_feature = false;
    double validation_fraction = 0.2;
    std::size_t batch_size = kDefaultBatchSize;
    std::string token_mode = "with-tokens"; // or "no-tokens"

    int run_count = 30;
    std::size_t min_bucket_changes = 1;
    std::string distance_metric = "euclidean"; // or "cosine"

    std::string pairs; // labeled pairs CSV for the analyze stage; may be empty
    bool exact_p = false;

    Hyperparams model;

    static PipelineConfig from_file(const std::string& path);
    static PipelineConfig from_json_text(const std::string& text);
    std::string resolved_json() const; // defaults filled in, sorted keys
    void validate() const;

    std::uint64_t run_seed(int run) const { return seed + static_cast<std::uint64_t>(run); }
};

struct StageError : std::runtime_error {
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error("stage " + stage_name + ": " + message),
          stage(std::move(stage_name)) {}
    std::string stage;
};

/// manifest.json in the output directory: config hash, the protocol shape and
/// one entry per executed stage with input/output content hashes. Re-running a
/// stage with identical inputs reproduces identical hashes. Wall times go to a
/// separate timings.csv so the manifest itself stays byte-deterministic.
class Manifest {
public:
    /// Loads the existing manifest (it must match the config) or starts a new one.
    static Manifest open(const PipelineConfig& config, bool fresh);

    /// Verifies that `relative_path` exists and still hashes to what
    /// `producer` recorded; throws StageError(stage) otherwise.
    void require_artifact(const std::string& stage, const std::string& producer,
                          const std::string& relative_path) const;

    void record_stage(const std::string& stage,
                      const std::vector<std::string>& input_paths,
                      const std::vector<std::string>& output_paths,
                      const std::map<std::string, std::string>& params);

    void record_timing(const std::string& stage, double seconds);

    const std::string& directory() const { return out_dir_; }
    std::string file_path() const;

private:
    Manifest() = default;
    void save() const;

    std::string out_dir_;
    std::string config_hash_;
    std::map<std::string, std::string> protocol_;
    struct StageEntry {
        std::map<std::string, std::string> inputs;  // path -> hash
        std::map<std::string, std::string> outputs; // path -> hash
        std::map<std::string, std::string> params;
    };
    std::map<std::string, StageEntry> stages_;
};

// Stage drivers. Relative artifact names inside the output directory:
//   changes.jsonl entities.tsv skip_report.txt buckets.json   (mine)
//   diffs.jsonl extract_report.txt                            (extract / synth)
//   vocab_tokens.tsv vocab_paths.tsv encoded.jsonl            (encode)
//   runs/run_<r>/checkpoint.bin runs/run_<r>/training_log.csv (train)
//   runs/run_<r>/snapshots.jsonl runs/run_<r>/normalized.csv  (embed)
//   averaged.csv samples_*.csv report.md                      (analyze)
void cmd_mine(const PipelineConfig& config, Manifest& manifest);
void cmd_synth(const PipelineConfig& config, Manifest& manifest);
void cmd_extract(const PipelineConfig& config, Manifest& manifest);
void cmd_encode(const PipelineConfig& config, Manifest& manifest);
void cmd_train(const PipelineConfig& config, Manifest& manifest, int run);
void cmd_embed(const PipelineConfig& config, Manifest& manifest, int run);
void cmd_analyze(const PipelineConfig& config, Manifest& manifest);

/// All stages end to end: corpus, encoding, run_count train+embed repetitions,
/// averaging and the final report.
void cmd_pipeline(const PipelineConfig& config, Manifest& manifest);

} // namespace devstyle
