#include "devstyle/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "devstyle/analysis.hpp"
#include "devstyle/embeddings.hpp"
#include "devstyle/hash.hpp"
#include "devstyle/java_parser.hpp"
#include "devstyle/miner.hpp"
#include "devstyle/rng.hpp"

namespace devstyle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!known.count(key)) {
            throw std::runtime_error("unknown config key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

DistanceMetric metric_from_string(const std::string& name) {
    if (name == "euclidean") return DistanceMetric::Euclidean;
    if (name == "cosine") return DistanceMetric::Cosine;
    throw std::runtime_error("distance_metric must be euclidean or cosine, got " + name);
}

std::string run_dir(int run) { return "runs/run_" + std::to_string(run); }

} // namespace

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
    const json j = json::parse(text);
    reject_unknown_keys(
        j,
        {"repo", "branch", "synthetic", "out", "seed", "bucket_count", "min_total_changes",
         "max_files_per_commit", "max_path_length", "max_path_width", "min_count",
         "max_contexts", "direction_feature", "validation_fraction", "batch_size",
         "token_mode", "run_count", "min_bucket_changes", "distance_metric", "pairs",
         "exact_p", "model"},
        "config root");

    PipelineConfig c;
    read_if(j, "repo", c.repo);
    read_if(j, "branch", c.branch);
    read_if(j, "out", c.out);
    read_if(j, "seed", c.seed);
    read_if(j, "bucket_count", c.bucket_count);
    read_if(j, "min_total_changes", c.min_total_changes);
    read_if(j, "max_files_per_commit", c.max_files_per_commit);
    read_if(j, "max_path_length", c.max_path_length);
    read_if(j, "max_path_width", c.max_path_width);
    read_if(j, "min_count", c.min_count);
    read_if(j, "max_contexts", c.max_contexts);
    read_if(j, "direction_feature", c.direction_feature);
    read_if(j, "validation_fraction", c.validation_fraction);
    read_if(j, "batch_size", c.batch_size);
    read_if(j, "token_mode", c.token_mode);
    read_if(j, "run_count", c.run_count);
    read_if(j, "min_bucket_changes", c.min_bucket_changes);
    read_if(j, "distance_metric", c.distance_metric);
    read_if(j, "pairs", c.pairs);
    read_if(j, "exact_p", c.exact_p);

    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        reject_unknown_keys(s,
                            {"developer_count", "changes_per_developer", "buckets", "seed",
                             "overlap", "mode", "cluster_size"},
                            "synthetic");
        c.use_synthetic = true;
        read_if(s, "developer_count", c.synthetic.developer_count);
        read_if(s, "changes_per_developer", c.synthetic.changes_per_developer);
        read_if(s, "buckets", c.synthetic.buckets);
        read_if(s, "overlap", c.synthetic.overlap);
        read_if(s, "cluster_size", c.synthetic.cluster_size);
        if (s.contains("mode")) {
            c.synthetic.mode = synthetic_mode_from_string(s.at("mode").get<std::string>());
        }
        if (s.contains("seed")) {
            c.synthetic.seed = s.at("seed").get<std::uint64_t>();
        } else {
            c.synthetic.seed = derive_seed(c.seed, "synth");
        }
        // The synthetic bucket structure stands in for the commit bucketing.
        c.bucket_count = c.synthetic.buckets;
    }

    if (j.contains("model")) {
        const json& m = j.at("model");
        reject_unknown_keys(m,
                            {"token_dim", "path_dim", "change_dim", "batch_vector_dim",
                             "learning_rate", "beta1", "beta2", "epsilon", "weight_decay",
                             "epochs", "patience"},
                            "model");
        read_if(m, "token_dim", c.model.token_dim);
        read_if(m, "path_dim", c.model.path_dim);
        read_if(m, "change_dim", c.model.change_dim);
        read_if(m, "batch_vector_dim", c.model.batch_vector_dim);
        read_if(m, "learning_rate", c.model.learning_rate);
        read_if(m, "beta1", c.model.beta1);
        read_if(m, "beta2", c.model.beta2);
        read_if(m, "epsilon", c.model.epsilon);
        read_if(m, "weight_decay", c.model.weight_decay);
        read_if(m, "epochs", c.model.epochs);
        read_if(m, "patience", c.model.patience);
    }
    c.model.batch_size = c.batch_size;
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    if (repo.empty() == !use_synthetic) {
        throw std::runtime_error("config must set exactly one of 'repo' or 'synthetic'");
    }
    if (use_synthetic) synthetic.validate();
    if (bucket_count < 1) throw std::runtime_error("bucket_count must be >= 1");
    if (run_count < 1) throw std::runtime_error("run_count must be >= 1");
    if (max_path_length < 3) throw std::runtime_error("max_path_length must be >= 3");
    if (max_path_width < 1) throw std::runtime_error("max_path_width must be >= 1");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw std::runtime_error("validation_fraction must be in (0, 1)");
    }
    if (token_mode != "with-tokens" && token_mode != "no-tokens") {
        throw std::runtime_error("token_mode must be with-tokens or no-tokens");
    }
    metric_from_string(distance_metric);
    model.validate();
}

std::string PipelineConfig::resolved_json() const {
    json j;
    if (!repo.empty()) j["repo"] = repo;
    if (!branch.empty()) j["branch"] = branch;
    if (use_synthetic) {
        j["synthetic"] = {{"developer_count", synthetic.developer_count},
                          {"changes_per_developer", synthetic.changes_per_developer},
                          {"buckets", synthetic.buckets},
                          {"seed", synthetic.seed},
                          {"overlap", synthetic.overlap},
                          {"mode", to_string(synthetic.mode)},
                          {"cluster_size", synthetic.cluster_size}};
    }
    j["seed"] = seed;
    j["bucket_count"] = bucket_count;
    j["min_total_changes"] = min_total_changes;
    j["max_files_per_commit"] = max_files_per_commit;
    j["max_path_length"] = max_path_length;
    j["max_path_width"] = max_path_width;
    j["min_count"] = min_count;
    j["max_contexts"] = max_contexts;
    j["direction_feature"] = direction_feature;
    j["validation_fraction"] = validation_fraction;
    j["batch_size"] = batch_size;
    j["token_mode"] = token_mode;
    j["run_count"] = run_count;
    j["min_bucket_changes"] = min_bucket_changes;
    j["distance_metric"] = distance_metric;
    j["pairs"] = pairs;
    j["exact_p"] = exact_p;
    j["model"] = {{"token_dim", model.token_dim},
                  {"path_dim", model.path_dim},
                  {"change_dim", model.change_dim},
                  {"batch_vector_dim", model.batch_vector_dim},
                  {"learning_rate", model.learning_rate},
                  {"beta1", model.beta1},
                  {"beta2", model.beta2},
                  {"epsilon", model.epsilon},
                  {"weight_decay", model.weight_decay},
                  {"epochs", model.epochs},
                  {"patience", model.patience}};
    return j.dump(2);
}

// --- manifest ----------------------------------------------------------------

std::string Manifest::file_path() const { return out_dir_ + "/manifest.json"; }

Manifest Manifest::open(const PipelineConfig& config, bool fresh) {
    Manifest m;
    m.out_dir_ = config.out;
    fs::create_directories(m.out_dir_);
    fs::create_directories(m.out_dir_ + "/runs");
    m.config_hash_ = to_hex(fnv1a64(config.resolved_json()));
    m.protocol_ = {
        {"bucket_count", std::to_string(config.bucket_count)},
        {"batch_size", std::to_string(config.batch_size)},
        {"min_total_changes", std::to_string(config.min_total_changes)},
        {"run_count", std::to_string(config.run_count)},
        {"token_mode", config.token_mode},
        {"distance_normalization", "per-bucket-mean"},
        {"run_averaging", "arithmetic-mean"},
        {"ks_comparisons", "distances,movements"},
        {"pair_groups", "positive,negative"},
    };

    const std::string path = m.file_path();
    if (!fresh && fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        json doc;
        in >> doc;
        const std::string stored = doc.value("config_hash", "");
        if (stored != m.config_hash_) {
            throw std::runtime_error(
                "manifest in " + m.out_dir_ +
                " was produced by a different config; use a fresh output directory");
        }
        if (doc.contains("stages")) {
            for (const auto& [stage, entry] : doc.at("stages").items()) {
                StageEntry e;
                for (const auto& [p, h] : entry.at("inputs").items()) {
                    e.inputs[p] = h.get<std::string>();
                }
                for (const auto& [p, h] : entry.at("outputs").items()) {
                    e.outputs[p] = h.get<std::string>();
                }
                for (const auto& [k, v] : entry.at("params").items()) {
                    e.params[k] = v.get<std::string>();
                }
                m.stages_[stage] = std::move(e);
            }
        }
    } else {
        m.save();
    }
    return m;
}

void Manifest::save() const {
    json doc;
    doc["config_hash"] = config_hash_;
    doc["protocol"] = protocol_;
    json stages = json::object();
    for (const auto& [name, entry] : stages_) {
        stages[name] = {{"inputs", entry.inputs},
                        {"outputs", entry.outputs},
                        {"params", entry.params}};
    }
    doc["stages"] = std::move(stages);
    std::ofstream out(file_path(), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + file_path());
    out << doc.dump(2) << '\n';
}

void Manifest::require_artifact(const std::string& stage, const std::string& producer,
                                const std::string& relative_path) const {
    const std::string full = out_dir_ + "/" + relative_path;
    auto producer_it = stages_.find(producer);
    if (producer_it == stages_.end() || !fs::exists(full)) {
        throw StageError(stage, producer + " stage required (missing " + relative_path + ")");
    }
    auto hash_it = producer_it->second.outputs.find(relative_path);
    if (hash_it == producer_it->second.outputs.end()) {
        throw StageError(stage, producer + " stage required (missing " + relative_path + ")");
    }
    if (hash_file(full) != hash_it->second) {
        throw StageError(stage, "stale artifact " + relative_path + "; re-run the " +
                                    producer + " stage");
    }
}

void Manifest::record_stage(const std::string& stage,
                            const std::vector<std::string>& input_paths,
                            const std::vector<std::string>& output_paths,
                            const std::map<std::string, std::string>& params) {
    StageEntry entry;
    for (const auto& p : input_paths) {
        const std::string full = out_dir_ + "/" + p;
        entry.inputs[p] = fs::exists(full) ? hash_file(full) : hash_file(p);
    }
    for (const auto& p : output_paths) entry.outputs[p] = hash_file(out_dir_ + "/" + p);
    entry.params = params;
    stages_[stage] = std::move(entry);
    save();
}

void Manifest::record_timing(const std::string& stage, double seconds) {
    const std::string path = out_dir_ + "/timings.csv";
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (fresh) out << "stage,seconds\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", seconds);
    out << stage << ',' << buf << '\n';
}

namespace {

class StageTimer {
public:
    StageTimer(Manifest& manifest, std::string stage)
        : manifest_(manifest), stage_(std::move(stage)),
          start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        manifest_.record_timing(stage_,
                                std::chrono::duration<double>(elapsed).count());
    }

private:
    Manifest& manifest_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string diff_producer(const PipelineConfig& config) {
    return config.use_synthetic ? "synth" : "extract";
}

} // namespace

void cmd_mine(const PipelineConfig& config, Manifest& manifest) {
    const std::string stage = "mine";
    StageTimer timer(manifest, stage);
    if (config.use_synthetic) {
        throw StageError(stage, "config is synthetic; use the synth stage instead");
    }
    MinerConfig miner_config;
    miner_config.branch = config.branch;
    miner_config.max_files_per_commit = config.max_files_per_commit;

    MiningResult result;
    try {
        result = mine_method_changes(config.repo, miner_config);
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }

    const std::string& out = manifest.directory();
    save_records_jsonl(result.records, out + "/changes.jsonl");
    EntityMap(result.entities).save(out + "/entities.tsv");
    write_text_file(out + "/skip_report.txt", result.skip_report);

    std::vector<std::string> hashes;
    for (const auto& c : result.mined_commits) hashes.push_back(c.hash);
    std::vector<TimeBucket> buckets;
    try {
        buckets = bucket_commits(hashes, config.bucket_count);
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
    save_buckets_json(buckets, out + "/buckets.json");

    manifest.record_stage(stage, {},
                          {"changes.jsonl", "entities.tsv", "skip_report.txt", "buckets.json"},
                          {{"repo", config.repo},
                           {"branch", config.branch.empty() ? "HEAD" : config.branch},
                           {"bucket_count", std::to_string(config.bucket_count)},
                           {"max_files_per_commit",
                            std::to_string(config.max_files_per_commit)}});
}

void cmd_synth(const PipelineConfig& config, Manifest& manifest) {
    const std::string stage = "synth";
    StageTimer timer(manifest, stage);
    if (!config.use_synthetic) {
        throw StageError(stage, "config has no synthetic section; use the mine stage");
    }
    const std::string& out = manifest.directory();
    const auto diffs = generate_synthetic_corpus(config.synthetic);
    save_diffs_jsonl(diffs, out + "/diffs.jsonl");
    EntityMap(synthetic_entities(config.synthetic)).save(out + "/entities.tsv");
    manifest.record_stage(stage, {}, {"diffs.jsonl", "entities.tsv"},
                          {{"mode", to_string(config.synthetic.mode)},
                           {"developer_count",
                            std::to_string(config.synthetic.developer_count)},
                           {"changes_per_developer",
                            std::to_string(config.synthetic.changes_per_developer)},
                           {"buckets", std::to_string(config.synthetic.buckets)},
                           {"overlap", std::to_string(config.synthetic.overlap)},
                           {"cluster_size", std::to_string(config.synthetic.cluster_size)},
                           {"seed", std::to_string(config.synthetic.seed)}});
}

void cmd_extract(const PipelineConfig& config, Manifest& manifest) {
    const std::string stage = "extract";
    StageTimer timer(manifest, stage);
    if (config.use_synthetic) {
        throw StageError(stage, "synthetic corpora are already at the diff level");
    }
    manifest.require_artifact(stage, "mine", "changes.jsonl");
    manifest.require_artifact(stage, "mine", "buckets.json");

    const std::string& out = manifest.directory();
    const auto records = load_records_jsonl(out + "/changes.jsonl");
    const auto buckets = load_buckets_json(out + "/buckets.json");

    std::map<std::string, int> bucket_of;
    for (const auto& b : buckets) {
        for (const auto& h : b.commit_hashes) bucket_of[h] = b.bucket_id;
    }

    const FilterResult filtered = filter_developers(records, config.min_total_changes);

    JavaGrammar grammar;
    std::vector<ChangeDiffRecord> diffs;
    std::size_t empty_diffs = 0;
    for (const auto& r : filtered.kept) {
        const auto bucket_it = bucket_of.find(r.commit.hash);
        if (bucket_it == bucket_of.end()) {
            throw StageError(stage, "commit " + r.commit.hash + " missing from buckets.json");
        }
        std::set<PathContext> before, after;
        try {
            before = enumerate_path_contexts(grammar.parse_method(r.before_source),
                                             config.max_path_length, config.max_path_width);
            after = enumerate_path_contexts(grammar.parse_method(r.after_source),
                                            config.max_path_length, config.max_path_width);
        } catch (const ParseError& e) {
            throw StageError(stage, "record " + r.commit.hash + ":" +
                                        std::to_string(r.ordinal) +
                                        " failed to parse: " + e.what());
        }
        const PathContextDiff diff = diff_path_contexts(before, after);
        if (diff.empty()) {
            ++empty_diffs;
            continue;
        }
        ChangeDiffRecord d;
        d.entity_id = r.entity_id;
        d.bucket_id = bucket_it->second;
        for (const auto& c : diff.introduced) d.introduced.push_back(serialize_path_context(c));
        for (const auto& c : diff.removed) d.removed.push_back(serialize_path_context(c));
        diffs.push_back(std::move(d));
    }
    save_diffs_jsonl(diffs, out + "/diffs.jsonl");

    std::ostringstream report;
    report << "developers excluded by the " << config.min_total_changes
           << "-change filter:";
    for (const auto e : filtered.excluded_entities) report << ' ' << e;
    report << "\nchanges with an empty path-context diff: " << empty_diffs << "\n"
           << "diff records written: " << diffs.size() << "\n";
    write_text_file(out + "/extract_report.txt", report.str());

    manifest.record_stage(stage, {"changes.jsonl", "buckets.json"},
                          {"diffs.jsonl", "extract_report.txt"},
                          {{"min_total_changes", std::to_string(config.min_total_changes)},
                           {"max_path_length", std::to_string(config.max_path_length)},
                           {"max_path_width", std::to_string(config.max_path_width)}});
}

void cmd_encode(const PipelineConfig& config, Manifest& manifest) {
    const std::string stage = "encode";
    StageTimer timer(manifest, stage);
    const std::string producer = diff_producer(config);
    manifest.require_artifact(stage, producer, "diffs.jsonl");

    const std::string& out = manifest.directory();
    const auto diffs = load_diffs_jsonl(out + "/diffs.jsonl");

    const Vocabulary vocab = Vocabulary::build(diffs, config.min_count);
    vocab.save(out + "/vocab_tokens.tsv", out + "/vocab_paths.tsv");

    EncodeOptions options;
    options.max_contexts = config.max_contexts;
    options.seed = derive_seed(config.seed, "encode");
    options.direction_feature = config.direction_feature;

    std::vector<EncodedChange> encoded;
    encoded.reserve(diffs.size());
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i].empty()) continue; // dropped upstream, guarded anyway
        encoded.push_back(encode_change(diffs[i], vocab, options, i));
    }
    if (config.token_mode == "no-tokens") encoded = strip_tokens(std::move(encoded));
    save_encoded_jsonl(encoded, out + "/encoded.jsonl");

    manifest.record_stage(stage, {"diffs.jsonl"},
                          {"vocab_tokens.tsv", "vocab_paths.tsv", "encoded.jsonl"},
                          {{"min_count", std::to_string(config.min_count)},
                           {"max_contexts", std::to_string(config.max_contexts)},
                           {"token_mode", config.token_mode},
                           {"direction_feature", config.direction_feature ? "true" : "false"}});
}

void cmd_train(const PipelineConfig& config, Manifest& manifest, int run) {
    const std::string stage = "train[" + std::to_string(run) + "]";
    StageTimer timer(manifest, stage);
    manifest.require_artifact(stage, "encode", "encoded.jsonl");
    manifest.require_artifact(stage, "encode", "vocab_tokens.tsv");
    manifest.require_artifact(stage, "encode", "vocab_paths.tsv");

    const std::string& out = manifest.directory();
    const auto encoded = load_encoded_jsonl(out + "/encoded.jsonl");
    const Vocabulary vocab =
        Vocabulary::load(out + "/vocab_tokens.tsv", out + "/vocab_paths.tsv");

    const std::uint64_t seed = config.run_seed(run);
    const auto batches = make_batches(encoded, config.batch_size, seed);
    const SplitResult split =
        split_train_validation(batches, 1.0 - config.validation_fraction, seed);
    for (const auto& w : split.warnings) std::cerr << "warning: " << w << '\n';

    Hyperparams hp = config.model;
    hp.batch_size = config.batch_size;
    hp.seed = seed;

    TrainResult result;
    try {
        result = train(split.train, split.validation, hp, vocab.token_count(),
                       vocab.path_count());
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

    fs::create_directories(out + "/" + run_dir(run));
    save_checkpoint(result.params, out + "/" + run_dir(run) + "/checkpoint.bin");
    save_training_log_csv(result.log, out + "/" + run_dir(run) + "/training_log.csv");

    manifest.record_stage(stage, {"encoded.jsonl", "vocab_tokens.tsv", "vocab_paths.tsv"},
                          {run_dir(run) + "/checkpoint.bin",
                           run_dir(run) + "/training_log.csv"},
                          {{"run_seed", std::to_string(seed)},
                           {"batch_size", std::to_string(config.batch_size)},
                           {"validation_fraction", std::to_string(config.validation_fraction)},
                           {"epochs", std::to_string(hp.epochs)},
                           {"patience", std::to_string(hp.patience)},
                           {"token_dim", std::to_string(hp.token_dim)},
                           {"path_dim", std::to_string(hp.path_dim)},
                           {"change_dim", std::to_string(hp.change_dim)},
                           {"batch_vector_dim", std::to_string(hp.batch_vector_dim)}});
}

void cmd_embed(const PipelineConfig& config, Manifest& manifest, int run) {
    const std::string stage = "embed[" + std::to_string(run) + "]";
    StageTimer timer(manifest, stage);
    manifest.require_artifact(stage, "encode", "encoded.jsonl");
    manifest.require_artifact(stage, "train[" + std::to_string(run) + "]",
                              run_dir(run) + "/checkpoint.bin");

    const std::string& out = manifest.directory();
    const auto encoded = load_encoded_jsonl(out + "/encoded.jsonl");
    const ModelParameters params =
        load_checkpoint(out + "/" + run_dir(run) + "/checkpoint.bin");

    const auto snapshots = embed_run(encoded, params, run, config.min_bucket_changes);
    std::vector<std::string> warnings;
    const auto matrices =
        normalize_run(snapshots, metric_from_string(config.distance_metric), &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    save_snapshots_jsonl(snapshots, out + "/" + run_dir(run) + "/snapshots.jsonl");
    save_normalized_csv(matrices, out + "/" + run_dir(run) + "/normalized.csv");

    manifest.record_stage(stage,
                          {"encoded.jsonl", run_dir(run) + "/checkpoint.bin"},
                          {run_dir(run) + "/snapshots.jsonl", run_dir(run) + "/normalized.csv"},
                          {{"min_bucket_changes", std::to_string(config.min_bucket_changes)},
                           {"distance_metric", config.distance_metric}});
}

void cmd_analyze(const PipelineConfig& config, Manifest& manifest) {
    const std::string stage = "analyze";
    StageTimer timer(manifest, stage);
    for (int run = 0; run < config.run_count; ++run) {
        manifest.require_artifact(stage, "embed[" + std::to_string(run) + "]",
                                  run_dir(run) + "/normalized.csv");
    }

    const std::string& out = manifest.directory();
    std::vector<std::vector<NormalizedDistanceMatrix>> per_run;
    for (int run = 0; run < config.run_count; ++run) {
        per_run.push_back(load_normalized_csv(out + "/" + run_dir(run) + "/normalized.csv", run));
    }
    AveragedDistances averaged;
    try {
        averaged = average_runs(per_run);
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
    save_averaged_csv(averaged, out + "/averaged.csv");

    std::vector<LabeledPair> pairs;
    if (!config.pairs.empty()) {
        pairs = load_pairs_csv(config.pairs);
        const EntityMap entities = EntityMap::load(out + "/entities.tsv");
        std::set<std::int64_t> known;
        for (const auto& e : entities.entities()) known.insert(e.entity_id);
        for (const auto& p : pairs) {
            if (!known.count(p.entity_a) || !known.count(p.entity_b)) {
                throw StageError(stage, "labeled pair (" + std::to_string(p.entity_a) + "," +
                                            std::to_string(p.entity_b) +
                                            ") references an unknown entity");
            }
        }
    }

    const GroupSamples distances = collect_pair_distances(pairs, averaged);
    const GroupSamples movements = collect_movements(pairs, averaged);
    save_samples_csv(distances.positive, out + "/samples_distances_positive.csv");
    save_samples_csv(distances.negative, out + "/samples_distances_negative.csv");
    save_samples_csv(movements.positive, out + "/samples_movements_positive.csv");
    save_samples_csv(movements.negative, out + "/samples_movements_negative.csv");

    const AnalysisReport report =
        summarize(distances, movements, config.token_mode, config.exact_p);
    write_text_file(out + "/report.md", render_report_markdown(report));

    std::vector<std::string> inputs;
    for (int run = 0; run < config.run_count; ++run) {
        inputs.push_back(run_dir(run) + "/normalized.csv");
    }
    if (!config.pairs.empty()) inputs.push_back(config.pairs);
    manifest.record_stage(stage, inputs,
                          {"averaged.csv", "samples_distances_positive.csv",
                           "samples_distances_negative.csv", "samples_movements_positive.csv",
                           "samples_movements_negative.csv", "report.md"},
                          {{"run_count", std::to_string(config.run_count)},
                           {"exact_p", config.exact_p ? "true" : "false"},
                           {"token_mode", config.token_mode}});
}

void cmd_pipeline(const PipelineConfig& config, Manifest& manifest) {
    if (config.use_synthetic) {
        cmd_synth(config, manifest);
    } else {
        cmd_mine(config, manifest);
        cmd_extract(config, manifest);
    }
    cmd_encode(config, manifest);
    for (int run = 0; run < config.run_count; ++run) {
        cmd_train(config, manifest, run);
        cmd_embed(config, manifest, run);
    }
    cmd_analyze(config, manifest);
}

} // namespace devstyle
