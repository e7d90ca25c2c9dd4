#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "devstyle/path_contexts.hpp"

namespace devstyle {

/// Diff of one method change, ready for encoding. The serialized context
/// strings inside `introduced` / `removed` are kept sorted. This is both the
/// extract-stage output and the synthetic generator's output.
struct ChangeDiffRecord {
    std::int64_t entity_id = -1;
    int bucket_id = 0;
    std::vector<std::string> introduced;
    std::vector<std::string> removed;

    bool empty() const { return introduced.empty() && removed.empty(); }
};

void save_diffs_jsonl(const std::vector<ChangeDiffRecord>& diffs, const std::string& path);
std::vector<ChangeDiffRecord> load_diffs_jsonl(const std::string& path);

constexpr std::int64_t kOovId = 0;
constexpr std::int64_t kPaddingId = 1;
constexpr std::int64_t kFirstRealId = 2;

/// Integer encoding for tokens and paths. Ids 0 and 1 are reserved (OOV,
/// padding); real entries start at 2 and are assigned in descending frequency,
/// ties broken lexicographically, so two builds over the same corpus agree.
class Vocabulary {
public:
    static Vocabulary build(const std::vector<ChangeDiffRecord>& diffs,
                            std::size_t min_count);

    std::int64_t token_id(const std::string& token) const;
    std::int64_t path_id(const std::string& path) const;
    const std::string& token_string(std::int64_t id) const;
    const std::string& path_string(std::int64_t id) const;

    std::int64_t token_count() const { return next_token_id_; } // includes reserved ids
    std::int64_t path_count() const { return next_path_id_; }

    /// `id<TAB>string<TAB>count`, sorted by id. One file for tokens, one for paths.
    void save(const std::string& tokens_path, const std::string& paths_path) const;
    static Vocabulary load(const std::string& tokens_path, const std::string& paths_path);

private:
    std::map<std::string, std::int64_t> token_to_id_;
    std::map<std::string, std::int64_t> path_to_id_;
    std::map<std::int64_t, std::string> id_to_token_;
    std::map<std::int64_t, std::string> id_to_path_;
    std::map<std::int64_t, std::int64_t> token_counts_;
    std::map<std::int64_t, std::int64_t> path_counts_;
    std::int64_t next_token_id_ = kFirstRealId;
    std::int64_t next_path_id_ = kFirstRealId;
};

struct ContextIds {
    std::int64_t start = kOovId;
    std::int64_t path = kOovId;
    std::int64_t end = kOovId;

    bool operator==(const ContextIds&) const = default;
};

struct EncodedChange {
    std::int64_t entity_id = -1;
    int bucket_id = 0;
    std::vector<ContextIds> contexts;
};

struct EncodeOptions {
    std::size_t max_contexts = 200;
    std::uint64_t seed = 0;
    /// When set, introduced and removed contexts get distinct path vocabulary
    /// entries ('+'/'-' prefix on the path string) instead of being pooled.
    bool direction_feature = false;
};

/// Pools introduced and removed contexts into one list and encodes them
/// through the vocabulary; uniformly subsamples to max_contexts when larger.
/// Throws std::invalid_argument on an empty diff — callers drop those records.
EncodedChange encode_change(const ChangeDiffRecord& diff, const Vocabulary& vocab,
                            const EncodeOptions& options, std::size_t record_index);

/// Replaces every start and end token id with the placeholder (padding) id,
/// leaving path ids untouched. Token-ablation mode for the whole dataset.
std::vector<EncodedChange> strip_tokens(std::vector<EncodedChange> changes);

void save_encoded_jsonl(const std::vector<EncodedChange>& changes, const std::string& path);
std::vector<EncodedChange> load_encoded_jsonl(const std::string& path);

struct ChangeBatch {
    std::int64_t entity_id = -1; // the label
    std::vector<EncodedChange> changes;
};

constexpr std::size_t kDefaultBatchSize = 16;

/// Per entity: seeded uniform shuffle of that entity's changes, then
/// consecutive groups of batch_size; a trailing partial group is dropped.
std::vector<ChangeBatch> make_batches(const std::vector<EncodedChange>& changes,
                                      std::size_t batch_size, std::uint64_t seed);

struct SplitResult {
    std::vector<ChangeBatch> train;
    std::vector<ChangeBatch> validation;
    std::vector<std::string> warnings;
};

/// Stratified per entity so every developer with >= 2 batches appears on both
/// sides; a single-batch developer goes to train with a warning.
SplitResult split_train_validation(const std::vector<ChangeBatch>& batches, double fraction,
                                   std::uint64_t seed);

} // namespace devstyle
