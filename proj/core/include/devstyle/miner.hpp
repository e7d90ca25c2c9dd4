#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "devstyle/git_repo.hpp"
#include "devstyle/identity.hpp"
#include "devstyle/java_ast.hpp"

namespace devstyle {

/// One authored change to one method. before_source empty = method added,
/// after_source empty = method removed; the two are never equal.
struct MethodChangeRecord {
    CommitMeta commit;
    std::int64_t entity_id = -1;
    std::string file_path;
    std::string method_key;
    std::string before_source;
    std::string after_source;
    int ordinal = 0;
};

struct MinerConfig {
    std::string branch;                // empty = repository HEAD
    std::size_t max_files_per_commit = 500; // bulk-import commits are skipped
    std::string language = "java";
};

struct MiningResult {
    std::vector<MethodChangeRecord> records; // (history position, file, ordinal) order
    std::vector<MergedEntity> entities;
    std::vector<CommitMeta> mined_commits; // non-merge commits, history order
    std::string skip_report;
};

/// Walks the repository history, resolves author identities and extracts
/// method-level changes from every non-merge commit. Two runs over the same
/// repository produce byte-identical record streams.
MiningResult mine_method_changes(const std::string& repo_path, const MinerConfig& config);

struct TimeBucket {
    int bucket_id = 0;
    std::vector<std::string> commit_hashes;
};

/// Contiguous slices of the commit sequence whose sizes differ by at most one;
/// remainder commits go to the earliest buckets.
std::vector<TimeBucket> bucket_commits(const std::vector<std::string>& commit_hashes,
                                       int bucket_count);

struct FilterResult {
    std::vector<MethodChangeRecord> kept;
    std::set<std::int64_t> excluded_entities;
};

/// Keeps a record iff its entity authored at least `min_total_changes` records
/// across the whole history.
FilterResult filter_developers(const std::vector<MethodChangeRecord>& changes,
                               std::size_t min_total_changes);

/// Line-delimited JSON, one object per record.
void save_records_jsonl(const std::vector<MethodChangeRecord>& records,
                        const std::string& path);
std::vector<MethodChangeRecord> load_records_jsonl(const std::string& path);

void save_buckets_json(const std::vector<TimeBucket>& buckets, const std::string& path);
std::vector<TimeBucket> load_buckets_json(const std::string& path);

} // namespace devstyle
