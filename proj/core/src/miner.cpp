#include "devstyle/miner.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "devstyle/java_parser.hpp"
#include "devstyle/method_extractor.hpp"

namespace devstyle {

namespace {

using nlohmann::json;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct ParsedMethod {
    ExtractedMethod method;
    std::string ast_form; // empty until parsed
};

/// Pending record of one file pair, before ordinals are assigned.
struct PendingRecord {
    std::string file_path;
    std::string method_key;
    std::string before_source;
    std::string after_source;
    std::size_t rank = 0; // position of the surviving version in its file
};

class MethodMatcher {
public:
    MethodMatcher(const MethodGrammar& grammar, std::ostringstream& report)
        : grammar_(grammar), report_(report) {}

    /// Pairs method versions by (type chain, name, arity); same-key overloads
    /// are aligned by parameter type spelling, then by source order.
    std::vector<PendingRecord> match(const std::string& commit_hash,
                                     const std::string& path,
                                     const std::vector<ExtractedMethod>& before,
                                     const std::vector<ExtractedMethod>& after) {
        std::map<std::string, std::vector<const ExtractedMethod*>> old_by_key, new_by_key;
        for (const auto& m : before) old_by_key[m.method_key()].push_back(&m);
        for (const auto& m : after) new_by_key[m.method_key()].push_back(&m);

        std::vector<PendingRecord> out;
        std::set<std::string> keys;
        for (const auto& [k, v] : old_by_key) keys.insert(k);
        for (const auto& [k, v] : new_by_key) keys.insert(k);

        for (const auto& key : keys) {
            auto olds = sorted_group(old_by_key, key);
            auto news = sorted_group(new_by_key, key);
            const std::size_t paired = std::min(olds.size(), news.size());
            for (std::size_t i = 0; i < paired; ++i) {
                emit_changed(commit_hash, path, key, *olds[i], *news[i], out);
            }
            for (std::size_t i = paired; i < olds.size(); ++i) {
                emit_one_sided(commit_hash, path, key, *olds[i], /*removed=*/true, out);
            }
            for (std::size_t i = paired; i < news.size(); ++i) {
                emit_one_sided(commit_hash, path, key, *news[i], /*removed=*/false, out);
            }
        }
        return out;
    }

private:
    static std::vector<const ExtractedMethod*> sorted_group(
        std::map<std::string, std::vector<const ExtractedMethod*>>& groups,
        const std::string& key) {
        auto it = groups.find(key);
        if (it == groups.end()) return {};
        auto v = it->second;
        std::stable_sort(v.begin(), v.end(),
                         [](const ExtractedMethod* a, const ExtractedMethod* b) {
                             return a->param_types < b->param_types;
                         });
        return v;
    }

    void emit_changed(const std::string& commit_hash, const std::string& path,
                      const std::string& key, const ExtractedMethod& old_m,
                      const ExtractedMethod& new_m, std::vector<PendingRecord>& out) {
        if (old_m.text == new_m.text) return;
        std::string old_ast, new_ast;
        if (!parse_form(commit_hash, path, key, old_m.text, old_ast) ||
            !parse_form(commit_hash, path, key, new_m.text, new_ast)) {
            return;
        }
        // Formatting-only edits leave the AST-derived form identical.
        if (old_ast == new_ast) return;
        out.push_back({path, key, old_m.text, new_m.text, new_m.start_offset});
    }

    void emit_one_sided(const std::string& commit_hash, const std::string& path,
                        const std::string& key, const ExtractedMethod& m, bool removed,
                        std::vector<PendingRecord>& out) {
        std::string ast_form;
        if (!parse_form(commit_hash, path, key, m.text, ast_form)) return;
        PendingRecord r;
        r.file_path = path;
        r.method_key = key;
        (removed ? r.before_source : r.after_source) = m.text;
        r.rank = m.start_offset;
        out.push_back(std::move(r));
    }

    bool parse_form(const std::string& commit_hash, const std::string& path,
                    const std::string& key, const std::string& source, std::string& form) {
        try {
            form = ast_to_string(grammar_.parse_method(source));
            return true;
        } catch (const ParseError& e) {
            report_ << "commit " << commit_hash << ": skipped method " << key << " in "
                    << path << " (" << e.what() << ")\n";
            return false;
        }
    }

    const MethodGrammar& grammar_;
    std::ostringstream& report_;
};

} // namespace

MiningResult mine_method_changes(const std::string& repo_path, const MinerConfig& config) {
    GitRepo repo(repo_path, config.branch);
    const std::vector<CommitMeta> all_commits = repo.list_commits();
    if (all_commits.empty()) {
        throw std::runtime_error("repository has no commits on the selected branch");
    }

    const auto grammar = make_grammar(config.language);
    std::ostringstream report;
    MiningResult result;

    std::set<AuthorIdentity> identities;
    for (const CommitMeta& c : all_commits) {
        if (c.parent_count <= 1) identities.insert(c.author);
    }
    result.entities = merge_identities(identities);
    const EntityMap entity_map(result.entities);

    std::size_t skipped_files = 0, skipped_commits = 0;
    for (const CommitMeta& commit : all_commits) {
        if (commit.parent_count > 1) continue; // merge commits carry no own diff
        result.mined_commits.push_back(commit);

        const std::vector<FileChange> files = repo.changed_files(commit.hash);
        if (files.size() > config.max_files_per_commit) {
            report << "commit " << commit.hash << ": skipped (bulk commit, "
                   << files.size() << " changed files > " << config.max_files_per_commit
                   << ")\n";
            ++skipped_commits;
            continue;
        }

        std::vector<PendingRecord> pending;
        MethodMatcher matcher(*grammar, report);
        for (const FileChange& fc : files) {
            if (!ends_with(fc.path, ".java")) continue;
            std::vector<ExtractedMethod> before, after;
            try {
                if (fc.status != 'A') before = extract_methods(repo.read_blob(fc.old_blob));
                if (fc.status != 'D') after = extract_methods(repo.read_blob(fc.new_blob));
            } catch (const ParseError& e) {
                report << "commit " << commit.hash << ": skipped file " << fc.path << " ("
                       << e.what() << ")\n";
                ++skipped_files;
                continue;
            }
            auto matched = matcher.match(commit.hash, fc.path, before, after);
            pending.insert(pending.end(), std::make_move_iterator(matched.begin()),
                           std::make_move_iterator(matched.end()));
        }

        std::sort(pending.begin(), pending.end(),
                  [](const PendingRecord& a, const PendingRecord& b) {
                      return std::tie(a.file_path, a.rank, a.method_key) <
                             std::tie(b.file_path, b.rank, b.method_key);
                  });
        int ordinal = 0;
        for (PendingRecord& p : pending) {
            MethodChangeRecord r;
            r.commit = commit;
            r.entity_id = entity_map.entity_of(commit.author);
            r.file_path = std::move(p.file_path);
            r.method_key = std::move(p.method_key);
            r.before_source = std::move(p.before_source);
            r.after_source = std::move(p.after_source);
            r.ordinal = ordinal++;
            result.records.push_back(std::move(r));
        }
    }

    report << "summary: " << result.records.size() << " records, " << skipped_files
           << " skipped files, " << skipped_commits << " skipped commits\n";
    result.skip_report = report.str();
    return result;
}

std::vector<TimeBucket> bucket_commits(const std::vector<std::string>& commit_hashes,
                                       int bucket_count) {
    if (bucket_count < 1 || static_cast<std::size_t>(bucket_count) > commit_hashes.size()) {
        throw std::invalid_argument(
            "bucket_count must be between 1 and the number of commits (" +
            std::to_string(commit_hashes.size()) + "), got " + std::to_string(bucket_count));
    }
    const std::size_t n = commit_hashes.size();
    const std::size_t buckets = static_cast<std::size_t>(bucket_count);
    const std::size_t base = n / buckets;
    const std::size_t remainder = n % buckets;

    std::vector<TimeBucket> out;
    out.reserve(buckets);
    std::size_t offset = 0;
    for (std::size_t b = 0; b < buckets; ++b) {
        const std::size_t size = base + (b < remainder ? 1 : 0);
        TimeBucket bucket;
        bucket.bucket_id = static_cast<int>(b);
        bucket.commit_hashes.assign(commit_hashes.begin() + static_cast<std::ptrdiff_t>(offset),
                                    commit_hashes.begin() +
                                        static_cast<std::ptrdiff_t>(offset + size));
        out.push_back(std::move(bucket));
        offset += size;
    }
    return out;
}

FilterResult filter_developers(const std::vector<MethodChangeRecord>& changes,
                               std::size_t min_total_changes) {
    std::map<std::int64_t, std::size_t> counts;
    for (const auto& r : changes) ++counts[r.entity_id];

    FilterResult result;
    for (const auto& [entity, count] : counts) {
        if (count < min_total_changes) result.excluded_entities.insert(entity);
    }
    for (const auto& r : changes) {
        if (!result.excluded_entities.count(r.entity_id)) result.kept.push_back(r);
    }
    return result;
}

void save_records_jsonl(const std::vector<MethodChangeRecord>& records,
                        const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write records: " + path);
    for (const auto& r : records) {
        json j;
        j["commit"] = {{"hash", r.commit.hash},
                       {"timestamp", r.commit.timestamp},
                       {"parent_count", r.commit.parent_count},
                       {"author", {{"name", r.commit.author.name},
                                   {"email", r.commit.author.email}}}};
        j["entity_id"] = r.entity_id;
        j["file_path"] = r.file_path;
        j["method_key"] = r.method_key;
        j["before_source"] = r.before_source;
        j["after_source"] = r.after_source;
        j["ordinal"] = r.ordinal;
        out << j.dump() << '\n';
    }
}

std::vector<MethodChangeRecord> load_records_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read records: " + path);
    std::vector<MethodChangeRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json j = json::parse(line);
        MethodChangeRecord r;
        r.commit.hash = j.at("commit").at("hash").get<std::string>();
        r.commit.timestamp = j.at("commit").at("timestamp").get<std::int64_t>();
        r.commit.parent_count = j.at("commit").at("parent_count").get<int>();
        r.commit.author.name = j.at("commit").at("author").at("name").get<std::string>();
        r.commit.author.email = j.at("commit").at("author").at("email").get<std::string>();
        r.entity_id = j.at("entity_id").get<std::int64_t>();
        r.file_path = j.at("file_path").get<std::string>();
        r.method_key = j.at("method_key").get<std::string>();
        r.before_source = j.at("before_source").get<std::string>();
        r.after_source = j.at("after_source").get<std::string>();
        r.ordinal = j.at("ordinal").get<int>();
        records.push_back(std::move(r));
    }
    return records;
}

void save_buckets_json(const std::vector<TimeBucket>& buckets, const std::string& path) {
    json j = json::array();
    for (const auto& b : buckets) {
        j.push_back({{"bucket_id", b.bucket_id}, {"commit_hashes", b.commit_hashes}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write buckets: " + path);
    out << j.dump(2) << '\n';
}

std::vector<TimeBucket> load_buckets_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read buckets: " + path);
    json j;
    in >> j;
    std::vector<TimeBucket> buckets;
    for (const auto& item : j) {
        TimeBucket b;
        b.bucket_id = item.at("bucket_id").get<int>();
        b.commit_hashes = item.at("commit_hashes").get<std::vector<std::string>>();
        buckets.push_back(std::move(b));
    }
    return buckets;
}

} // namespace devstyle
