#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "devstyle/identity.hpp"

namespace devstyle {

struct CommitMeta {
    std::string hash;
    std::int64_t timestamp = 0; // seconds since epoch, UTC
    int parent_count = 0;
    AuthorIdentity author;
};

struct FileChange {
    char status = '?'; // A, M, D
    std::string path;
    std::string old_blob; // all-zero sha when the file was added
    std::string new_blob; // all-zero sha when the file was deleted
};

/// Read-only view of a local git repository, backed by the git CLI.
class GitRepo {
public:
    /// Resolves `branch` (or HEAD when empty) to a tip commit.
    /// Throws when the path is not a readable repository.
    GitRepo(std::string repo_path, std::string branch = "");

    const std::string& tip() const { return tip_; }

    /// Full ancestry of the tip, oldest first, topologically ordered.
    /// Includes merge commits; callers filter on parent_count.
    std::vector<CommitMeta> list_commits() const;

    /// Changes of a non-merge commit against its first parent
    /// (or the empty tree for a root commit). Renames are not detected.
    std::vector<FileChange> changed_files(const std::string& commit_hash) const;

    std::string read_blob(const std::string& blob_sha) const;

private:
    std::vector<std::string> git_argv(std::initializer_list<std::string> args) const;

    std::string repo_path_;
    std::string tip_;
};

} // namespace devstyle
