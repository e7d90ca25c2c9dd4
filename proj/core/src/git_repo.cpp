#include "devstyle/git_repo.hpp"

#include <algorithm>
#include <stdexcept>

#include "devstyle/subprocess.hpp"

namespace devstyle {

namespace {

std::vector<std::string> split_on(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

bool is_null_sha(const std::string& sha) {
    return std::all_of(sha.begin(), sha.end(), [](char c) { return c == '0'; });
}

} // namespace

GitRepo::GitRepo(std::string repo_path, std::string branch)
    : repo_path_(std::move(repo_path)) {
    const std::string rev = branch.empty() ? "HEAD" : branch;
    CommandResult r = run_command(git_argv({"rev-parse", "--verify", rev + "^{commit}"}));
    if (r.exit_code != 0) {
        throw std::runtime_error("not a readable git repository (or unknown branch '" +
                                 rev + "'): " + repo_path_);
    }
    tip_ = r.output;
    while (!tip_.empty() && (tip_.back() == '\n' || tip_.back() == '\r')) tip_.pop_back();
    if (tip_.empty()) throw std::runtime_error("empty rev-parse output for " + repo_path_);
}

std::vector<std::string> GitRepo::git_argv(std::initializer_list<std::string> args) const {
    std::vector<std::string> argv = {"git", "-C", repo_path_};
    argv.insert(argv.end(), args.begin(), args.end());
    return argv;
}

std::vector<CommitMeta> GitRepo::list_commits() const {
    // %x00 field separator, %x01 record separator; subjects are not included
    // so the only free-form fields are author name and email.
    const std::string out = run_command_checked(git_argv(
        {"log", "--topo-order", "--reverse", "--format=%H%x00%an%x00%ae%x00%at%x00%P%x01",
         tip_}));
    std::vector<CommitMeta> commits;
    for (const std::string& record : split_on(out, '\x01')) {
        std::string trimmed = record;
        while (!trimmed.empty() && (trimmed.front() == '\n' || trimmed.front() == '\r')) {
            trimmed.erase(trimmed.begin());
        }
        if (trimmed.empty()) continue;
        const auto fields = split_on(trimmed, '\0');
        if (fields.size() < 5) {
            throw std::runtime_error("unexpected git log record: " + trimmed);
        }
        CommitMeta meta;
        meta.hash = fields[0];
        meta.author.name = fields[1];
        meta.author.email = fields[2].empty() ? "<none>" : fields[2];
        meta.timestamp = std::stoll(fields[3]);
        const std::string& parents = fields[4];
        meta.parent_count = 0;
        if (!parents.empty()) {
            meta.parent_count = 1 + static_cast<int>(std::count(parents.begin(),
                                                                parents.end(), ' '));
        }
        commits.push_back(std::move(meta));
    }
    return commits;
}

std::vector<FileChange> GitRepo::changed_files(const std::string& commit_hash) const {
    const std::string out = run_command_checked(git_argv(
        {"diff-tree", "-r", "-z", "--no-renames", "--root", commit_hash}));
    std::vector<FileChange> changes;
    const auto tokens = split_on(out, '\0');
    // Format: optional leading commit id token, then alternating
    // ":oldmode newmode oldsha newsha status" and "path" tokens.
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t.empty() || t[0] != ':') continue;
        if (i + 1 >= tokens.size()) break;
        const auto cols = split_on(t.substr(1), ' ');
        if (cols.size() < 5) continue;
        FileChange fc;
        fc.old_blob = cols[2];
        fc.new_blob = cols[3];
        fc.status = cols[4][0];
        fc.path = tokens[i + 1];
        ++i;
        if (fc.status == 'T') fc.status = 'M'; // type change: treat as modification
        if (fc.status != 'A' && fc.status != 'M' && fc.status != 'D') continue;
        if (fc.status == 'A' && !is_null_sha(fc.old_blob)) fc.old_blob.assign(40, '0');
        changes.push_back(std::move(fc));
    }
    std::sort(changes.begin(), changes.end(),
              [](const FileChange& a, const FileChange& b) { return a.path < b.path; });
    return changes;
}

std::string GitRepo::read_blob(const std::string& blob_sha) const {
    return run_command_checked(git_argv({"cat-file", "blob", blob_sha}));
}

} // namespace devstyle
