#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace devstyle {

/// Raw VCS attribution as recorded on a commit, before any merging.
struct AuthorIdentity {
    std::string name;
    std::string email;

    auto operator<=>(const AuthorIdentity&) const = default;
};

/// One developer after alias resolution: the connected component of the
/// bipartite name/email graph this identity belongs to.
struct MergedEntity {
    std::int64_t entity_id = -1;
    std::set<std::string> names;
    std::set<std::string> emails;
};

/// Connected components of the bipartite graph whose vertex sets are names and
/// emails and whose edges are the observed (name, email) pairs. Entity ids are
/// assigned by sorting components on their lexicographically smallest email,
/// so the result is independent of input order.
std::vector<MergedEntity> merge_identities(const std::set<AuthorIdentity>& pairs);

/// Entity lookup for mined commits.
class EntityMap {
public:
    explicit EntityMap(std::vector<MergedEntity> entities);

    std::int64_t entity_of(const AuthorIdentity& id) const;
    const std::vector<MergedEntity>& entities() const { return entities_; }

    /// `entity_id<TAB>semicolon-joined names<TAB>semicolon-joined emails`
    void save(const std::string& path) const;
    static EntityMap load(const std::string& path);

private:
    std::vector<MergedEntity> entities_;
    std::map<std::string, std::int64_t> by_email_;
};

} // namespace devstyle
