#include "devstyle/identity.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace devstyle {

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) {
        if (!out.empty()) out += ';';
        out += s;
    }
    return out;
}

std::set<std::string> split(const std::string& joined) {
    std::set<std::string> out;
    std::string cur;
    for (char c : joined) {
        if (c == ';') {
            if (!cur.empty()) out.insert(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.insert(cur);
    return out;
}

} // namespace

std::vector<MergedEntity> merge_identities(const std::set<AuthorIdentity>& pairs) {
    // Vertex numbering: names first, then emails. std::map keeps it sorted and
    // therefore deterministic.
    std::map<std::string, std::size_t> name_vertex;
    std::map<std::string, std::size_t> email_vertex;
    for (const auto& p : pairs) {
        name_vertex.emplace(p.name, 0);
        email_vertex.emplace(p.email, 0);
    }
    std::size_t next = 0;
    for (auto& [name, v] : name_vertex) v = next++;
    for (auto& [email, v] : email_vertex) v = next++;

    UnionFind uf(next);
    for (const auto& p : pairs) {
        uf.unite(name_vertex.at(p.name), email_vertex.at(p.email));
    }

    std::map<std::size_t, MergedEntity> components;
    for (const auto& [name, v] : name_vertex) components[uf.find(v)].names.insert(name);
    for (const auto& [email, v] : email_vertex) components[uf.find(v)].emails.insert(email);

    std::vector<MergedEntity> entities;
    entities.reserve(components.size());
    for (auto& [root, entity] : components) entities.push_back(std::move(entity));
    std::sort(entities.begin(), entities.end(),
              [](const MergedEntity& a, const MergedEntity& b) {
                  return *a.emails.begin() < *b.emails.begin();
              });
    for (std::size_t i = 0; i < entities.size(); ++i) {
        entities[i].entity_id = static_cast<std::int64_t>(i);
    }
    return entities;
}

EntityMap::EntityMap(std::vector<MergedEntity> entities) : entities_(std::move(entities)) {
    for (const auto& e : entities_) {
        for (const auto& email : e.emails) by_email_[email] = e.entity_id;
    }
}

std::int64_t EntityMap::entity_of(const AuthorIdentity& id) const {
    // Emails are partitioned across entities, so the email alone decides.
    auto it = by_email_.find(id.email);
    if (it == by_email_.end()) {
        throw std::runtime_error("identity not covered by entity map: " + id.name + " <" +
                                 id.email + ">");
    }
    return it->second;
}

void EntityMap::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write entity map: " + path);
    for (const auto& e : entities_) {
        out << e.entity_id << '\t' << join(e.names) << '\t' << join(e.emails) << '\n';
    }
}

EntityMap EntityMap::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read entity map: " + path);
    std::vector<MergedEntity> entities;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string id_text, names, emails;
        if (!std::getline(fields, id_text, '\t') || !std::getline(fields, names, '\t') ||
            !std::getline(fields, emails, '\t')) {
            throw std::runtime_error("malformed entity map line: " + line);
        }
        MergedEntity e;
        e.entity_id = std::stoll(id_text);
        e.names = split(names);
        e.emails = split(emails);
        entities.push_back(std::move(e));
    }
    return EntityMap(std::move(entities));
}

} // namespace devstyle
