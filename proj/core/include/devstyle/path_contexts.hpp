#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "devstyle/java_ast.hpp"

namespace devstyle {

enum class PathStep : unsigned char { Up, Down };

/// Leaf-to-leaf walk through the AST: node kinds joined by '^' (towards the
/// root) and '_' (away from it), e.g. SN^MD_SVD_SN.
struct AstPath {
    std::vector<std::string> node_kinds;
    std::vector<PathStep> directions; // size = node_kinds.size() - 1

    auto operator<=>(const AstPath&) const = default;
};

std::string serialize_path(const AstPath& path);
AstPath parse_path(const std::string& serialized);
AstPath reverse_path(const AstPath& path);

/// (start token, path, end token). Canonical orientation: the start token is
/// lexicographically <= the end token; ties keep source order.
struct PathContext {
    std::string start_token;
    AstPath path;
    std::string end_token;

    auto operator<=>(const PathContext&) const = default;
};

/// `start,path,end` with '\' and ',' escaped inside tokens.
std::string serialize_path_context(const PathContext& context);
PathContext parse_path_context(const std::string& serialized);

/// All leaf-pair path-contexts with at most `max_length` nodes on the path and
/// width at most `max_width`, where width is the distance between the child
/// indices, at the path's topmost node, of the two subtrees the path descends
/// into. Requires max_length >= 3 and max_width >= 1.
std::set<PathContext> enumerate_path_contexts(const AstNode& ast, std::size_t max_length,
                                              std::size_t max_width);

constexpr std::size_t kDefaultMaxPathLength = 8;
constexpr std::size_t kDefaultMaxPathWidth = 2;

struct PathContextDiff {
    std::set<PathContext> introduced;
    std::set<PathContext> removed;

    bool empty() const { return introduced.empty() && removed.empty(); }
};

/// introduced = after \ before, removed = before \ after.
PathContextDiff diff_path_contexts(const std::set<PathContext>& before,
                                   const std::set<PathContext>& after);

} // namespace devstyle
