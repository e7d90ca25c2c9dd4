#include "devstyle/path_contexts.hpp"

#include <algorithm>
#include <stdexcept>

namespace devstyle {

namespace {

struct FlatTree {
    std::vector<const AstNode*> nodes; // preorder
    std::vector<int> parent;
    std::vector<std::size_t> subtree_size;
};

std::size_t flatten(const AstNode& node, int parent, FlatTree& out) {
    const std::size_t id = out.nodes.size();
    out.nodes.push_back(&node);
    out.parent.push_back(parent);
    out.subtree_size.push_back(0);
    std::size_t size = 1;
    for (const AstNode& c : node.children) {
        size += flatten(c, static_cast<int>(id), out);
    }
    out.subtree_size[id] = size;
    return size;
}

/// Leaves in the subtree rooted at `root`, paired with their edge distance
/// from it, in source order. Subtrees deeper than `max_edges` are pruned.
void collect_leaves(const FlatTree& tree, std::size_t root, std::size_t max_edges,
                    std::vector<std::pair<std::size_t, std::size_t>>& out) {
    struct Frame {
        std::size_t id;
        std::size_t edges;
    };
    std::vector<Frame> stack = {{root, 0}};
    while (!stack.empty()) {
        const Frame f = stack.back();
        stack.pop_back();
        const AstNode* n = tree.nodes[f.id];
        if (n->is_leaf()) {
            out.emplace_back(f.id, f.edges);
            continue;
        }
        if (f.edges >= max_edges) continue;
        std::size_t child_id = f.id + 1;
        std::vector<std::size_t> child_ids;
        child_ids.reserve(n->children.size());
        for (std::size_t i = 0; i < n->children.size(); ++i) {
            child_ids.push_back(child_id);
            child_id += tree.subtree_size[child_id];
        }
        for (auto it = child_ids.rbegin(); it != child_ids.rend(); ++it) {
            stack.push_back({*it, f.edges + 1});
        }
    }
}

/// Kinds on the chain from `leaf` up to and including `top`.
std::vector<std::string> chain_kinds(const FlatTree& tree, std::size_t leaf,
                                     std::size_t top) {
    std::vector<std::string> kinds;
    for (std::size_t id = leaf;;) {
        kinds.push_back(tree.nodes[id]->kind);
        if (id == top) break;
        id = static_cast<std::size_t>(tree.parent[id]);
    }
    return kinds;
}

std::string escape_token(const std::string& token) {
    std::string out;
    out.reserve(token.size());
    for (char c : token) {
        if (c == '\\' || c == ',') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string serialize_path(const AstPath& path) {
    std::string out;
    for (std::size_t i = 0; i < path.node_kinds.size(); ++i) {
        if (i > 0) out += path.directions[i - 1] == PathStep::Up ? '^' : '_';
        out += path.node_kinds[i];
    }
    return out;
}

AstPath parse_path(const std::string& serialized) {
    AstPath path;
    std::string cur;
    for (char c : serialized) {
        if (c == '^' || c == '_') {
            path.node_kinds.push_back(cur);
            cur.clear();
            path.directions.push_back(c == '^' ? PathStep::Up : PathStep::Down);
        } else {
            cur += c;
        }
    }
    path.node_kinds.push_back(cur);
    return path;
}

AstPath reverse_path(const AstPath& path) {
    AstPath out;
    out.node_kinds.assign(path.node_kinds.rbegin(), path.node_kinds.rend());
    out.directions.reserve(path.directions.size());
    for (auto it = path.directions.rbegin(); it != path.directions.rend(); ++it) {
        out.directions.push_back(*it == PathStep::Up ? PathStep::Down : PathStep::Up);
    }
    return out;
}

std::string serialize_path_context(const PathContext& context) {
    return escape_token(context.start_token) + ',' + serialize_path(context.path) + ',' +
           escape_token(context.end_token);
}

PathContext parse_path_context(const std::string& serialized) {
    std::vector<std::string> fields;
    std::string cur;
    for (std::size_t i = 0; i < serialized.size(); ++i) {
        const char c = serialized[i];
        if (c == '\\' && i + 1 < serialized.size()) {
            cur += serialized[++i];
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    if (fields.size() != 3) {
        throw std::invalid_argument("malformed path-context: " + serialized);
    }
    return PathContext{std::move(fields[0]), parse_path(fields[1]), std::move(fields[2])};
}

std::set<PathContext> enumerate_path_contexts(const AstNode& ast, std::size_t max_length,
                                              std::size_t max_width) {
    if (max_length < 3) throw std::invalid_argument("max_length must be >= 3");
    if (max_width < 1) throw std::invalid_argument("max_width must be >= 1");

    FlatTree tree;
    flatten(ast, -1, tree);

    // A leaf at e edges below a child subtree root sits e+1 edges below the
    // joining node, so the tightest useful bound is e <= max_length - 3.
    const std::size_t max_edges_below_child = max_length - 3;

    std::set<PathContext> contexts;
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
        const AstNode* node = tree.nodes[v];
        if (node->is_leaf()) continue;

        std::vector<std::size_t> child_roots;
        child_roots.reserve(node->children.size());
        std::size_t child_id = v + 1;
        for (std::size_t i = 0; i < node->children.size(); ++i) {
            child_roots.push_back(child_id);
            child_id += tree.subtree_size[child_id];
        }

        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> per_child(
            child_roots.size());
        for (std::size_t i = 0; i < child_roots.size(); ++i) {
            collect_leaves(tree, child_roots[i], max_edges_below_child, per_child[i]);
        }

        for (std::size_t i = 0; i < child_roots.size(); ++i) {
            for (std::size_t j = i + 1; j < child_roots.size() && j - i <= max_width; ++j) {
                for (const auto& [leaf_a, ea] : per_child[i]) {
                    for (const auto& [leaf_b, eb] : per_child[j]) {
                        // Path node count: (ea + 1) + (eb + 1) + 1.
                        if (ea + eb + 3 > max_length) continue;

                        std::vector<std::string> up = chain_kinds(tree, leaf_a, v);
                        const std::vector<std::string> down = chain_kinds(tree, leaf_b, v);

                        AstPath path;
                        path.node_kinds = std::move(up);
                        for (std::size_t k = down.size() - 1; k-- > 0;) {
                            path.node_kinds.push_back(down[k]);
                        }
                        path.directions.assign(path.node_kinds.size() - 1, PathStep::Down);
                        for (std::size_t k = 0; k <= ea; ++k) {
                            path.directions[k] = PathStep::Up;
                        }

                        const std::string& tok_a = tree.nodes[leaf_a]->token;
                        const std::string& tok_b = tree.nodes[leaf_b]->token;

                        PathContext ctx;
                        if (tok_b < tok_a) {
                            ctx.start_token = tok_b;
                            ctx.path = reverse_path(path);
                            ctx.end_token = tok_a;
                        } else {
                            ctx.start_token = tok_a;
                            ctx.path = std::move(path);
                            ctx.end_token = tok_b;
                        }
                        contexts.insert(std::move(ctx));
                    }
                }
            }
        }
    }
    return contexts;
}

PathContextDiff diff_path_contexts(const std::set<PathContext>& before,
                                   const std::set<PathContext>& after) {
    PathContextDiff diff;
    std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                        std::inserter(diff.introduced, diff.introduced.end()));
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::inserter(diff.removed, diff.removed.end()));
    return diff;
}

} // namespace devstyle
