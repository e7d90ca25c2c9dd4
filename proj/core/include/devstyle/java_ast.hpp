#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace devstyle {

/// AST node. `kind` holds the canonical abbreviation from the node-kind table
/// (MD, SVD, SN, ...). Leaves carry tokens; internal nodes have children.
///
/// Constructs that syntactically exist but hold nothing (an empty block, an
/// empty array initializer, a bare `return;`) become leaves carrying a fixed
/// surface token ("{}", "return", ...) so the leaf/token invariant holds.
struct AstNode {
    std::string kind;
    std::string token;
    std::vector<AstNode> children;

    bool is_leaf() const { return children.empty(); }
    bool operator==(const AstNode&) const = default;
};

std::size_t count_leaves(const AstNode& node);

/// Compact s-expression form, e.g. (MD (ST int) (SN square) ...). Used for
/// structural equality checks between method versions.
std::string ast_to_string(const AstNode& node);

struct ParseError : std::runtime_error {
    ParseError(const std::string& message, int line, int column)
        : std::runtime_error(message + " at " + std::to_string(line) + ":" +
                             std::to_string(column)),
          line(line),
          column(column) {}
    int line;
    int column;
};

/// Maps raw parser node kinds (method_declaration, formal_parameter, ...) to
/// the canonical abbreviations used in serialized paths (MD, SVD, ...).
/// Unknown kinds pass through verbatim so the pipeline stays total.
class NodeKindTable {
public:
    static const NodeKindTable& java_default();

    /// Text file, one `parser_kind<TAB>abbreviation` per line; '#' comments.
    static NodeKindTable load(const std::string& path);

    std::string canonical(std::string_view raw_kind) const;
    const std::map<std::string, std::string>& entries() const { return table_; }

    explicit NodeKindTable(std::map<std::string, std::string> table)
        : table_(std::move(table)) {}

private:
    std::map<std::string, std::string> table_;
};

/// Pluggable per-language grammar seam. The subject corpus is Java; other
/// languages slot in behind this interface.
class MethodGrammar {
public:
    virtual ~MethodGrammar() = default;
    virtual std::string language() const = 0;

    /// Parses one method (or constructor) declaration. An empty or
    /// whitespace-only source yields the designated empty tree, which
    /// produces zero path-contexts. Throws ParseError with position info.
    virtual AstNode parse_method(std::string_view source) const = 0;
};

/// The designated result of parsing empty method source.
AstNode empty_method_tree();

} // namespace devstyle
