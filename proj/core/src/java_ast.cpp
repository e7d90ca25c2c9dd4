#include "devstyle/java_ast.hpp"

#include <array>
#include <fstream>
#include <utility>

namespace devstyle {

namespace {

// Kept in sync with core/data/java_node_kinds.tsv (asserted by a test).
constexpr std::array<std::pair<std::string_view, std::string_view>, 53> kJavaKinds = {{
    {"annotation", "ANN"},
    {"anonymous_class_body", "ACD"},
    {"array_access", "AA"},
    {"array_creation_expression", "ACE"},
    {"array_initializer", "AI"},
    {"array_type", "AT"},
    {"assert_statement", "AS"},
    {"assignment_expression", "ASN"},
    {"binary_expression", "IE"},
    {"block", "B"},
    {"boolean_literal", "BL"},
    {"break_statement", "BR"},
    {"cast_expression", "CAST"},
    {"catch_clause", "CC"},
    {"character_literal", "CHR"},
    {"class_declaration", "TD"},
    {"constructor_declaration", "CD"},
    {"continue_statement", "CN"},
    {"do_statement", "DO"},
    {"element_value_pair", "EVP"},
    {"empty_method", "EMPTY"},
    {"empty_statement", "EMS"},
    {"enhanced_for_statement", "EF"},
    {"expression_statement", "ES"},
    {"field_access", "FA"},
    {"field_declaration", "FD"},
    {"for_statement", "FOR"},
    {"formal_parameter", "SVD"},
    {"generic_type", "GT"},
    {"identifier", "SN"},
    {"if_statement", "IF"},
    {"instanceof_expression", "IOF"},
    {"labeled_statement", "LS"},
    {"lambda_expression", "LE"},
    {"local_variable_declaration", "VDS"},
    {"method_declaration", "MD"},
    {"method_invocation", "MI"},
    {"method_reference", "MR"},
    {"modifier", "MOD"},
    {"null_literal", "NL"},
    {"number_literal", "NUM"},
    {"object_creation_expression", "CIC"},
    {"operator", "OP"},
    {"parenthesized_expression", "PAR"},
    {"postfix_expression", "POST"},
    {"primitive_type", "PT"},
    {"resource", "RES"},
    {"return_statement", "RS"},
    {"string_literal", "STR"},
    {"super_expression", "SUPER"},
    {"switch_case", "SC"},
    {"switch_label", "SL"},
    {"switch_statement", "SW"},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 11> kJavaKindsTail = {{
    {"synchronized_statement", "SY"},
    {"ternary_expression", "CO"},
    {"this_expression", "THIS"},
    {"throw_statement", "TS"},
    {"type_identifier", "ST"},
    {"type_literal", "TL"},
    {"type_parameter", "TP"},
    {"union_type", "UT"},
    {"variable_declarator", "VDF"},
    {"while_statement", "WH"},
    {"wildcard", "WC"},
}};

} // namespace

std::size_t count_leaves(const AstNode& node) {
    if (node.is_leaf()) return 1;
    std::size_t n = 0;
    for (const AstNode& c : node.children) n += count_leaves(c);
    return n;
}

std::string ast_to_string(const AstNode& node) {
    if (node.is_leaf()) return "(" + node.kind + " " + node.token + ")";
    std::string out = "(" + node.kind;
    for (const AstNode& c : node.children) {
        out += ' ';
        out += ast_to_string(c);
    }
    out += ')';
    return out;
}

const NodeKindTable& NodeKindTable::java_default() {
    static const NodeKindTable table = [] {
        std::map<std::string, std::string> m;
        for (const auto& [raw, abbrev] : kJavaKinds) m.emplace(raw, abbrev);
        for (const auto& [raw, abbrev] : kJavaKindsTail) m.emplace(raw, abbrev);
        return NodeKindTable(std::move(m));
    }();
    return table;
}

NodeKindTable NodeKindTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read node-kind table: " + path);
    std::map<std::string, std::string> m;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::runtime_error("malformed node-kind line: " + line);
        }
        m[line.substr(0, tab)] = line.substr(tab + 1);
    }
    return NodeKindTable(std::move(m));
}

std::string NodeKindTable::canonical(std::string_view raw_kind) const {
    auto it = table_.find(std::string(raw_kind));
    return it == table_.end() ? std::string(raw_kind) : it->second;
}

AstNode empty_method_tree() {
    AstNode node;
    node.kind = NodeKindTable::java_default().canonical("empty_method");
    node.token = "<EMPTY>";
    return node;
}

} // namespace devstyle
