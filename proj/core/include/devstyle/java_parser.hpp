#pragma once

#include <memory>

#include "devstyle/java_ast.hpp"

namespace devstyle {

/// Hand-written recursive-descent grammar for Java method declarations.
/// The produced shape follows the JDT convention: a method's name, parameters
/// and body hang directly off the method_declaration node, so the name and a
/// parameter's identifier are connected via SN ^ MD v SVD v SN.
class JavaGrammar final : public MethodGrammar {
public:
    JavaGrammar() : kinds_(&NodeKindTable::java_default()) {}
    explicit JavaGrammar(const NodeKindTable& kinds) : kinds_(&kinds) {}

    std::string language() const override { return "java"; }
    AstNode parse_method(std::string_view source) const override;

private:
    const NodeKindTable* kinds_;
};

/// Factory for the pluggable grammar seam. Only "java" is registered.
std::unique_ptr<MethodGrammar> make_grammar(const std::string& language);

} // namespace devstyle
