#pragma once

#include <string>
#include <vector>

namespace devstyle {

/// A method or constructor declaration found in a Java source file.
/// `text` is the verbatim slice from the first header token (annotations and
/// modifiers included) through the closing brace or semicolon.
struct ExtractedMethod {
    std::vector<std::string> type_chain; // named enclosing types, outermost first
    std::string name;
    std::size_t param_count = 0;
    std::vector<std::string> param_types; // normalized type token spellings
    std::string text;
    std::size_t start_offset = 0;

    /// `Outer.Inner.name/arity` — the identity used for cross-version matching.
    std::string method_key() const;
};

/// Scans a whole Java file and extracts the methods and constructors declared
/// directly in named type bodies. Method bodies are skipped wholesale, so
/// members of anonymous and method-local classes stay part of the enclosing
/// method's text. Throws ParseError (via the lexer) on files that cannot be
/// tokenized or whose braces do not balance.
std::vector<ExtractedMethod> extract_methods(const std::string& file_source);

} // namespace devstyle
