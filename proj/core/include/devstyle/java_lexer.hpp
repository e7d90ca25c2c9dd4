#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace devstyle {

enum class TokenKind {
    Identifier,
    Keyword,
    Number,
    String,
    Char,
    Punct,
    EndOfFile,
};

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;
    std::size_t offset = 0; // byte offset of the first character
    std::size_t end = 0;    // one past the last character
    int line = 1;
    int column = 1;
};

struct LexError : std::runtime_error {
    LexError(const std::string& message, int line, int column)
        : std::runtime_error(message + " at " + std::to_string(line) + ":" +
                             std::to_string(column)),
          line(line),
          column(column) {}
    int line;
    int column;
};

bool is_java_keyword(std::string_view word);

/// Tokenize Java source. Comments and whitespace are dropped; string, char and
/// text-block literals come back as single tokens with their quotes intact.
/// Throws LexError on unterminated literals or comments.
std::vector<Token> lex_java(std::string_view source);

} // namespace devstyle
