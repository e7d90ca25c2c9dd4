#include "devstyle/java_lexer.hpp"

#include <array>
#include <cctype>

namespace devstyle {

namespace {

// Reserved words only; `var`, `record`, `yield` and friends are contextual
// and lex as identifiers.
const std::array<std::string_view, 53> kKeywords = {
    "abstract", "assert",    "boolean",   "break",      "byte",   "case",
    "catch",    "char",      "class",     "const",      "continue", "default",
    "do",       "double",    "else",      "enum",       "extends", "final",
    "finally",  "float",     "for",       "goto",       "if",      "implements",
    "import",   "instanceof","int",       "interface",  "long",    "native",
    "new",      "package",   "private",   "protected",  "public",  "return",
    "short",    "static",    "strictfp",  "super",      "switch",  "synchronized",
    "this",     "throw",     "throws",    "transient",  "try",     "void",
    "volatile", "while",     "true",      "false",      "null",
};

// Longest first so maximal munch works with a linear scan.
const std::array<std::string_view, 38> kPuncts = {
    ">>>=", ">>>", ">>=", "<<=", "...", "->", "::", "++", "--", "<<", ">>",
    "<=",  ">=",  "==",  "!=",  "&&", "||", "+=", "-=", "*=", "/=", "%=",
    "&=",  "|=",  "^=",  ".",   "(",  ")",  "{",  "}",  "[",  "]",  ";",
    ",",   "<",   ">",   "=",   "@",
};

const std::string_view kSinglePuncts = "+-*/%!~&|^?:";

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80;
}

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        for (;;) {
            skip_trivia();
            Token t = next_token();
            const bool at_end = t.kind == TokenKind::EndOfFile;
            tokens.push_back(std::move(t));
            if (at_end) break;
        }
        return tokens;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (pos_ >= src_.size()) return;
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_trivia() {
        for (;;) {
            const char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (peek() != '\n' && peek() != '\0') advance();
            } else if (c == '/' && peek(1) == '*') {
                const int l = line_, col = column_;
                advance();
                advance();
                while (!(peek() == '*' && peek(1) == '/')) {
                    if (peek() == '\0') throw LexError("unterminated block comment", l, col);
                    advance();
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    Token start_token(TokenKind kind) const {
        Token t;
        t.kind = kind;
        t.offset = pos_;
        t.line = line_;
        t.column = column_;
        return t;
    }

    Token finish(Token t) const {
        t.end = pos_;
        t.text = std::string(src_.substr(t.offset, pos_ - t.offset));
        return t;
    }

    Token next_token() {
        const char c = peek();
        if (c == '\0') {
            Token t = start_token(TokenKind::EndOfFile);
            t.end = pos_;
            return t;
        }
        if (is_ident_start(static_cast<unsigned char>(c))) return lex_word();
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_number();
        if (c == '"') return peek(1) == '"' && peek(2) == '"' ? lex_text_block() : lex_string();
        if (c == '\'') return lex_char();
        return lex_punct();
    }

    Token lex_word() {
        Token t = start_token(TokenKind::Identifier);
        while (is_ident_part(static_cast<unsigned char>(peek()))) advance();
        t = finish(t);
        if (is_java_keyword(t.text)) t.kind = TokenKind::Keyword;
        return t;
    }

    Token lex_number() {
        Token t = start_token(TokenKind::Number);
        while (true) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                advance();
            } else if (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                advance();
            } else if (c == '.' && pos_ > t.offset &&
                       std::isdigit(static_cast<unsigned char>(src_[pos_ - 1])) &&
                       !std::isdigit(static_cast<unsigned char>(peek(1))) &&
                       peek(1) != '.' && !is_ident_start(static_cast<unsigned char>(peek(1)))) {
                advance(); // trailing dot as in `1.`
            } else if ((c == '+' || c == '-') && pos_ > t.offset &&
                       (src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E' ||
                        src_[pos_ - 1] == 'p' || src_[pos_ - 1] == 'P')) {
                advance(); // exponent sign
            } else {
                break;
            }
        }
        return finish(t);
    }

    Token lex_string() {
        Token t = start_token(TokenKind::String);
        const int l = line_, col = column_;
        advance();
        while (peek() != '"') {
            if (peek() == '\0' || peek() == '\n') {
                throw LexError("unterminated string literal", l, col);
            }
            if (peek() == '\\') advance();
            advance();
        }
        advance();
        return finish(t);
    }

    Token lex_text_block() {
        Token t = start_token(TokenKind::String);
        const int l = line_, col = column_;
        advance();
        advance();
        advance();
        while (!(peek() == '"' && peek(1) == '"' && peek(2) == '"')) {
            if (peek() == '\0') throw LexError("unterminated text block", l, col);
            if (peek() == '\\') advance();
            advance();
        }
        advance();
        advance();
        advance();
        return finish(t);
    }

    Token lex_char() {
        Token t = start_token(TokenKind::Char);
        const int l = line_, col = column_;
        advance();
        while (peek() != '\'') {
            if (peek() == '\0' || peek() == '\n') {
                throw LexError("unterminated char literal", l, col);
            }
            if (peek() == '\\') advance();
            advance();
        }
        advance();
        return finish(t);
    }

    Token lex_punct() {
        for (std::string_view p : kPuncts) {
            if (src_.substr(pos_, p.size()) == p) {
                Token t = start_token(TokenKind::Punct);
                for (std::size_t i = 0; i < p.size(); ++i) advance();
                return finish(t);
            }
        }
        if (kSinglePuncts.find(peek()) != std::string_view::npos) {
            Token t = start_token(TokenKind::Punct);
            advance();
            return finish(t);
        }
        throw LexError(std::string("unexpected character '") + peek() + "'", line_, column_);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

} // namespace

bool is_java_keyword(std::string_view word) {
    for (std::string_view k : kKeywords) {
        if (k == word) return true;
    }
    return false;
}

std::vector<Token> lex_java(std::string_view source) {
    return Lexer(source).run();
}

} // namespace devstyle
