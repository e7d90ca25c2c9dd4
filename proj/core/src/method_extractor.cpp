#include "devstyle/method_extractor.hpp"

#include "devstyle/java_ast.hpp"
#include "devstyle/java_lexer.hpp"

namespace devstyle {

namespace {

bool is_modifier_word(const std::string& t) {
    return t == "public" || t == "protected" || t == "private" || t == "static" ||
           t == "final" || t == "abstract" || t == "native" || t == "synchronized" ||
           t == "transient" || t == "volatile" || t == "strictfp" || t == "default";
}

bool is_primitive_word(const std::string& t) {
    return t == "boolean" || t == "byte" || t == "short" || t == "int" || t == "long" ||
           t == "char" || t == "float" || t == "double" || t == "void";
}

/// How many '>' a punct token contributes when closing generics.
int gt_count(const std::string& t) {
    if (t == ">") return 1;
    if (t == ">>") return 2;
    if (t == ">>>") return 3;
    return 0;
}

class Scanner {
public:
    explicit Scanner(const std::string& source)
        : source_(source), tokens_(lex_java(source)) {}

    std::vector<ExtractedMethod> run() {
        while (!at_end()) {
            scan_top(/*in_type_body=*/!chain_.empty());
        }
        if (!chain_.empty()) {
            throw ParseError("unbalanced braces at end of file", tokens_.back().line,
                             tokens_.back().column);
        }
        return methods_;
    }

private:
    const Token& tok(std::size_t i) const {
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }
    const std::string& text(std::size_t i) const { return tok(i).text; }
    bool at_end() const { return tok(pos_).kind == TokenKind::EndOfFile; }

    void scan_top(bool in_type_body) {
        const Token& t = tok(pos_);
        if (t.text == "}") {
            if (chain_.empty()) {
                throw ParseError("unmatched '}'", t.line, t.column);
            }
            chain_.pop_back();
            ++pos_;
            return;
        }
        if (t.text == ";") {
            ++pos_;
            return;
        }
        if (t.text == "package" || t.text == "import") {
            skip_until_semicolon();
            return;
        }
        if (t.text == "class" || t.text == "interface" || t.text == "enum" ||
            (t.text == "@" && text(pos_ + 1) == "interface")) {
            enter_type_declaration();
            return;
        }
        if (in_type_body) {
            if (try_method_declaration()) return;
            skip_member();
            return;
        }
        // Prologue before the first type: annotations, modifiers.
        ++pos_;
    }

    void skip_until_semicolon() {
        while (!at_end() && text(pos_) != ";") ++pos_;
        if (!at_end()) ++pos_;
    }

    void enter_type_declaration() {
        if (text(pos_) == "@") ++pos_; // @interface
        ++pos_;                        // class / interface / enum
        std::string name = "<anon>";
        if (tok(pos_).kind == TokenKind::Identifier) {
            name = text(pos_);
            ++pos_;
        }
        while (!at_end() && text(pos_) != "{") ++pos_;
        if (at_end()) {
            throw ParseError("type declaration without body", tok(pos_).line,
                             tok(pos_).column);
        }
        ++pos_; // '{'
        chain_.push_back(std::move(name));
    }

    /// Skips an uninteresting member (field, initializer block, enum constant
    /// list entry) up to and including its terminating ';' or balanced braces.
    void skip_member() {
        while (!at_end()) {
            const std::string& t = text(pos_);
            if (t == ";") {
                ++pos_;
                return;
            }
            if (t == "}") return; // let scan_top pop the scope
            if (t == "{") {
                skip_balanced_braces();
                // Initializer blocks and enum constant bodies have no ';'.
                if (text(pos_) == ";" || text(pos_) == ",") ++pos_;
                return;
            }
            if (t == "(") {
                skip_balanced('(', ')');
                continue;
            }
            ++pos_;
        }
    }

    void skip_balanced(const char open, const char close) {
        int depth = 0;
        const Token& start = tok(pos_);
        while (!at_end()) {
            const std::string& t = text(pos_);
            if (t.size() == 1 && t[0] == open) ++depth;
            if (t.size() == 1 && t[0] == close) {
                if (--depth == 0) {
                    ++pos_;
                    return;
                }
            }
            ++pos_;
        }
        throw ParseError(std::string("unbalanced '") + open + "'", start.line, start.column);
    }

    void skip_balanced_braces() { skip_balanced('{', '}'); }

    // --- method header matching ---------------------------------------------

    /// From `i`, advances over annotations and modifier keywords.
    std::size_t skip_header_prefix(std::size_t i) const {
        for (;;) {
            if (text(i) == "@" && text(i + 1) != "interface") {
                i += 2; // '@' Name
                while (text(i) == "." && tok(i + 1).kind == TokenKind::Identifier) i += 2;
                if (text(i) == "(") i = skip_parens_from(i);
            } else if (tok(i).kind == TokenKind::Keyword && is_modifier_word(text(i))) {
                ++i;
            } else {
                return i;
            }
        }
    }

    std::size_t skip_parens_from(std::size_t i) const {
        int depth = 0;
        while (i < tokens_.size() && tok(i).kind != TokenKind::EndOfFile) {
            if (text(i) == "(") ++depth;
            if (text(i) == ")") {
                if (--depth == 0) return i + 1;
            }
            ++i;
        }
        return i;
    }

    /// Advances over a balanced generic argument/parameter list starting at '<'.
    std::size_t skip_angles_from(std::size_t i, bool& ok) const {
        int depth = 0;
        ok = false;
        while (i < tokens_.size() && tok(i).kind != TokenKind::EndOfFile) {
            const std::string& t = text(i);
            if (t == "<") {
                ++depth;
            } else if (int n = gt_count(t); n > 0) {
                depth -= n;
                if (depth <= 0) {
                    ok = depth == 0;
                    return i + 1;
                }
            } else if (t == ";" || t == "{" || t == "}" || t == "(") {
                return i; // generics never span these
            }
            ++i;
        }
        return i;
    }

    /// Matches a type spelling: primitive or dotted name, optional generics,
    /// optional array dims. Returns one past the last token or `i` on failure.
    std::size_t match_type(std::size_t i) const {
        if (tok(i).kind == TokenKind::Keyword && is_primitive_word(text(i))) {
            ++i;
        } else if (tok(i).kind == TokenKind::Identifier) {
            ++i;
            while (text(i) == "." && tok(i + 1).kind == TokenKind::Identifier) i += 2;
            if (text(i) == "<") {
                bool ok = false;
                const std::size_t j = skip_angles_from(i, ok);
                if (!ok) return i;
                i = j;
                while (text(i) == "." && tok(i + 1).kind == TokenKind::Identifier) {
                    i += 2;
                }
            }
        } else {
            return i;
        }
        while (text(i) == "[" && text(i + 1) == "]") i += 2;
        return i;
    }

    bool try_method_declaration() {
        const std::size_t start = pos_;
        std::size_t i = skip_header_prefix(start);
        if (text(i) == "<") {
            bool ok = false;
            i = skip_angles_from(i, ok);
            if (!ok) return false;
        }

        std::string name;
        if (tok(i).kind == TokenKind::Identifier && text(i + 1) == "(" &&
            !chain_.empty() && text(i) == chain_.back()) {
            // Constructors are named after their type; this also keeps enum
            // constants like FOO(1) { ... } from matching.
            name = text(i);
            ++i;
        } else {
            const std::size_t after_type = match_type(i);
            if (after_type == i) return false;
            i = after_type;
            if (tok(i).kind != TokenKind::Identifier || text(i + 1) != "(") return false;
            name = text(i);
            ++i;
        }

        const std::size_t params_open = i;
        const std::size_t after_params = skip_parens_from(params_open);
        if (after_params <= params_open) return false;
        i = after_params;
        while (text(i) == "[" && text(i + 1) == "]") i += 2;
        if (text(i) == "throws") {
            ++i;
            for (;;) {
                const std::size_t after = match_type(i);
                if (after == i) return false;
                i = after;
                if (text(i) != ",") break;
                ++i;
            }
        }

        std::size_t end_token;
        if (text(i) == "{") {
            const std::size_t body_open = i;
            std::size_t j = body_open;
            int depth = 0;
            for (;; ++j) {
                if (tok(j).kind == TokenKind::EndOfFile) {
                    throw ParseError("unbalanced method body", tok(body_open).line,
                                     tok(body_open).column);
                }
                if (text(j) == "{") ++depth;
                if (text(j) == "}" && --depth == 0) break;
            }
            end_token = j;
        } else if (text(i) == ";") {
            end_token = i;
        } else {
            return false; // e.g. a field like `Foo bar = baz();`
        }

        ExtractedMethod m;
        m.type_chain = chain_;
        m.name = std::move(name);
        collect_params(params_open, after_params - 1, m);
        m.start_offset = tok(start).offset;
        m.text = source_.substr(tok(start).offset, tok(end_token).end - tok(start).offset);
        methods_.push_back(std::move(m));
        pos_ = end_token + 1;
        return true;
    }

    /// Splits the token range (open_paren, close_paren) on top-level commas and
    /// renders each parameter's type spelling (trailing identifier dropped).
    void collect_params(std::size_t open, std::size_t close, ExtractedMethod& m) const {
        std::vector<std::pair<std::size_t, std::size_t>> ranges;
        std::size_t begin = open + 1;
        int paren = 0, angle = 0, bracket = 0;
        for (std::size_t i = open + 1; i < close; ++i) {
            const std::string& t = text(i);
            if (t == "(") ++paren;
            if (t == ")") --paren;
            if (t == "[") ++bracket;
            if (t == "]") --bracket;
            if (t == "<") ++angle;
            angle -= gt_count(t);
            if (t == "," && paren == 0 && angle == 0 && bracket == 0) {
                ranges.emplace_back(begin, i);
                begin = i + 1;
            }
        }
        if (begin < close) ranges.emplace_back(begin, close);

        for (const auto& [from, to] : ranges) {
            std::size_t i = skip_header_prefix(from);
            std::string type_text;
            for (std::size_t j = i; j < to; ++j) {
                // Last identifier is the parameter name.
                if (j + 1 == to && tok(j).kind == TokenKind::Identifier) break;
                type_text += text(j);
            }
            m.param_types.push_back(std::move(type_text));
        }
        m.param_count = m.param_types.size();
    }

    const std::string& source_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> chain_;
    std::vector<ExtractedMethod> methods_;
};

} // namespace

std::string ExtractedMethod::method_key() const {
    std::string key;
    for (const auto& t : type_chain) {
        key += t;
        key += '.';
    }
    key += name;
    key += '/';
    key += std::to_string(param_count);
    return key;
}

std::vector<ExtractedMethod> extract_methods(const std::string& file_source) {
    try {
        return Scanner(file_source).run();
    } catch (const LexError& e) {
        throw ParseError(e.what(), e.line, e.column);
    }
}

} // namespace devstyle
