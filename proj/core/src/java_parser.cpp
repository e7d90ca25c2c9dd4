#include "devstyle/java_parser.hpp"

#include <utility>

#include "devstyle/java_lexer.hpp"

namespace devstyle {

namespace {

AstNode leaf(std::string kind, std::string token) {
    AstNode n;
    n.kind = std::move(kind);
    n.token = std::move(token);
    return n;
}

AstNode inner(std::string kind, std::vector<AstNode> children) {
    AstNode n;
    n.kind = std::move(kind);
    n.children = std::move(children);
    return n;
}

/// A construct that came out empty becomes a leaf with a fixed surface token.
AstNode inner_or_token(std::string kind, std::vector<AstNode> children,
                       std::string fallback_token) {
    if (children.empty()) return leaf(std::move(kind), std::move(fallback_token));
    return inner(std::move(kind), std::move(children));
}

bool is_modifier_word(std::string_view t) {
    return t == "public" || t == "protected" || t == "private" || t == "static" ||
           t == "final" || t == "abstract" || t == "native" || t == "synchronized" ||
           t == "transient" || t == "volatile" || t == "strictfp" || t == "default";
}

bool is_primitive_word(std::string_view t) {
    return t == "boolean" || t == "byte" || t == "short" || t == "int" || t == "long" ||
           t == "char" || t == "float" || t == "double" || t == "void";
}

bool is_assign_op(std::string_view t) {
    return t == "=" || t == "+=" || t == "-=" || t == "*=" || t == "/=" || t == "%=" ||
           t == "&=" || t == "|=" || t == "^=" || t == "<<=" || t == ">>=" || t == ">>>=";
}

struct BailOut {}; // internal signal for failed speculation

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    AstNode parse_method_declaration() {
        AstNode decl = parse_member();
        if (!at_end()) fail("trailing tokens after method declaration");
        return decl;
    }

    bool only_eof() const { return tokens_.size() == 1; }

private:
    struct State {
        std::size_t pos;
        int pending_gt;
    };

    // --- token plumbing -----------------------------------------------------

    const Token& tok() const { return tokens_[pos_]; }

    std::string_view cur_text() const {
        return pending_gt_ > 0 ? std::string_view(">") : std::string_view(tok().text);
    }

    TokenKind cur_kind() const {
        return pending_gt_ > 0 ? TokenKind::Punct : tok().kind;
    }

    bool at_end() const { return pending_gt_ == 0 && tok().kind == TokenKind::EndOfFile; }

    void advance() {
        if (pending_gt_ > 0) {
            if (--pending_gt_ == 0) ++pos_;
        } else if (tok().kind != TokenKind::EndOfFile) {
            ++pos_;
        }
    }

    bool check(std::string_view text) const { return cur_text() == text; }

    bool accept(std::string_view text) {
        if (!check(text)) return false;
        advance();
        return true;
    }

    void expect(std::string_view text) {
        if (!accept(text)) {
            fail("expected '" + std::string(text) + "', found '" + std::string(cur_text()) +
                 "'");
        }
    }

    bool at_identifier() const { return cur_kind() == TokenKind::Identifier; }

    std::string expect_identifier() {
        if (!at_identifier()) fail("expected identifier, found '" + std::string(cur_text()) + "'");
        std::string text = tok().text;
        advance();
        return text;
    }

    /// Peek at the raw token stream (pending '>' ignored; only used where no
    /// split can be in flight).
    const Token& raw_peek(std::size_t ahead) const {
        const std::size_t i = pos_ + ahead;
        return i < tokens_.size() ? tokens_[i] : tokens_.back();
    }

    [[noreturn]] void fail(const std::string& message) const {
        if (speculating_ > 0) throw BailOut{};
        throw ParseError(message, tok().line, tok().column);
    }

    State save() const { return {pos_, pending_gt_}; }
    void restore(State s) {
        pos_ = s.pos;
        pending_gt_ = s.pending_gt;
    }

    /// Runs fn with parse failures downgraded to a rollback.
    template <typename Fn>
    bool speculate(Fn&& fn) {
        const State s = save();
        ++speculating_;
        bool ok = true;
        try {
            fn();
        } catch (const BailOut&) {
            ok = false;
        }
        --speculating_;
        restore(s);
        return ok;
    }

    // --- closing '>' splitting for nested generics ---------------------------

    bool at_type_close() const {
        if (pending_gt_ > 0) return true;
        const std::string& t = tok().text;
        return tok().kind == TokenKind::Punct && (t == ">" || t == ">>" || t == ">>>");
    }

    void consume_type_close() {
        if (pending_gt_ > 0) {
            advance();
            return;
        }
        const std::string& t = tok().text;
        if (t == ">") {
            advance();
        } else if (t == ">>") {
            pending_gt_ = 1;
        } else if (t == ">>>") {
            pending_gt_ = 2;
        } else {
            fail("expected '>' closing type arguments");
        }
    }

    // --- modifiers, annotations, type parameters ----------------------------

    std::vector<AstNode> parse_modifiers_and_annotations() {
        std::vector<AstNode> out;
        for (;;) {
            if (check("@") && raw_peek(1).text != "interface") {
                out.push_back(parse_annotation());
            } else if (cur_kind() == TokenKind::Keyword && is_modifier_word(cur_text()) &&
                       !(check("synchronized") && raw_peek(1).text == "(") &&
                       !(check("default") && raw_peek(1).text == ":")) {
                out.push_back(leaf("modifier", std::string(cur_text())));
                advance();
            } else {
                return out;
            }
        }
    }

    AstNode parse_annotation() {
        expect("@");
        std::vector<AstNode> children;
        children.push_back(leaf("identifier", parse_dotted_name()));
        if (accept("(")) {
            if (!check(")")) {
                do {
                    if (at_identifier() && raw_peek(1).text == "=") {
                        std::string key = expect_identifier();
                        expect("=");
                        children.push_back(inner(
                            "element_value_pair",
                            {leaf("identifier", std::move(key)), parse_element_value()}));
                    } else {
                        children.push_back(parse_element_value());
                    }
                } while (accept(","));
            }
            expect(")");
        }
        return inner("annotation", std::move(children));
    }

    AstNode parse_element_value() {
        if (check("{")) return parse_array_initializer();
        if (check("@")) return parse_annotation();
        return parse_expression();
    }

    std::vector<AstNode> parse_type_parameters() {
        expect("<");
        std::vector<AstNode> out;
        do {
            std::string name = expect_identifier();
            if (accept("extends")) {
                std::vector<AstNode> children;
                children.push_back(leaf("identifier", std::move(name)));
                children.push_back(parse_type());
                while (accept("&")) children.push_back(parse_type());
                out.push_back(inner("type_parameter", std::move(children)));
            } else {
                out.push_back(leaf("type_parameter", std::move(name)));
            }
        } while (accept(","));
        consume_type_close();
        return out;
    }

    // --- types ---------------------------------------------------------------

    std::string parse_dotted_name() {
        std::string name = expect_identifier();
        while (check(".") && raw_peek(1).kind == TokenKind::Identifier) {
            advance();
            name += '.';
            name += expect_identifier();
        }
        return name;
    }

    AstNode parse_type() {
        AstNode base = parse_type_base();
        return parse_dims_around(std::move(base));
    }

    AstNode parse_type_base() {
        if (cur_kind() == TokenKind::Keyword && is_primitive_word(cur_text())) {
            AstNode pt = leaf("primitive_type", std::string(cur_text()));
            advance();
            return pt;
        }
        std::string name = parse_dotted_name();
        AstNode named = leaf("type_identifier", std::move(name));
        if (check("<")) {
            std::vector<AstNode> children;
            children.push_back(std::move(named));
            advance();
            if (!at_type_close()) {
                do {
                    children.push_back(parse_type_argument());
                } while (accept(","));
            }
            consume_type_close();
            AstNode generic = inner("generic_type", std::move(children));
            // Member access on an instantiated type, e.g. Map.Entry<K,V>.Inner.
            while (check(".") && raw_peek(1).kind == TokenKind::Identifier) {
                advance();
                generic = inner("generic_type",
                                {std::move(generic),
                                 leaf("type_identifier", expect_identifier())});
            }
            return generic;
        }
        return named;
    }

    AstNode parse_type_argument() {
        if (check("?")) {
            advance();
            if (accept("extends") || accept("super")) {
                return inner("wildcard", {parse_type()});
            }
            return leaf("wildcard", "?");
        }
        return parse_type();
    }

    AstNode parse_dims_around(AstNode base) {
        while (check("[") && raw_peek(1).text == "]") {
            advance();
            advance();
            base = inner("array_type", {std::move(base)});
        }
        return base;
    }

    // --- declarations --------------------------------------------------------

    AstNode parse_member() {
        std::vector<AstNode> head = parse_modifiers_and_annotations();
        if (check("class")) return parse_class_declaration(std::move(head));
        if (check("{")) {
            // Instance or static initializer block.
            std::vector<AstNode> children = std::move(head);
            children.push_back(parse_block());
            return children.size() == 1 ? std::move(children[0])
                                        : inner("block", std::move(children));
        }
        if (check("<")) {
            std::vector<AstNode> tps = parse_type_parameters();
            for (auto& tp : tps) head.push_back(std::move(tp));
        }
        if (at_identifier() && raw_peek(1).text == "(") {
            return parse_executable(std::move(head), /*constructor=*/true);
        }
        AstNode type = parse_type();
        if (at_identifier() && raw_peek(1).text == "(") {
            head.push_back(std::move(type));
            return parse_executable(std::move(head), /*constructor=*/false);
        }
        // Field declaration.
        std::vector<AstNode> children = std::move(head);
        children.push_back(std::move(type));
        do {
            children.push_back(parse_variable_declarator());
        } while (accept(","));
        expect(";");
        return inner("field_declaration", std::move(children));
    }

    AstNode parse_executable(std::vector<AstNode> head, bool constructor) {
        std::vector<AstNode> children = std::move(head);
        children.push_back(leaf("identifier", expect_identifier()));
        expect("(");
        if (!check(")")) {
            do {
                children.push_back(parse_formal_parameter());
            } while (accept(","));
        }
        expect(")");
        if (accept("throws")) {
            do {
                children.push_back(parse_type());
            } while (accept(","));
        }
        if (check("{")) {
            children.push_back(parse_block());
        } else {
            expect(";");
        }
        return inner(constructor ? "constructor_declaration" : "method_declaration",
                     std::move(children));
    }

    AstNode parse_formal_parameter() {
        std::vector<AstNode> children = parse_modifiers_and_annotations();
        AstNode type = parse_type();
        if (accept("...")) type = inner("array_type", {std::move(type)});
        children.push_back(std::move(type));
        children.push_back(leaf("identifier", expect_identifier()));
        while (check("[") && raw_peek(1).text == "]") {
            advance();
            advance();
        }
        return inner("formal_parameter", std::move(children));
    }

    AstNode parse_variable_declarator() {
        std::vector<AstNode> children;
        children.push_back(leaf("identifier", expect_identifier()));
        while (check("[") && raw_peek(1).text == "]") {
            advance();
            advance();
        }
        if (accept("=")) {
            children.push_back(check("{") ? parse_array_initializer() : parse_expression());
        }
        return inner("variable_declarator", std::move(children));
    }

    AstNode parse_local_variable_declaration(std::vector<AstNode> head) {
        std::vector<AstNode> children = std::move(head);
        children.push_back(parse_type());
        do {
            children.push_back(parse_variable_declarator());
        } while (accept(","));
        return inner("local_variable_declaration", std::move(children));
    }

    AstNode parse_class_declaration(std::vector<AstNode> head) {
        expect("class");
        std::vector<AstNode> children = std::move(head);
        children.push_back(leaf("identifier", expect_identifier()));
        if (check("<")) {
            for (auto& tp : parse_type_parameters()) children.push_back(std::move(tp));
        }
        if (accept("extends")) children.push_back(parse_type());
        if (accept("implements")) {
            do {
                children.push_back(parse_type());
            } while (accept(","));
        }
        for (auto& m : parse_class_body()) children.push_back(std::move(m));
        return inner("class_declaration", std::move(children));
    }

    std::vector<AstNode> parse_class_body() {
        expect("{");
        std::vector<AstNode> members;
        while (!check("}")) {
            if (at_end()) fail("unterminated class body");
            if (accept(";")) continue;
            members.push_back(parse_member());
        }
        expect("}");
        return members;
    }

    // --- statements ----------------------------------------------------------

    AstNode parse_block() {
        expect("{");
        std::vector<AstNode> stmts;
        while (!check("}")) {
            if (at_end()) fail("unterminated block");
            stmts.push_back(parse_statement());
        }
        expect("}");
        return inner_or_token("block", std::move(stmts), "{}");
    }

    AstNode parse_statement() {
        if (check("{")) return parse_block();
        if (check(";")) {
            advance();
            return leaf("empty_statement", ";");
        }
        if (check("if")) return parse_if();
        if (check("while")) return parse_while();
        if (check("do")) return parse_do();
        if (check("for")) return parse_for();
        if (check("switch")) return parse_switch();
        if (check("try")) return parse_try();
        if (check("return")) {
            advance();
            std::vector<AstNode> children;
            if (!check(";")) children.push_back(parse_expression());
            expect(";");
            return inner_or_token("return_statement", std::move(children), "return");
        }
        if (check("throw")) {
            advance();
            AstNode e = parse_expression();
            expect(";");
            return inner("throw_statement", {std::move(e)});
        }
        if (check("break") || check("continue")) {
            const bool is_break = check("break");
            advance();
            std::vector<AstNode> children;
            if (at_identifier()) children.push_back(leaf("identifier", expect_identifier()));
            expect(";");
            return inner_or_token(is_break ? "break_statement" : "continue_statement",
                                  std::move(children), is_break ? "break" : "continue");
        }
        if (check("synchronized") && raw_peek(1).text == "(") {
            advance();
            expect("(");
            AstNode e = parse_expression();
            expect(")");
            AstNode body = parse_block();
            return inner("synchronized_statement", {std::move(e), std::move(body)});
        }
        if (check("assert")) {
            advance();
            std::vector<AstNode> children;
            children.push_back(parse_expression());
            if (accept(":")) children.push_back(parse_expression());
            expect(";");
            return inner("assert_statement", std::move(children));
        }
        if (check("class") || check("final") || check("@") ||
            (check("abstract") && raw_peek(1).text == "class")) {
            std::vector<AstNode> head = parse_modifiers_and_annotations();
            if (check("class")) return parse_class_declaration(std::move(head));
            AstNode decl = parse_local_variable_declaration(std::move(head));
            expect(";");
            return decl;
        }
        if (at_identifier() && raw_peek(1).text == ":") {
            AstNode label = leaf("identifier", expect_identifier());
            expect(":");
            AstNode stmt = parse_statement();
            return inner("labeled_statement", {std::move(label), std::move(stmt)});
        }
        if (looks_like_local_declaration()) {
            AstNode decl = parse_local_variable_declaration({});
            expect(";");
            return decl;
        }
        AstNode expr = parse_expression();
        expect(";");
        return inner("expression_statement", {std::move(expr)});
    }

    bool looks_like_local_declaration() {
        return speculate([this] {
            parse_type();
            if (!at_identifier()) throw BailOut{};
            advance();
            while (check("[") && raw_peek(1).text == "]") {
                advance();
                advance();
            }
            if (!(check("=") || check(",") || check(";"))) throw BailOut{};
        });
    }

    AstNode parse_if() {
        expect("if");
        expect("(");
        std::vector<AstNode> children;
        children.push_back(parse_expression());
        expect(")");
        children.push_back(parse_statement());
        if (accept("else")) children.push_back(parse_statement());
        return inner("if_statement", std::move(children));
    }

    AstNode parse_while() {
        expect("while");
        expect("(");
        AstNode cond = parse_expression();
        expect(")");
        AstNode body = parse_statement();
        return inner("while_statement", {std::move(cond), std::move(body)});
    }

    AstNode parse_do() {
        expect("do");
        AstNode body = parse_statement();
        expect("while");
        expect("(");
        AstNode cond = parse_expression();
        expect(")");
        expect(";");
        return inner("do_statement", {std::move(body), std::move(cond)});
    }

    AstNode parse_for() {
        expect("for");
        expect("(");
        const bool enhanced = speculate([this] {
            parse_modifiers_and_annotations();
            parse_type();
            if (!at_identifier()) throw BailOut{};
            advance();
            if (!check(":")) throw BailOut{};
        });
        if (enhanced) {
            std::vector<AstNode> var = parse_modifiers_and_annotations();
            var.push_back(parse_type());
            var.push_back(leaf("identifier", expect_identifier()));
            AstNode param = inner("formal_parameter", std::move(var));
            expect(":");
            AstNode iterable = parse_expression();
            expect(")");
            AstNode body = parse_statement();
            return inner("enhanced_for_statement",
                         {std::move(param), std::move(iterable), std::move(body)});
        }
        std::vector<AstNode> children;
        if (!check(";")) {
            if (check("final") || check("@") || looks_like_local_declaration()) {
                std::vector<AstNode> head = parse_modifiers_and_annotations();
                children.push_back(parse_local_variable_declaration(std::move(head)));
            } else {
                do {
                    children.push_back(parse_expression());
                } while (accept(","));
            }
        }
        expect(";");
        if (!check(";")) children.push_back(parse_expression());
        expect(";");
        if (!check(")")) {
            do {
                children.push_back(parse_expression());
            } while (accept(","));
        }
        expect(")");
        children.push_back(parse_statement());
        return inner("for_statement", std::move(children));
    }

    AstNode parse_switch() {
        expect("switch");
        expect("(");
        std::vector<AstNode> children;
        children.push_back(parse_expression());
        expect(")");
        expect("{");
        while (!check("}")) {
            if (at_end()) fail("unterminated switch body");
            if (accept("case")) {
                std::vector<AstNode> labels;
                do {
                    labels.push_back(parse_expression());
                } while (accept(","));
                expect(":");
                children.push_back(inner("switch_case", std::move(labels)));
            } else if (accept("default")) {
                expect(":");
                children.push_back(
                    inner("switch_case", {leaf("switch_label", "default")}));
            } else {
                children.push_back(parse_statement());
            }
        }
        expect("}");
        return inner("switch_statement", std::move(children));
    }

    AstNode parse_try() {
        expect("try");
        std::vector<AstNode> children;
        if (accept("(")) {
            while (!check(")")) {
                std::vector<AstNode> res = parse_modifiers_and_annotations();
                res.push_back(parse_type());
                res.push_back(leaf("identifier", expect_identifier()));
                expect("=");
                res.push_back(parse_expression());
                children.push_back(inner("resource", std::move(res)));
                if (!accept(";")) break;
            }
            expect(")");
        }
        children.push_back(parse_block());
        while (check("catch")) {
            advance();
            expect("(");
            std::vector<AstNode> param = parse_modifiers_and_annotations();
            AstNode type = parse_type();
            if (check("|")) {
                std::vector<AstNode> alts;
                alts.push_back(std::move(type));
                while (accept("|")) alts.push_back(parse_type());
                type = inner("union_type", std::move(alts));
            }
            param.push_back(std::move(type));
            param.push_back(leaf("identifier", expect_identifier()));
            expect(")");
            AstNode body = parse_block();
            children.push_back(inner(
                "catch_clause", {inner("formal_parameter", std::move(param)), std::move(body)}));
        }
        if (accept("finally")) children.push_back(parse_block());
        return inner("try_statement", std::move(children));
    }

    // --- expressions ---------------------------------------------------------

    AstNode parse_expression() {
        if (AstNode lambda; try_parse_lambda(lambda)) return lambda;
        AstNode lhs = parse_ternary();
        if (cur_kind() == TokenKind::Punct && is_assign_op(cur_text())) {
            AstNode op = leaf("operator", std::string(cur_text()));
            advance();
            AstNode rhs = parse_expression();
            return inner("assignment_expression",
                         {std::move(lhs), std::move(op), std::move(rhs)});
        }
        return lhs;
    }

    bool try_parse_lambda(AstNode& out) {
        if (at_identifier() && raw_peek(1).text == "->" && pending_gt_ == 0) {
            AstNode param = inner("formal_parameter", {leaf("identifier", expect_identifier())});
            expect("->");
            out = inner("lambda_expression", {std::move(param), parse_lambda_body()});
            return true;
        }
        if (check("(") && pending_gt_ == 0) {
            const std::size_t close = matching_paren(pos_);
            if (close != 0 && raw_token_text(close + 1) == "->") {
                advance();
                std::vector<AstNode> children;
                if (!check(")")) {
                    do {
                        children.push_back(parse_lambda_parameter());
                    } while (accept(","));
                }
                expect(")");
                expect("->");
                children.push_back(parse_lambda_body());
                out = inner("lambda_expression", std::move(children));
                return true;
            }
        }
        return false;
    }

    AstNode parse_lambda_parameter() {
        const bool typed = speculate([this] {
            parse_modifiers_and_annotations();
            parse_type();
            if (!at_identifier()) throw BailOut{};
            advance();
            if (!(check(",") || check(")"))) throw BailOut{};
        });
        std::vector<AstNode> children;
        if (typed) {
            children = parse_modifiers_and_annotations();
            children.push_back(parse_type());
        }
        children.push_back(leaf("identifier", expect_identifier()));
        return inner("formal_parameter", std::move(children));
    }

    AstNode parse_lambda_body() {
        return check("{") ? parse_block() : parse_expression();
    }

    std::string_view raw_token_text(std::size_t index) const {
        return index < tokens_.size() ? std::string_view(tokens_[index].text)
                                      : std::string_view("");
    }

    /// Index of the ')' matching the '(' at `open`, or 0 when unbalanced.
    std::size_t matching_paren(std::size_t open) const {
        int depth = 0;
        for (std::size_t i = open; i < tokens_.size(); ++i) {
            const std::string& t = tokens_[i].text;
            if (tokens_[i].kind != TokenKind::Punct) continue;
            if (t == "(") ++depth;
            if (t == ")") {
                if (--depth == 0) return i;
            }
        }
        return 0;
    }

    AstNode parse_ternary() {
        AstNode cond = parse_binary(0);
        if (accept("?")) {
            AstNode then_branch = parse_expression();
            expect(":");
            AstNode else_branch = parse_expression();
            return inner("ternary_expression",
                         {std::move(cond), std::move(then_branch), std::move(else_branch)});
        }
        return cond;
    }

    static int binary_level(std::string_view op) {
        if (op == "||") return 0;
        if (op == "&&") return 1;
        if (op == "|") return 2;
        if (op == "^") return 3;
        if (op == "&") return 4;
        if (op == "==" || op == "!=") return 5;
        if (op == "<" || op == ">" || op == "<=" || op == ">=" || op == "instanceof") return 6;
        if (op == "<<" || op == ">>" || op == ">>>") return 7;
        if (op == "+" || op == "-") return 8;
        if (op == "*" || op == "/" || op == "%") return 9;
        return -1;
    }

    AstNode parse_binary(int min_level) {
        AstNode lhs = parse_unary();
        for (;;) {
            const std::string op(cur_text());
            const int level = binary_level(op);
            if (level < min_level || level == -1) return lhs;
            if (op == "instanceof") {
                advance();
                AstNode type = parse_type();
                lhs = inner("instanceof_expression", {std::move(lhs), std::move(type)});
                continue;
            }
            advance();
            AstNode rhs = parse_binary(level + 1);
            lhs = inner("binary_expression",
                        {std::move(lhs), leaf("operator", op), std::move(rhs)});
        }
    }

    AstNode parse_unary() {
        if (check("+") || check("-") || check("!") || check("~") || check("++") ||
            check("--")) {
            AstNode op = leaf("operator", std::string(cur_text()));
            advance();
            AstNode operand = parse_unary();
            return inner("unary_expression", {std::move(op), std::move(operand)});
        }
        if (check("(") && pending_gt_ == 0) {
            AstNode cast;
            if (try_parse_cast(cast)) return cast;
        }
        return parse_postfix();
    }

    bool try_parse_cast(AstNode& out) {
        bool primitive = false;
        const bool is_cast = speculate([this, &primitive] {
            advance(); // '('
            if (cur_kind() == TokenKind::Keyword && is_primitive_word(cur_text())) primitive = true;
            parse_type();
            if (!check(")")) throw BailOut{};
            advance();
            if (!cast_follow_ok(primitive)) throw BailOut{};
        });
        if (!is_cast) return false;
        advance();
        AstNode type = parse_type();
        expect(")");
        AstNode operand = parse_unary();
        out = inner("cast_expression", {std::move(type), std::move(operand)});
        return true;
    }

    bool cast_follow_ok(bool primitive) const {
        switch (cur_kind()) {
            case TokenKind::Identifier:
            case TokenKind::Number:
            case TokenKind::String:
            case TokenKind::Char:
                return true;
            case TokenKind::Keyword:
                return check("this") || check("super") || check("new") || check("true") ||
                       check("false") || check("null") || is_primitive_word(cur_text());
            case TokenKind::Punct:
                if (check("(") || check("!") || check("~")) return true;
                if (primitive && (check("+") || check("-"))) return true;
                return false;
            default:
                return false;
        }
    }

    AstNode parse_postfix() {
        AstNode expr = parse_primary();
        for (;;) {
            if (check(".")) {
                advance();
                if (accept("this")) {
                    expr = inner("field_access", {std::move(expr), leaf("this_expression", "this")});
                } else if (accept("class")) {
                    expr = inner("type_literal", {std::move(expr)});
                } else if (check("<")) {
                    advance();
                    std::vector<AstNode> children;
                    children.push_back(std::move(expr));
                    if (!at_type_close()) {
                        do {
                            children.push_back(parse_type_argument());
                        } while (accept(","));
                    }
                    consume_type_close();
                    children.push_back(leaf("identifier", expect_identifier()));
                    expect("(");
                    parse_arguments(children);
                    expr = inner("method_invocation", std::move(children));
                } else {
                    std::string name = expect_identifier();
                    if (check("(")) {
                        advance();
                        std::vector<AstNode> children;
                        children.push_back(std::move(expr));
                        children.push_back(leaf("identifier", std::move(name)));
                        parse_arguments(children);
                        expr = inner("method_invocation", std::move(children));
                    } else {
                        expr = inner("field_access",
                                     {std::move(expr), leaf("identifier", std::move(name))});
                    }
                }
            } else if (check("[") && pending_gt_ == 0) {
                advance();
                AstNode index = parse_expression();
                expect("]");
                expr = inner("array_access", {std::move(expr), std::move(index)});
            } else if (check("::")) {
                advance();
                std::string name = check("new") ? "new" : expect_identifier();
                if (name == "new") advance();
                expr = inner("method_reference",
                             {std::move(expr), leaf("identifier", std::move(name))});
            } else if (check("++") || check("--")) {
                AstNode op = leaf("operator", std::string(cur_text()));
                advance();
                expr = inner("postfix_expression", {std::move(expr), std::move(op)});
            } else {
                return expr;
            }
        }
    }

    /// Parses ")"-terminated argument list; the '(' is already consumed.
    void parse_arguments(std::vector<AstNode>& children) {
        if (!check(")")) {
            do {
                children.push_back(parse_expression());
            } while (accept(","));
        }
        expect(")");
    }

    AstNode parse_primary() {
        switch (cur_kind()) {
            case TokenKind::Number:
                advance();
                return leaf("number_literal", "<NUM>");
            case TokenKind::String:
                advance();
                return leaf("string_literal", "<STR>");
            case TokenKind::Char:
                advance();
                return leaf("character_literal", "<CHAR>");
            default:
                break;
        }
        if (check("true") || check("false")) {
            AstNode b = leaf("boolean_literal", std::string(cur_text()));
            advance();
            return b;
        }
        if (accept("null")) return leaf("null_literal", "null");
        if (check("this")) {
            advance();
            AstNode self = leaf("this_expression", "this");
            if (check("(")) {
                advance();
                std::vector<AstNode> children;
                children.push_back(std::move(self));
                parse_arguments(children);
                return inner("method_invocation", std::move(children));
            }
            return self;
        }
        if (check("super")) {
            advance();
            AstNode super = leaf("super_expression", "super");
            if (check("(")) {
                advance();
                std::vector<AstNode> children;
                children.push_back(std::move(super));
                parse_arguments(children);
                return inner("method_invocation", std::move(children));
            }
            return super;
        }
        if (check("new")) return parse_creation();
        if (cur_kind() == TokenKind::Keyword && is_primitive_word(cur_text())) {
            // Only reachable as X.class or X[].class receivers.
            AstNode pt = leaf("primitive_type", std::string(cur_text()));
            advance();
            return parse_dims_around(std::move(pt));
        }
        if (at_identifier()) {
            std::string name = expect_identifier();
            if (check("(")) {
                advance();
                std::vector<AstNode> children;
                children.push_back(leaf("identifier", std::move(name)));
                parse_arguments(children);
                return inner("method_invocation", std::move(children));
            }
            return leaf("identifier", std::move(name));
        }
        if (accept("(")) {
            AstNode e = parse_expression();
            expect(")");
            return inner("parenthesized_expression", {std::move(e)});
        }
        fail("unexpected token '" + std::string(cur_text()) + "' in expression");
    }

    AstNode parse_creation() {
        expect("new");
        AstNode type = parse_type_base();
        if (check("[")) {
            std::vector<AstNode> children;
            children.push_back(std::move(type));
            bool saw_empty_dim = false;
            while (check("[") && pending_gt_ == 0) {
                advance();
                if (check("]")) {
                    saw_empty_dim = true;
                } else {
                    children.push_back(parse_expression());
                }
                expect("]");
            }
            if (saw_empty_dim && check("{")) children.push_back(parse_array_initializer());
            return inner("array_creation_expression", std::move(children));
        }
        std::vector<AstNode> children;
        children.push_back(std::move(type));
        expect("(");
        parse_arguments(children);
        if (check("{")) {
            std::vector<AstNode> members = parse_class_body();
            children.push_back(
                inner_or_token("anonymous_class_body", std::move(members), "{}"));
        }
        return inner("object_creation_expression", std::move(children));
    }

    AstNode parse_array_initializer() {
        expect("{");
        std::vector<AstNode> children;
        while (!check("}")) {
            if (at_end()) fail("unterminated array initializer");
            children.push_back(check("{") ? parse_array_initializer() : parse_expression());
            if (!accept(",")) break;
        }
        expect("}");
        return inner_or_token("array_initializer", std::move(children), "{}");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int pending_gt_ = 0;
    int speculating_ = 0;
};

void canonicalize(AstNode& node, const NodeKindTable& table) {
    node.kind = table.canonical(node.kind);
    for (AstNode& c : node.children) canonicalize(c, table);
}

} // namespace

AstNode JavaGrammar::parse_method(std::string_view source) const {
    std::vector<Token> tokens;
    try {
        tokens = lex_java(source);
    } catch (const LexError& e) {
        throw ParseError(e.what(), e.line, e.column);
    }
    Parser parser(std::move(tokens));
    if (parser.only_eof()) return empty_method_tree();
    AstNode decl = parser.parse_method_declaration();
    canonicalize(decl, *kinds_);
    return decl;
}

std::unique_ptr<MethodGrammar> make_grammar(const std::string& language) {
    if (language == "java") return std::make_unique<JavaGrammar>();
    throw std::invalid_argument("no grammar registered for language: " + language);
}

} // namespace devstyle
