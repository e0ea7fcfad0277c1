#include <cctype>
#include <set>

#include "rlang_internal.hpp"

namespace rfsearch::rlang {

namespace {

const std::set<std::string>& python_keywords() {
    static const std::set<std::string> kw = {
        "def",   "import", "for",    "in",     "if",    "elif",   "else",  "not",
        "and",   "or",     "return", "continue", "try", "except", "True",  "False",
        "None",  "while",  "class",  "lambda", "from",  "with",   "as",    "global",
        "del",   "pass",   "break",  "raise",  "yield", "assert", "is",    "nonlocal",
        "finally",
    };
    return kw;
}

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

bool is_python_keyword(const std::string& s) { return python_keywords().count(s) > 0; }

std::variant<std::vector<Token>, LexError> tokenize(const std::string& source) {
    std::vector<Token> out;
    std::vector<int> indents{0};
    int line = 1;
    std::size_t i = 0;
    std::size_t line_start = 0;
    int bracket_depth = 0;
    const std::size_t n = source.size();

    auto error = [&](const std::string& msg, int col) {
        return LexError{msg, line, col};
    };

    bool at_line_start = true;
    while (i <= n) {
        if (at_line_start && bracket_depth == 0) {
            // measure indentation; skip blank/comment-only lines entirely
            std::size_t j = i;
            int width = 0;
            while (j < n && (source[j] == ' ' || source[j] == '\t')) {
                if (source[j] == '\t') return error("tab in indentation is not supported", width + 1);
                ++width;
                ++j;
            }
            if (j >= n) break;
            if (source[j] == '\n') {
                i = j + 1;
                line_start = i;
                ++line;
                continue;
            }
            if (source[j] == '#') {
                while (j < n && source[j] != '\n') ++j;
                i = j + 1;
                line_start = i;
                ++line;
                continue;
            }
            if (width > indents.back()) {
                indents.push_back(width);
                out.push_back({Tok::Indent, "", 0, line, 1});
            } else {
                while (width < indents.back()) {
                    indents.pop_back();
                    out.push_back({Tok::Dedent, "", 0, line, 1});
                }
                if (width != indents.back()) return error("inconsistent dedent", width + 1);
            }
            i = j;
            at_line_start = false;
            continue;
        }

        if (i >= n) break;
        const char c = source[i];
        const int col = static_cast<int>(i - line_start) + 1;

        if (c == '\n') {
            ++line;
            ++i;
            line_start = i;
            if (bracket_depth > 0) continue;  // implicit joining
            if (!out.empty() && out.back().type != Tok::Newline && out.back().type != Tok::Indent &&
                out.back().type != Tok::Dedent)
                out.push_back({Tok::Newline, "", 0, line - 1, col});
            at_line_start = true;
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '#') {
            while (i < n && source[i] != '\n') ++i;
            continue;
        }
        if (c == '\\' && i + 1 < n && source[i + 1] == '\n') {
            return error("backslash line continuation is not supported", col);
        }

        // string literal, optionally raw
        bool raw = false;
        std::size_t s0 = i;
        if ((c == 'r' || c == 'R') && i + 1 < n && (source[i + 1] == '\'' || source[i + 1] == '"')) {
            raw = true;
            ++i;
        }
        if (source[i] == '\'' || source[i] == '"') {
            const char quote = source[i];
            ++i;
            if (i + 1 < n && source[i] == quote && source[i + 1] == quote)
                return error("triple-quoted strings are not supported", col);
            std::string text;
            bool closed = false;
            while (i < n) {
                const char d = source[i];
                if (d == '\n') break;
                if (d == quote) {
                    ++i;
                    closed = true;
                    break;
                }
                if (d == '\\' && !raw) {
                    if (i + 1 >= n) break;
                    const char e = source[i + 1];
                    switch (e) {
                        case 'n': text.push_back('\n'); break;
                        case 't': text.push_back('\t'); break;
                        case 'r': text.push_back('\r'); break;
                        case '\\': text.push_back('\\'); break;
                        case '\'': text.push_back('\''); break;
                        case '"': text.push_back('"'); break;
                        default:
                            return error("unsupported string escape", col);
                    }
                    i += 2;
                    continue;
                }
                if (d == '\\' && raw) {
                    // raw strings keep the backslash and the next char
                    text.push_back('\\');
                    ++i;
                    if (i < n && source[i] != '\n' && source[i] != quote) {
                        text.push_back(source[i]);
                        ++i;
                    } else if (i < n && source[i] == quote) {
                        text.push_back(source[i]);
                        ++i;
                    }
                    continue;
                }
                text.push_back(d);
                ++i;
            }
            if (!closed) return error("unterminated string literal", col);
            out.push_back({Tok::String, text, 0, line, static_cast<int>(s0) + 1});
            continue;
        }
        i = s0;  // not a string; undo raw-prefix consumption

        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(source[i + 1])))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            if (j < n && source[j] == '.') {
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
            }
            if (j < n && (source[j] == 'e' || source[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (source[k] == '+' || source[k] == '-')) ++k;
                if (k < n && std::isdigit(static_cast<unsigned char>(source[k]))) {
                    j = k;
                    while (j < n && std::isdigit(static_cast<unsigned char>(source[j]))) ++j;
                }
            }
            const std::string text = source.substr(i, j - i);
            if (j < n && name_char(source[j])) return error("malformed number literal", col);
            out.push_back({Tok::Number, text, std::strtod(text.c_str(), nullptr), line, col});
            i = j;
            continue;
        }

        if (name_start(c)) {
            std::size_t j = i;
            while (j < n && name_char(source[j])) ++j;
            const std::string text = source.substr(i, j - i);
            out.push_back({is_python_keyword(text) ? Tok::Keyword : Tok::Name, text, 0, line, col});
            i = j;
            continue;
        }

        // operators and punctuation
        auto two = [&](const char* op) {
            return i + 1 < n && source[i] == op[0] && source[i + 1] == op[1];
        };
        if (two("**") || two("==") || two("!=") || two("<=") || two(">=")) {
            out.push_back({Tok::Op, source.substr(i, 2), 0, line, col});
            i += 2;
            continue;
        }
        static const std::string singles = "+-*/%<>=(),[]:.{};|&^~@";
        if (singles.find(c) != std::string::npos) {
            if (c == '(' || c == '[') ++bracket_depth;
            if (c == ')' || c == ']') bracket_depth = bracket_depth > 0 ? bracket_depth - 1 : 0;
            out.push_back({Tok::Op, std::string(1, c), 0, line, col});
            ++i;
            continue;
        }
        return error(std::string("unexpected character '") + c + "'", col);
    }

    if (!out.empty() && out.back().type != Tok::Newline) out.push_back({Tok::Newline, "", 0, line, 1});
    while (indents.size() > 1) {
        indents.pop_back();
        out.push_back({Tok::Dedent, "", 0, line, 1});
    }
    out.push_back({Tok::End, "", 0, line, 1});
    return out;
}

// -------------------------------------------------------------- parser ----

namespace {

constexpr std::size_t kMaxDepth = 100;

class Parser {
public:
    Parser(const std::vector<Token>& toks, std::size_t max_nodes)
        : toks_(toks), max_nodes_(max_nodes) {}

    Program run() {
        Program prog;
        skip_newlines();
        if (!at_keyword("def")) fail("expected a single function definition");
        prog.func = parse_funcdef();
        skip_newlines();
        if (!at(Tok::End)) fail("only one top-level function definition is permitted");
        prog.node_count = nodes_;
        return prog;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw ParseError{msg, t.line, t.col};
    }

    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }
    bool at(Tok t) const { return peek().type == t; }
    bool at_op(const char* s) const { return peek().type == Tok::Op && peek().text == s; }
    bool at_keyword(const char* s) const {
        return peek().type == Tok::Keyword && peek().text == s;
    }
    void expect_op(const char* s) {
        if (!at_op(s)) fail(std::string("expected '") + s + "'");
        take();
    }
    void expect_newline() {
        if (!at(Tok::Newline)) fail("expected end of line");
        take();
    }
    std::string expect_name() {
        if (!at(Tok::Name)) fail("expected an identifier");
        return take().text;
    }
    void skip_newlines() {
        while (at(Tok::Newline)) take();
    }

    void count_node() {
        if (++nodes_ > max_nodes_) fail("program exceeds the node budget");
    }

    ExprPtr make_expr(ExprKind k) {
        count_node();
        auto e = std::make_unique<Expr>();
        e->kind = k;
        e->line = peek().line;
        e->col = peek().col;
        return e;
    }
    StmtPtr make_stmt(StmtKind k) {
        count_node();
        auto s = std::make_unique<Stmt>();
        s->kind = k;
        s->line = peek().line;
        s->col = peek().col;
        return s;
    }

    StmtPtr parse_funcdef() {
        auto st = make_stmt(StmtKind::FuncDef);
        take();  // def
        st->name = expect_name();
        expect_op("(");
        bool first = true;
        while (!at_op(")")) {
            if (!first) expect_op(",");
            first = false;
            if (at_op(")")) break;  // trailing comma
            if (at_op("**")) {
                take();
                st->kwargs_name = expect_name();
                break;
            }
            st->params.push_back(expect_name());
        }
        expect_op(")");
        expect_op(":");
        st->body = parse_suite();
        return st;
    }

    std::vector<StmtPtr> parse_suite() {
        std::vector<StmtPtr> body;
        if (at(Tok::Newline)) {
            take();
            if (!at(Tok::Indent)) fail("expected an indented block");
            take();
            while (!at(Tok::Dedent)) {
                if (at(Tok::End)) fail("unexpected end of input in block");
                body.push_back(parse_statement());
            }
            take();  // dedent
        } else {
            // inline suite: a single simple statement on the same line
            body.push_back(parse_simple_statement());
            expect_newline();
        }
        return body;
    }

    StmtPtr parse_statement() {
        if (at(Tok::Keyword)) {
            const std::string& kw = peek().text;
            if (kw == "import") return parse_import();
            if (kw == "for") return parse_for();
            if (kw == "if") return parse_if();
            if (kw == "try") return parse_try();
            if (kw == "return" || kw == "continue") {
                auto st = parse_simple_statement();
                expect_newline();
                return st;
            }
            if (kw == "def") fail("nested function definitions are not permitted");
            fail("construct '" + kw + "' is not permitted in reward programs");
        }
        auto st = parse_simple_statement();
        expect_newline();
        return st;
    }

    StmtPtr parse_simple_statement() {
        if (at_keyword("return")) {
            auto st = make_stmt(StmtKind::Return);
            take();
            st->value = parse_expression(0);
            return st;
        }
        if (at_keyword("continue")) {
            auto st = make_stmt(StmtKind::Continue);
            take();
            return st;
        }
        if (at_keyword("import")) return parse_import_clause();
        if (at(Tok::Keyword)) fail("construct '" + peek().text + "' is not permitted here");

        // assignment or expression statement
        if (at(Tok::Name) && toks_[pos_ + 1].type == Tok::Op && toks_[pos_ + 1].text == "=") {
            auto st = make_stmt(StmtKind::Assign);
            st->name = take().text;
            take();  // '='
            st->value = parse_expression(0);
            return st;
        }
        auto st = make_stmt(StmtKind::ExprStmt);
        st->value = parse_expression(0);
        return st;
    }

    StmtPtr parse_import_clause() {
        auto st = make_stmt(StmtKind::Import);
        take();  // import
        st->name = expect_name();
        if (at_op(".")) fail("dotted imports are not permitted");
        if (at_op(",")) fail("multiple modules per import are not permitted");
        return st;
    }

    StmtPtr parse_import() {
        auto st = parse_import_clause();
        expect_newline();
        return st;
    }

    StmtPtr parse_for() {
        auto st = make_stmt(StmtKind::For);
        take();  // for
        st->targets.push_back(expect_name());
        while (at_op(",")) {
            take();
            st->targets.push_back(expect_name());
        }
        if (!at_keyword("in")) fail("expected 'in'");
        take();
        st->value = parse_expression(0);
        expect_op(":");
        st->body = parse_suite();
        return st;
    }

    StmtPtr parse_if() {
        auto st = make_stmt(StmtKind::If);
        take();  // if / elif
        st->value = parse_expression(0);
        expect_op(":");
        st->body = parse_suite();
        if (at_keyword("elif")) {
            st->orelse.push_back(parse_if());
        } else if (at_keyword("else")) {
            take();
            expect_op(":");
            st->orelse = parse_suite();
        }
        return st;
    }

    StmtPtr parse_try() {
        auto st = make_stmt(StmtKind::Try);
        take();  // try
        expect_op(":");
        st->body = parse_suite();
        if (!at_keyword("except")) fail("try requires exactly one except clause");
        take();
        if (at_op("(")) {
            take();
            st->exc_names.push_back(expect_name());
            while (at_op(",")) {
                take();
                st->exc_names.push_back(expect_name());
            }
            expect_op(")");
        } else if (at(Tok::Name)) {
            st->exc_names.push_back(take().text);
        } else {
            fail("bare except clauses are not permitted");
        }
        if (at_keyword("as")) fail("'except ... as' is not permitted");
        expect_op(":");
        st->orelse = parse_suite();
        if (at_keyword("except") || at_keyword("finally") || at_keyword("else"))
            fail("only a single except clause is permitted");
        return st;
    }

    // Pratt-style expression parsing; `depth` guards host stack usage.
    ExprPtr parse_expression(std::size_t depth) { return parse_or(depth); }

    ExprPtr parse_or(std::size_t depth) {
        check_depth(depth);
        auto left = parse_and(depth + 1);
        if (!at_keyword("or")) return left;
        auto node = make_expr(ExprKind::BoolOr);
        node->parts.push_back(std::move(left));
        while (at_keyword("or")) {
            take();
            node->parts.push_back(parse_and(depth + 1));
        }
        return node;
    }

    ExprPtr parse_and(std::size_t depth) {
        auto left = parse_not(depth + 1);
        if (!at_keyword("and")) return left;
        auto node = make_expr(ExprKind::BoolAnd);
        node->parts.push_back(std::move(left));
        while (at_keyword("and")) {
            take();
            node->parts.push_back(parse_not(depth + 1));
        }
        return node;
    }

    ExprPtr parse_not(std::size_t depth) {
        check_depth(depth);
        if (at_keyword("not")) {
            auto node = make_expr(ExprKind::Not);
            take();
            node->parts.push_back(parse_not(depth + 1));
            return node;
        }
        return parse_comparison(depth + 1);
    }

    ExprPtr parse_comparison(std::size_t depth) {
        auto left = parse_additive(depth + 1);
        CmpOp op;
        if (at_op("==")) op = CmpOp::Eq;
        else if (at_op("!=")) op = CmpOp::Ne;
        else if (at_op("<")) op = CmpOp::Lt;
        else if (at_op("<=")) op = CmpOp::Le;
        else if (at_op(">")) op = CmpOp::Gt;
        else if (at_op(">=")) op = CmpOp::Ge;
        else if (at_keyword("in")) op = CmpOp::In;
        else if (at_keyword("not")) {
            take();
            if (!at_keyword("in")) fail("expected 'in' after 'not'");
            op = CmpOp::NotIn;
        } else {
            return left;
        }
        auto node = make_expr(ExprKind::Compare);
        node->cmp = op;
        take();
        node->parts.push_back(std::move(left));
        node->parts.push_back(parse_additive(depth + 1));
        if (at_op("==") || at_op("!=") || at_op("<") || at_op("<=") || at_op(">") || at_op(">=") ||
            at_keyword("in"))
            fail("chained comparisons are not permitted");
        return node;
    }

    ExprPtr parse_additive(std::size_t depth) {
        check_depth(depth);
        auto left = parse_multiplicative(depth + 1);
        while (at_op("+") || at_op("-")) {
            auto node = make_expr(ExprKind::BinOp);
            node->str = take().text;
            node->parts.push_back(std::move(left));
            node->parts.push_back(parse_multiplicative(depth + 1));
            left = std::move(node);
        }
        return left;
    }

    ExprPtr parse_multiplicative(std::size_t depth) {
        auto left = parse_unary(depth + 1);
        while (at_op("*") || at_op("/")) {
            auto node = make_expr(ExprKind::BinOp);
            node->str = take().text;
            node->parts.push_back(std::move(left));
            node->parts.push_back(parse_unary(depth + 1));
            left = std::move(node);
        }
        return left;
    }

    ExprPtr parse_unary(std::size_t depth) {
        check_depth(depth);
        if (at_op("-")) {
            auto node = make_expr(ExprKind::Neg);
            take();
            node->parts.push_back(parse_unary(depth + 1));
            return node;
        }
        if (at_op("+")) {
            take();
            return parse_unary(depth + 1);
        }
        return parse_postfix(depth + 1);
    }

    ExprPtr parse_postfix(std::size_t depth) {
        auto e = parse_atom(depth + 1);
        for (;;) {
            if (at_op("(")) {
                auto call = make_expr(ExprKind::Call);
                take();
                call->target = std::move(e);
                while (!at_op(")")) {
                    if (!call->parts.empty()) expect_op(",");
                    if (at_op(")")) break;
                    if (at(Tok::Name) && toks_[pos_ + 1].type == Tok::Op &&
                        toks_[pos_ + 1].text == "=")
                        fail("keyword arguments are not permitted");
                    if (at_op("*") || at_op("**")) fail("argument unpacking is not permitted");
                    call->parts.push_back(parse_expression(depth + 1));
                }
                expect_op(")");
                e = std::move(call);
                continue;
            }
            if (at_op(".")) {
                auto attr = make_expr(ExprKind::Attribute);
                take();
                attr->target = std::move(e);
                attr->str = expect_name();
                e = std::move(attr);
                continue;
            }
            if (at_op("[")) {
                auto sub = make_expr(ExprKind::Subscript);
                take();
                sub->target = std::move(e);
                sub->index = parse_expression(depth + 1);
                if (at_op(":")) fail("slicing is not permitted");
                expect_op("]");
                e = std::move(sub);
                continue;
            }
            return e;
        }
    }

    ExprPtr parse_atom(std::size_t depth) {
        check_depth(depth);
        const Token& t = peek();
        switch (t.type) {
            case Tok::Number: {
                auto e = make_expr(ExprKind::Num);
                e->num = take().number;
                return e;
            }
            case Tok::String: {
                auto e = make_expr(ExprKind::Str);
                e->str = take().text;
                return e;
            }
            case Tok::Name: {
                auto e = make_expr(ExprKind::Name);
                e->str = take().text;
                return e;
            }
            case Tok::Keyword: {
                if (t.text == "True" || t.text == "False" || t.text == "None") {
                    auto e = make_expr(t.text == "True" ? ExprKind::TrueLit
                                       : t.text == "False" ? ExprKind::FalseLit
                                                           : ExprKind::NoneLit);
                    take();
                    return e;
                }
                if (t.text == "lambda") fail("lambda expressions are not permitted");
                fail("unexpected keyword '" + t.text + "' in expression");
            }
            case Tok::Op:
                if (t.text == "(") {
                    take();
                    auto inner = parse_expression(depth + 1);
                    if (at_op(",")) fail("tuple expressions are not permitted");
                    expect_op(")");
                    return inner;
                }
                if (t.text == "[") return parse_list_or_comp(depth);
                if (t.text == "{") fail("dict and set literals are not permitted");
                fail("unexpected token '" + t.text + "'");
            default:
                fail("unexpected end of expression");
        }
    }

    ExprPtr parse_list_or_comp(std::size_t depth) {
        take();  // '['
        if (at_op("]")) {
            take();
            return make_expr(ExprKind::ListDisplay);
        }
        auto first = parse_expression(depth + 1);
        if (at_keyword("for")) {
            auto comp = make_expr(ExprKind::ListComp);
            comp->parts.push_back(std::move(first));
            take();  // for
            comp->comp_vars.push_back(expect_name());
            while (at_op(",")) {
                take();
                comp->comp_vars.push_back(expect_name());
            }
            if (!at_keyword("in")) fail("expected 'in'");
            take();
            comp->comp_iter = parse_expression(depth + 1);
            if (at_keyword("if")) {
                take();
                comp->comp_cond = parse_expression(depth + 1);
            }
            if (at_keyword("for")) fail("nested comprehension clauses are not permitted");
            expect_op("]");
            return comp;
        }
        auto lst = make_expr(ExprKind::ListDisplay);
        lst->parts.push_back(std::move(first));
        while (at_op(",")) {
            take();
            if (at_op("]")) break;
            lst->parts.push_back(parse_expression(depth + 1));
        }
        expect_op("]");
        return lst;
    }

    void check_depth(std::size_t depth) const {
        if (depth > kMaxDepth) {
            const Token& t = peek();
            throw ParseError{"expression nesting too deep", t.line, t.col};
        }
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    std::size_t nodes_ = 0;
    std::size_t max_nodes_;
};

}  // namespace

std::variant<Program, ParseError> parse_program(const std::vector<Token>& tokens,
                                                std::size_t max_nodes) {
    try {
        return Parser(tokens, max_nodes).run();
    } catch (const ParseError& e) {
        return e;
    }
}

}  // namespace rfsearch::rlang
