#include "rfsearch/rex.hpp"

#include <cctype>
#include <cstdlib>
#include <memory>

namespace rfsearch::rex {

namespace {

constexpr std::size_t kMaxProgram = 20000;
constexpr std::size_t kMaxParseDepth = 64;
constexpr int kMaxCounted = 512;
constexpr std::size_t kMaxBacktrackStack = 1u << 22;

struct Node {
    enum class Kind { Literal, Class, Any, Concat, Alt, Repeat, Group, Bol, Eol, Empty };
    Kind kind = Kind::Empty;
    unsigned char ch = 0;
    int class_idx = -1;
    int group_idx = -1;
    int min_rep = 0;
    int max_rep = -1;
    bool lazy = false;
    std::vector<std::unique_ptr<Node>> children;
};

using NodePtr = std::unique_ptr<Node>;

NodePtr clone(const Node& n) {
    auto out = std::make_unique<Node>();
    out->kind = n.kind;
    out->ch = n.ch;
    out->class_idx = n.class_idx;
    out->group_idx = n.group_idx;
    out->min_rep = n.min_rep;
    out->max_rep = n.max_rep;
    out->lazy = n.lazy;
    for (const auto& c : n.children) out->children.push_back(clone(*c));
    return out;
}

}  // namespace

class Compiler {
public:
    Compiler(std::string_view pattern, bool dotall, Regex& out)
        : pat_(pattern), dotall_(dotall), re_(out) {}

    void run() {
        NodePtr root = parse_alt(0);
        if (pos_ != pat_.size()) fail("unbalanced ')'");
        emit({Regex::Op::Save, 0, 0, 0});
        emit_node(*root);
        emit({Regex::Op::Save, 0, 1, 0});
        emit({Regex::Op::Match, 0, 0, 0});
        re_.n_groups_ = static_cast<std::size_t>(next_group_);
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw CompileError(msg, pos_); }

    bool eof() const { return pos_ >= pat_.size(); }
    char peek() const { return pat_[pos_]; }
    char take() { return pat_[pos_++]; }

    NodePtr parse_alt(std::size_t depth) {
        if (depth > kMaxParseDepth) fail("pattern nesting too deep");
        auto first = parse_concat(depth);
        if (eof() || peek() != '|') return first;
        auto alt = std::make_unique<Node>();
        alt->kind = Node::Kind::Alt;
        alt->children.push_back(std::move(first));
        while (!eof() && peek() == '|') {
            take();
            alt->children.push_back(parse_concat(depth));
        }
        return alt;
    }

    NodePtr parse_concat(std::size_t depth) {
        auto cat = std::make_unique<Node>();
        cat->kind = Node::Kind::Concat;
        while (!eof() && peek() != '|' && peek() != ')') cat->children.push_back(parse_repeat(depth));
        if (cat->children.empty()) {
            cat->kind = Node::Kind::Empty;
            return cat;
        }
        if (cat->children.size() == 1) return std::move(cat->children[0]);
        return cat;
    }

    NodePtr parse_repeat(std::size_t depth) {
        auto atom = parse_atom(depth);
        for (;;) {
            if (eof()) return atom;
            int mn = -1;
            int mx = -1;
            const char c = peek();
            if (c == '*') {
                mn = 0;
                mx = -1;
                take();
            } else if (c == '+') {
                mn = 1;
                mx = -1;
                take();
            } else if (c == '?') {
                mn = 0;
                mx = 1;
                take();
            } else if (c == '{') {
                if (!try_parse_brace(mn, mx)) return atom;  // literal '{'
            } else {
                return atom;
            }
            if (atom->kind == Node::Kind::Repeat) fail("multiple quantifiers on one atom");
            if (atom->kind == Node::Kind::Bol || atom->kind == Node::Kind::Eol)
                fail("quantifier on anchor");
            auto rep = std::make_unique<Node>();
            rep->kind = Node::Kind::Repeat;
            rep->min_rep = mn;
            rep->max_rep = mx;
            if (!eof() && peek() == '?') {
                rep->lazy = true;
                take();
            }
            rep->children.push_back(std::move(atom));
            atom = std::move(rep);
        }
    }

    bool try_parse_brace(int& mn, int& mx) {
        const std::size_t save = pos_;
        take();  // '{'
        std::string lo;
        std::string hi;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) lo.push_back(take());
        bool has_comma = false;
        if (!eof() && peek() == ',') {
            has_comma = true;
            take();
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) hi.push_back(take());
        }
        if (eof() || peek() != '}' || lo.empty()) {
            pos_ = save;
            return false;
        }
        take();  // '}'
        mn = std::atoi(lo.c_str());
        if (!has_comma)
            mx = mn;
        else if (hi.empty())
            mx = -1;
        else
            mx = std::atoi(hi.c_str());
        if (mn > kMaxCounted || mx > kMaxCounted) fail("counted repetition too large");
        if (mx != -1 && mx < mn) fail("bad repetition range");
        return true;
    }

    NodePtr parse_atom(std::size_t depth) {
        if (eof()) fail("unexpected end of pattern");
        const char c = take();
        switch (c) {
            case '(': {
                auto g = std::make_unique<Node>();
                g->kind = Node::Kind::Group;
                if (!eof() && peek() == '?') {
                    take();
                    if (eof() || peek() != ':') fail("unsupported group extension");
                    take();
                    g->group_idx = -1;
                } else {
                    g->group_idx = next_group_++;
                }
                g->children.push_back(parse_alt(depth + 1));
                if (eof() || take() != ')') fail("missing ')'");
                return g;
            }
            case '[':
                return parse_class();
            case '.': {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::Any;
                return n;
            }
            case '^': {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::Bol;
                return n;
            }
            case '$': {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::Eol;
                return n;
            }
            case '\\':
                return parse_escape();
            case '*':
            case '+':
            case '?':
                fail("nothing to repeat");
            case ')':
                fail("unbalanced ')'");
            default: {
                auto n = std::make_unique<Node>();
                n->kind = Node::Kind::Literal;
                n->ch = static_cast<unsigned char>(c);
                return n;
            }
        }
    }

    NodePtr literal(unsigned char c) {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Literal;
        n->ch = c;
        return n;
    }

    NodePtr class_node(Regex::CharClass cls) {
        auto n = std::make_unique<Node>();
        n->kind = Node::Kind::Class;
        n->class_idx = static_cast<int>(re_.classes_.size());
        re_.classes_.push_back(std::move(cls));
        return n;
    }

    static void add_digit(Regex::CharClass& c) { c.ranges.push_back({'0', '9'}); }
    static void add_space(Regex::CharClass& c) {
        c.ranges.push_back({' ', ' '});
        c.ranges.push_back({'\t', '\t'});
        c.ranges.push_back({'\n', '\n'});
        c.ranges.push_back({'\r', '\r'});
        c.ranges.push_back({'\f', '\f'});
        c.ranges.push_back({'\v', '\v'});
    }
    static void add_word(Regex::CharClass& c) {
        c.ranges.push_back({'0', '9'});
        c.ranges.push_back({'a', 'z'});
        c.ranges.push_back({'A', 'Z'});
        c.ranges.push_back({'_', '_'});
    }

    NodePtr parse_escape() {
        if (eof()) fail("trailing backslash");
        const char c = take();
        switch (c) {
            case 'n': return literal('\n');
            case 't': return literal('\t');
            case 'r': return literal('\r');
            case 'f': return literal('\f');
            case 'v': return literal('\v');
            case 'd':
            case 'D': {
                Regex::CharClass cls;
                cls.negated = (c == 'D');
                add_digit(cls);
                return class_node(std::move(cls));
            }
            case 's':
            case 'S': {
                Regex::CharClass cls;
                cls.negated = (c == 'S');
                add_space(cls);
                return class_node(std::move(cls));
            }
            case 'w':
            case 'W': {
                Regex::CharClass cls;
                cls.negated = (c == 'W');
                add_word(cls);
                return class_node(std::move(cls));
            }
            default:
                if (c >= '1' && c <= '9') fail("backreferences are not supported");
                if (std::isalnum(static_cast<unsigned char>(c))) fail("unsupported escape");
                return literal(static_cast<unsigned char>(c));
        }
    }

    // Returns the chars/ranges denoted by one class item; multi-range escapes
    // (\d etc.) append directly and return false for "no single char".
    bool class_item(Regex::CharClass& cls, unsigned char& single) {
        const char c = take();
        if (c != '\\') {
            single = static_cast<unsigned char>(c);
            return true;
        }
        if (eof()) fail("trailing backslash in class");
        const char e = take();
        switch (e) {
            case 'n': single = '\n'; return true;
            case 't': single = '\t'; return true;
            case 'r': single = '\r'; return true;
            case 'f': single = '\f'; return true;
            case 'v': single = '\v'; return true;
            case 'd': add_digit(cls); return false;
            case 's': add_space(cls); return false;
            case 'w': add_word(cls); return false;
            default:
                if (std::isalnum(static_cast<unsigned char>(e))) fail("unsupported escape in class");
                single = static_cast<unsigned char>(e);
                return true;
        }
    }

    NodePtr parse_class() {
        Regex::CharClass cls;
        if (!eof() && peek() == '^') {
            cls.negated = true;
            take();
        }
        bool first = true;
        for (;;) {
            if (eof()) fail("missing ']'");
            if (peek() == ']' && !first) {
                take();
                break;
            }
            first = false;
            unsigned char lo = 0;
            if (!class_item(cls, lo)) continue;
            if (!eof() && peek() == '-' && pos_ + 1 < pat_.size() && pat_[pos_ + 1] != ']') {
                take();  // '-'
                unsigned char hi = 0;
                if (!class_item(cls, hi)) fail("bad range endpoint");
                if (hi < lo) fail("reversed range in class");
                cls.ranges.push_back({lo, hi});
            } else {
                cls.ranges.push_back({lo, lo});
            }
        }
        return class_node(std::move(cls));
    }

    // --- code emission ---

    int emit(Regex::Inst ins) {
        if (re_.prog_.size() >= kMaxProgram) throw CompileError("compiled pattern too large", pos_);
        re_.prog_.push_back(ins);
        return static_cast<int>(re_.prog_.size() - 1);
    }

    int here() const { return static_cast<int>(re_.prog_.size()); }

    void emit_node(const Node& n) {
        switch (n.kind) {
            case Node::Kind::Empty:
                break;
            case Node::Kind::Literal:
                emit({Regex::Op::Char, n.ch, 0, 0});
                break;
            case Node::Kind::Any:
                emit({dotall_ ? Regex::Op::AnyNl : Regex::Op::Any, 0, 0, 0});
                break;
            case Node::Kind::Class:
                emit({Regex::Op::Class, 0, n.class_idx, 0});
                break;
            case Node::Kind::Bol:
                emit({Regex::Op::Bol, 0, 0, 0});
                break;
            case Node::Kind::Eol:
                emit({Regex::Op::Eol, 0, 0, 0});
                break;
            case Node::Kind::Concat:
                for (const auto& c : n.children) emit_node(*c);
                break;
            case Node::Kind::Group:
                if (n.group_idx >= 0) emit({Regex::Op::Save, 0, 2 * n.group_idx, 0});
                emit_node(*n.children[0]);
                if (n.group_idx >= 0) emit({Regex::Op::Save, 0, 2 * n.group_idx + 1, 0});
                break;
            case Node::Kind::Alt: {
                std::vector<int> jumps;
                for (std::size_t i = 0; i < n.children.size(); ++i) {
                    if (i + 1 < n.children.size()) {
                        const int sp = emit({Regex::Op::Split, 0, 0, 0});
                        re_.prog_[sp].a = here();
                        emit_node(*n.children[i]);
                        jumps.push_back(emit({Regex::Op::Jmp, 0, 0, 0}));
                        re_.prog_[sp].b = here();
                    } else {
                        emit_node(*n.children[i]);
                    }
                }
                for (int j : jumps) re_.prog_[j].a = here();
                break;
            }
            case Node::Kind::Repeat:
                emit_repeat(n);
                break;
        }
    }

    void emit_star(const Node& body, bool lazy) {
        const int l1 = emit({Regex::Op::Split, 0, 0, 0});
        const int b = here();
        emit_node(body);
        emit({Regex::Op::Jmp, 0, l1, 0});
        const int after = here();
        re_.prog_[l1].a = lazy ? after : b;
        re_.prog_[l1].b = lazy ? b : after;
    }

    void emit_quest(const Node& body, bool lazy) {
        const int sp = emit({Regex::Op::Split, 0, 0, 0});
        const int b = here();
        emit_node(body);
        const int after = here();
        re_.prog_[sp].a = lazy ? after : b;
        re_.prog_[sp].b = lazy ? b : after;
    }

    // Nested expansion so skipping one optional copy skips the rest.
    void emit_optional_chain(const Node& body, int count, bool lazy) {
        if (count <= 0) return;
        const int sp = emit({Regex::Op::Split, 0, 0, 0});
        const int b = here();
        emit_node(body);
        emit_optional_chain(body, count - 1, lazy);
        const int after = here();
        re_.prog_[sp].a = lazy ? after : b;
        re_.prog_[sp].b = lazy ? b : after;
    }

    void emit_repeat(const Node& rep) {
        const Node& body = *rep.children[0];
        const int mn = rep.min_rep;
        const int mx = rep.max_rep;
        if (mn == 0 && mx == -1) {
            emit_star(body, rep.lazy);
            return;
        }
        if (mn == 1 && mx == -1) {
            const int b = here();
            emit_node(body);
            const int sp = emit({Regex::Op::Split, 0, 0, 0});
            const int after = here();
            re_.prog_[sp].a = rep.lazy ? after : b;
            re_.prog_[sp].b = rep.lazy ? b : after;
            return;
        }
        if (mn == 0 && mx == 1) {
            emit_quest(body, rep.lazy);
            return;
        }
        for (int i = 0; i < mn; ++i) emit_node(body);
        if (mx == -1)
            emit_star(body, rep.lazy);
        else
            emit_optional_chain(body, mx - mn, rep.lazy);
    }

    std::string_view pat_;
    std::size_t pos_ = 0;
    bool dotall_;
    int next_group_ = 1;
    Regex& re_;
};

Regex Regex::compile(std::string_view pattern, bool dotall) {
    Regex re;
    Compiler(pattern, dotall, re).run();
    return re;
}

bool Regex::run_at(std::string_view text, std::size_t start, Budget& budget,
                   MatchResult& out) const {
    struct BtEntry {
        int pc;
        std::size_t sp;
        std::size_t undo_len;
    };
    struct UndoEntry {
        int slot;
        std::ptrdiff_t old;
    };

    std::vector<std::ptrdiff_t> slots(2 * n_groups_, -1);
    std::vector<BtEntry> stack;
    std::vector<UndoEntry> undo;

    int pc = 0;
    std::size_t sp = start;
    for (;;) {
        budget.tick();
        const Inst& ins = prog_[static_cast<std::size_t>(pc)];
        bool failed = false;
        switch (ins.op) {
            case Op::Char:
                if (sp < text.size() && static_cast<unsigned char>(text[sp]) == ins.ch) {
                    ++sp;
                    ++pc;
                } else {
                    failed = true;
                }
                break;
            case Op::Class:
                if (sp < text.size() &&
                    classes_[static_cast<std::size_t>(ins.a)].matches(
                        static_cast<unsigned char>(text[sp]))) {
                    ++sp;
                    ++pc;
                } else {
                    failed = true;
                }
                break;
            case Op::Any:
                if (sp < text.size() && text[sp] != '\n') {
                    ++sp;
                    ++pc;
                } else {
                    failed = true;
                }
                break;
            case Op::AnyNl:
                if (sp < text.size()) {
                    ++sp;
                    ++pc;
                } else {
                    failed = true;
                }
                break;
            case Op::Jmp:
                pc = ins.a;
                break;
            case Op::Split:
                if (stack.size() >= kMaxBacktrackStack)
                    throw ResourceFault(ResourceFault::Kind::StepLimit,
                                        "regex backtrack stack exhausted");
                stack.push_back({ins.b, sp, undo.size()});
                pc = ins.a;
                break;
            case Op::Save:
                undo.push_back({ins.a, slots[static_cast<std::size_t>(ins.a)]});
                slots[static_cast<std::size_t>(ins.a)] = static_cast<std::ptrdiff_t>(sp);
                ++pc;
                break;
            case Op::Bol:
                if (sp == 0) {
                    ++pc;
                } else {
                    failed = true;
                }
                break;
            case Op::Eol:
                if (sp == text.size()) {
                    ++pc;
                } else {
                    failed = true;
                }
                break;
            case Op::Match: {
                out.begins.resize(n_groups_);
                out.ends.resize(n_groups_);
                for (std::size_t g = 0; g < n_groups_; ++g) {
                    out.begins[g] = slots[2 * g];
                    out.ends[g] = slots[2 * g + 1];
                }
                return true;
            }
        }
        if (failed) {
            if (stack.empty()) return false;
            const BtEntry e = stack.back();
            stack.pop_back();
            while (undo.size() > e.undo_len) {
                const UndoEntry u = undo.back();
                undo.pop_back();
                slots[static_cast<std::size_t>(u.slot)] = u.old;
            }
            pc = e.pc;
            sp = e.sp;
        }
    }
}

std::optional<MatchResult> Regex::search(std::string_view text, Budget* budget,
                                         std::size_t from) const {
    std::optional<Budget> local;
    if (budget == nullptr) {
        local.emplace(100'000'000ULL, std::chrono::milliseconds(20000));
        budget = &*local;
    }
    for (std::size_t start = from; start <= text.size(); ++start) {
        MatchResult m;
        if (run_at(text, start, *budget, m)) return m;
    }
    return std::nullopt;
}

std::vector<std::string> Regex::findall(std::string_view text, Budget* budget) const {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (from <= text.size()) {
        auto m = search(text, budget, from);
        if (!m) break;
        out.push_back(m->group(text, 0));
        const auto b = static_cast<std::size_t>(m->begins[0]);
        const auto e = static_cast<std::size_t>(m->ends[0]);
        from = (e > b) ? e : e + 1;
    }
    return out;
}

std::vector<std::string> Regex::split(std::string_view text, Budget* budget) const {
    std::vector<std::string> out;
    std::size_t from = 0;
    std::size_t last = 0;
    while (from <= text.size()) {
        auto m = search(text, budget, from);
        if (!m) break;
        const auto b = static_cast<std::size_t>(m->begins[0]);
        const auto e = static_cast<std::size_t>(m->ends[0]);
        if (e == b) {
            from = e + 1;
            continue;
        }
        out.emplace_back(text.substr(last, b - last));
        last = e;
        from = e;
    }
    out.emplace_back(text.substr(last));
    return out;
}

}  // namespace rfsearch::rex
