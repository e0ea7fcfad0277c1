#include <set>

#include "rfsearch/rewards.hpp"
#include "rlang_internal.hpp"

namespace rfsearch::rlang {

namespace {

const std::set<std::string>& import_whitelist() {
    static const std::set<std::string> wl = {"re", "math"};
    return wl;
}

const std::set<std::string>& builtin_functions() {
    static const std::set<std::string> fns = {"len", "float", "str", "abs", "min", "max", "zip"};
    return fns;
}

const std::set<std::string>& exception_names() {
    static const std::set<std::string> ex = {"ValueError", "TypeError", "ZeroDivisionError"};
    return ex;
}

const std::set<std::string>& tag_constants() {
    static const std::set<std::string> tags = {"THINKING_OPEN", "THINKING_CLOSE", "SOLUTION_OPEN",
                                               "SOLUTION_CLOSE"};
    return tags;
}

const std::set<std::string>& re_functions() {
    static const std::set<std::string> fns = {"search", "findall", "split"};
    return fns;
}

const std::set<std::string>& math_functions() {
    static const std::set<std::string> fns = {"floor", "ceil", "sqrt", "fabs", "log", "exp", "pow"};
    return fns;
}

const std::set<std::string>& method_names() {
    static const std::set<std::string> m = {"strip", "split", "lower", "replace", "append", "group"};
    return m;
}

std::string at_pos(int line, int col) {
    return " (line " + std::to_string(line) + ", column " + std::to_string(col) + ")";
}

// ------------------------------------------------------- name analysis ----

void collect_bound_expr(const Expr& e, std::set<std::string>& bound);

void collect_bound_stmt(const Stmt& st, std::set<std::string>& bound) {
    switch (st.kind) {
        case StmtKind::Import: bound.insert(st.name); break;
        case StmtKind::Assign: bound.insert(st.name); break;
        case StmtKind::For:
            for (const auto& t : st.targets) bound.insert(t);
            break;
        default: break;
    }
    if (st.value) collect_bound_expr(*st.value, bound);
    for (const auto& s : st.body) collect_bound_stmt(*s, bound);
    for (const auto& s : st.orelse) collect_bound_stmt(*s, bound);
}

void collect_bound_expr(const Expr& e, std::set<std::string>& bound) {
    if (e.kind == ExprKind::ListComp)
        for (const auto& v : e.comp_vars) bound.insert(v);
    for (const auto& p : e.parts) collect_bound_expr(*p, bound);
    if (e.target) collect_bound_expr(*e.target, bound);
    if (e.index) collect_bound_expr(*e.index, bound);
    if (e.comp_iter) collect_bound_expr(*e.comp_iter, bound);
    if (e.comp_cond) collect_bound_expr(*e.comp_cond, bound);
}

std::optional<RejectInfo> check_name_refs_expr(const Expr& e, const std::set<std::string>& bound);

std::optional<RejectInfo> check_name_refs_stmt(const Stmt& st, const std::set<std::string>& bound) {
    if (st.kind == StmtKind::Try) {
        for (const auto& name : st.exc_names)
            if (!exception_names().count(name))
                return RejectInfo{1, "reference to name '" + name + "' outside the permitted set" +
                                         at_pos(st.line, st.col)};
    }
    if (st.value)
        if (auto r = check_name_refs_expr(*st.value, bound)) return r;
    for (const auto& s : st.body)
        if (auto r = check_name_refs_stmt(*s, bound)) return r;
    for (const auto& s : st.orelse)
        if (auto r = check_name_refs_stmt(*s, bound)) return r;
    return std::nullopt;
}

std::optional<RejectInfo> check_name_refs_expr(const Expr& e, const std::set<std::string>& bound) {
    if (e.kind == ExprKind::Name) {
        const std::string& id = e.str;
        if (!bound.count(id) && !builtin_functions().count(id) && !tag_constants().count(id) &&
            !exception_names().count(id))
            return RejectInfo{1, "reference to name '" + id + "' outside the permitted set" +
                                     at_pos(e.line, e.col)};
        return std::nullopt;
    }
    for (const auto& p : e.parts)
        if (auto r = check_name_refs_expr(*p, bound)) return r;
    if (e.target)
        if (auto r = check_name_refs_expr(*e.target, bound)) return r;
    if (e.index)
        if (auto r = check_name_refs_expr(*e.index, bound)) return r;
    if (e.comp_iter)
        if (auto r = check_name_refs_expr(*e.comp_iter, bound)) return r;
    if (e.comp_cond)
        if (auto r = check_name_refs_expr(*e.comp_cond, bound)) return r;
    return std::nullopt;
}

// ---------------------------------------------------- structure checks ----

struct StructureChecker {
    std::optional<RejectInfo> reject;

    void bad(int stage, const std::string& reason, int line, int col) {
        if (!reject) reject = RejectInfo{stage, reason + at_pos(line, col)};
    }

    void check_stmt(const Stmt& st, int loop_depth) {
        if (reject) return;
        switch (st.kind) {
            case StmtKind::FuncDef:
                bad(2, "nested function definition", st.line, st.col);
                return;
            case StmtKind::Import:
                break;
            case StmtKind::Continue:
                if (loop_depth == 0) bad(2, "'continue' outside of a loop", st.line, st.col);
                return;
            case StmtKind::For: {
                const Expr& iter = *st.value;
                const bool is_zip = iter.kind == ExprKind::Call &&
                                    iter.target->kind == ExprKind::Name &&
                                    iter.target->str == "zip" && iter.parts.size() == 2;
                if (!is_zip) {
                    bad(2, "for-loops must iterate zip(completions, answer)", st.line, st.col);
                    return;
                }
                for (const auto& a : iter.parts) check_expr(*a);
                for (const auto& s : st.body) check_stmt(*s, loop_depth + 1);
                return;
            }
            default:
                break;
        }
        if (st.value) check_expr(*st.value);
        for (const auto& s : st.body) check_stmt(*s, loop_depth);
        for (const auto& s : st.orelse) check_stmt(*s, loop_depth);
    }

    void check_name_position(const Expr& e) {
        // bare loads of builtin/module/exception names are structural errors;
        // they only make sense as call targets, attribute bases, or handlers
        if (builtin_functions().count(e.str))
            bad(2, "builtin '" + e.str + "' may only be called", e.line, e.col);
        else if (import_whitelist().count(e.str))
            bad(2, "module '" + e.str + "' may only be used via attribute access", e.line, e.col);
        else if (exception_names().count(e.str))
            bad(2, "exception name '" + e.str + "' may only appear in an except clause", e.line,
                e.col);
    }

    void check_expr(const Expr& e) {
        if (reject) return;
        switch (e.kind) {
            case ExprKind::Name:
                check_name_position(e);
                return;
            case ExprKind::Call: {
                const Expr& fn = *e.target;
                if (fn.kind == ExprKind::Name) {
                    if (!builtin_functions().count(fn.str)) {
                        bad(2, "call to '" + fn.str + "' is not permitted", fn.line, fn.col);
                        return;
                    }
                } else if (fn.kind == ExprKind::Attribute) {
                    const bool module_base = fn.target->kind == ExprKind::Name &&
                                             import_whitelist().count(fn.target->str) > 0;
                    if (module_base) {
                        const std::string& mod = fn.target->str;
                        const auto& allowed = mod == "re" ? re_functions() : math_functions();
                        if (!allowed.count(fn.str)) {
                            bad(2, "call to '" + mod + "." + fn.str + "' is not permitted", fn.line,
                                fn.col);
                            return;
                        }
                    } else {
                        if (!method_names().count(fn.str)) {
                            bad(2, "method '" + fn.str + "' is not permitted", fn.line, fn.col);
                            return;
                        }
                        check_expr(*fn.target);
                    }
                } else {
                    bad(2, "only builtin and method calls are permitted", fn.line, fn.col);
                    return;
                }
                for (const auto& a : e.parts) check_expr(*a);
                return;
            }
            case ExprKind::Attribute: {
                const bool module_base = e.target->kind == ExprKind::Name &&
                                         import_whitelist().count(e.target->str) > 0;
                const bool known_const =
                    module_base && ((e.target->str == "re" && e.str == "DOTALL") ||
                                    (e.target->str == "math" && (e.str == "pi" || e.str == "e")));
                if (!known_const)
                    bad(2, "attribute '" + e.str + "' is not permitted", e.line, e.col);
                return;
            }
            default:
                break;
        }
        for (const auto& p : e.parts) check_expr(*p);
        if (e.target) check_expr(*e.target);
        if (e.index) check_expr(*e.index);
        if (e.comp_iter) check_expr(*e.comp_iter);
        if (e.comp_cond) check_expr(*e.comp_cond);
    }
};

// ------------------------------------------------- token-level scanning ----

std::optional<RejectInfo> scan_imports(const std::vector<Token>& tokens) {
    bool line_start = true;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const Token& t = tokens[i];
        if (t.type == Tok::Newline || t.type == Tok::Indent || t.type == Tok::Dedent) {
            line_start = true;
            continue;
        }
        if (line_start && t.type == Tok::Keyword && t.text == "from")
            return RejectInfo{1, "'from ... import' is not permitted" + at_pos(t.line, t.col)};
        if (line_start && t.type == Tok::Keyword && t.text == "import") {
            if (i + 1 >= tokens.size() || tokens[i + 1].type != Tok::Name)
                return RejectInfo{1, "malformed import" + at_pos(t.line, t.col)};
            const Token& mod = tokens[i + 1];
            if (!import_whitelist().count(mod.text))
                return RejectInfo{1, "import of module '" + mod.text +
                                         "' is outside the whitelist" + at_pos(mod.line, mod.col)};
        }
        line_start = false;
    }
    return std::nullopt;
}

std::variant<Program, ParseError> tokenize_and_parse(const std::string& source,
                                                     std::size_t max_nodes) {
    auto toks = tokenize(source);
    if (std::holds_alternative<LexError>(toks)) {
        const auto& e = std::get<LexError>(toks);
        return ParseError{e.message, e.line, e.col};
    }
    return parse_program(std::get<std::vector<Token>>(toks), max_nodes);
}

const std::vector<std::string>& probe_completions() {
    static const std::vector<std::string> batch = {
        "<thinking>\n3 + 4 = 7\ncheck the sum once more\n</thinking>\n<solution>7</solution>",
        "<thinking>half open block <solution>7",
        "",
    };
    return batch;
}

}  // namespace

std::optional<RejectInfo> stage1_check_modules(const RewardProgram& program) {
    auto toks = tokenize(program.source);
    if (std::holds_alternative<LexError>(toks)) return std::nullopt;  // stage 2 owns parse errors
    const auto& tokens = std::get<std::vector<Token>>(toks);
    if (auto r = scan_imports(tokens)) return r;

    auto parsed = parse_program(tokens, 1u << 20);  // generous; the real budget is stage 2's
    if (std::holds_alternative<ParseError>(parsed)) return std::nullopt;
    const Program& prog = std::get<Program>(parsed);

    std::set<std::string> bound;
    const Stmt& fn = *prog.func;
    for (const auto& p : fn.params) bound.insert(p);
    if (!fn.kwargs_name.empty()) bound.insert(fn.kwargs_name);
    collect_bound_stmt(fn, bound);
    bound.erase(fn.name);  // the function's own name is not a usable value
    return check_name_refs_stmt(fn, bound);
}

Stage2Result stage2_build_locked(const RewardProgram& program, const SandboxLimits& limits) {
    auto parsed = tokenize_and_parse(program.source, limits.max_ast_nodes);
    if (std::holds_alternative<ParseError>(parsed)) {
        const auto& e = std::get<ParseError>(parsed);
        return {nullptr, RejectInfo{2, "parse error: " + e.message + at_pos(e.line, e.col)}};
    }
    auto prog = std::make_shared<Program>(std::move(std::get<Program>(parsed)));
    const Stmt& fn = *prog->func;

    if (is_protected_reward_name(fn.name))
        return {nullptr, RejectInfo{2, "protected-name: '" + fn.name +
                                           "' may not be redefined" + at_pos(fn.line, fn.col)}};
    const std::vector<std::string> want = {"prompts", "completions", "answer"};
    if (fn.params != want)
        return {nullptr,
                RejectInfo{2, "function must take exactly (prompts, completions, answer) plus an "
                              "optional **kwargs tail" +
                                  at_pos(fn.line, fn.col)}};

    StructureChecker checker;
    for (const auto& st : fn.body) checker.check_stmt(*st, 0);
    if (checker.reject) return {nullptr, checker.reject};

    return {std::make_shared<const CompiledReward>(fn.name, std::move(prog)), std::nullopt};
}

GuardedReward::GuardedReward(std::shared_ptr<const CompiledReward> compiled, SandboxLimits limits)
    : compiled_(std::move(compiled)), limits_(limits) {}

std::vector<double> GuardedReward::invoke(const std::vector<std::string>& prompts,
                                          const std::vector<std::string>& completions,
                                          const std::vector<std::string>& answers) const {
    Budget budget(limits_.max_interp_steps_per_call, limits_.wall_timeout_per_call);
    return run_reward(*compiled_, prompts, completions, answers, budget);
}

const std::string& GuardedReward::name() const { return compiled_->name(); }

GuardedReward stage3_wrap_limits(std::shared_ptr<const CompiledReward> compiled,
                                 const SandboxLimits& limits) {
    return GuardedReward(std::move(compiled), limits);
}

std::optional<RejectInfo> stage4_probe(const GuardedReward& guarded) {
    const auto& batch = probe_completions();
    const std::vector<std::string> prompts(batch.size());
    const std::vector<std::string> answers(batch.size(), "7");
    try {
        guarded.invoke(prompts, batch, answers);  // run_reward enforces the shape
        return std::nullopt;
    } catch (const ResourceFault& e) {
        return RejectInfo{4, std::string("resource fault during probe: ") + e.what()};
    } catch (const InterpFault& e) {
        return RejectInfo{4, std::string("probe failed: ") + e.what()};
    }
}

ValidationOutcome validate(RewardProgram program, const SandboxLimits& limits) {
    program.status = RewardProgram::Status::Unvalidated;
    program.reject.reset();

    if (auto r = stage1_check_modules(program)) {
        program.status = RewardProgram::Status::Rejected;
        program.reject = r;
        return {std::move(program), nullptr};
    }
    auto s2 = stage2_build_locked(program, limits);
    if (s2.reject) {
        program.status = RewardProgram::Status::Rejected;
        program.reject = s2.reject;
        return {std::move(program), nullptr};
    }
    const GuardedReward guarded = stage3_wrap_limits(s2.compiled, limits);
    if (auto r = stage4_probe(guarded)) {
        program.status = RewardProgram::Status::Rejected;
        program.reject = r;
        return {std::move(program), nullptr};
    }
    program.status = RewardProgram::Status::Valid;
    return {std::move(program), s2.compiled};
}

std::vector<double> interpret(const CompiledReward& program,
                              const std::vector<std::string>& prompts,
                              const std::vector<std::string>& completions,
                              const std::vector<std::string>& answers,
                              const SandboxLimits& limits) {
    Budget budget(limits.max_interp_steps_per_call, limits.wall_timeout_per_call);
    return run_reward(program, prompts, completions, answers, budget);
}

const std::string& compiled_name(const CompiledReward& program) { return program.name(); }

}  // namespace rfsearch::rlang
