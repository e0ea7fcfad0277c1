#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "rfsearch/rex.hpp"
#include "rfsearch/text.hpp"
#include "rlang_internal.hpp"

namespace rfsearch::rlang {

namespace {

constexpr int kModuleRe = 0;
constexpr int kModuleMath = 1;
constexpr int kFlagDotall = 16;  // numeric value of the dotall flag

struct ReturnSignal {
    Value value;
};
struct ContinueSignal {};

[[noreturn]] void type_error(const std::string& msg) {
    throw ProgError{ProgError::Type::TypeError, msg};
}
[[noreturn]] void value_error(const std::string& msg) {
    throw ProgError{ProgError::Type::ValueError, msg};
}
[[noreturn]] void fault(const std::string& msg) { throw InterpFault(msg); }

const char* kind_name(Value::Kind k) {
    switch (k) {
        case Value::Kind::None: return "None";
        case Value::Kind::Bool: return "bool";
        case Value::Kind::Num: return "number";
        case Value::Kind::Str: return "str";
        case Value::Kind::List: return "list";
        case Value::Kind::Tuple: return "tuple";
        case Value::Kind::Dict: return "dict";
        case Value::Kind::Match: return "match";
        case Value::Kind::Module: return "module";
        case Value::Kind::Flag: return "flag";
    }
    return "?";
}

class Interpreter {
public:
    Interpreter(const Program& program, Budget& budget) : program_(program), budget_(budget) {}

    Value call_function(const std::vector<Value>& args) {
        const Stmt& fn = *program_.func;
        env_.clear();
        for (std::size_t i = 0; i < fn.params.size(); ++i) env_[fn.params[i]] = args[i];
        if (!fn.kwargs_name.empty()) {
            Value kw;
            kw.kind = Value::Kind::Dict;
            kw.dict = std::make_shared<std::map<std::string, Value>>();
            env_[fn.kwargs_name] = kw;
        }
        try {
            exec_block(fn.body);
        } catch (const ReturnSignal& r) {
            return r.value;
        } catch (const ContinueSignal&) {
            fault("'continue' outside of a loop");
        } catch (const ProgError& e) {
            fault("uncaught program error: " + e.message);
        }
        return Value::none();
    }

private:
    void exec_block(const std::vector<StmtPtr>& body) {
        for (const auto& st : body) exec(*st);
    }

    void exec(const Stmt& st) {
        budget_.tick();
        switch (st.kind) {
            case StmtKind::Import:
                // whitelist enforced in stage 1; binding injected lazily here
                env_[st.name] = module_value(st.name == "re" ? kModuleRe : kModuleMath);
                return;
            case StmtKind::Assign:
                env_[st.name] = eval(*st.value);
                return;
            case StmtKind::ExprStmt:
                eval(*st.value);
                return;
            case StmtKind::Return:
                throw ReturnSignal{eval(*st.value)};
            case StmtKind::Continue:
                throw ContinueSignal{};
            case StmtKind::For:
                exec_for(st);
                return;
            case StmtKind::If:
                if (truthy(eval(*st.value)))
                    exec_block(st.body);
                else
                    exec_block(st.orelse);
                return;
            case StmtKind::Try:
                exec_try(st);
                return;
            case StmtKind::FuncDef:
                fault("nested function definition");  // unreachable after stage 2
        }
    }

    void exec_for(const Stmt& st) {
        const Value iterable = eval(*st.value);
        if (iterable.kind != Value::Kind::List && iterable.kind != Value::Kind::Tuple)
            type_error("for-loop requires a list");
        // iterate over a snapshot so in-loop appends cannot extend the loop
        const ValueList items = *iterable.seq;
        for (const Value& item : items) {
            budget_.tick();
            bind_targets(st.targets, item);
            try {
                exec_block(st.body);
            } catch (const ContinueSignal&) {
            }
        }
    }

    void bind_targets(const std::vector<std::string>& targets, const Value& item) {
        if (targets.size() == 1) {
            env_[targets[0]] = item;
            return;
        }
        if ((item.kind != Value::Kind::Tuple && item.kind != Value::Kind::List) ||
            item.seq->size() != targets.size())
            type_error("cannot unpack loop item");
        for (std::size_t i = 0; i < targets.size(); ++i) env_[targets[i]] = (*item.seq)[i];
    }

    void exec_try(const Stmt& st) {
        try {
            exec_block(st.body);
        } catch (const ProgError& e) {
            const char* name = e.type == ProgError::Type::ValueError ? "ValueError"
                               : e.type == ProgError::Type::TypeError ? "TypeError"
                                                                      : "ZeroDivisionError";
            for (const auto& handler : st.exc_names) {
                if (handler == name) {
                    exec_block(st.orelse);
                    return;
                }
            }
            throw;
        }
    }

    // ----------------------------------------------------------- eval ----

    Value eval(const Expr& e) {
        budget_.tick();
        switch (e.kind) {
            case ExprKind::Num: return Value::number(e.num);
            case ExprKind::Str: return Value::string(e.str);
            case ExprKind::TrueLit: return Value::boolean(true);
            case ExprKind::FalseLit: return Value::boolean(false);
            case ExprKind::NoneLit: return Value::none();
            case ExprKind::Name: return lookup(e.str);
            case ExprKind::BoolAnd: {
                Value v;
                for (const auto& part : e.parts) {
                    v = eval(*part);
                    if (!truthy(v)) return v;
                }
                return v;
            }
            case ExprKind::BoolOr: {
                Value v;
                for (const auto& part : e.parts) {
                    v = eval(*part);
                    if (truthy(v)) return v;
                }
                return v;
            }
            case ExprKind::Not: return Value::boolean(!truthy(eval(*e.parts[0])));
            case ExprKind::Neg: {
                const Value v = eval(*e.parts[0]);
                return Value::number(-as_number(v, "unary minus"));
            }
            case ExprKind::BinOp: return eval_binop(e);
            case ExprKind::Compare: return eval_compare(e);
            case ExprKind::Call: return eval_call(e);
            case ExprKind::Attribute: return eval_attribute(e);
            case ExprKind::Subscript: return eval_subscript(e);
            case ExprKind::ListDisplay: {
                Value out = Value::list();
                for (const auto& part : e.parts) out.seq->push_back(eval(*part));
                return out;
            }
            case ExprKind::ListComp: return eval_comp(e);
        }
        fault("unhandled expression");
    }

    Value lookup(const std::string& name) {
        auto it = env_.find(name);
        if (it != env_.end()) return it->second;
        if (name == "THINKING_OPEN") return Value::string(std::string(kThinkingOpen));
        if (name == "THINKING_CLOSE") return Value::string(std::string(kThinkingClose));
        if (name == "SOLUTION_OPEN") return Value::string(std::string(kSolutionOpen));
        if (name == "SOLUTION_CLOSE") return Value::string(std::string(kSolutionClose));
        fault("unbound name '" + name + "'");
    }

    static Value module_value(int id) {
        Value v;
        v.kind = Value::Kind::Module;
        v.tag = id;
        return v;
    }

    bool truthy(const Value& v) const {
        switch (v.kind) {
            case Value::Kind::None: return false;
            case Value::Kind::Bool: return v.b;
            case Value::Kind::Num: return v.num != 0.0;
            case Value::Kind::Str: return !v.str->empty();
            case Value::Kind::List:
            case Value::Kind::Tuple: return !v.seq->empty();
            case Value::Kind::Dict: return !v.dict->empty();
            default: return true;
        }
    }

    double as_number(const Value& v, const std::string& where) const {
        if (v.kind == Value::Kind::Num) return v.num;
        if (v.kind == Value::Kind::Bool) return v.b ? 1.0 : 0.0;
        type_error(where + " requires a number, got " + kind_name(v.kind));
    }

    Value eval_binop(const Expr& e) {
        const Value a = eval(*e.parts[0]);
        const Value b = eval(*e.parts[1]);
        const char op = e.str[0];
        if (op == '+') {
            if (a.kind == Value::Kind::Str && b.kind == Value::Kind::Str) {
                budget_.tick(1 + (a.str->size() + b.str->size()) / 8);
                return Value::string(*a.str + *b.str);
            }
            if (a.kind == Value::Kind::List && b.kind == Value::Kind::List) {
                budget_.tick(1 + a.seq->size() + b.seq->size());
                ValueList out = *a.seq;
                out.insert(out.end(), b.seq->begin(), b.seq->end());
                return Value::list(std::move(out));
            }
            return Value::number(as_number(a, "'+'") + as_number(b, "'+'"));
        }
        const double x = as_number(a, "arithmetic");
        const double y = as_number(b, "arithmetic");
        switch (op) {
            case '-': return Value::number(x - y);
            case '*': return Value::number(x * y);
            case '/':
                if (y == 0.0) throw ProgError{ProgError::Type::ZeroDivisionError, "division by zero"};
                return Value::number(x / y);
        }
        fault("unknown operator");
    }

    bool values_equal(const Value& a, const Value& b) const {
        const bool a_numlike = a.kind == Value::Kind::Num || a.kind == Value::Kind::Bool;
        const bool b_numlike = b.kind == Value::Kind::Num || b.kind == Value::Kind::Bool;
        if (a_numlike && b_numlike) return as_number(a, "==") == as_number(b, "==");
        if (a.kind != b.kind) return false;
        switch (a.kind) {
            case Value::Kind::None: return true;
            case Value::Kind::Str: return *a.str == *b.str;
            case Value::Kind::List:
            case Value::Kind::Tuple: {
                if (a.seq->size() != b.seq->size()) return false;
                for (std::size_t i = 0; i < a.seq->size(); ++i)
                    if (!values_equal((*a.seq)[i], (*b.seq)[i])) return false;
                return true;
            }
            default: return false;
        }
    }

    Value eval_compare(const Expr& e) {
        const Value a = eval(*e.parts[0]);
        const Value b = eval(*e.parts[1]);
        switch (e.cmp) {
            case CmpOp::Eq: return Value::boolean(values_equal(a, b));
            case CmpOp::Ne: return Value::boolean(!values_equal(a, b));
            case CmpOp::In:
            case CmpOp::NotIn: {
                bool found = false;
                if (b.kind == Value::Kind::Str) {
                    if (a.kind != Value::Kind::Str) type_error("'in' on a string needs a string");
                    budget_.tick(1 + b.str->size() / 8);
                    found = b.str->find(*a.str) != std::string::npos;
                } else if (b.kind == Value::Kind::List || b.kind == Value::Kind::Tuple) {
                    budget_.tick(1 + b.seq->size());
                    for (const auto& item : *b.seq)
                        if (values_equal(a, item)) {
                            found = true;
                            break;
                        }
                } else {
                    type_error("'in' requires a string or list");
                }
                return Value::boolean(e.cmp == CmpOp::In ? found : !found);
            }
            default: {
                const double x = as_number(a, "comparison");
                const double y = as_number(b, "comparison");
                switch (e.cmp) {
                    case CmpOp::Lt: return Value::boolean(x < y);
                    case CmpOp::Le: return Value::boolean(x <= y);
                    case CmpOp::Gt: return Value::boolean(x > y);
                    case CmpOp::Ge: return Value::boolean(x >= y);
                    default: fault("unhandled comparison");
                }
            }
        }
    }

    Value eval_attribute(const Expr& e) {
        const Value base = eval(*e.target);
        if (base.kind == Value::Kind::Module && base.tag == kModuleRe) {
            if (e.str == "DOTALL") {
                Value v;
                v.kind = Value::Kind::Flag;
                v.tag = kFlagDotall;
                return v;
            }
            fault("re has no attribute '" + e.str + "'");
        }
        if (base.kind == Value::Kind::Module && base.tag == kModuleMath) {
            if (e.str == "pi") return Value::number(3.14159265358979323846);
            if (e.str == "e") return Value::number(2.71828182845904523536);
            fault("math has no attribute '" + e.str + "'");
        }
        fault("attribute access is only permitted on modules");
    }

    Value eval_subscript(const Expr& e) {
        const Value base = eval(*e.target);
        const Value idx = eval(*e.index);
        if (base.kind == Value::Kind::List || base.kind == Value::Kind::Tuple) {
            const auto n = static_cast<long long>(base.seq->size());
            long long i = static_cast<long long>(as_number(idx, "index"));
            if (i < 0) i += n;
            if (i < 0 || i >= n) fault("list index out of range");
            return (*base.seq)[static_cast<std::size_t>(i)];
        }
        if (base.kind == Value::Kind::Dict) {
            if (idx.kind != Value::Kind::Str) type_error("dict key must be a string");
            auto it = base.dict->find(*idx.str);
            if (it == base.dict->end()) fault("missing dict key '" + *idx.str + "'");
            return it->second;
        }
        if (base.kind == Value::Kind::Str) {
            const auto n = static_cast<long long>(base.str->size());
            long long i = static_cast<long long>(as_number(idx, "index"));
            if (i < 0) i += n;
            if (i < 0 || i >= n) fault("string index out of range");
            return Value::string(std::string(1, (*base.str)[static_cast<std::size_t>(i)]));
        }
        type_error("subscript requires a list, dict, or string");
    }

    Value eval_comp(const Expr& e) {
        const Value iterable = eval(*e.comp_iter);
        if (iterable.kind != Value::Kind::List && iterable.kind != Value::Kind::Tuple)
            type_error("comprehension requires a list");
        // comprehension variables shadow and are restored afterwards
        std::vector<std::pair<std::string, std::optional<Value>>> saved;
        for (const auto& var : e.comp_vars) {
            auto it = env_.find(var);
            saved.emplace_back(var, it == env_.end() ? std::nullopt : std::make_optional(it->second));
        }
        Value out = Value::list();
        const ValueList items = *iterable.seq;
        for (const Value& item : items) {
            budget_.tick();
            bind_targets(e.comp_vars, item);
            if (e.comp_cond && !truthy(eval(*e.comp_cond))) continue;
            out.seq->push_back(eval(*e.parts[0]));
        }
        for (auto& [var, old] : saved) {
            if (old)
                env_[var] = *old;
            else
                env_.erase(var);
        }
        return out;
    }

    // ----------------------------------------------------------- calls ----

    Value eval_call(const Expr& e) {
        const Expr& fn = *e.target;
        std::vector<Value> args;
        args.reserve(e.parts.size());
        for (const auto& a : e.parts) args.push_back(eval(*a));

        if (fn.kind == ExprKind::Name) return call_builtin(fn.str, args);
        if (fn.kind == ExprKind::Attribute) {
            // module functions need no evaluated receiver value
            if (fn.target->kind == ExprKind::Name) {
                auto it = env_.find(fn.target->str);
                if (it != env_.end() && it->second.kind == Value::Kind::Module) {
                    if (it->second.tag == kModuleRe) return call_re(fn.str, args);
                    return call_math(fn.str, args);
                }
            }
            const Value recv = eval(*fn.target);
            return call_method(recv, fn.str, args);
        }
        fault("only builtin and method calls are permitted");
    }

    void need_args(const std::string& name, const std::vector<Value>& args, std::size_t lo,
                   std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            fault(name + "() takes " + std::to_string(lo) +
                  (hi == lo ? "" : ".." + std::to_string(hi)) + " arguments");
    }

    Value call_builtin(const std::string& name, const std::vector<Value>& args) {
        if (name == "len") {
            need_args(name, args, 1, 1);
            const Value& v = args[0];
            if (v.kind == Value::Kind::Str) return Value::number(static_cast<double>(v.str->size()));
            if (v.kind == Value::Kind::List || v.kind == Value::Kind::Tuple)
                return Value::number(static_cast<double>(v.seq->size()));
            type_error("len() requires a string or list");
        }
        if (name == "float") {
            need_args(name, args, 1, 1);
            const Value& v = args[0];
            if (v.kind == Value::Kind::Num) return v;
            if (v.kind == Value::Kind::Bool) return Value::number(v.b ? 1.0 : 0.0);
            if (v.kind == Value::Kind::Str) {
                budget_.tick(1 + v.str->size() / 8);
                const auto parsed = parse_number(*v.str);
                if (!parsed) value_error("could not convert string to float: '" + *v.str + "'");
                return Value::number(*parsed);
            }
            if (v.kind == Value::Kind::None) type_error("float() argument must be a string or number");
            type_error("float() argument must be a string or number");
        }
        if (name == "str") {
            need_args(name, args, 1, 1);
            const Value& v = args[0];
            switch (v.kind) {
                case Value::Kind::Str: return v;
                case Value::Kind::Num: return Value::string(format_number(v.num));
                case Value::Kind::Bool: return Value::string(v.b ? "True" : "False");
                case Value::Kind::None: return Value::string("None");
                default: type_error("str() of unsupported value");
            }
        }
        if (name == "abs") {
            need_args(name, args, 1, 1);
            return Value::number(std::fabs(as_number(args[0], "abs()")));
        }
        if (name == "min" || name == "max") {
            need_args(name, args, 2, 8);
            double best = as_number(args[0], name);
            for (std::size_t i = 1; i < args.size(); ++i) {
                const double v = as_number(args[i], name);
                best = name == "min" ? std::min(best, v) : std::max(best, v);
            }
            return Value::number(best);
        }
        if (name == "zip") {
            need_args(name, args, 2, 2);
            for (const auto& a : args)
                if (a.kind != Value::Kind::List && a.kind != Value::Kind::Tuple)
                    type_error("zip() requires lists");
            const std::size_t n = std::min(args[0].seq->size(), args[1].seq->size());
            budget_.tick(1 + n);
            Value out = Value::list();
            out.seq->reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                out.seq->push_back(Value::tuple({(*args[0].seq)[i], (*args[1].seq)[i]}));
            return out;
        }
        fault("call to unsupported builtin '" + name + "'");
    }

    const rex::Regex& compiled_pattern(const std::string& pattern, bool dotall) {
        const std::string key = (dotall ? "s:" : "-:") + pattern;
        auto it = regex_cache_.find(key);
        if (it != regex_cache_.end()) return it->second;
        budget_.tick(1 + pattern.size());
        try {
            auto [pos, ok] = regex_cache_.emplace(key, rex::Regex::compile(pattern, dotall));
            return pos->second;
        } catch (const rex::CompileError& err) {
            fault(std::string("invalid regular expression: ") + err.what());
        }
    }

    bool dotall_flag(const std::vector<Value>& args, std::size_t idx) {
        if (args.size() <= idx) return false;
        if (args[idx].kind != Value::Kind::Flag) type_error("unsupported regex flag value");
        return (args[idx].tag & kFlagDotall) != 0;
    }

    Value call_re(const std::string& name, const std::vector<Value>& args) {
        if (name == "search" || name == "findall") {
            need_args("re." + name, args, 2, 3);
            if (args[0].kind != Value::Kind::Str || args[1].kind != Value::Kind::Str)
                type_error("re." + name + " requires string arguments");
            const rex::Regex& re = compiled_pattern(*args[0].str, dotall_flag(args, 2));
            if (name == "search") {
                const auto m = re.search(*args[1].str, &budget_);
                if (!m) return Value::none();
                Value v;
                v.kind = Value::Kind::Match;
                v.groups = std::make_shared<std::vector<std::optional<std::string>>>();
                for (std::size_t g = 0; g < m->group_count(); ++g) {
                    if (m->has_group(g))
                        v.groups->push_back(m->group(*args[1].str, g));
                    else
                        v.groups->push_back(std::nullopt);
                }
                return v;
            }
            Value out = Value::list();
            for (auto& s : re.findall(*args[1].str, &budget_))
                out.seq->push_back(Value::string(std::move(s)));
            return out;
        }
        if (name == "split") {
            need_args("re.split", args, 2, 2);
            if (args[0].kind != Value::Kind::Str || args[1].kind != Value::Kind::Str)
                type_error("re.split requires string arguments");
            const rex::Regex& re = compiled_pattern(*args[0].str, false);
            Value out = Value::list();
            for (auto& s : re.split(*args[1].str, &budget_))
                out.seq->push_back(Value::string(std::move(s)));
            return out;
        }
        fault("re has no function '" + name + "'");
    }

    Value call_math(const std::string& name, const std::vector<Value>& args) {
        if (name == "pow") {
            need_args("math.pow", args, 2, 2);
            return Value::number(
                std::pow(as_number(args[0], "math.pow"), as_number(args[1], "math.pow")));
        }
        need_args("math." + name, args, 1, 1);
        const double x = as_number(args[0], "math." + name);
        if (name == "floor") return Value::number(std::floor(x));
        if (name == "ceil") return Value::number(std::ceil(x));
        if (name == "fabs") return Value::number(std::fabs(x));
        if (name == "sqrt") {
            if (x < 0) value_error("math domain error");
            return Value::number(std::sqrt(x));
        }
        if (name == "log") {
            if (x <= 0) value_error("math domain error");
            return Value::number(std::log(x));
        }
        if (name == "exp") return Value::number(std::exp(x));
        fault("math has no function '" + name + "'");
    }

    Value call_method(const Value& recv, const std::string& name, const std::vector<Value>& args) {
        if (recv.kind == Value::Kind::Str) {
            const std::string& s = *recv.str;
            budget_.tick(1 + s.size() / 8);
            if (name == "strip") {
                need_args("strip", args, 0, 0);
                return Value::string(trim(s));
            }
            if (name == "lower") {
                need_args("lower", args, 0, 0);
                std::string out = s;
                for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                return Value::string(std::move(out));
            }
            if (name == "split") {
                need_args("split", args, 0, 1);
                Value out = Value::list();
                if (args.empty()) {
                    for (auto& part : split_whitespace(s)) out.seq->push_back(Value::string(part));
                } else {
                    if (args[0].kind != Value::Kind::Str) type_error("split() separator must be a string");
                    const std::string& sep = *args[0].str;
                    if (sep.empty()) value_error("empty separator");
                    std::size_t start = 0;
                    std::size_t pos;
                    while ((pos = s.find(sep, start)) != std::string::npos) {
                        out.seq->push_back(Value::string(s.substr(start, pos - start)));
                        start = pos + sep.size();
                        budget_.tick();
                    }
                    out.seq->push_back(Value::string(s.substr(start)));
                }
                return out;
            }
            if (name == "replace") {
                need_args("replace", args, 2, 2);
                if (args[0].kind != Value::Kind::Str || args[1].kind != Value::Kind::Str)
                    type_error("replace() requires string arguments");
                const std::string& from = *args[0].str;
                const std::string& to = *args[1].str;
                if (from.empty()) value_error("empty pattern in replace");
                std::string out;
                std::size_t start = 0;
                std::size_t pos;
                while ((pos = s.find(from, start)) != std::string::npos) {
                    out.append(s, start, pos - start);
                    out.append(to);
                    start = pos + from.size();
                    budget_.tick(1 + to.size() / 8);
                }
                out.append(s, start, std::string::npos);
                budget_.tick(1 + out.size() / 8);
                return Value::string(std::move(out));
            }
            fault("string has no method '" + name + "'");
        }
        if (recv.kind == Value::Kind::List) {
            if (name == "append") {
                need_args("append", args, 1, 1);
                recv.seq->push_back(args[0]);
                return Value::none();
            }
            fault("list has no method '" + name + "'");
        }
        if (recv.kind == Value::Kind::Match) {
            if (name == "group") {
                need_args("group", args, 0, 1);
                std::size_t idx = 0;
                if (!args.empty())
                    idx = static_cast<std::size_t>(as_number(args[0], "group()"));
                if (idx >= recv.groups->size()) fault("no such regex group");
                const auto& g = (*recv.groups)[idx];
                return g ? Value::string(*g) : Value::none();
            }
            fault("match has no method '" + name + "'");
        }
        if (recv.kind == Value::Kind::None) type_error("'None' has no methods");
        fault(std::string(kind_name(recv.kind)) + " has no method '" + name + "'");
    }

    const Program& program_;
    Budget& budget_;
    std::map<std::string, Value> env_;
    std::map<std::string, rex::Regex> regex_cache_;
};

}  // namespace

std::vector<double> run_reward(const CompiledReward& reward,
                               const std::vector<std::string>& prompts,
                               const std::vector<std::string>& completions,
                               const std::vector<std::string>& answers, Budget& budget) {
    Value prompts_v = Value::list();
    for (const auto& p : prompts) prompts_v.seq->push_back(Value::string(p));

    // chat-batch shape: each completion is a one-message list with a content
    // field, matching the generator contract reward programs are written to
    Value completions_v = Value::list();
    for (const auto& c : completions) {
        Value msg;
        msg.kind = Value::Kind::Dict;
        msg.dict = std::make_shared<std::map<std::string, Value>>();
        (*msg.dict)["role"] = Value::string("assistant");
        (*msg.dict)["content"] = Value::string(c);
        completions_v.seq->push_back(Value::list({msg}));
    }

    Value answers_v = Value::list();
    for (const auto& a : answers) answers_v.seq->push_back(Value::string(a));

    Interpreter interp(reward.program(), budget);
    const Value result = interp.call_function({prompts_v, completions_v, answers_v});

    if (result.kind != Value::Kind::List)
        throw InterpFault("reward returned " + std::string(kind_name(result.kind)) +
                          ", expected a list of floats");
    if (result.seq->size() != completions.size())
        throw InterpFault("reward returned " + std::to_string(result.seq->size()) +
                          " scores for " + std::to_string(completions.size()) + " completions");
    std::vector<double> scores;
    scores.reserve(result.seq->size());
    for (const auto& v : *result.seq) {
        if (v.kind != Value::Kind::Num || !std::isfinite(v.num))
            throw InterpFault("reward returned a non-finite or non-float score");
        scores.push_back(v.num);
    }
    return scores;
}

}  // namespace rfsearch::rlang
