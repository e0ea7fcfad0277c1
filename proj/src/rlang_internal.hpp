#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rfsearch/rlang.hpp"

namespace rfsearch::rlang {

// ---------------------------------------------------------------- lexer ---

enum class Tok : std::uint8_t {
    Name,
    Keyword,
    Number,
    String,
    Op,
    Newline,
    Indent,
    Dedent,
    End,
};

struct Token {
    Tok type;
    std::string text;  // names, keywords, operators; decoded value for strings
    double number = 0.0;
    int line = 1;
    int col = 1;
};

struct LexError {
    std::string message;
    int line;
    int col;
};

// Produces a logical-line token stream with INDENT/DEDENT and implicit line
// joining inside brackets. Returns LexError on malformed input.
std::variant<std::vector<Token>, LexError> tokenize(const std::string& source);

bool is_python_keyword(const std::string& s);

// ----------------------------------------------------------------- AST ----

struct Expr;
struct Stmt;
using ExprPtr = std::unique_ptr<Expr>;
using StmtPtr = std::unique_ptr<Stmt>;

enum class ExprKind {
    Num,
    Str,
    TrueLit,
    FalseLit,
    NoneLit,
    Name,
    BoolAnd,
    BoolOr,
    Not,
    Neg,
    BinOp,    // + - * /
    Compare,  // == != < <= > >= in notin
    Call,
    Attribute,
    Subscript,
    ListDisplay,
    ListComp,
};

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge, In, NotIn };

struct Expr {
    ExprKind kind;
    int line = 0;
    int col = 0;
    double num = 0.0;
    std::string str;  // Name id, Str value, Attribute attr, BinOp op char
    CmpOp cmp = CmpOp::Eq;
    std::vector<ExprPtr> parts;            // operands / call args / list elements
    ExprPtr target;                        // call func, attribute value, subscript value
    ExprPtr index;                         // subscript index
    std::vector<std::string> comp_vars;    // list-comp loop targets
    ExprPtr comp_iter;                     // list-comp source
    ExprPtr comp_cond;                     // optional filter
};

enum class StmtKind { FuncDef, Import, Assign, ExprStmt, For, If, Try, Return, Continue };

struct Stmt {
    StmtKind kind;
    int line = 0;
    int col = 0;
    std::string name;                    // function name / import module / assign target
    std::vector<std::string> params;     // FuncDef positional params
    std::string kwargs_name;             // FuncDef **tail name, empty if absent
    std::vector<std::string> targets;    // For loop targets
    std::vector<std::string> exc_names;  // Try except names
    ExprPtr value;                       // assign RHS, return value, expr stmt, if cond, for iter
    std::vector<StmtPtr> body;
    std::vector<StmtPtr> orelse;         // If else; Try handler body
};

struct Program {
    StmtPtr func;           // the single top-level function definition
    std::size_t node_count = 0;
};

struct ParseError {
    std::string message;
    int line;
    int col;
};

std::variant<Program, ParseError> parse_program(const std::vector<Token>& tokens,
                                                std::size_t max_nodes);

// --------------------------------------------------------------- values ---

struct Value;
using ValueList = std::vector<Value>;

struct Value {
    enum class Kind { None, Bool, Num, Str, List, Tuple, Dict, Match, Module, Flag };

    Kind kind = Kind::None;
    bool b = false;
    double num = 0.0;
    int tag = 0;  // module id / flag bits
    std::shared_ptr<std::string> str;
    std::shared_ptr<ValueList> seq;  // List and Tuple storage
    std::shared_ptr<std::map<std::string, Value>> dict;
    std::shared_ptr<std::vector<std::optional<std::string>>> groups;

    static Value none() { return {}; }
    static Value boolean(bool v) {
        Value x;
        x.kind = Kind::Bool;
        x.b = v;
        return x;
    }
    static Value number(double v) {
        Value x;
        x.kind = Kind::Num;
        x.num = v;
        return x;
    }
    static Value string(std::string s) {
        Value x;
        x.kind = Kind::Str;
        x.str = std::make_shared<std::string>(std::move(s));
        return x;
    }
    static Value list(ValueList items = {}) {
        Value x;
        x.kind = Kind::List;
        x.seq = std::make_shared<ValueList>(std::move(items));
        return x;
    }
    static Value tuple(ValueList items) {
        Value x;
        x.kind = Kind::Tuple;
        x.seq = std::make_shared<ValueList>(std::move(items));
        return x;
    }
};

// Catchable program-level error (the except-clause set).
struct ProgError {
    enum class Type { ValueError, TypeError, ZeroDivisionError };
    Type type;
    std::string message;
};

// The stage-2 artifact: validated AST plus interned metadata.
class CompiledReward {
public:
    CompiledReward(std::string name, std::shared_ptr<const Program> program)
        : name_(std::move(name)), program_(std::move(program)) {}

    const std::string& name() const { return name_; }
    const Program& program() const { return *program_; }

private:
    std::string name_;
    std::shared_ptr<const Program> program_;
};

// Runs the compiled function body against host-provided batches.
std::vector<double> run_reward(const CompiledReward& reward,
                               const std::vector<std::string>& prompts,
                               const std::vector<std::string>& completions,
                               const std::vector<std::string>& answers, Budget& budget);

}  // namespace rfsearch::rlang
