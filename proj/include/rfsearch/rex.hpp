#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfsearch/guard.hpp"

// Small backtracking regex engine. Exists because sandboxed reward programs
// run user-supplied patterns: matching must be abortable mid-flight by a step
// budget and wall clock, which std::regex cannot do. Dialect: literals, '.',
// character classes, greedy/lazy quantifiers (* + ? {m,n}), alternation,
// capturing and non-capturing groups, '^'/'$', common escapes. Backreferences
// and lookaround are rejected at compile time. Bytes are matched as-is.
namespace rfsearch::rex {

struct CompileError : std::runtime_error {
    CompileError(std::string msg, std::size_t at)
        : std::runtime_error(std::move(msg)), pos(at) {}
    std::size_t pos;
};

struct MatchResult {
    // Byte offsets into the searched text; one pair per group, slot 0 is the
    // whole match. -1 marks a group that did not participate.
    std::vector<std::ptrdiff_t> begins;
    std::vector<std::ptrdiff_t> ends;

    std::size_t group_count() const { return begins.size(); }
    bool has_group(std::size_t i) const {
        return i < begins.size() && begins[i] >= 0 && ends[i] >= 0;
    }
    std::string group(std::string_view text, std::size_t i) const {
        return std::string(text.substr(static_cast<std::size_t>(begins[i]),
                                       static_cast<std::size_t>(ends[i] - begins[i])));
    }
};

class Regex {
public:
    static Regex compile(std::string_view pattern, bool dotall = false);

    // Leftmost match at or after `from`. A null budget uses a generous
    // internal cap so trusted fixed patterns never need plumbing.
    std::optional<MatchResult> search(std::string_view text, Budget* budget = nullptr,
                                      std::size_t from = 0) const;

    // Non-overlapping whole-match strings; empty matches advance by one byte.
    std::vector<std::string> findall(std::string_view text, Budget* budget = nullptr) const;

    // Segments between non-empty separator matches (empty matches ignored).
    std::vector<std::string> split(std::string_view text, Budget* budget = nullptr) const;

    std::size_t group_count() const { return n_groups_; }

private:
    enum class Op : std::uint8_t { Char, Class, Any, AnyNl, Match, Jmp, Split, Save, Bol, Eol };

    struct Inst {
        Op op;
        unsigned char ch = 0;
        int a = 0;  // jmp/split target, class index, or save slot
        int b = 0;  // split alternative
    };

    struct CharClass {
        bool negated = false;
        std::vector<std::pair<unsigned char, unsigned char>> ranges;
        bool contains(unsigned char c) const {
            for (auto [lo, hi] : ranges)
                if (c >= lo && c <= hi) return true;
            return false;
        }
        bool matches(unsigned char c) const { return contains(c) != negated; }
    };

    friend class Compiler;

    bool run_at(std::string_view text, std::size_t start, Budget& budget,
                MatchResult& out) const;

    std::vector<Inst> prog_;
    std::vector<CharClass> classes_;
    std::size_t n_groups_ = 1;
};

}  // namespace rfsearch::rex
