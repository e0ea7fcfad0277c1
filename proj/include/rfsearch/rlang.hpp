#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rfsearch/guard.hpp"

// Restricted reward-program language: a small Python subset just large enough
// to express the shipped reward sources verbatim. Programs are validated in
// four stages (imports/names, grammar and structure, resource wrapping, probe
// call) and then interpreted under a step budget and wall clock.
namespace rfsearch::rlang {

struct SandboxLimits {
    std::size_t max_ast_nodes = 2000;
    std::uint64_t max_interp_steps_per_call = 200000;
    std::chrono::milliseconds wall_timeout_per_call{2000};
};

struct RejectInfo {
    int stage = 0;  // 1..4
    std::string reason;
};

struct RewardProgram {
    enum class Status { Unvalidated, Valid, Rejected };

    std::string name;
    std::string source;
    std::string description;
    int round = 0;
    Status status = Status::Unvalidated;
    std::optional<RejectInfo> reject;
};

// Non-resource runtime failure of a sandboxed program (bad shape, fault on
// input, uncatchable builtin misuse). Aborts the invocation, never the host.
struct InterpFault : std::runtime_error {
    explicit InterpFault(std::string msg) : std::runtime_error(std::move(msg)) {}
};

class CompiledReward;  // parsed, whitelisted function (stage 2 output)

// Stage 1: imports restricted to {re, math}; every free name must be in the
// permitted builtin set.
std::optional<RejectInfo> stage1_check_modules(const RewardProgram& program);

// Stage 2: parse to the whitelisted grammar, enforce the reward signature and
// the protected-name rule. Returns the compiled function or a rejection.
struct Stage2Result {
    std::shared_ptr<const CompiledReward> compiled;
    std::optional<RejectInfo> reject;
};
Stage2Result stage2_build_locked(const RewardProgram& program, const SandboxLimits& limits);

// Stage 3 output: a callable whose every invocation is step-counted and
// wall-clocked. Faults surface as ResourceFault/InterpFault, never crashes.
class GuardedReward {
public:
    GuardedReward(std::shared_ptr<const CompiledReward> compiled, SandboxLimits limits);

    std::vector<double> invoke(const std::vector<std::string>& prompts,
                               const std::vector<std::string>& completions,
                               const std::vector<std::string>& answers) const;

    const std::string& name() const;

private:
    std::shared_ptr<const CompiledReward> compiled_;
    SandboxLimits limits_;
};

GuardedReward stage3_wrap_limits(std::shared_ptr<const CompiledReward> compiled,
                                 const SandboxLimits& limits);

// Stage 4: dry-run on a fixed 3-element batch (canonical, malformed, empty);
// passes iff the result is a list of exactly 3 finite reals.
std::optional<RejectInfo> stage4_probe(const GuardedReward& guarded);

struct ValidationOutcome {
    RewardProgram program;  // with final status
    std::shared_ptr<const CompiledReward> compiled;  // set iff valid
};

// Runs stages 1-4 in order, stopping at the first rejection.
ValidationOutcome validate(RewardProgram program, const SandboxLimits& limits);

// Evaluates a validated program. Deterministic in its arguments; throws
// ResourceFault or InterpFault on guarded failure.
std::vector<double> interpret(const CompiledReward& program,
                              const std::vector<std::string>& prompts,
                              const std::vector<std::string>& completions,
                              const std::vector<std::string>& answers,
                              const SandboxLimits& limits);

const std::string& compiled_name(const CompiledReward& program);

}  // namespace rfsearch::rlang
