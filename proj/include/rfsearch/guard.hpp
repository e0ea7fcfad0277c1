#pragma once

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rfsearch {

// Raised when a guarded evaluation exhausts its step budget or wall clock.
// Deliberately not derived from the interpreter's catchable error types:
// sandboxed programs can never swallow a resource fault.
struct ResourceFault : std::runtime_error {
    enum class Kind { StepLimit, Timeout };

    ResourceFault(Kind k, std::string msg) : std::runtime_error(std::move(msg)), kind(k) {}
    Kind kind;
};

// Cooperative fuel/deadline guard shared by the interpreter and the regex
// engine. The wall clock is polled every 256 steps, which keeps a stuck
// evaluation's overshoot far below the 2x-timeout contract.
class Budget {
public:
    Budget(std::uint64_t max_steps, std::chrono::milliseconds timeout)
        : max_steps_(max_steps),
          deadline_(std::chrono::steady_clock::now() + timeout) {}

    void tick(std::uint64_t n = 1) {
        steps_ += n;
        if (steps_ > max_steps_)
            throw ResourceFault(ResourceFault::Kind::StepLimit,
                                "step limit exceeded (" + std::to_string(max_steps_) + ")");
        if ((++poll_ & 0xFF) == 0 && std::chrono::steady_clock::now() > deadline_)
            throw ResourceFault(ResourceFault::Kind::Timeout, "wall-clock timeout exceeded");
    }

    std::uint64_t steps_used() const { return steps_; }

private:
    std::uint64_t steps_ = 0;
    std::uint64_t poll_ = 0;
    std::uint64_t max_steps_;
    std::chrono::steady_clock::time_point deadline_;
};

}  // namespace rfsearch
