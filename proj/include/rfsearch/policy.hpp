#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rfsearch/rng.hpp"
#include "rfsearch/tasks.hpp"

namespace rfsearch {

// Slot indices and option meanings for the default schema. The policy factors
// over four independent decisions that deterministically render to tagged
// completion text; the slots play the role of tokens in the per-token sums of
// the surrogate objective.
inline constexpr std::size_t kSlotLines = 0;        // 0..4 thinking lines
inline constexpr std::size_t kSlotCalcDensity = 1;  // none, half, all
inline constexpr std::size_t kSlotAnswerTier = 2;   // exact, within10, within20, wrong, missing
inline constexpr std::size_t kSlotFormat = 3;       // canonical, missing_close_tag, duplicated_tag

enum class AnswerTier : int { Exact = 0, Within10 = 1, Within20 = 2, Wrong = 3, Missing = 4 };
enum class CalcDensity : int { None = 0, Half = 1, All = 2 };
enum class Format : int { Canonical = 0, MissingCloseTag = 1, DuplicatedTag = 2 };

struct SlotSchema {
    struct Slot {
        std::string name;
        std::size_t arity;
    };
    std::vector<Slot> slots;

    static SlotSchema standard() {
        return SlotSchema{{{"lines", 5}, {"calc_density", 3}, {"answer_tier", 5}, {"format", 3}}};
    }
    std::size_t size() const { return slots.size(); }
};

// Trainable state: one logit vector per slot.
struct PolicyParams {
    std::vector<std::vector<double>> logits;

    static PolicyParams zeros(const SlotSchema& schema);
    void save_json(const std::string& path, const SlotSchema& schema) const;
    static PolicyParams load_json(const std::string& path, const SlotSchema& schema);
};

struct Rollout {
    std::string task_id;
    std::vector<int> slot_choices;
    std::vector<double> logprobs_old;  // per slot, at sampling-time parameters
    std::string text;
};

std::vector<double> softmax(const std::vector<double>& logits);

// Deterministic rendering of a slot configuration for a task.
std::string render(const Task& task, const std::vector<int>& slot_choices);

Rollout sample_rollout(const PolicyParams& params, const Task& task, RngStream& rng);

struct LogprobGrad {
    std::vector<double> logprobs;                // per slot
    std::vector<std::vector<double>> per_slot;   // d logprob_t / d logits_t (one-hot minus softmax)
};

LogprobGrad logprob_and_grad(const PolicyParams& params, const Rollout& rollout);

// Probability that the answer_tier slot picks `tier` under `params`.
double tier_probability(const PolicyParams& params, AnswerTier tier);

// Joint probability of a full slot configuration.
double joint_probability(const PolicyParams& params, const std::vector<int>& choices);

// All joint slot configurations of the schema, in lexicographic order.
std::vector<std::vector<int>> enumerate_choices(const SlotSchema& schema);

// One sampled completion per task, rendered from `params`; the stream for
// task i is derived from (seed, i) so results are order-independent.
std::vector<std::string> sample_completions(const PolicyParams& params,
                                            const std::vector<Task>& tasks, std::uint64_t seed);

}  // namespace rfsearch
