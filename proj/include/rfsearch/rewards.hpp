#pragma once

#include <functional>
#include <string>
#include <vector>

namespace rfsearch {

// Batch reward evaluator: one score per completion, aligned with the batch.
// Answers are canonical decimal strings.
using RewardFn = std::function<std::vector<double>(const std::vector<std::string>& completions,
                                                   const std::vector<std::string>& answers)>;

// The three always-on rewards that candidates may never redefine.
const std::vector<std::string>& protected_reward_names();
bool is_protected_reward_name(const std::string& name);

// --- base rewards ---
std::vector<double> match_format_exactly(const std::vector<std::string>& completions,
                                         const std::vector<std::string>& answers);
std::vector<double> match_format_approximately(const std::vector<std::string>& completions,
                                               const std::vector<std::string>& answers);
std::vector<double> check_answer(const std::vector<std::string>& completions,
                                 const std::vector<std::string>& answers);

// --- discovered rewards shipped as built-ins ---
std::vector<double> thinking_steps_count(const std::vector<std::string>& completions,
                                         const std::vector<std::string>& answers);
std::vector<double> thinking_has_calc(const std::vector<std::string>& completions,
                                      const std::vector<std::string>& answers);
std::vector<double> step_by_step_accuracy(const std::vector<std::string>& completions,
                                          const std::vector<std::string>& answers);

// --- known-catastrophic rewards, shipped for audits and controls ---
std::vector<double> efficiency_vs_accuracy(const std::vector<std::string>& completions,
                                           const std::vector<std::string>& answers);
std::vector<double> thinking_no_answer_leak(const std::vector<std::string>& completions,
                                            const std::vector<std::string>& answers);
std::vector<double> thinking_length_range(const std::vector<std::string>& completions,
                                          const std::vector<std::string>& answers);

struct RewardInfo {
    std::string name;
    std::string description;
    RewardFn fn;
    bool is_base = false;
};

// Name-addressable registry of every built-in evaluator above.
const std::vector<RewardInfo>& reward_registry();
const RewardInfo* find_reward(const std::string& name);

// The three base rewards in declaration order.
std::vector<RewardInfo> base_rewards();

// Element-wise sum of a set of evaluators.
RewardFn sum_rewards(std::vector<RewardFn> members);

}  // namespace rfsearch
