#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfsearch/policy.hpp"
#include "rfsearch/rewards.hpp"
#include "rfsearch/tasks.hpp"

namespace rfsearch {

struct GrpoConfig {
    std::size_t group_size = 4;
    std::size_t steps = 500;
    // Peak learning rate for the slot policy. The reference setup's 5e-6
    // targets a billion-parameter network; this policy has ~16 parameters,
    // so the shipped default is rescaled to 1e-2.
    double lr = 1e-2;
    double clip_eps = 0.2;
    double kl_beta = 0.04;
    double warmup_ratio = 0.1;
    double weight_decay = 0.1;
    double max_grad_norm = 1.0;
    std::uint64_t seed = 3407;

    void validate() const;
};

struct TrainState {
    PolicyParams params;
    PolicyParams ref_params;  // frozen snapshot, never updated
    std::size_t step = 0;
    std::vector<std::vector<double>> m;  // first-moment accumulators
    std::vector<std::vector<double>> v;  // second-moment accumulators

    static TrainState init(const PolicyParams& start);
};

struct StepLog {
    std::size_t step = 0;
    double mean_reward = 0.0;
    double surrogate_value = 0.0;
    double mean_kl = 0.0;
    double clip_fraction = 0.0;
};

// Group-relative advantages: (r - mean) / (population std + 1e-4).
std::vector<double> compute_advantages(const std::vector<double>& rewards);

// Nonnegative per-token KL estimate: exp(d) - d - 1 with d = logp_ref - logp_cur.
double k3_kl(double logp_ref, double logp_cur);

// Learning rate at a step boundary: linear warmup from 0 over
// warmup_ratio*steps, then cosine decay to 0 at `steps`.
double lr_at(const GrpoConfig& cfg, double step);

struct SurrogateResult {
    double value = 0.0;
    std::vector<std::vector<double>> grad;  // same shape as the policy logits
    double mean_kl = 0.0;
    double clip_fraction = 0.0;
};

// Clipped surrogate with per-token KL, averaged 1/G and 1/|o|; the gradient is
// exact through min/clip (zero where the clipped branch is active).
SurrogateResult surrogate_objective(const TrainState& state, const std::vector<Rollout>& group,
                                    const std::vector<double>& rewards, const GrpoConfig& cfg);

struct NamedReward {
    std::string name;
    RewardFn fn;
};

// Raised when a bundle member faults mid-trial; carries the member's name.
struct RewardEvalError : std::runtime_error {
    RewardEvalError(std::string reward, const std::string& msg)
        : std::runtime_error("reward '" + reward + "' failed: " + msg),
          reward_name(std::move(reward)) {}
    std::string reward_name;
};

struct TrainResult {
    PolicyParams params;
    std::vector<StepLog> logs;
};

// One screening trial: `steps` optimization steps over the dataset with the
// element-wise sum of the bundle as the training signal. The bundle must
// include the three base rewards. Deterministic given cfg.seed.
TrainResult train_trial(const std::vector<NamedReward>& bundle, const GrpoConfig& cfg,
                        const Dataset& data);

}  // namespace rfsearch
