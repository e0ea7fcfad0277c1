#include "rfsearch/grpo.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace rfsearch {

namespace {
constexpr double kAdvantageDelta = 1e-4;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kPi = 3.14159265358979323846;
}  // namespace

void GrpoConfig::validate() const {
    if (group_size < 2) throw std::invalid_argument("group_size must be >= 2");
    if (clip_eps <= 0.0 || clip_eps >= 1.0) throw std::invalid_argument("clip_eps must be in (0,1)");
    if (kl_beta < 0.0) throw std::invalid_argument("kl_beta must be >= 0");
    if (warmup_ratio < 0.0 || warmup_ratio >= 1.0)
        throw std::invalid_argument("warmup_ratio must be in [0,1)");
}

TrainState TrainState::init(const PolicyParams& start) {
    TrainState st;
    st.params = start;
    st.ref_params = start;
    st.step = 0;
    for (const auto& slot : start.logits) {
        st.m.emplace_back(slot.size(), 0.0);
        st.v.emplace_back(slot.size(), 0.0);
    }
    return st;
}

std::vector<double> compute_advantages(const std::vector<double>& rewards) {
    const auto n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= n;  // population variance
    const double denom = std::sqrt(var) + kAdvantageDelta;
    std::vector<double> out;
    out.reserve(rewards.size());
    for (double r : rewards) out.push_back((r - mean) / denom);
    return out;
}

double k3_kl(double logp_ref, double logp_cur) {
    const double d = logp_ref - logp_cur;
    return std::exp(d) - d - 1.0;
}

double lr_at(const GrpoConfig& cfg, double step) {
    const double total = static_cast<double>(cfg.steps);
    const double warmup = cfg.warmup_ratio * total;
    if (warmup > 0.0 && step < warmup) return cfg.lr * (step / warmup);
    if (step >= total) return 0.0;
    const double span = total - warmup;
    if (span <= 0.0) return 0.0;
    const double t = (step - warmup) / span;
    return cfg.lr * 0.5 * (1.0 + std::cos(kPi * t));
}

SurrogateResult surrogate_objective(const TrainState& state, const std::vector<Rollout>& group,
                                    const std::vector<double>& rewards, const GrpoConfig& cfg) {
    if (group.size() != rewards.size())
        throw std::invalid_argument("rewards must align with the rollout group");
    const auto advantages = compute_advantages(rewards);
    const double G = static_cast<double>(group.size());

    SurrogateResult out;
    for (const auto& slot : state.params.logits) out.grad.emplace_back(slot.size(), 0.0);

    std::size_t token_count = 0;
    std::size_t clipped = 0;
    for (std::size_t i = 0; i < group.size(); ++i) {
        const Rollout& ro = group[i];
        const double adv = advantages[i];
        const auto cur = logprob_and_grad(state.params, ro);
        const auto ref = logprob_and_grad(state.ref_params, ro);
        const auto tokens = static_cast<double>(cur.logprobs.size());

        for (std::size_t t = 0; t < cur.logprobs.size(); ++t) {
            const double rho = std::exp(cur.logprobs[t] - ro.logprobs_old[t]);
            const double clipped_rho =
                std::min(std::max(rho, 1.0 - cfg.clip_eps), 1.0 + cfg.clip_eps);
            const double unclipped_term = rho * adv;
            const double clipped_term = clipped_rho * adv;
            const double d = ref.logprobs[t] - cur.logprobs[t];
            const double kl = std::exp(d) - d - 1.0;

            const double scale = 1.0 / (G * tokens);
            out.value += scale * (std::min(unclipped_term, clipped_term) - cfg.kl_beta * kl);
            out.mean_kl += kl;
            ++token_count;
            if ((adv > 0.0 && rho > 1.0 + cfg.clip_eps) || (adv < 0.0 && rho < 1.0 - cfg.clip_eps))
                ++clipped;

            // d(min)/d(logits): the clipped-and-constant branch contributes 0
            double coef = 0.0;
            if (unclipped_term <= clipped_term) coef += adv * rho;
            coef += cfg.kl_beta * (std::exp(d) - 1.0);  // d(-beta*k3)/d(logp_cur)
            for (std::size_t k = 0; k < out.grad[t].size(); ++k)
                out.grad[t][k] += scale * coef * cur.per_slot[t][k];
        }
    }
    if (token_count > 0) {
        out.mean_kl /= static_cast<double>(token_count);
        out.clip_fraction = static_cast<double>(clipped) / static_cast<double>(token_count);
    }
    return out;
}

namespace {

void adamw_ascend(TrainState& state, const std::vector<std::vector<double>>& grad,
                  const GrpoConfig& cfg, double lr) {
    // global gradient-norm clipping
    double norm_sq = 0.0;
    for (const auto& slot : grad)
        for (double g : slot) norm_sq += g * g;
    const double norm = std::sqrt(norm_sq);
    const double clip_scale = norm > cfg.max_grad_norm ? cfg.max_grad_norm / norm : 1.0;

    state.step += 1;
    const auto t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(kAdamBeta1, t);
    const double bc2 = 1.0 - std::pow(kAdamBeta2, t);
    for (std::size_t s = 0; s < grad.size(); ++s) {
        for (std::size_t k = 0; k < grad[s].size(); ++k) {
            const double g = grad[s][k] * clip_scale;
            state.m[s][k] = kAdamBeta1 * state.m[s][k] + (1.0 - kAdamBeta1) * g;
            state.v[s][k] = kAdamBeta2 * state.v[s][k] + (1.0 - kAdamBeta2) * g * g;
            const double mhat = state.m[s][k] / bc1;
            const double vhat = state.v[s][k] / bc2;
            // ascent step plus decoupled weight decay toward zero logits
            state.params.logits[s][k] += lr * mhat / (std::sqrt(vhat) + kAdamEps);
            state.params.logits[s][k] -= lr * cfg.weight_decay * state.params.logits[s][k];
        }
    }
}

}  // namespace

TrainResult train_trial(const std::vector<NamedReward>& bundle, const GrpoConfig& cfg,
                        const Dataset& data) {
    cfg.validate();
    if (data.tasks.empty()) throw std::invalid_argument("training dataset is empty");
    std::set<std::string> names;
    for (const auto& member : bundle) names.insert(member.name);
    for (const auto& required : protected_reward_names())
        if (!names.count(required))
            throw std::invalid_argument("bundle must include base reward '" + required + "'");

    const SlotSchema schema = SlotSchema::standard();
    TrainState state = TrainState::init(PolicyParams::zeros(schema));

    RngStream task_rng(derive_seed(cfg.seed, "trial/tasks"));
    RngStream rollout_rng(derive_seed(cfg.seed, "trial/rollouts"));

    TrainResult result;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const Task& task = data.tasks[task_rng.uniform_int(data.tasks.size())];

        std::vector<Rollout> group;
        std::vector<std::string> completions;
        for (std::size_t g = 0; g < cfg.group_size; ++g) {
            group.push_back(sample_rollout(state.params, task, rollout_rng));
            completions.push_back(group.back().text);
        }
        const std::vector<std::string> answers(cfg.group_size, task.answer_text);

        std::vector<double> rewards(cfg.group_size, 0.0);
        for (const auto& member : bundle) {
            std::vector<double> part;
            try {
                part = member.fn(completions, answers);
            } catch (const std::exception& e) {
                throw RewardEvalError(member.name, e.what());
            }
            if (part.size() != rewards.size()) throw RewardEvalError(member.name, "wrong batch length");
            for (std::size_t g = 0; g < rewards.size(); ++g) rewards[g] += part[g];
        }

        const auto surrogate = surrogate_objective(state, group, rewards, cfg);

        StepLog log;
        log.step = step;
        for (double r : rewards) log.mean_reward += r;
        log.mean_reward /= static_cast<double>(rewards.size());
        log.surrogate_value = surrogate.value;
        log.mean_kl = surrogate.mean_kl;
        log.clip_fraction = surrogate.clip_fraction;
        result.logs.push_back(log);

        adamw_ascend(state, surrogate.grad, cfg, lr_at(cfg, static_cast<double>(step)));
    }
    result.params = std::move(state.params);
    return result;
}

}  // namespace rfsearch
