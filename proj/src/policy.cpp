#include "rfsearch/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rfsearch/text.hpp"

namespace rfsearch {

namespace {

// Digit-free filler sentences with a spread of lengths; the assortment is
// what makes thinking length vary from task to task, so structural length
// rewards cannot be satisfied by one fixed slot configuration.
const char* kProse[] = {
    "Read the problem again.",                                  // 23
    "Note what quantity is asked for.",                         // 31
    "List the values given in the question.",                   // 38
    "Work through the operations in order.",                    // 37
    "Keep track of the running total.",                         // 32
    "Check the sign of each change.",                           // 30
    "The order of operations matters here.",                    // 37
    "Carry the intermediate result forward.",                   // 38
    "Combine the parts step by step.",                          // 31
    "State the result clearly.",                                // 25
    "Verify the arithmetic once more.",                         // 32
    "Units stay consistent throughout.",                        // 33
};

std::string calc_step_line(const Task& task, std::size_t step_index) {
    // Real derivation steps first, then small true filler identities.
    const std::size_t real_steps = task.operators.size();
    if (step_index < real_steps && task.operands.size() >= 2) {
        long long acc = task.operands[0];
        for (std::size_t i = 0; i < step_index; ++i) {
            switch (task.operators[i]) {
                case '+': acc += task.operands[i + 1]; break;
                case '-': acc -= task.operands[i + 1]; break;
                default: acc *= task.operands[i + 1]; break;
            }
        }
        long long next = acc;
        switch (task.operators[step_index]) {
            case '+': next = acc + task.operands[step_index + 1]; break;
            case '-': next = acc - task.operands[step_index + 1]; break;
            default: next = acc * task.operands[step_index + 1]; break;
        }
        return std::to_string(acc) + " " + std::string(1, task.operators[step_index]) + " " +
               std::to_string(task.operands[step_index + 1]) + " = " + std::to_string(next);
    }
    const long long base =
        task.operands.empty() ? 5 : task.operands[step_index % task.operands.size()];
    const long long inc = static_cast<long long>(step_index) + 2;
    return std::to_string(base) + " + " + std::to_string(inc) + " = " + std::to_string(base + inc);
}

std::string prose_line(const Task& task, std::size_t line_index) {
    const std::uint64_t h = derive_seed(hash_str(task.id), "prose", line_index);
    return kProse[h % std::size(kProse)];
}

std::string wrong_answer_text(double answer) {
    // Offset keeps the value strictly outside the +-20% ratio band for any
    // magnitude, so the tier stays separated from the within-20 tier.
    const double v = std::fabs(answer) < 65.0 ? answer + 13.0 : 1.3 * answer;
    return format_number(v);
}

}  // namespace

PolicyParams PolicyParams::zeros(const SlotSchema& schema) {
    PolicyParams p;
    for (const auto& slot : schema.slots) p.logits.emplace_back(slot.arity, 0.0);
    return p;
}

void PolicyParams::save_json(const std::string& path, const SlotSchema& schema) const {
    nlohmann::json j;
    for (std::size_t i = 0; i < schema.slots.size(); ++i) j[schema.slots[i].name] = logits[i];
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write params file: " + path);
    out << j.dump(2) << "\n";
}

PolicyParams PolicyParams::load_json(const std::string& path, const SlotSchema& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open params file: " + path);
    nlohmann::json j;
    in >> j;
    PolicyParams p;
    for (const auto& slot : schema.slots) {
        if (!j.contains(slot.name))
            throw std::runtime_error("params file missing slot '" + slot.name + "'");
        auto v = j[slot.name].get<std::vector<double>>();
        if (v.size() != slot.arity)
            throw std::runtime_error("params slot '" + slot.name + "' has wrong arity");
        p.logits.push_back(std::move(v));
    }
    return p;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> out(logits.size());
    double z = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - mx);
        z += out[i];
    }
    for (auto& v : out) v /= z;
    return out;
}

std::string render(const Task& task, const std::vector<int>& slot_choices) {
    const int k = slot_choices[kSlotLines];
    const auto density = static_cast<CalcDensity>(slot_choices[kSlotCalcDensity]);
    const auto tier = static_cast<AnswerTier>(slot_choices[kSlotAnswerTier]);
    const auto format = static_cast<Format>(slot_choices[kSlotFormat]);

    int n_calc = 0;
    if (density == CalcDensity::Half)
        n_calc = (k + 1) / 2;
    else if (density == CalcDensity::All)
        n_calc = k;

    std::vector<std::string> lines;
    for (int i = 0; i < k; ++i) {
        if (i >= k - n_calc)
            lines.push_back(calc_step_line(task, static_cast<std::size_t>(i - (k - n_calc))));
        else
            lines.push_back(prose_line(task, static_cast<std::size_t>(i)));
    }

    std::string out;
    out += kThinkingOpen;
    if (format == Format::DuplicatedTag) out += kThinkingOpen;
    out += "\n";
    for (const auto& l : lines) {
        out += l;
        out += "\n";
    }
    out += kThinkingClose;

    if (tier != AnswerTier::Missing) {
        std::string sol;
        switch (tier) {
            case AnswerTier::Exact: sol = task.answer_text; break;
            case AnswerTier::Within10: sol = format_number(1.05 * task.answer); break;
            case AnswerTier::Within20: sol = format_number(1.15 * task.answer); break;
            default: sol = wrong_answer_text(task.answer); break;
        }
        out += "\n";
        out += kSolutionOpen;
        out += sol;
        if (format != Format::MissingCloseTag) out += kSolutionClose;
    }
    return out;
}

Rollout sample_rollout(const PolicyParams& params, const Task& task, RngStream& rng) {
    Rollout r;
    r.task_id = task.id;
    for (const auto& logits : params.logits) {
        const auto probs = softmax(logits);
        const auto choice = rng.categorical(probs);
        r.slot_choices.push_back(static_cast<int>(choice));
        r.logprobs_old.push_back(std::log(probs[choice]));
    }
    r.text = render(task, r.slot_choices);
    return r;
}

LogprobGrad logprob_and_grad(const PolicyParams& params, const Rollout& rollout) {
    LogprobGrad out;
    for (std::size_t t = 0; t < params.logits.size(); ++t) {
        const auto probs = softmax(params.logits[t]);
        const int c = rollout.slot_choices[t];
        out.logprobs.push_back(std::log(probs[static_cast<std::size_t>(c)]));
        std::vector<double> g(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i)
            g[i] = (static_cast<int>(i) == c ? 1.0 : 0.0) - probs[i];
        out.per_slot.push_back(std::move(g));
    }
    return out;
}

double tier_probability(const PolicyParams& params, AnswerTier tier) {
    const auto probs = softmax(params.logits[kSlotAnswerTier]);
    return probs[static_cast<std::size_t>(tier)];
}

double joint_probability(const PolicyParams& params, const std::vector<int>& choices) {
    double p = 1.0;
    for (std::size_t t = 0; t < params.logits.size(); ++t)
        p *= softmax(params.logits[t])[static_cast<std::size_t>(choices[t])];
    return p;
}

std::vector<std::vector<int>> enumerate_choices(const SlotSchema& schema) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(schema.size(), 0);
    for (;;) {
        out.push_back(cur);
        std::size_t t = schema.size();
        while (t > 0) {
            --t;
            if (cur[t] + 1 < static_cast<int>(schema.slots[t].arity)) {
                ++cur[t];
                std::fill(cur.begin() + static_cast<std::ptrdiff_t>(t) + 1, cur.end(), 0);
                break;
            }
            if (t == 0) return out;
        }
    }
}

std::vector<std::string> sample_completions(const PolicyParams& params,
                                            const std::vector<Task>& tasks, std::uint64_t seed) {
    std::vector<std::string> out;
    out.reserve(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        RngStream rng(derive_seed(seed, "eval", i));
        out.push_back(sample_rollout(params, tasks[i], rng).text);
    }
    return out;
}

}  // namespace rfsearch
