#include "rfsearch/rewards.hpp"

#include <cmath>
#include <stdexcept>

#include "rfsearch/rex.hpp"
#include "rfsearch/text.hpp"

namespace rfsearch {

namespace {

const rex::Regex& exact_format_re() {
    static const rex::Regex re = rex::Regex::compile(
        "<thinking>.*?</thinking>.*?<solution>.*?</solution>", /*dotall=*/true);
    return re;
}

const rex::Regex& thinking_re() {
    static const rex::Regex re =
        rex::Regex::compile("<thinking>(.*?)</thinking>", /*dotall=*/true);
    return re;
}

const rex::Regex& solution_re() {
    static const rex::Regex re =
        rex::Regex::compile("<solution>(.*?)</solution>", /*dotall=*/true);
    return re;
}

const rex::Regex& calc_presence_re() {
    static const rex::Regex re = rex::Regex::compile("[0-9]+\\s*[+\\-*/]");
    return re;
}

const rex::Regex& calc_step_re() {
    static const rex::Regex re =
        rex::Regex::compile("(\\d+(\\.\\d+)?)\\s*([+*\\-/])\\s*(\\d+(\\.\\d+)?)");
    return re;
}

std::optional<std::string> thinking_block(const std::string& text) {
    const auto m = thinking_re().search(text);
    if (!m) return std::nullopt;
    return m->group(text, 1);
}

std::optional<std::string> solution_text(const std::string& text) {
    const auto m = solution_re().search(text);
    if (!m) return std::nullopt;
    return m->group(text, 1);
}

bool numeric_correct(const std::string& completion, const std::string& answer) {
    const auto sol = solution_text(completion);
    if (!sol) return false;
    const auto pred = parse_number(strip_commas(trim(*sol)));
    const auto truth = parse_number(strip_commas(answer));
    if (!pred || !truth) return false;
    return std::fabs(*pred - *truth) < 1e-6;
}

void check_aligned(const std::vector<std::string>& completions,
                   const std::vector<std::string>& answers) {
    if (completions.size() != answers.size())
        throw std::invalid_argument("completions and answers must be aligned");
}

}  // namespace

const std::vector<std::string>& protected_reward_names() {
    static const std::vector<std::string> names = {
        "match_format_exactly",
        "match_format_approximately",
        "check_answer",
    };
    return names;
}

bool is_protected_reward_name(const std::string& name) {
    for (const auto& n : protected_reward_names())
        if (n == name) return true;
    return false;
}

std::vector<double> match_format_exactly(const std::vector<std::string>& completions,
                                         const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (const auto& c : completions)
        scores.push_back(exact_format_re().search(c) ? 3.0 : 0.0);
    return scores;
}

std::vector<double> match_format_approximately(const std::vector<std::string>& completions,
                                               const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    const std::string_view tags[] = {kThinkingOpen, kThinkingClose, kSolutionOpen, kSolutionClose};
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (const auto& c : completions) {
        double s = 0.0;
        for (const auto tag : tags) s += count_occurrences(c, tag) == 1 ? 0.5 : -1.0;
        scores.push_back(s);
    }
    return scores;
}

std::vector<double> check_answer(const std::vector<std::string>& completions,
                                 const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (std::size_t i = 0; i < completions.size(); ++i) {
        const auto sol = solution_text(completions[i]);
        if (!sol) {
            scores.push_back(-2.5);
            continue;
        }
        const std::string& canonical = answers[i];
        const std::string trimmed = trim(*sol);
        if (trimmed == trim(canonical)) {
            scores.push_back(3.0);
            continue;
        }
        if (strip_all_whitespace(*sol) == strip_all_whitespace(canonical)) {
            scores.push_back(1.5);
            continue;
        }
        const auto pred = parse_number(strip_commas(trimmed));
        if (!pred) {
            scores.push_back(-2.5);
            continue;
        }
        const auto truth = parse_number(strip_commas(canonical));
        if (!truth || std::fabs(*truth) < 1e-9) {
            // ratio tiers are undefined at zero truth: exact-match-or-wrong
            scores.push_back(-1.5);
            continue;
        }
        const double ratio = std::fabs(*pred / *truth - 1.0);
        if (ratio <= 0.10)
            scores.push_back(0.9);
        else if (ratio <= 0.20)
            scores.push_back(0.5);
        else
            scores.push_back(-1.5);
    }
    return scores;
}

std::vector<double> thinking_steps_count(const std::vector<std::string>& completions,
                                         const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (const auto& c : completions) {
        const auto block = thinking_block(c);
        if (!block) {
            scores.push_back(-1.0);
            continue;
        }
        const std::size_t steps = nonempty_lines(trim(*block)).size();
        if (steps >= 3)
            scores.push_back(3.0);
        else if (steps == 2)
            scores.push_back(2.0);
        else if (steps == 1)
            scores.push_back(1.0);
        else
            scores.push_back(-1.0);
    }
    return scores;
}

std::vector<double> thinking_has_calc(const std::vector<std::string>& completions,
                                      const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (const auto& c : completions) {
        const auto block = thinking_block(c);
        if (!block) {
            scores.push_back(-1.0);
            continue;
        }
        scores.push_back(calc_presence_re().search(*block) ? 2.0 : 0.0);
    }
    return scores;
}

std::vector<double> step_by_step_accuracy(const std::vector<std::string>& completions,
                                          const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (std::size_t i = 0; i < completions.size(); ++i) {
        const auto block = thinking_block(completions[i]);
        const auto sol = solution_text(completions[i]);
        if (!block || !sol) {
            scores.push_back(-1.0);
            continue;
        }
        const std::size_t steps = calc_step_re().findall(trim(*block)).size();
        bool correct = false;
        const auto pred = parse_number(strip_commas(trim(*sol)));
        const auto truth = parse_number(strip_commas(answers[i]));
        if (pred && truth) correct = std::fabs(*pred - *truth) < 1e-6;
        if (correct && steps >= 2)
            scores.push_back(4.0);
        else if (correct && steps >= 1)
            scores.push_back(3.0);
        else if (correct)
            scores.push_back(2.0);
        else if (steps >= 2)
            scores.push_back(0.0);
        else
            scores.push_back(-1.0);
    }
    return scores;
}

std::vector<double> efficiency_vs_accuracy(const std::vector<std::string>& completions,
                                           const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (std::size_t i = 0; i < completions.size(); ++i) {
        const bool correct = numeric_correct(completions[i], answers[i]);
        if (!correct) {
            scores.push_back(0.0);
            continue;
        }
        const auto block = thinking_block(completions[i]);
        const std::size_t words = block ? split_whitespace(*block).size() : 0;
        if (words <= 30)
            scores.push_back(5.0);
        else if (words <= 60)
            scores.push_back(3.0);
        else
            scores.push_back(1.0);
    }
    return scores;
}

std::vector<double> thinking_no_answer_leak(const std::vector<std::string>& completions,
                                            const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (std::size_t i = 0; i < completions.size(); ++i) {
        const auto block = thinking_block(completions[i]);
        const bool leaked =
            block && !answers[i].empty() && block->find(answers[i]) != std::string::npos;
        scores.push_back(leaked ? -1.0 : 1.0);
    }
    return scores;
}

std::vector<double> thinking_length_range(const std::vector<std::string>& completions,
                                          const std::vector<std::string>& answers) {
    check_aligned(completions, answers);
    std::vector<double> scores;
    scores.reserve(completions.size());
    for (const auto& c : completions) {
        const auto block = thinking_block(c);
        if (!block) {
            scores.push_back(-1.0);
            continue;
        }
        const std::size_t len = block->size();
        scores.push_back(len >= 100 && len <= 400 ? 3.0 : -1.0);
    }
    return scores;
}

const std::vector<RewardInfo>& reward_registry() {
    static const std::vector<RewardInfo> registry = {
        {"match_format_exactly", "3.0 when properly paired thinking and solution tags are present",
         match_format_exactly, true},
        {"match_format_approximately",
         "+0.5 per tag present exactly once, -1.0 per missing or duplicated tag",
         match_format_approximately, true},
        {"check_answer", "tiered answer check: exact, normalized, ratio bands, wrong, missing",
         check_answer, true},
        {"thinking_steps_count", "graduated score for distinct non-empty reasoning lines",
         thinking_steps_count, false},
        {"thinking_has_calc", "2.0 when the thinking block contains an arithmetic expression",
         thinking_has_calc, false},
        {"step_by_step_accuracy",
         "combines arithmetic-step detection with answer correctness, 4.0 down to -1.0",
         step_by_step_accuracy, false},
        {"efficiency_vs_accuracy", "bonus for correct answers with short thinking",
         efficiency_vs_accuracy, false},
        {"thinking_no_answer_leak", "-1 when the answer string appears inside thinking",
         thinking_no_answer_leak, false},
        {"thinking_length_range", "+3 for thinking length between 100 and 400 characters",
         thinking_length_range, false},
    };
    return registry;
}

const RewardInfo* find_reward(const std::string& name) {
    for (const auto& info : reward_registry())
        if (info.name == name) return &info;
    return nullptr;
}

std::vector<RewardInfo> base_rewards() {
    std::vector<RewardInfo> out;
    for (const auto& info : reward_registry())
        if (info.is_base) out.push_back(info);
    return out;
}

RewardFn sum_rewards(std::vector<RewardFn> members) {
    return [members = std::move(members)](const std::vector<std::string>& completions,
                                          const std::vector<std::string>& answers) {
        std::vector<double> total(completions.size(), 0.0);
        for (const auto& fn : members) {
            const auto part = fn(completions, answers);
            if (part.size() != total.size())
                throw std::runtime_error("reward returned a batch of the wrong length");
            for (std::size_t i = 0; i < total.size(); ++i) total[i] += part[i];
        }
        return total;
    };
}

}  // namespace rfsearch
