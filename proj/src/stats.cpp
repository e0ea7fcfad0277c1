#include "rfsearch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfsearch/rex.hpp"
#include "rfsearch/rng.hpp"
#include "rfsearch/text.hpp"

namespace rfsearch {

namespace {

const rex::Regex& numeric_token_re() {
    // sign and decimal point permitted, commas tolerated inside the digits
    static const rex::Regex re = rex::Regex::compile("[-+]?(\\d[\\d,]*(\\.\\d+)?|\\.\\d+)");
    return re;
}

const rex::Regex& audit_step_re() {
    static const rex::Regex re = rex::Regex::compile("\\d+\\s*[+\\-*/]\\s*\\d+");
    return re;
}

double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    const double frac = h - std::floor(h);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Exact two-sided binomial tail for McNemar: p = min(1, 2 * P(X <= min(b,c)))
// with X ~ Binomial(b+c, 1/2); computed with integer binomials.
double exact_binomial_p(std::size_t b, std::size_t c) {
    const std::size_t n = b + c;
    const std::size_t k = std::min(b, c);
    // Pascal row n (n < 64 fits comfortably in long double precision here;
    // the exact branch is only used for small n)
    std::vector<double> row(n + 1, 0.0);
    row[0] = 1.0;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = i; j > 0; --j) row[j] += row[j - 1];
    }
    double tail = 0.0;
    for (std::size_t j = 0; j <= k; ++j) tail += row[j];
    const double p = 2.0 * tail * std::pow(0.5, static_cast<double>(n));
    return std::min(1.0, p);
}

double chi_square_sf_1df(double x) { return std::erfc(std::sqrt(x / 2.0)); }

AuditSplit summarize_split(const std::vector<double>& lines, const std::vector<double>& density) {
    AuditSplit s;
    s.n = lines.size();
    if (lines.empty()) return s;
    std::vector<double> sorted = lines;
    std::sort(sorted.begin(), sorted.end());
    for (double v : lines) s.lines_mean += v;
    s.lines_mean /= static_cast<double>(lines.size());
    s.lines_median = quantile(sorted, 0.5);
    s.lines_p10 = quantile(sorted, 0.10);
    s.lines_p90 = quantile(sorted, 0.90);
    for (double v : density) s.calc_density_mean += v;
    s.calc_density_mean /= static_cast<double>(density.size());
    return s;
}

}  // namespace

ExtractionResult extract_strict(const std::string& completion) {
    ExtractionResult r;
    const auto span = between_tags(completion, kSolutionOpen, kSolutionClose);
    if (!span) return r;
    r.extracted = trim(*span);
    r.mode = ExtractionMode::Strict;
    const auto num = parse_number(strip_commas(*r.extracted));
    if (num) {
        r.numeric = num;
    } else {
        r.mode = ExtractionMode::None;  // present but unparseable counts as no answer
    }
    return r;
}

ExtractionResult extract_flexible(const std::string& completion) {
    ExtractionResult strict = extract_strict(completion);
    if (strict.mode == ExtractionMode::Strict) return strict;
    ExtractionResult r;
    const auto tokens = numeric_token_re().findall(completion);
    if (tokens.empty()) return r;
    const std::string last = strip_commas(tokens.back());
    const auto num = parse_number(last);
    if (!num) return r;
    r.extracted = tokens.back();
    r.numeric = num;
    r.mode = ExtractionMode::FlexibleFallback;
    return r;
}

Metrics metrics_from_counts(const ConfusionCounts& c, std::size_t dataset_size) {
    Metrics m;
    const double tp = static_cast<double>(c.tp);
    if (c.tp + c.fp > 0) m.precision = tp / static_cast<double>(c.tp + c.fp);
    if (c.tp + c.fn > 0) m.recall = tp / static_cast<double>(c.tp + c.fn);
    if (m.precision + m.recall > 0.0)
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    if (dataset_size > 0) m.accuracy = tp / static_cast<double>(dataset_size);
    return m;
}

ScoredRun score_run(const std::vector<std::string>& completions, const std::vector<Task>& tasks,
                    ExtractionMode mode) {
    if (completions.size() != tasks.size())
        throw std::invalid_argument("completions and tasks must be aligned");
    ScoredRun run;
    run.correctness.resize(tasks.size(), false);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        ExtractionResult ex = mode == ExtractionMode::Strict ? extract_strict(completions[i])
                                                             : extract_flexible(completions[i]);
        ex.qid = tasks[i].id;
        if (!ex.numeric) {
            run.counts.fn += 1;
        } else if (std::fabs(*ex.numeric - tasks[i].answer) < 1e-6) {
            run.counts.tp += 1;
            run.correctness[i] = true;
        } else {
            run.counts.fp += 1;
        }
        run.extractions.push_back(std::move(ex));
    }
    run.metrics = metrics_from_counts(run.counts, tasks.size());
    return run;
}

std::pair<double, double> bootstrap_ci(const std::vector<bool>& vec, std::size_t resamples,
                                       double level, std::uint64_t seed) {
    if (vec.empty()) throw std::invalid_argument("bootstrap_ci requires a non-empty vector");
    RngStream rng(derive_seed(seed, "bootstrap"));
    const std::size_t n = vec.size();
    std::vector<double> accs;
    accs.reserve(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (vec[rng.uniform_int(n)]) ++hits;
        accs.push_back(static_cast<double>(hits) / static_cast<double>(n));
    }
    std::sort(accs.begin(), accs.end());
    const double tail = (1.0 - level) / 2.0;
    return {quantile(accs, tail), quantile(accs, 1.0 - tail)};
}

double mcnemar(const std::vector<bool>& v1, const std::vector<bool>& v2,
               std::size_t exact_threshold) {
    if (v1.size() != v2.size()) throw std::invalid_argument("mcnemar requires equal-length vectors");
    std::size_t b = 0;  // v1 right, v2 wrong
    std::size_t c = 0;  // v2 right, v1 wrong
    for (std::size_t i = 0; i < v1.size(); ++i) {
        if (v1[i] && !v2[i]) ++b;
        if (!v1[i] && v2[i]) ++c;
    }
    if (b + c == 0) return 1.0;
    if (b + c < exact_threshold) return exact_binomial_p(b, c);
    const double diff =
        std::max(0.0, std::fabs(static_cast<double>(b) - static_cast<double>(c)) - 1.0);
    const double x = diff * diff / static_cast<double>(b + c);
    return chi_square_sf_1df(x);
}

BonferroniMatrix bonferroni_matrix(const std::vector<std::string>& names,
                                   const std::vector<std::vector<bool>>& vectors, double alpha) {
    if (names.size() != vectors.size() || names.size() < 2)
        throw std::invalid_argument("bonferroni_matrix requires >= 2 named vectors");
    BonferroniMatrix out;
    out.names = names;
    const std::size_t n = names.size();
    out.npairs = n * (n - 1) / 2;
    out.threshold = alpha / static_cast<double>(out.npairs);
    out.p.assign(n, std::vector<double>(n, 1.0));
    out.signif.assign(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = mcnemar(vectors[i], vectors[j]);
            out.p[i][j] = out.p[j][i] = p;
            const bool sig = p < out.threshold;
            out.signif[i][j] = out.signif[j][i] = sig;
        }
    }
    return out;
}

AuditReport hacking_audit(const std::vector<std::string>& completions,
                          const std::vector<bool>& correctness) {
    if (completions.size() != correctness.size())
        throw std::invalid_argument("completions and correctness must be aligned");
    std::vector<double> lines_all, dens_all, lines_ok, dens_ok, lines_bad, dens_bad;
    for (std::size_t i = 0; i < completions.size(); ++i) {
        const auto block = between_tags(completions[i], kThinkingOpen, kThinkingClose);
        const auto lines = block ? nonempty_lines(*block) : std::vector<std::string>{};
        std::size_t matching = 0;
        for (const auto& line : lines)
            if (audit_step_re().search(line)) ++matching;
        const double count = static_cast<double>(lines.size());
        const double density = lines.empty() ? 0.0 : static_cast<double>(matching) / count;
        lines_all.push_back(count);
        dens_all.push_back(density);
        if (correctness[i]) {
            lines_ok.push_back(count);
            dens_ok.push_back(density);
        } else {
            lines_bad.push_back(count);
            dens_bad.push_back(density);
        }
    }
    AuditReport report;
    report.overall = summarize_split(lines_all, dens_all);
    report.correct = summarize_split(lines_ok, dens_ok);
    report.incorrect = summarize_split(lines_bad, dens_bad);
    return report;
}

}  // namespace rfsearch
