#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfsearch/tasks.hpp"

namespace rfsearch {

enum class ExtractionMode { Strict, FlexibleFallback, None };

struct ExtractionResult {
    std::string qid;
    std::optional<std::string> extracted;
    std::optional<double> numeric;
    ExtractionMode mode = ExtractionMode::None;
};

// First properly delimited solution span, trimmed; numeric parse after comma
// removal.
ExtractionResult extract_strict(const std::string& completion);

// Strict first; otherwise the last numeric token anywhere in the completion.
ExtractionResult extract_flexible(const std::string& completion);

struct ConfusionCounts {
    std::size_t tp = 0;  // parseable and numerically equal
    std::size_t fp = 0;  // parseable and unequal
    std::size_t fn = 0;  // no parseable answer
};

struct Metrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
};

Metrics metrics_from_counts(const ConfusionCounts& c, std::size_t dataset_size);

struct ScoredRun {
    ConfusionCounts counts;
    std::vector<bool> correctness;  // dataset-ordered, true on TP
    Metrics metrics;
    std::vector<ExtractionResult> extractions;
};

ScoredRun score_run(const std::vector<std::string>& completions, const std::vector<Task>& tasks,
                    ExtractionMode mode);

// Percentile bootstrap CI of the accuracy of a correctness vector.
std::pair<double, double> bootstrap_ci(const std::vector<bool>& vec, std::size_t resamples = 10000,
                                       double level = 0.95, std::uint64_t seed = 0);

// Paired McNemar test: exact two-sided binomial below `exact_threshold`
// discordant pairs, continuity-corrected chi-square at or above it.
double mcnemar(const std::vector<bool>& v1, const std::vector<bool>& v2,
               std::size_t exact_threshold = 25);

struct BonferroniMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> p;      // symmetric, 1.0 on the diagonal
    std::vector<std::vector<bool>> signif;   // p < alpha / npairs
    std::size_t npairs = 0;
    double threshold = 0.0;
};

BonferroniMatrix bonferroni_matrix(const std::vector<std::string>& names,
                                   const std::vector<std::vector<bool>>& vectors,
                                   double alpha = 0.05);

struct AuditSplit {
    std::size_t n = 0;
    double lines_mean = 0.0;
    double lines_median = 0.0;
    double lines_p10 = 0.0;
    double lines_p90 = 0.0;
    double calc_density_mean = 0.0;
};

struct AuditReport {
    AuditSplit overall;
    AuditSplit correct;
    AuditSplit incorrect;
};

// Thinking-block structure statistics split by correctness: non-empty line
// counts and the fraction of lines containing an arithmetic step.
AuditReport hacking_audit(const std::vector<std::string>& completions,
                          const std::vector<bool>& correctness);

}  // namespace rfsearch
