#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfsearch {

// One arithmetic word problem with an exact ground-truth answer.
struct Task {
    std::string id;
    std::string question;
    double answer = 0.0;
    std::string answer_text;  // canonical decimal rendering of `answer`
    int difficulty = 2;       // operand count, 2 or 3
    // Operands/operators that produced the answer; empty for ingested tasks.
    std::vector<long long> operands;
    std::vector<char> operators;
};

struct Dataset {
    enum class Split { Train, Test };
    Split split = Split::Train;
    std::uint64_t seed = 0;
    std::vector<Task> tasks;
};

// Two disjoint deterministic datasets. Bit-identical for identical arguments.
std::pair<Dataset, Dataset> generate_dataset(std::uint64_t seed, std::size_t n_train,
                                             std::size_t n_test);

// Reads one JSON object per line with "question" and "answer" fields; answers
// are parsed after comma removal. Throws std::runtime_error naming the line
// or record on malformed input.
Dataset ingest_dataset(const std::string& path,
                       Dataset::Split split = Dataset::Split::Test);

// Writes the ingestion format (round-trips through ingest_dataset).
void save_dataset_jsonl(const Dataset& ds, const std::string& path);

// Independent evaluation of a task's operand expression (left-to-right), used
// as the oracle for generated answers.
double eval_expression(const std::vector<long long>& operands, const std::vector<char>& operators);

}  // namespace rfsearch
