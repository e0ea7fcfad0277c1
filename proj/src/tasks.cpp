#include "rfsearch/tasks.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "rfsearch/rng.hpp"
#include "rfsearch/text.hpp"

namespace rfsearch {

namespace {

struct Template2 {
    char op;
    const char* fmt;  // {a}, {b} placeholders
};

struct Template3 {
    const char* fmt;  // {a}, {b}, {c} placeholders; operators chosen separately
};

const Template2 kTemplates2[] = {
    {'+', "Maya has {a} marbles and finds {b} more. How many marbles does she have now?"},
    {'+', "A library shelves {a} books in the morning and {b} books in the afternoon. How many "
          "books are shelved that day?"},
    {'+', "What is {a} plus {b}?"},
    {'-', "A crate holds {a} apples and {b} of them are taken away. How many apples remain?"},
    {'-', "Liam saved {a} dollars and spent {b} dollars. How many dollars does he have left?"},
    {'-', "What is {a} minus {b}?"},
    {'*', "Each of the {a} shelves carries {b} books. How many books are there in total?"},
    {'*', "A factory fills {a} boxes with {b} bottles each. How many bottles are packed?"},
    {'*', "What is {a} times {b}?"},
};

const Template3 kTemplates3[] = {
    {"Start with {a}, then {op1} {b}, and then {op2} {c}. What is the final value?"},
    {"Begin at {a}. First {op1} {b} and next {op2} {c}. What number results?"},
    {"A counter shows {a}. After you {op1} {b} and then {op2} {c}, what does it show?"},
};

std::string replace_all(std::string s, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
    return s;
}

const char* op_word(char op) {
    switch (op) {
        case '+': return "add";
        case '-': return "subtract";
        default: return "multiply by";
    }
}

Task make_task(RngStream& rng, const std::string& id) {
    Task t;
    t.id = id;
    t.difficulty = rng.uniform_int(2) == 0 ? 2 : 3;
    const char ops[] = {'+', '-', '*'};
    const int n = t.difficulty;
    for (int i = 0; i < n; ++i) t.operands.push_back(1 + static_cast<long long>(rng.uniform_int(99)));
    for (int i = 0; i < n - 1; ++i) t.operators.push_back(ops[rng.uniform_int(3)]);

    if (n == 2) {
        std::vector<const Template2*> fits;
        for (const auto& tpl : kTemplates2)
            if (tpl.op == t.operators[0]) fits.push_back(&tpl);
        const Template2* tpl = fits[rng.uniform_int(fits.size())];
        std::string q = tpl->fmt;
        q = replace_all(q, "{a}", std::to_string(t.operands[0]));
        q = replace_all(q, "{b}", std::to_string(t.operands[1]));
        t.question = q;
    } else {
        const Template3& tpl = kTemplates3[rng.uniform_int(std::size(kTemplates3))];
        std::string q = tpl.fmt;
        q = replace_all(q, "{a}", std::to_string(t.operands[0]));
        q = replace_all(q, "{b}", std::to_string(t.operands[1]));
        q = replace_all(q, "{c}", std::to_string(t.operands[2]));
        q = replace_all(q, "{op1}", op_word(t.operators[0]));
        q = replace_all(q, "{op2}", op_word(t.operators[1]));
        t.question = q;
    }
    t.answer = eval_expression(t.operands, t.operators);
    t.answer_text = format_number(t.answer);
    return t;
}

}  // namespace

double eval_expression(const std::vector<long long>& operands,
                       const std::vector<char>& operators) {
    if (operands.empty()) return 0.0;
    long long acc = operands[0];
    for (std::size_t i = 0; i < operators.size(); ++i) {
        const long long rhs = operands[i + 1];
        switch (operators[i]) {
            case '+': acc += rhs; break;
            case '-': acc -= rhs; break;
            case '*': acc *= rhs; break;
            default: throw std::runtime_error("unknown operator");
        }
    }
    return static_cast<double>(acc);
}

std::pair<Dataset, Dataset> generate_dataset(std::uint64_t seed, std::size_t n_train,
                                             std::size_t n_test) {
    Dataset train;
    train.split = Dataset::Split::Train;
    train.seed = seed;
    Dataset test;
    test.split = Dataset::Split::Test;
    test.seed = seed;

    std::set<std::string> seen_questions;
    {
        RngStream rng(derive_seed(seed, "dataset/train"));
        for (std::size_t i = 0; i < n_train; ++i) {
            char id[32];
            std::snprintf(id, sizeof(id), "train-%05zu", i);
            Task t = make_task(rng, id);
            seen_questions.insert(t.question);
            train.tasks.push_back(std::move(t));
        }
    }
    {
        RngStream rng(derive_seed(seed, "dataset/test"));
        std::size_t i = 0;
        while (test.tasks.size() < n_test) {
            char id[32];
            std::snprintf(id, sizeof(id), "test-%05zu", test.tasks.size());
            Task t = make_task(rng, id);
            ++i;
            if (i > n_test * 1000 + 1000)
                throw std::runtime_error("could not generate disjoint test split");
            if (seen_questions.count(t.question)) continue;  // keep splits disjoint
            test.tasks.push_back(std::move(t));
        }
    }
    return {std::move(train), std::move(test)};
}

Dataset ingest_dataset(const std::string& path, Dataset::Split split) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    Dataset ds;
    ds.split = split;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("malformed record at line " + std::to_string(lineno) + ": " +
                                     e.what());
        }
        if (!rec.is_object() || !rec.contains("question") || !rec["question"].is_string() ||
            !rec.contains("answer"))
            throw std::runtime_error("malformed record at line " + std::to_string(lineno) +
                                     ": expected object with question and answer fields");
        Task t;
        char id[32];
        std::snprintf(id, sizeof(id), "ingest-%06zu", ds.tasks.size());
        t.id = id;
        t.question = rec["question"].get<std::string>();
        if (rec["answer"].is_number()) {
            t.answer = rec["answer"].get<double>();
        } else if (rec["answer"].is_string()) {
            const auto v = parse_number(strip_commas(rec["answer"].get<std::string>()));
            if (!v)
                throw std::runtime_error("unparseable answer in record " + t.id + " (line " +
                                         std::to_string(lineno) + ")");
            t.answer = *v;
        } else {
            throw std::runtime_error("unparseable answer in record " + t.id + " (line " +
                                     std::to_string(lineno) + ")");
        }
        t.answer_text = format_number(t.answer);
        t.difficulty = 2;
        ds.tasks.push_back(std::move(t));
    }
    return ds;
}

void save_dataset_jsonl(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (const auto& t : ds.tasks) {
        nlohmann::json rec;
        rec["question"] = t.question;
        rec["answer"] = t.answer_text;
        out << rec.dump() << "\n";
    }
}

}  // namespace rfsearch
