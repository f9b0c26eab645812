#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace psychocal {

// Error taxonomy. CLI maps DataError subclasses to exit code 2,
// everything else (usage, I/O, environment) to exit code 1.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : Error {
    using Error::Error;
};
struct LookupError : Error {
    using Error::Error;
};
struct DegenerateItemError : DomainError {
    std::vector<std::string> items;
    explicit DegenerateItemError(std::vector<std::string> bad);
};
struct MetricError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};
struct SchemaError : DomainError {
    using DomainError::DomainError;
};
struct BackendError : Error {
    using Error::Error;
};

// Per-item GPCM parameters: discrimination a, difficulty b and the step
// vector d with d[0] == 0 and sum(d) == 0.
struct ItemParams {
    std::string item_id;
    double discrimination = 1.0;
    double difficulty = 0.0;
    std::vector<double> steps;  // size == num_categories()

    int num_categories() const { return static_cast<int>(steps.size()); }
    void validate() const;
};

struct AbilityRecord {
    std::string student_id;
    double theta = 0.0;
};

// One dataset row. `text` may be empty for score-only rows.
struct ScoredResponse {
    std::string item_id;
    std::string student_id;
    std::string text;
    int score = 0;
};

// Assessment item content. Passage may be empty.
struct Item {
    std::string item_id;
    std::string passage;
    std::string question;
    std::string rubric;
    int num_categories = 2;
};

struct EmbeddingRecord {
    std::string item_id;
    std::vector<double> vector;
};

inline bool is_finite(double x) { return std::isfinite(x); }

}  // namespace psychocal
