#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psychocal/fit.hpp"
#include "psychocal/types.hpp"

namespace psychocal::pairs {

struct PreferencePair {
    std::string item_id;
    std::string student_id;
    double theta = 0.0;
    std::string winner_text;
    std::string loser_text;
    double winner_prob = 0.0;
    double loser_prob = 0.0;
};

struct MiningConfig {
    double epsilon = 0.1;
    int negatives_per_response = 3;
    std::uint64_t rng_seed = 0;
    double train_fraction = 0.2;

    void validate() const;
};

// Pool responses to the target's item whose probability under the target
// student's ability falls more than epsilon below the target's (strict).
// May be empty.
std::vector<ScoredResponse> negative_candidates(const ScoredResponse& target,
                                                const std::vector<ScoredResponse>& pool,
                                                const ItemParams& params, double theta,
                                                double epsilon);

// Selects a seeded random train_fraction of the dataset, then for each
// selected response samples min(m, |candidates|) negatives without
// replacement. Items are processed on item-id-derived RNG substreams so
// the output is independent of processing order.
std::vector<PreferencePair> mine(const std::vector<ScoredResponse>& dataset,
                                 const irt::FitResult& fit, const MiningConfig& config);

struct PromptTemplate {
    std::string text;  // placeholders: {passage} {question} {ability}

    static PromptTemplate load(const std::string& path);
    std::string render(const std::string& passage, const std::string& question,
                       double theta) const;
};

// Writes JSONL rows {"prompt","chosen","rejected"}. Returns the row count.
// Abilities are rendered with 4 decimal places.
std::size_t export_pairs(const std::vector<PreferencePair>& mined,
                         const std::vector<Item>& items, const PromptTemplate& tmpl,
                         const std::string& path);

}  // namespace psychocal::pairs
