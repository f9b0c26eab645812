#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psychocal/types.hpp"

namespace psychocal::dataio {

struct Dataset {
    std::vector<Item> items;
    std::vector<ScoredResponse> responses;
    std::vector<EmbeddingRecord> embeddings;

    std::map<std::string, int> num_categories_per_item() const;
};

struct FoldSpec {
    int fold_index = 0;
    std::vector<std::string> train_ids;
    std::vector<std::string> val_ids;
    std::vector<std::string> test_ids;
};

// items.jsonl + responses.jsonl (+ optional embeddings.jsonl). Schema
// violations report line and field. Responses keep duplicate rows; a row
// without student_id derives one from prior_ability.
Dataset load_dataset(const std::string& items_path, const std::string& responses_path,
                     const std::optional<std::string>& embeddings_path = std::nullopt);

// "stu_" + prior ability rounded half-to-even at 1 decimal.
std::string student_id_from_prior_ability(double prior_theta);

struct FoldSizes {
    int train = 0;
    int val = 0;
    int test = 0;
};

// Sorts items by difficulty, partitions into n_buckets contiguous buckets
// (earlier buckets take the extra item), builds a difficulty-striped list
// by round-robin random draws from the buckets, then rotates it once per
// fold and cuts at train and train+val.
std::vector<FoldSpec> make_folds(const std::map<std::string, double>& item_difficulties,
                                 int n_folds, int n_buckets, FoldSizes sizes,
                                 std::uint64_t rng_seed);

}  // namespace psychocal::dataio
