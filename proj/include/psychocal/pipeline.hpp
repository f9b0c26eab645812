#pragma once

#include <string>
#include <utility>
#include <vector>

#include "psychocal/fit.hpp"
#include "psychocal/types.hpp"

namespace psychocal::pipeline {

struct DifficultyPrediction {
    std::string item_id;
    double raw_difficulty = 0.0;
    double normalized_difficulty = 0.0;
};

// Refits IRT on real train responses plus simulated responses, warm-started
// from the calibrated fit; returns the fitted difficulty of every item that
// appears only in the simulated set, normalized to the train moments.
std::vector<DifficultyPrediction> predict_difficulties(
    const std::vector<ScoredResponse>& train_responses,
    const std::vector<ScoredResponse>& sim_responses,
    const std::map<std::string, int>& num_categories_per_item, const irt::FitResult& calibrated,
    const irt::FitConfig& config);

// Affine map (sigma2/sigma1)*(x - mu1) + mu2 onto the train moments.
std::vector<double> normalize_predictions(const std::vector<double>& preds,
                                          const std::vector<double>& train_difficulties);

// Cosine-similarity top-k over the train set, mean of their difficulties.
// Ties broken by lexicographic item id.
double knn_mean_difficulty(const EmbeddingRecord& test_embedding,
                           const std::vector<std::pair<EmbeddingRecord, double>>& train, int k);

}  // namespace psychocal::pipeline
