#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psychocal/types.hpp"

namespace psychocal::irt {

struct FitConfig {
    int epochs = 50;
    double learning_rate = 1e-3;
    double weight_decay = 0.0;
    int batch_size = 256;
    double holdout_fraction = 0.2;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct FitResult {
    std::map<std::string, ItemParams> item_params;
    std::map<std::string, AbilityRecord> abilities;
    // Quadratic weighted kappa between argmax-predicted and true scores on
    // the held-out rows; empty when holdout_fraction == 0 or the holdout
    // is degenerate.
    std::optional<double> holdout_qwk;
    double final_loss = 0.0;
    std::vector<double> loss_curve;  // mean train cross-entropy per epoch
};

// Fits item parameters and abilities by mini-batch AdamW on mean
// cross-entropy. No priors. The d0 = 0 and sum-to-zero step constraints
// hold at every iterate: the optimizer stores C-2 free step values and
// derives the last one as their negated sum. Deterministic per seed.
//
// Throws DegenerateItemError when any item has a single observed score
// class, listing every offending item.
FitResult fit(const std::vector<ScoredResponse>& responses,
              const std::map<std::string, int>& num_categories_per_item,
              const FitConfig& config,
              const FitResult* warm_start = nullptr);

namespace detail {

// Per-response cross-entropy and its gradient in the optimization
// coordinates (theta, log a, b, free steps e_1..e_{C-2}). The optimizer
// and the gradient-verification path both go through here.
struct ResponseGradient {
    double loss = 0.0;  // -log P(score)
    double d_theta = 0.0;
    double d_log_a = 0.0;
    double d_b = 0.0;
    std::vector<double> d_free_steps;  // size C-2
};

void response_gradient(double theta, double log_a, double b, const double* free_steps, int c,
                       int score, ResponseGradient& out);

}  // namespace detail

// Analytic gradient of the summed log-likelihood w.r.t. every free
// parameter: abilities, log-discriminations, difficulties and the C-2
// free step values per item.
struct LogLikGradients {
    std::map<std::string, double> d_theta;
    struct ItemGrad {
        double d_log_a = 0.0;
        double d_difficulty = 0.0;
        std::vector<double> d_free_steps;
    };
    std::map<std::string, ItemGrad> d_item;
};

LogLikGradients log_likelihood_gradients(const std::vector<ScoredResponse>& responses,
                                         const std::map<std::string, ItemParams>& item_params,
                                         const std::map<std::string, AbilityRecord>& abilities);

}  // namespace psychocal::irt
