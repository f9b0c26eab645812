#pragma once

#include <map>
#include <string>
#include <vector>

#include "psychocal/types.hpp"

namespace psychocal::irt {

// Running sums a*(theta - b + d_y) for y = 0..C-1, written into `out`.
void cumulative_exponents(double theta, const ItemParams& p, std::vector<double>& out);

// Category probabilities P(y|theta) for y = 0..C-1 under the generalized
// partial credit model. Softmax of cumulative exponents, max-subtracted.
std::vector<double> score_probabilities(double theta, const ItemParams& params);

// Argmax of score_probabilities; ties broken toward the lower category.
int predict_score(double theta, const ItemParams& params);

// Sum of log P(y_ij | theta_j) over the responses. Always <= 0.
double log_likelihood(const std::vector<ScoredResponse>& responses,
                      const std::map<std::string, ItemParams>& item_params,
                      const std::map<std::string, AbilityRecord>& abilities);

}  // namespace psychocal::irt
