#pragma once

#include <string>
#include <vector>

#include "psychocal/types.hpp"

namespace psychocal::metrics {

struct MetricReport {
    std::string name;
    double value = 0.0;
    int n = 0;
};

// Pearson correlation. Throws MetricError on zero variance or n < 2.
double pcc(const std::vector<double>& x, const std::vector<double>& y);

// Spearman correlation: Pearson on average ranks (ties get the mean rank).
double scc(const std::vector<double>& x, const std::vector<double>& y);

double rmse(const std::vector<double>& pred, const std::vector<double>& truth);

// Quadratic weighted kappa, weights (i-j)^2 / (C-1)^2.
double qwk(const std::vector<int>& a, const std::vector<int>& b, int num_categories);

// Spearman correlation between prompted abilities and obtained scores.
double theta_align(const std::vector<double>& abilities, const std::vector<int>& scores);

// Frechet distance between Gaussians fit to the two embedding sets:
// ||mu1 - mu2||^2 + Tr(S1 + S2 - 2(S1 S2)^{1/2}), clamped at 0.
// Covariances use the unbiased (n-1) estimator.
double fid(const std::vector<std::vector<double>>& set_a,
           const std::vector<std::vector<double>>& set_b);

// KL(A || B) between histograms of within-set pairwise cosine similarity
// over [-1, 1], additive-epsilon smoothed then renormalized.
double diversity_kl(const std::vector<std::vector<double>>& set_a,
                    const std::vector<std::vector<double>>& set_b,
                    int bins = 100, double smoothing = 1e-10);

}  // namespace psychocal::metrics
