#include "psychocal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace psychocal::pipeline {

std::vector<DifficultyPrediction> predict_difficulties(
    const std::vector<ScoredResponse>& train_responses,
    const std::vector<ScoredResponse>& sim_responses,
    const std::map<std::string, int>& num_categories_per_item, const irt::FitResult& calibrated,
    const irt::FitConfig& config) {
    if (sim_responses.empty())
        throw DomainError("predict_difficulties: no simulated responses (no unseen items to fit)");

    std::set<std::string> train_items, sim_items;
    for (const auto& r : train_responses) train_items.insert(r.item_id);
    for (const auto& r : sim_responses) sim_items.insert(r.item_id);

    std::vector<ScoredResponse> combined = train_responses;
    combined.insert(combined.end(), sim_responses.begin(), sim_responses.end());

    const irt::FitResult refit =
        irt::fit(combined, num_categories_per_item, config, &calibrated);

    std::vector<double> train_difficulties;
    for (const std::string& id : train_items)
        train_difficulties.push_back(refit.item_params.at(id).difficulty);

    std::vector<DifficultyPrediction> out;
    std::vector<double> raw;
    for (const std::string& id : sim_items) {
        if (train_items.count(id)) continue;  // unseen items only
        raw.push_back(refit.item_params.at(id).difficulty);
        out.push_back(DifficultyPrediction{id, raw.back(), 0.0});
    }
    if (out.empty())
        throw DomainError("predict_difficulties: simulated responses cover no unseen items");

    if (raw.size() >= 2 && train_difficulties.size() >= 2) {
        const std::vector<double> norm = normalize_predictions(raw, train_difficulties);
        for (std::size_t i = 0; i < out.size(); ++i) out[i].normalized_difficulty = norm[i];
    } else {
        for (auto& p : out) p.normalized_difficulty = p.raw_difficulty;
    }
    return out;
}

std::vector<double> normalize_predictions(const std::vector<double>& preds,
                                          const std::vector<double>& train_difficulties) {
    auto moments = [](const std::vector<double>& v) {
        const double mu = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double ss = 0.0;
        for (double x : v) ss += (x - mu) * (x - mu);
        return std::pair<double, double>{mu, std::sqrt(ss / v.size())};
    };
    auto distinct = [](const std::vector<double>& v) {
        return std::set<double>(v.begin(), v.end()).size() >= 2;
    };
    if (preds.size() < 2 || train_difficulties.size() < 2 || !distinct(train_difficulties))
        throw DomainError("normalize_predictions: need >= 2 distinct values in each list");
    const auto [mu1, sigma1] = moments(preds);
    const auto [mu2, sigma2] = moments(train_difficulties);
    if (sigma1 == 0.0) throw DomainError("normalize_predictions: zero predicted std");

    std::vector<double> out;
    out.reserve(preds.size());
    for (double p : preds) out.push_back(sigma2 / sigma1 * (p - mu1) + mu2);
    return out;
}

double knn_mean_difficulty(const EmbeddingRecord& test_embedding,
                           const std::vector<std::pair<EmbeddingRecord, double>>& train, int k) {
    if (train.empty()) throw DomainError("knn_mean_difficulty: empty train set");
    if (k < 1) throw DomainError("knn_mean_difficulty: k must be >= 1");

    auto norm = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };
    const double tn = norm(test_embedding.vector);
    if (tn == 0.0) throw DomainError("knn_mean_difficulty: zero-norm test embedding");

    struct Scored {
        double cosine;
        const std::string* id;
        double difficulty;
    };
    std::vector<Scored> scored;
    scored.reserve(train.size());
    for (const auto& [emb, diff] : train) {
        if (emb.vector.size() != test_embedding.vector.size())
            throw DomainError("knn_mean_difficulty: embedding dimension mismatch");
        const double en = norm(emb.vector);
        if (en == 0.0) throw DomainError("knn_mean_difficulty: zero-norm train embedding");
        double dot = 0.0;
        for (std::size_t i = 0; i < emb.vector.size(); ++i)
            dot += emb.vector[i] * test_embedding.vector[i];
        scored.push_back({dot / (en * tn), &emb.item_id, diff});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        return a.cosine != b.cosine ? a.cosine > b.cosine : *a.id < *b.id;
    });

    const std::size_t take = std::min<std::size_t>(scored.size(), static_cast<std::size_t>(k));
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += scored[i].difficulty;
    return sum / static_cast<double>(take);
}

}  // namespace psychocal::pipeline
