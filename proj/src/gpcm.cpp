#include "psychocal/gpcm.hpp"

#include <algorithm>
#include <cmath>

namespace psychocal::irt {

void cumulative_exponents(double theta, const ItemParams& p, std::vector<double>& out) {
    const int c = p.num_categories();
    out.resize(c);
    double acc = 0.0;
    for (int y = 0; y < c; ++y) {
        acc += p.discrimination * (theta - p.difficulty + p.steps[y]);
        out[y] = acc;
    }
}

std::vector<double> score_probabilities(double theta, const ItemParams& params) {
    if (!is_finite(theta)) throw DomainError("score_probabilities: non-finite theta");
    params.validate();

    std::vector<double> t;
    cumulative_exponents(theta, params, t);
    const double m = *std::max_element(t.begin(), t.end());
    double z = 0.0;
    for (double& v : t) {
        v = std::exp(v - m);
        z += v;
    }
    for (double& v : t) v /= z;
    return t;
}

int predict_score(double theta, const ItemParams& params) {
    const std::vector<double> p = score_probabilities(theta, params);
    int best = 0;
    for (int y = 1; y < static_cast<int>(p.size()); ++y)
        if (p[y] > p[best]) best = y;  // strict: ties keep the lower category
    return best;
}

double log_likelihood(const std::vector<ScoredResponse>& responses,
                      const std::map<std::string, ItemParams>& item_params,
                      const std::map<std::string, AbilityRecord>& abilities) {
    double total = 0.0;
    for (const ScoredResponse& r : responses) {
        auto it = item_params.find(r.item_id);
        if (it == item_params.end())
            throw LookupError("log_likelihood: unknown item id '" + r.item_id + "'");
        auto st = abilities.find(r.student_id);
        if (st == abilities.end())
            throw LookupError("log_likelihood: unknown student id '" + r.student_id + "'");
        const ItemParams& p = it->second;
        if (r.score < 0 || r.score >= p.num_categories())
            throw DomainError("log_likelihood: score out of range for item '" + r.item_id + "'");
        const std::vector<double> probs = score_probabilities(st->second.theta, p);
        total += std::log(probs[r.score]);
    }
    return total;
}

}  // namespace psychocal::irt
