#include "psychocal/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "psychocal/gpcm.hpp"
#include "psychocal/metrics.hpp"

namespace psychocal::irt {
namespace {

// Parameter layout inside one flat vector:
//   [theta_0 .. theta_{S-1}] then per item [log_a, b, e_1 .. e_{C-2}].
struct Layout {
    std::vector<std::string> student_ids;  // sorted
    std::vector<std::string> item_ids;     // sorted
    std::vector<int> item_cats;
    std::vector<std::size_t> item_offset;  // offset of log_a for each item
    std::size_t total = 0;

    std::size_t theta_index(std::size_t s) const { return s; }
};

struct IndexedResponse {
    std::size_t student;
    std::size_t item;
    int score;
};

ItemParams unpack_item(const Layout& lay, const std::vector<double>& p, std::size_t i) {
    ItemParams out;
    out.item_id = lay.item_ids[i];
    const std::size_t off = lay.item_offset[i];
    out.discrimination = std::exp(p[off]);
    out.difficulty = p[off + 1];
    const int c = lay.item_cats[i];
    out.steps.assign(c, 0.0);
    double sum = 0.0;
    for (int k = 1; k <= c - 2; ++k) {
        out.steps[k] = p[off + 1 + k];
        sum += out.steps[k];
    }
    out.steps[c - 1] = -sum;
    return out;
}

struct AdamW {
    std::vector<double> m, v;
    double lr, wd;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long step = 0;

    AdamW(std::size_t n, double lr_, double wd_) : m(n, 0.0), v(n, 0.0), lr(lr_), wd(wd_) {}

    void update(std::vector<double>& param, const std::vector<double>& grad) {
        ++step;
        const double bc1 = 1.0 - std::pow(beta1, step);
        const double bc2 = 1.0 - std::pow(beta2, step);
        for (std::size_t i = 0; i < param.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            param[i] -= lr * wd * param[i];
            param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
};

}  // namespace

void FitConfig::validate() const {
    if (epochs < 1) throw DomainError("FitConfig: epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw DomainError("FitConfig: learning_rate must be > 0");
    if (batch_size < 1) throw DomainError("FitConfig: batch_size must be >= 1");
    if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
        throw DomainError("FitConfig: holdout_fraction must be in [0,1)");
}

FitResult fit(const std::vector<ScoredResponse>& responses,
              const std::map<std::string, int>& num_categories_per_item,
              const FitConfig& config,
              const FitResult* warm_start) {
    config.validate();
    if (responses.empty()) throw DomainError("fit: empty response list");

    Layout lay;
    {
        std::set<std::string> students;
        for (const auto& r : responses) {
            if (!num_categories_per_item.count(r.item_id))
                throw LookupError("fit: no category count for item '" + r.item_id + "'");
            students.insert(r.student_id);
        }
        lay.student_ids.assign(students.begin(), students.end());
        for (const auto& [id, c] : num_categories_per_item) {
            if (c < 2) throw DomainError("fit: item '" + id + "' has fewer than 2 categories");
            lay.item_ids.push_back(id);
            lay.item_cats.push_back(c);
        }
        lay.total = lay.student_ids.size();
        for (std::size_t i = 0; i < lay.item_ids.size(); ++i) {
            lay.item_offset.push_back(lay.total);
            lay.total += 2 + static_cast<std::size_t>(lay.item_cats[i] - 2);
        }
    }

    std::unordered_map<std::string, std::size_t> student_index, item_index;
    for (std::size_t s = 0; s < lay.student_ids.size(); ++s) student_index[lay.student_ids[s]] = s;
    for (std::size_t i = 0; i < lay.item_ids.size(); ++i) item_index[lay.item_ids[i]] = i;

    std::vector<IndexedResponse> rows;
    rows.reserve(responses.size());
    std::vector<std::set<int>> seen_scores(lay.item_ids.size());
    for (const auto& r : responses) {
        const std::size_t i = item_index.at(r.item_id);
        if (r.score < 0 || r.score >= lay.item_cats[i])
            throw DomainError("fit: score out of range for item '" + r.item_id + "'");
        rows.push_back({student_index.at(r.student_id), i, r.score});
        seen_scores[i].insert(r.score);
    }
    {
        std::vector<std::string> degenerate;
        for (std::size_t i = 0; i < lay.item_ids.size(); ++i)
            if (seen_scores[i].size() < 2 && !seen_scores[i].empty())
                degenerate.push_back(lay.item_ids[i]);
        if (!degenerate.empty()) throw DegenerateItemError(std::move(degenerate));
    }

    // Cold start: theta = 0, b = 0, log a = 0, e = 0. Warm start overrides
    // entries present in the given result; everything else stays at 0.
    std::vector<double> param(lay.total, 0.0);
    if (warm_start) {
        for (std::size_t s = 0; s < lay.student_ids.size(); ++s) {
            auto it = warm_start->abilities.find(lay.student_ids[s]);
            if (it != warm_start->abilities.end()) param[s] = it->second.theta;
        }
        for (std::size_t i = 0; i < lay.item_ids.size(); ++i) {
            auto it = warm_start->item_params.find(lay.item_ids[i]);
            if (it == warm_start->item_params.end()) continue;
            const ItemParams& ip = it->second;
            if (ip.num_categories() != lay.item_cats[i])
                throw DomainError("fit: warm-start category mismatch for item '" + ip.item_id + "'");
            const std::size_t off = lay.item_offset[i];
            param[off] = std::log(ip.discrimination);
            param[off + 1] = ip.difficulty;
            for (int k = 1; k <= lay.item_cats[i] - 2; ++k) param[off + 1 + k] = ip.steps[k];
        }
    }

    // Holdout split: one seeded shuffle, last fraction reserved.
    std::mt19937_64 rng(config.rng_seed);
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_hold =
        static_cast<std::size_t>(config.holdout_fraction * static_cast<double>(rows.size()));
    const std::size_t n_train = rows.size() - n_hold;
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> hold_idx(order.begin() + n_train, order.end());

    AdamW opt(lay.total, config.learning_rate, config.weight_decay);
    std::vector<double> grad(lay.total, 0.0);
    detail::ResponseGradient rg;

    FitResult result;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n_train; start += config.batch_size) {
            const std::size_t end = std::min(n_train, start + config.batch_size);
            const double inv_n = 1.0 / static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t k = start; k < end; ++k) {
                const IndexedResponse& row = rows[train_idx[k]];
                const std::size_t off = lay.item_offset[row.item];
                const int c = lay.item_cats[row.item];
                detail::response_gradient(param[row.student], param[off], param[off + 1],
                                          param.data() + off + 2, c, row.score, rg);
                epoch_loss += rg.loss;
                grad[row.student] += inv_n * rg.d_theta;
                grad[off] += inv_n * rg.d_log_a;
                grad[off + 1] += inv_n * rg.d_b;
                for (int e = 0; e < c - 2; ++e) grad[off + 2 + e] += inv_n * rg.d_free_steps[e];
            }
            opt.update(param, grad);
        }
        result.loss_curve.push_back(epoch_loss / static_cast<double>(std::max<std::size_t>(1, n_train)));
    }
    result.final_loss = result.loss_curve.empty() ? 0.0 : result.loss_curve.back();

    for (std::size_t s = 0; s < lay.student_ids.size(); ++s)
        result.abilities[lay.student_ids[s]] = AbilityRecord{lay.student_ids[s], param[s]};
    for (std::size_t i = 0; i < lay.item_ids.size(); ++i)
        result.item_params[lay.item_ids[i]] = unpack_item(lay, param, i);

    if (!hold_idx.empty()) {
        int max_c = 2;
        std::vector<int> pred, truth;
        pred.reserve(hold_idx.size());
        truth.reserve(hold_idx.size());
        for (std::size_t k : hold_idx) {
            const IndexedResponse& row = rows[k];
            const ItemParams ip = unpack_item(lay, param, row.item);
            pred.push_back(predict_score(param[row.student], ip));
            truth.push_back(row.score);
            max_c = std::max(max_c, lay.item_cats[row.item]);
        }
        try {
            result.holdout_qwk = metrics::qwk(pred, truth, max_c);
        } catch (const MetricError&) {
            result.holdout_qwk.reset();
        }
    }
    return result;
}

namespace detail {

void response_gradient(double theta, double log_a, double b, const double* free_steps, int c,
                       int score, ResponseGradient& out) {
    const double a = std::exp(log_a);
    out.d_free_steps.assign(std::max(0, c - 2), 0.0);

    // Step vector from the free parameters: d_0 = 0, d_{C-1} = -sum(e).
    thread_local std::vector<double> d, probs;
    d.assign(c, 0.0);
    double free_sum = 0.0;
    for (int y = 1; y <= c - 2; ++y) {
        d[y] = free_steps[y - 1];
        free_sum += d[y];
    }
    d[c - 1] = -free_sum;

    // Cumulative exponents and softmax, max-subtracted.
    probs.resize(c);
    double acc = 0.0;
    for (int y = 0; y < c; ++y) {
        acc += a * (theta - b + d[y]);
        probs[y] = acc;
    }
    const double mx = *std::max_element(probs.begin(), probs.end());
    double z = 0.0;
    for (double& v : probs) {
        v = std::exp(v - mx);
        z += v;
    }
    for (double& v : probs) v /= z;
    out.loss = -std::log(probs[score]);

    // dL/dt_y = p_y - [y == score]; chain back through the cumulative
    // sums: t_y = a*((y+1)(theta - b) + S_y) with S_y = d_0 + .. + d_y.
    double gsum = 0.0;  // sum_y g_y * (y+1)
    double ga = 0.0;    // dL/d(log a) before the a factor
    double s_acc = 0.0;
    for (int y = 0; y < c; ++y) {
        const double g = probs[y] - (y == score ? 1.0 : 0.0);
        s_acc += d[y];
        gsum += g * (y + 1);
        ga += g * ((y + 1) * (theta - b) + s_acc);
    }
    out.d_theta = a * gsum;
    out.d_b = -a * gsum;
    out.d_log_a = a * ga;

    // dt_y/de_k = a*([k <= y] - [y == C-1]) through d_{C-1} = -sum(e).
    const double g_last = probs[c - 1] - (score == c - 1 ? 1.0 : 0.0);
    double tail = g_last;  // sum_{y >= k} g_y, built back to front
    for (int k = c - 2; k >= 1; --k) {
        tail += probs[k] - (k == score ? 1.0 : 0.0);
        out.d_free_steps[k - 1] = a * (tail - g_last);
    }
}

}  // namespace detail

LogLikGradients log_likelihood_gradients(const std::vector<ScoredResponse>& responses,
                                         const std::map<std::string, ItemParams>& item_params,
                                         const std::map<std::string, AbilityRecord>& abilities) {
    LogLikGradients out;
    detail::ResponseGradient rg;
    for (const ScoredResponse& r : responses) {
        auto pit = item_params.find(r.item_id);
        if (pit == item_params.end())
            throw LookupError("log_likelihood_gradients: unknown item '" + r.item_id + "'");
        auto ait = abilities.find(r.student_id);
        if (ait == abilities.end())
            throw LookupError("log_likelihood_gradients: unknown student '" + r.student_id + "'");
        const ItemParams& p = pit->second;
        const int c = p.num_categories();
        std::vector<double> free_steps(p.steps.begin() + 1,
                                       p.steps.begin() + std::max(1, c - 1));
        detail::response_gradient(ait->second.theta, std::log(p.discrimination), p.difficulty,
                                  free_steps.data(), c, r.score, rg);

        // response_gradient differentiates the loss (-log P); negate.
        out.d_theta[r.student_id] += -rg.d_theta;
        auto& ig = out.d_item[r.item_id];
        if (ig.d_free_steps.empty() && c > 2) ig.d_free_steps.assign(c - 2, 0.0);
        ig.d_log_a += -rg.d_log_a;
        ig.d_difficulty += -rg.d_b;
        for (int e = 0; e < c - 2; ++e) ig.d_free_steps[e] += -rg.d_free_steps[e];
    }
    return out;
}

}  // namespace psychocal::irt
