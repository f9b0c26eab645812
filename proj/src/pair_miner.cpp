#include "psychocal/pair_miner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>

#include <json.hpp>

#include "psychocal/gpcm.hpp"

namespace psychocal::pairs {
namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_ability(double theta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", theta);
    return buf;
}

void replace_all(std::string& s, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = s.find(key, pos)) != std::string::npos) {
        s.replace(pos, key.size(), value);
        pos += value.size();
    }
}

}  // namespace

void MiningConfig::validate() const {
    if (epsilon < 0.0 || epsilon >= 1.0) throw DomainError("MiningConfig: epsilon must be in [0,1)");
    if (negatives_per_response < 1)
        throw DomainError("MiningConfig: negatives_per_response must be >= 1");
    if (!(train_fraction > 0.0) || train_fraction > 1.0)
        throw DomainError("MiningConfig: train_fraction must be in (0,1]");
}

std::vector<ScoredResponse> negative_candidates(const ScoredResponse& target,
                                                const std::vector<ScoredResponse>& pool,
                                                const ItemParams& params, double theta,
                                                double epsilon) {
    const std::vector<double> probs = irt::score_probabilities(theta, params);
    if (target.item_id != params.item_id)
        throw DomainError("negative_candidates: target item does not match params");
    if (target.score < 0 || target.score >= params.num_categories())
        throw DomainError("negative_candidates: target score out of range");
    const double p_target = probs[target.score];

    std::vector<ScoredResponse> out;
    for (const ScoredResponse& r : pool) {
        if (r.item_id != target.item_id)
            throw DomainError("negative_candidates: pool response from item '" + r.item_id + "'");
        if (r.score < 0 || r.score >= params.num_categories())
            throw DomainError("negative_candidates: pool score out of range");
        if (p_target - probs[r.score] > epsilon) out.push_back(r);
    }
    return out;
}

std::vector<PreferencePair> mine(const std::vector<ScoredResponse>& dataset,
                                 const irt::FitResult& fit, const MiningConfig& config) {
    config.validate();

    // Seeded subset selection over responses, then grouping by item.
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 subset_rng(config.rng_seed);
    std::shuffle(order.begin(), order.end(), subset_rng);
    const std::size_t n_keep = static_cast<std::size_t>(
        std::llround(config.train_fraction * static_cast<double>(dataset.size())));
    std::vector<bool> selected(dataset.size(), false);
    for (std::size_t k = 0; k < n_keep; ++k) selected[order[k]] = true;

    std::map<std::string, std::vector<std::size_t>> by_item;  // dataset order within item
    for (std::size_t i = 0; i < dataset.size(); ++i) by_item[dataset[i].item_id].push_back(i);

    std::vector<PreferencePair> result;
    for (const auto& [item_id, indices] : by_item) {
        auto pit = fit.item_params.find(item_id);
        if (pit == fit.item_params.end())
            throw LookupError("mine: fit has no parameters for item '" + item_id + "'");
        const ItemParams& params = pit->second;

        // Item-id-derived substream: parallel and serial runs agree.
        std::seed_seq seq{config.rng_seed, fnv1a(item_id)};
        std::mt19937_64 rng(seq);

        for (std::size_t idx : indices) {
            if (!selected[idx]) continue;
            const ScoredResponse& target = dataset[idx];
            auto ait = fit.abilities.find(target.student_id);
            if (ait == fit.abilities.end())
                throw LookupError("mine: fit has no ability for student '" + target.student_id + "'");
            const double theta = ait->second.theta;
            const std::vector<double> probs = irt::score_probabilities(theta, params);
            const double p_target = probs[target.score];

            std::vector<std::size_t> candidates;
            for (std::size_t j : indices)
                if (j != idx && p_target - probs[dataset[j].score] > config.epsilon)
                    candidates.push_back(j);
            if (candidates.empty()) continue;

            // Partial Fisher-Yates: min(m, |candidates|) without replacement.
            const std::size_t take = std::min<std::size_t>(
                candidates.size(), static_cast<std::size_t>(config.negatives_per_response));
            for (std::size_t k = 0; k < take; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, candidates.size() - 1);
                std::swap(candidates[k], candidates[pick(rng)]);
                const ScoredResponse& loser = dataset[candidates[k]];
                result.push_back(PreferencePair{item_id, target.student_id, theta, target.text,
                                                loser.text, p_target, probs[loser.score]});
            }
        }
    }
    return result;
}

PromptTemplate PromptTemplate::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template file: " + path);
    PromptTemplate t;
    t.text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return t;
}

std::string PromptTemplate::render(const std::string& passage, const std::string& question,
                                   double theta) const {
    std::string out = text;
    replace_all(out, "{passage}", passage);
    replace_all(out, "{question}", question);
    replace_all(out, "{ability}", format_ability(theta));
    return out;
}

std::size_t export_pairs(const std::vector<PreferencePair>& mined,
                         const std::vector<Item>& items, const PromptTemplate& tmpl,
                         const std::string& path) {
    std::map<std::string, const Item*> by_id;
    for (const Item& it : items) by_id[it.item_id] = &it;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);
    std::size_t count = 0;
    for (const PreferencePair& p : mined) {
        auto it = by_id.find(p.item_id);
        if (it == by_id.end()) throw LookupError("export_pairs: unknown item '" + p.item_id + "'");
        nlohmann::ordered_json row;
        row["prompt"] = tmpl.render(it->second->passage, it->second->question, p.theta);
        row["chosen"] = p.winner_text;
        row["rejected"] = p.loser_text;
        out << row.dump() << '\n';
        ++count;
    }
    if (!out) throw IoError("write failure: " + path);
    return count;
}

}  // namespace psychocal::pairs
