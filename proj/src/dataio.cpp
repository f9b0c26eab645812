#include "psychocal/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "psychocal/sim.hpp"

namespace psychocal::dataio {
namespace {

using nlohmann::json;

json parse_line(const std::string& line, const std::string& path, std::size_t lineno) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw SchemaError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
}

template <typename T>
T require(const json& row, const char* field, const std::string& path, std::size_t lineno) {
    if (!row.contains(field))
        throw SchemaError(path + ":" + std::to_string(lineno) + ": missing field '" + field + "'");
    try {
        return row.at(field).get<T>();
    } catch (const json::exception&) {
        throw SchemaError(path + ":" + std::to_string(lineno) + ": bad type for field '" + field +
                          "'");
    }
}

void for_each_jsonl(const std::string& path,
                    const std::function<void(const json&, std::size_t)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        fn(parse_line(line, path, lineno), lineno);
    }
}

}  // namespace

std::map<std::string, int> Dataset::num_categories_per_item() const {
    std::map<std::string, int> out;
    for (const Item& it : items) out[it.item_id] = it.num_categories;
    return out;
}

Dataset load_dataset(const std::string& items_path, const std::string& responses_path,
                     const std::optional<std::string>& embeddings_path) {
    Dataset ds;
    for_each_jsonl(items_path, [&](const json& row, std::size_t lineno) {
        Item it;
        it.item_id = require<std::string>(row, "item_id", items_path, lineno);
        it.passage = row.value("passage", std::string{});
        it.question = require<std::string>(row, "question", items_path, lineno);
        it.rubric = row.value("rubric", std::string{});
        it.num_categories = require<int>(row, "num_categories", items_path, lineno);
        if (it.question.empty())
            throw SchemaError(items_path + ":" + std::to_string(lineno) + ": empty 'question'");
        if (it.num_categories < 2)
            throw SchemaError(items_path + ":" + std::to_string(lineno) +
                              ": 'num_categories' must be >= 2");
        ds.items.push_back(std::move(it));
    });

    std::map<std::string, int> cats = ds.num_categories_per_item();
    for_each_jsonl(responses_path, [&](const json& row, std::size_t lineno) {
        ScoredResponse r;
        r.item_id = require<std::string>(row, "item_id", responses_path, lineno);
        auto cit = cats.find(r.item_id);
        if (cit == cats.end())
            throw SchemaError(responses_path + ":" + std::to_string(lineno) + ": unknown item '" +
                              r.item_id + "' in field 'item_id'");
        if (row.contains("student_id")) {
            r.student_id = require<std::string>(row, "student_id", responses_path, lineno);
        } else if (row.contains("prior_ability")) {
            r.student_id = student_id_from_prior_ability(
                require<double>(row, "prior_ability", responses_path, lineno));
        } else {
            throw SchemaError(responses_path + ":" + std::to_string(lineno) +
                              ": need 'student_id' or 'prior_ability'");
        }
        r.text = row.value("text", std::string{});
        r.score = require<int>(row, "score", responses_path, lineno);
        if (r.score < 0 || r.score >= cit->second)
            throw SchemaError(responses_path + ":" + std::to_string(lineno) +
                              ": 'score' out of range for item '" + r.item_id + "'");
        ds.responses.push_back(std::move(r));
    });

    if (embeddings_path) {
        std::optional<std::size_t> dim;
        for_each_jsonl(*embeddings_path, [&](const json& row, std::size_t lineno) {
            EmbeddingRecord e;
            e.item_id = require<std::string>(row, "item_id", *embeddings_path, lineno);
            e.vector = require<std::vector<double>>(row, "vector", *embeddings_path, lineno);
            if (dim && e.vector.size() != *dim)
                throw SchemaError(*embeddings_path + ":" + std::to_string(lineno) +
                                  ": inconsistent 'vector' dimension");
            dim = e.vector.size();
            ds.embeddings.push_back(std::move(e));
        });
    }
    return ds;
}

std::string student_id_from_prior_ability(double prior_theta) {
    return "stu_" + sim::rounded_theta_label(prior_theta);
}

std::vector<FoldSpec> make_folds(const std::map<std::string, double>& item_difficulties,
                                 int n_folds, int n_buckets, FoldSizes sizes,
                                 std::uint64_t rng_seed) {
    const int n = static_cast<int>(item_difficulties.size());
    if (n == 0) throw DomainError("make_folds: no items");
    if (n_folds < 1 || n_buckets < 1) throw DomainError("make_folds: need n_folds, n_buckets >= 1");
    if (sizes.train < 0 || sizes.val < 0 || sizes.test < 0 ||
        sizes.train + sizes.val + sizes.test != n)
        throw DomainError("make_folds: sizes must sum to the item count");

    // Sort by difficulty (ties by id for determinism).
    std::vector<std::pair<std::string, double>> sorted(item_difficulties.begin(),
                                                       item_difficulties.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });

    // Contiguous buckets; the first (n % n_buckets) buckets take one extra.
    std::vector<std::vector<std::string>> buckets(n_buckets);
    {
        const int base = n / n_buckets, extra = n % n_buckets;
        int pos = 0;
        for (int b = 0; b < n_buckets; ++b) {
            const int size = base + (b < extra ? 1 : 0);
            for (int k = 0; k < size; ++k) buckets[b].push_back(sorted[pos++].first);
        }
    }

    // Round-robin one seeded-random draw per bucket -> striped list.
    std::mt19937_64 rng(rng_seed);
    std::vector<std::string> striped;
    striped.reserve(n);
    while (static_cast<int>(striped.size()) < n) {
        for (auto& bucket : buckets) {
            if (bucket.empty()) continue;
            std::uniform_int_distribution<std::size_t> pick(0, bucket.size() - 1);
            const std::size_t j = pick(rng);
            striped.push_back(bucket[j]);
            bucket.erase(bucket.begin() + static_cast<std::ptrdiff_t>(j));
        }
    }

    std::vector<FoldSpec> folds;
    for (int f = 0; f < n_folds; ++f) {
        const int offset = static_cast<int>(
            std::llround(static_cast<double>(f) * n / static_cast<double>(n_folds)));
        FoldSpec spec;
        spec.fold_index = f;
        for (int i = 0; i < n; ++i) {
            const std::string& id = striped[(i + offset) % n];
            if (i < sizes.train)
                spec.train_ids.push_back(id);
            else if (i < sizes.train + sizes.val)
                spec.val_ids.push_back(id);
            else
                spec.test_ids.push_back(id);
        }
        folds.push_back(std::move(spec));
    }
    return folds;
}

}  // namespace psychocal::dataio
