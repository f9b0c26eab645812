#include "psychocal/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace psychocal::serialize {
namespace {

using nlohmann::json;

std::string quote(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string fixed9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    std::string out = buf;
    if (out == "-0.000000000") out = "0.000000000";
    return out;
}

void save_fit_result(const irt::FitResult& result, const irt::FitConfig& config,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open output file: " + path);

    // Hand-rolled writer: sorted keys, fixed 9-decimal reals.
    out << "{\n  \"items\": [\n";
    bool first = true;
    for (const auto& [id, p] : result.item_params) {
        if (!first) out << ",\n";
        first = false;
        out << "    {\"a\": " << fixed9(p.discrimination) << ", \"b\": " << fixed9(p.difficulty)
            << ", \"d\": [";
        for (int y = 0; y < p.num_categories(); ++y) {
            if (y) out << ", ";
            out << fixed9(p.steps[y]);
        }
        out << "], \"item_id\": " << quote(id) << "}";
    }
    out << "\n  ],\n  \"meta\": {";
    out << "\"batch_size\": " << config.batch_size;
    out << ", \"epochs\": " << config.epochs;
    out << ", \"final_loss\": " << fixed9(result.final_loss);
    out << ", \"holdout_fraction\": " << fixed9(config.holdout_fraction);
    if (result.holdout_qwk) out << ", \"holdout_qwk\": " << fixed9(*result.holdout_qwk);
    out << ", \"learning_rate\": " << fixed9(config.learning_rate);
    out << ", \"seed\": " << config.rng_seed;
    out << ", \"weight_decay\": " << fixed9(config.weight_decay);
    out << "},\n  \"students\": [\n";
    first = true;
    for (const auto& [id, a] : result.abilities) {
        if (!first) out << ",\n";
        first = false;
        out << "    {\"student_id\": " << quote(id) << ", \"theta\": " << fixed9(a.theta) << "}";
    }
    out << "\n  ]\n}\n";
    if (!out) throw IoError("write failure: " + path);
}

irt::FitResult load_fit_result(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open params file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + ": invalid JSON: " + std::string(e.what()));
    }

    irt::FitResult result;
    try {
        for (const auto& row : doc.at("items")) {
            ItemParams p;
            p.item_id = row.at("item_id").get<std::string>();
            p.discrimination = row.at("a").get<double>();
            p.difficulty = row.at("b").get<double>();
            p.steps = row.at("d").get<std::vector<double>>();
            if (p.steps.size() >= 2) {
                // Re-derive the last step so the sum-to-zero invariant
                // survives the 9-decimal rounding of the file format.
                double s = 0.0;
                for (std::size_t y = 0; y + 1 < p.steps.size(); ++y) s += p.steps[y];
                p.steps.back() = -s;
            }
            p.validate();
            result.item_params[p.item_id] = std::move(p);
        }
        for (const auto& row : doc.at("students")) {
            AbilityRecord a;
            a.student_id = row.at("student_id").get<std::string>();
            a.theta = row.at("theta").get<double>();
            result.abilities[a.student_id] = std::move(a);
        }
        if (doc.contains("meta")) {
            const auto& meta = doc.at("meta");
            result.final_loss = meta.value("final_loss", 0.0);
            if (meta.contains("holdout_qwk"))
                result.holdout_qwk = meta.at("holdout_qwk").get<double>();
        }
    } catch (const json::exception& e) {
        throw SchemaError(path + ": bad schema: " + std::string(e.what()));
    }
    return result;
}

}  // namespace psychocal::serialize
