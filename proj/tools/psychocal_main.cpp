// psychocal: simulation-based item difficulty calibration toolkit.
//
// Subcommands: fit-irt, mine-pairs, simulate, predict-difficulty,
// evaluate, split-folds. All artifacts land under --out together with a
// manifest.json capturing the effective config and input digests, so a
// rerun with the same seed is byte-identical.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "psychocal/backend_client.hpp"
#include "psychocal/dataio.hpp"
#include "psychocal/fit.hpp"
#include "psychocal/gpcm.hpp"
#include "psychocal/metrics.hpp"
#include "psychocal/pair_miner.hpp"
#include "psychocal/pipeline.hpp"
#include "psychocal/serialize.hpp"
#include "psychocal/sim.hpp"
#include "psychocal/types.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace psychocal;

namespace {

int log_level() {
    const char* env = std::getenv("PSYCHOCAL_LOG");
    if (!env) return 1;  // info
    const std::string v = env;
    if (v == "debug") return 0;
    if (v == "warn") return 2;
    if (v == "error") return 3;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() <= 1) std::cerr << "[psychocal] " << msg << "\n";
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open input for digest: " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    char hex[24];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_manifest(const fs::path& out_dir, const std::string& command,
                    const ordered_json& config, const std::vector<std::string>& inputs) {
    ordered_json manifest;
    manifest["command"] = command;
    manifest["config"] = config;
    ordered_json digests;
    for (const std::string& p : inputs) digests[p] = file_digest(p);
    manifest["inputs"] = digests;
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    if (!out) throw IoError("cannot write manifest under " + out_dir.string());
    out << manifest.dump(2) << "\n";
}

fs::path prepare_out(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out);
    return dir;
}

std::vector<ScoredResponse> load_responses_only(const std::string& path) {
    // Response rows without item validation; used where items come from a
    // params file instead of an items.jsonl.
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<ScoredResponse> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        ScoredResponse r;
        if (!row.contains("item_id"))
            throw SchemaError(path + ":" + std::to_string(lineno) + ": missing field 'item_id'");
        r.item_id = row.at("item_id").get<std::string>();
        if (row.contains("student_id"))
            r.student_id = row.at("student_id").get<std::string>();
        else if (row.contains("prior_ability"))
            r.student_id =
                dataio::student_id_from_prior_ability(row.at("prior_ability").get<double>());
        else
            throw SchemaError(path + ":" + std::to_string(lineno) +
                              ": need 'student_id' or 'prior_ability'");
        r.text = row.value("text", std::string{});
        if (!row.contains("score"))
            throw SchemaError(path + ":" + std::to_string(lineno) + ": missing field 'score'");
        r.score = row.at("score").get<int>();
        out.push_back(std::move(r));
    }
    return out;
}

std::map<std::string, int> categories_from_responses(const std::vector<ScoredResponse>& rows) {
    std::map<std::string, int> cats;
    for (const auto& r : rows) {
        auto& c = cats[r.item_id];
        c = std::max(c, r.score + 1);
    }
    for (auto& [id, c] : cats) c = std::max(c, 2);
    return cats;
}

std::map<std::string, double> load_difficulty_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::map<std::string, double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw SchemaError(path + ":" + std::to_string(lineno) + ": expected 'item_id,value'");
        const std::string id = line.substr(0, comma);
        if (lineno == 1 && id == "item_id") continue;  // header
        std::string rest = line.substr(comma + 1);
        const std::size_t comma2 = rest.find(',');
        if (comma2 != std::string::npos) rest = rest.substr(0, comma2);
        try {
            out[id] = std::stod(rest);
        } catch (const std::exception&) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": bad value field");
        }
    }
    return out;
}

// Second numeric column of predictions.csv when present (the normalized
// difficulty), otherwise the single value column.
std::map<std::string, double> load_predictions_csv(const std::string& path, bool normalized) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::map<std::string, double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
        if (cols.size() < 2)
            throw SchemaError(path + ":" + std::to_string(lineno) + ": expected >= 2 columns");
        if (lineno == 1 && cols[0] == "item_id") continue;
        const std::string& value = (normalized && cols.size() >= 3) ? cols[2] : cols[1];
        try {
            out[cols[0]] = std::stod(value);
        } catch (const std::exception&) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": bad value field");
        }
    }
    return out;
}

std::vector<EmbeddingRecord> load_embeddings_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<EmbeddingRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        EmbeddingRecord e;
        e.item_id = row.value("item_id", std::string{});
        if (!row.contains("vector"))
            throw SchemaError(path + ":" + std::to_string(lineno) + ": missing field 'vector'");
        e.vector = row.at("vector").get<std::vector<double>>();
        out.push_back(std::move(e));
    }
    return out;
}

// ------------------------------------------------------------------ fit-irt

int cmd_fit_irt(const std::string& items_path, const std::string& responses_path,
                const std::string& out, const irt::FitConfig& config) {
    const fs::path dir = prepare_out(out);
    const dataio::Dataset ds = dataio::load_dataset(items_path, responses_path);
    log_info("fit-irt: " + std::to_string(ds.responses.size()) + " responses, " +
             std::to_string(ds.items.size()) + " items");
    const irt::FitResult result = irt::fit(ds.responses, ds.num_categories_per_item(), config);
    serialize::save_fit_result(result, config, (dir / "params.json").string());

    ordered_json report;
    report["final_loss"] = serialize::fixed9(result.final_loss);
    report["holdout_qwk"] =
        result.holdout_qwk ? json(serialize::fixed9(*result.holdout_qwk)) : json(nullptr);
    ordered_json curve = ordered_json::array();
    for (double l : result.loss_curve) curve.push_back(serialize::fixed9(l));
    report["loss_curve"] = curve;
    std::ofstream rep(dir / "fit_report.json", std::ios::binary);
    rep << report.dump(2) << "\n";

    ordered_json cfg{{"epochs", config.epochs},
                     {"learning_rate", config.learning_rate},
                     {"weight_decay", config.weight_decay},
                     {"batch_size", config.batch_size},
                     {"holdout_fraction", config.holdout_fraction},
                     {"rng_seed", config.rng_seed}};
    write_manifest(dir, "fit-irt", cfg, {items_path, responses_path});
    return 0;
}

// --------------------------------------------------------------- mine-pairs

int cmd_mine_pairs(const std::string& responses_path, const std::string& items_path,
                   const std::string& params_path, const std::string& template_path,
                   const std::string& out, const pairs::MiningConfig& config) {
    const fs::path dir = prepare_out(out);
    const dataio::Dataset ds = dataio::load_dataset(items_path, responses_path);
    const irt::FitResult fit = serialize::load_fit_result(params_path);
    const pairs::PromptTemplate tmpl = pairs::PromptTemplate::load(template_path);

    const std::vector<pairs::PreferencePair> mined = pairs::mine(ds.responses, fit, config);
    const std::size_t n =
        pairs::export_pairs(mined, ds.items, tmpl, (dir / "pairs.jsonl").string());
    log_info("mine-pairs: wrote " + std::to_string(n) + " pairs");

    ordered_json cfg{{"epsilon", config.epsilon},
                     {"negatives_per_response", config.negatives_per_response},
                     {"train_fraction", config.train_fraction},
                     {"rng_seed", config.rng_seed}};
    write_manifest(dir, "mine-pairs", cfg,
                   {responses_path, items_path, params_path, template_path});
    return 0;
}

// ----------------------------------------------------------------- simulate

std::vector<Item> load_items_jsonl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::vector<Item> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json row;
        try {
            row = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError(path + ":" + std::to_string(lineno) + ": invalid JSON: " + e.what());
        }
        Item it;
        it.item_id = row.value("item_id", std::string{});
        it.passage = row.value("passage", std::string{});
        it.question = row.value("question", std::string{});
        it.rubric = row.value("rubric", std::string{});
        it.num_categories = row.value("num_categories", 2);
        if (it.item_id.empty() || it.question.empty())
            throw SchemaError(path + ":" + std::to_string(lineno) +
                              ": missing 'item_id' or 'question'");
        out.push_back(std::move(it));
    }
    return out;
}

int cmd_simulate_impl(const std::string& items_path, const std::string& params_path,
                      const std::string& backend, const std::string& backend_cmd,
                      const std::string& backend_url, double flip_prob,
                      const sim::SimulationPlan& plan, const std::string& out,
                      const std::string& generator_template, const std::string& scorer_template) {
    const fs::path dir = prepare_out(out);
    const std::vector<Item> items = load_items_jsonl(items_path);
    const irt::FitResult calibrated = serialize::load_fit_result(params_path);
    std::vector<double> train_thetas;
    for (const auto& [id, a] : calibrated.abilities) train_thetas.push_back(a.theta);

    std::optional<sim::BackendTemplates> templates;
    if (!generator_template.empty() && !scorer_template.empty())
        templates = sim::BackendTemplates::load(generator_template, scorer_template);

    std::unique_ptr<sim::SyntheticOracleBackend> synthetic;
    std::unique_ptr<sim::SubprocessBackend> subprocess;
    std::unique_ptr<sim::HttpBackend> http;
    sim::GeneratorBackend* generator = nullptr;
    sim::ScorerBackend* scorer = nullptr;
    if (backend == "synthetic") {
        std::map<std::string, ItemParams> truth;
        for (const auto& [id, p] : calibrated.item_params) truth[id] = p;
        synthetic = std::make_unique<sim::SyntheticOracleBackend>(std::move(truth), flip_prob);
        generator = synthetic.get();
        scorer = synthetic.get();
    } else if (backend == "subprocess") {
        if (backend_cmd.empty()) throw IoError("simulate: --backend-cmd required for subprocess");
        subprocess = std::make_unique<sim::SubprocessBackend>(backend_cmd, templates);
        generator = subprocess.get();
        scorer = subprocess.get();
    } else if (backend == "http") {
        if (backend_url.empty()) throw IoError("simulate: --backend-url required for http");
        http = std::make_unique<sim::HttpBackend>(backend_url, templates);
        generator = http.get();
        scorer = http.get();
    } else {
        throw IoError("simulate: unknown backend '" + backend + "'");
    }

    const sim::SimulationResult result =
        sim::run_simulation(items, train_thetas, plan, *generator, *scorer);
    log_info("simulate: " + std::to_string(result.records.size()) + " responses, " +
             std::to_string(result.failed_cells) + " failed cells");

    std::ofstream rows(dir / "sim_responses.jsonl", std::ios::binary);
    if (!rows) throw IoError("cannot write sim_responses.jsonl");
    for (const sim::SimRecord& r : result.records) {
        ordered_json row{{"item_id", r.item_id},
                         {"student_id", r.student_id},
                         {"text", r.text},
                         {"score", r.score},
                         {"theta", std::stod(serialize::fixed9(r.theta))},
                         {"ability_index", r.ability_index}};
        rows << row.dump() << "\n";
    }

    ordered_json cfg{{"backend", backend},
                     {"population_size", plan.population_size},
                     {"histogram_bins", plan.histogram_bins},
                     {"rng_seed", plan.rng_seed},
                     {"flip_prob", flip_prob},
                     {"failed_cells", result.failed_cells},
                     {"decoding",
                      {{"max_tokens", plan.decoding.max_tokens},
                       {"temperature", plan.decoding.temperature},
                       {"top_p", plan.decoding.top_p}}}};
    write_manifest(dir, "simulate", cfg, {items_path, params_path});
    return 0;
}

// ------------------------------------------------------- predict-difficulty

int cmd_predict_difficulty(const std::string& train_path, const std::string& sim_path,
                           const std::string& calibrated_path, const std::string& out,
                           const irt::FitConfig& config) {
    const fs::path dir = prepare_out(out);
    const std::vector<ScoredResponse> train = load_responses_only(train_path);
    const std::vector<ScoredResponse> simulated = load_responses_only(sim_path);
    const irt::FitResult calibrated = serialize::load_fit_result(calibrated_path);

    std::map<std::string, int> cats;
    for (const auto& [id, p] : calibrated.item_params) cats[id] = p.num_categories();
    for (const auto& [id, c] : categories_from_responses(simulated))
        if (!cats.count(id)) cats[id] = c;
    for (const auto& [id, c] : categories_from_responses(train))
        if (!cats.count(id)) cats[id] = c;

    const std::vector<pipeline::DifficultyPrediction> preds =
        pipeline::predict_difficulties(train, simulated, cats, calibrated, config);

    std::ofstream csv(dir / "predictions.csv", std::ios::binary);
    if (!csv) throw IoError("cannot write predictions.csv");
    csv << "item_id,raw,normalized\n";
    for (const auto& p : preds)
        csv << p.item_id << ',' << serialize::fixed9(p.raw_difficulty) << ','
            << serialize::fixed9(p.normalized_difficulty) << "\n";

    ordered_json cfg{{"epochs", config.epochs},
                     {"learning_rate", config.learning_rate},
                     {"weight_decay", config.weight_decay},
                     {"batch_size", config.batch_size},
                     {"holdout_fraction", config.holdout_fraction},
                     {"rng_seed", config.rng_seed}};
    write_manifest(dir, "predict-difficulty", cfg, {train_path, sim_path, calibrated_path});
    return 0;
}

// ----------------------------------------------------------------- evaluate

int cmd_evaluate(const std::string& pred_path, const std::string& truth_path,
                 const std::string& sim_path, const std::string& embeddings_path,
                 const std::string& sim_embeddings_path, const std::string& out) {
    const fs::path dir = prepare_out(out);
    const std::map<std::string, double> preds = load_predictions_csv(pred_path, true);
    const std::map<std::string, double> truth = load_difficulty_csv(truth_path);

    std::vector<double> p, t;
    for (const auto& [id, v] : preds) {
        auto it = truth.find(id);
        if (it == truth.end())
            throw DomainError("evaluate: no ground-truth difficulty for item '" + id + "'");
        p.push_back(v);
        t.push_back(it->second);
    }

    ordered_json report;
    auto emit = [&report](const std::string& name, double value, std::size_t n) {
        report[name] = ordered_json{{"value", std::stod(serialize::fixed9(value))},
                                    {"n", n}};
    };
    emit("pcc", metrics::pcc(p, t), p.size());
    emit("scc", metrics::scc(p, t), p.size());
    emit("rmse", metrics::rmse(p, t), p.size());

    if (!sim_path.empty()) {
        std::ifstream in(sim_path, std::ios::binary);
        if (!in) throw IoError("cannot open: " + sim_path);
        std::vector<double> thetas;
        std::vector<int> scores;
        std::vector<std::vector<double>> envelope_embeddings;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json row = json::parse(line);
            if (row.contains("theta") && row.contains("score")) {
                thetas.push_back(row.at("theta").get<double>());
                scores.push_back(row.at("score").get<int>());
            }
            const std::string text = row.value("text", std::string{});
            if (text.rfind("SYNTH|", 0) == 0)
                envelope_embeddings.push_back(sim::SyntheticOracleBackend::parse_embedding(text));
        }
        if (thetas.size() >= 2) emit("theta_align", metrics::theta_align(thetas, scores), thetas.size());

        std::vector<std::vector<double>> sim_vectors;
        if (!sim_embeddings_path.empty()) {
            for (const auto& e : load_embeddings_jsonl(sim_embeddings_path))
                sim_vectors.push_back(e.vector);
        } else {
            sim_vectors = std::move(envelope_embeddings);
        }
        if (!embeddings_path.empty() && sim_vectors.size() >= 2) {
            std::vector<std::vector<double>> real_vectors;
            for (const auto& e : load_embeddings_jsonl(embeddings_path))
                real_vectors.push_back(e.vector);
            if (real_vectors.size() >= 2) {
                emit("fid", metrics::fid(real_vectors, sim_vectors),
                     std::min(real_vectors.size(), sim_vectors.size()));
                emit("diversity_kl", metrics::diversity_kl(real_vectors, sim_vectors),
                     std::min(real_vectors.size(), sim_vectors.size()));
            }
        }
    }

    std::ofstream rep(dir / "report.json", std::ios::binary);
    if (!rep) throw IoError("cannot write report.json");
    rep << report.dump(2) << "\n";

    std::vector<std::string> inputs{pred_path, truth_path};
    if (!sim_path.empty()) inputs.push_back(sim_path);
    if (!embeddings_path.empty()) inputs.push_back(embeddings_path);
    if (!sim_embeddings_path.empty()) inputs.push_back(sim_embeddings_path);
    write_manifest(dir, "evaluate", ordered_json::object(), inputs);
    return 0;
}

// -------------------------------------------------------------- split-folds

int cmd_split_folds(const std::string& difficulties_path, const std::string& out, int n_folds,
                    int n_buckets, int train, int val, int test, std::uint64_t seed) {
    const fs::path dir = prepare_out(out);
    const std::map<std::string, double> difficulties = load_difficulty_csv(difficulties_path);
    const std::vector<dataio::FoldSpec> folds = dataio::make_folds(
        difficulties, n_folds, n_buckets, dataio::FoldSizes{train, val, test}, seed);

    ordered_json doc = ordered_json::array();
    for (const auto& f : folds) {
        doc.push_back(ordered_json{{"fold_index", f.fold_index},
                                   {"train_ids", f.train_ids},
                                   {"val_ids", f.val_ids},
                                   {"test_ids", f.test_ids}});
    }
    std::ofstream outf(dir / "folds.json", std::ios::binary);
    if (!outf) throw IoError("cannot write folds.json");
    outf << doc.dump(2) << "\n";

    ordered_json cfg{{"n_folds", n_folds}, {"n_buckets", n_buckets},
                     {"train", train},    {"val", val},
                     {"test", test},      {"rng_seed", seed}};
    write_manifest(dir, "split-folds", cfg, {difficulties_path});
    return 0;
}

// Run-config document: per-section defaults, overridden by explicit flags.
json load_run_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw SchemaError(path + ": invalid JSON: " + std::string(e.what()));
    }
}

void apply_fit_defaults(const json& cfg, irt::FitConfig& fc) {
    if (cfg.contains("rng_seed")) fc.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();
    if (!cfg.contains("fit")) return;
    const json& f = cfg.at("fit");
    fc.epochs = f.value("epochs", fc.epochs);
    fc.learning_rate = f.value("learning_rate", fc.learning_rate);
    fc.weight_decay = f.value("weight_decay", fc.weight_decay);
    fc.batch_size = f.value("batch_size", fc.batch_size);
    fc.holdout_fraction = f.value("holdout_fraction", fc.holdout_fraction);
    fc.rng_seed = f.value("rng_seed", fc.rng_seed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulation-based item difficulty calibration toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "run-config JSON with per-stage defaults");

    // fit-irt
    auto* fit_cmd = app.add_subcommand("fit-irt", "fit GPCM parameters to scored responses");
    std::string fit_items, fit_responses, fit_out;
    irt::FitConfig fit_config;
    fit_cmd->add_option("--items", fit_items, "items.jsonl")->required();
    fit_cmd->add_option("--responses", fit_responses, "responses.jsonl")->required();
    fit_cmd->add_option("--out", fit_out, "output directory")->required();
    auto* fit_epochs = fit_cmd->add_option("--epochs", fit_config.epochs);
    auto* fit_lr = fit_cmd->add_option("--learning-rate", fit_config.learning_rate);
    auto* fit_wd = fit_cmd->add_option("--weight-decay", fit_config.weight_decay);
    auto* fit_bs = fit_cmd->add_option("--batch-size", fit_config.batch_size);
    auto* fit_hf = fit_cmd->add_option("--holdout-fraction", fit_config.holdout_fraction);
    auto* fit_seed = fit_cmd->add_option("--seed", fit_config.rng_seed);

    // mine-pairs
    auto* mine_cmd = app.add_subcommand("mine-pairs", "mine IRT-likelihood preference pairs");
    std::string mine_responses, mine_items, mine_params, mine_template, mine_out;
    pairs::MiningConfig mine_config;
    mine_cmd->add_option("--responses", mine_responses, "responses.jsonl")->required();
    mine_cmd->add_option("--items", mine_items, "items.jsonl")->required();
    mine_cmd->add_option("--params", mine_params, "calibrated params.json")->required();
    mine_cmd->add_option("--template", mine_template, "prompt template file")->required();
    mine_cmd->add_option("--out", mine_out, "output directory")->required();
    auto* mine_eps = mine_cmd->add_option("--epsilon", mine_config.epsilon);
    auto* mine_m = mine_cmd->add_option("--m", mine_config.negatives_per_response);
    auto* mine_tf = mine_cmd->add_option("--train-fraction", mine_config.train_fraction);
    auto* mine_seed = mine_cmd->add_option("--seed", mine_config.rng_seed);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run the student-population simulation");
    std::string sim_items, sim_params, sim_backend = "synthetic", sim_cmdline, sim_url, sim_out;
    std::string sim_gen_tmpl, sim_score_tmpl;
    double sim_flip = 0.0;
    sim::SimulationPlan plan;
    sim_cmd->add_option("--items", sim_items, "items.jsonl (test items)")->required();
    sim_cmd->add_option("--params", sim_params, "calibrated params.json")->required();
    sim_cmd->add_option("--backend", sim_backend, "synthetic|subprocess|http");
    sim_cmd->add_option("--backend-cmd", sim_cmdline, "worker command (subprocess backend)");
    sim_cmd->add_option("--backend-url", sim_url, "base URL (http backend)");
    sim_cmd->add_option("--flip-prob", sim_flip, "synthetic scorer flip probability");
    sim_cmd->add_option("--out", sim_out, "output directory")->required();
    auto* sim_n = sim_cmd->add_option("--n", plan.population_size);
    auto* sim_bins = sim_cmd->add_option("--bins", plan.histogram_bins);
    auto* sim_seed = sim_cmd->add_option("--seed", plan.rng_seed);
    sim_cmd->add_option("--max-tokens", plan.decoding.max_tokens);
    sim_cmd->add_option("--temperature", plan.decoding.temperature);
    sim_cmd->add_option("--top-p", plan.decoding.top_p);
    sim_cmd->add_option("--generator-template", sim_gen_tmpl);
    sim_cmd->add_option("--scorer-template", sim_score_tmpl);

    // predict-difficulty
    auto* pred_cmd = app.add_subcommand("predict-difficulty", "refit and predict unseen items");
    std::string pred_train, pred_sim, pred_calibrated, pred_out;
    irt::FitConfig pred_config;
    pred_cmd->add_option("--train-responses", pred_train, "real train responses.jsonl")->required();
    pred_cmd->add_option("--sim-responses", pred_sim, "simulated responses.jsonl")->required();
    pred_cmd->add_option("--calibrated", pred_calibrated, "calibrated params.json")->required();
    pred_cmd->add_option("--out", pred_out, "output directory")->required();
    auto* pred_epochs = pred_cmd->add_option("--epochs", pred_config.epochs);
    auto* pred_lr = pred_cmd->add_option("--learning-rate", pred_config.learning_rate);
    auto* pred_seed = pred_cmd->add_option("--seed", pred_config.rng_seed);
    pred_config.holdout_fraction = 0.0;  // use every row when refitting
    auto* pred_hf = pred_cmd->add_option("--holdout-fraction", pred_config.holdout_fraction);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "compute the metric report");
    std::string eval_pred, eval_truth, eval_sim, eval_emb, eval_sim_emb, eval_out;
    eval_cmd->add_option("--pred", eval_pred, "predictions.csv")->required();
    eval_cmd->add_option("--truth", eval_truth, "item_id,difficulty CSV")->required();
    eval_cmd->add_option("--sim-responses", eval_sim, "simulated responses.jsonl");
    eval_cmd->add_option("--embeddings", eval_emb, "ground-truth embeddings.jsonl");
    eval_cmd->add_option("--sim-embeddings", eval_sim_emb, "simulated embeddings.jsonl");
    eval_cmd->add_option("--out", eval_out, "output directory")->required();

    // split-folds
    auto* fold_cmd = app.add_subcommand("split-folds", "difficulty-striped CV folds");
    std::string fold_difficulties, fold_out;
    int fold_n = 5, fold_buckets = 10, fold_train = 29, fold_val = 10, fold_test = 10;
    std::uint64_t fold_seed = 0;
    fold_cmd->add_option("--difficulties", fold_difficulties, "item_id,difficulty CSV")->required();
    fold_cmd->add_option("--out", fold_out, "output directory")->required();
    fold_cmd->add_option("--folds", fold_n);
    fold_cmd->add_option("--buckets", fold_buckets);
    fold_cmd->add_option("--train", fold_train);
    fold_cmd->add_option("--val", fold_val);
    fold_cmd->add_option("--test", fold_test);
    fold_cmd->add_option("--seed", fold_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        const json cfg = load_run_config(config_path);

        if (*fit_cmd) {
            irt::FitConfig fc;  // defaults from the fitting protocol
            apply_fit_defaults(cfg, fc);
            if (fit_epochs->count()) fc.epochs = fit_config.epochs;
            if (fit_lr->count()) fc.learning_rate = fit_config.learning_rate;
            if (fit_wd->count()) fc.weight_decay = fit_config.weight_decay;
            if (fit_bs->count()) fc.batch_size = fit_config.batch_size;
            if (fit_hf->count()) fc.holdout_fraction = fit_config.holdout_fraction;
            if (fit_seed->count()) fc.rng_seed = fit_config.rng_seed;
            return cmd_fit_irt(fit_items, fit_responses, fit_out, fc);
        }
        if (*mine_cmd) {
            pairs::MiningConfig mc;
            if (cfg.contains("rng_seed")) mc.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();
            if (cfg.contains("mining")) {
                const json& m = cfg.at("mining");
                mc.epsilon = m.value("epsilon", mc.epsilon);
                mc.negatives_per_response = m.value("m", mc.negatives_per_response);
                mc.train_fraction = m.value("train_fraction", mc.train_fraction);
                mc.rng_seed = m.value("rng_seed", mc.rng_seed);
            }
            if (mine_eps->count()) mc.epsilon = mine_config.epsilon;
            if (mine_m->count()) mc.negatives_per_response = mine_config.negatives_per_response;
            if (mine_tf->count()) mc.train_fraction = mine_config.train_fraction;
            if (mine_seed->count()) mc.rng_seed = mine_config.rng_seed;
            return cmd_mine_pairs(mine_responses, mine_items, mine_params, mine_template,
                                  mine_out, mc);
        }
        if (*sim_cmd) {
            sim::SimulationPlan sp;
            if (cfg.contains("rng_seed")) sp.rng_seed = cfg.at("rng_seed").get<std::uint64_t>();
            if (cfg.contains("simulation")) {
                const json& s = cfg.at("simulation");
                sp.population_size = s.value("population_size", sp.population_size);
                sp.histogram_bins = s.value("histogram_bins", sp.histogram_bins);
                sp.rng_seed = s.value("rng_seed", sp.rng_seed);
            }
            if (sim_n->count()) sp.population_size = plan.population_size;
            if (sim_bins->count()) sp.histogram_bins = plan.histogram_bins;
            if (sim_seed->count()) sp.rng_seed = plan.rng_seed;
            sp.decoding = plan.decoding;
            return cmd_simulate_impl(sim_items, sim_params, sim_backend, sim_cmdline, sim_url,
                                     sim_flip, sp, sim_out, sim_gen_tmpl, sim_score_tmpl);
        }
        if (*pred_cmd) {
            irt::FitConfig fc;
            fc.holdout_fraction = 0.0;
            apply_fit_defaults(cfg, fc);
            if (pred_epochs->count()) fc.epochs = pred_config.epochs;
            if (pred_lr->count()) fc.learning_rate = pred_config.learning_rate;
            if (pred_hf->count()) fc.holdout_fraction = pred_config.holdout_fraction;
            if (pred_seed->count()) fc.rng_seed = pred_config.rng_seed;
            return cmd_predict_difficulty(pred_train, pred_sim, pred_calibrated, pred_out, fc);
        }
        if (*eval_cmd)
            return cmd_evaluate(eval_pred, eval_truth, eval_sim, eval_emb, eval_sim_emb, eval_out);
        if (*fold_cmd)
            return cmd_split_folds(fold_difficulties, fold_out, fold_n, fold_buckets, fold_train,
                                   fold_val, fold_test, fold_seed);
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const LookupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const MetricError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
