#include "psychocal/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>
#include <thread>

#include "psychocal/gpcm.hpp"

namespace psychocal::sim {
namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    return x;
}

double canonical(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

int sample_category(const std::vector<double>& probs, std::mt19937_64& rng) {
    const double u = canonical(rng);
    double acc = 0.0;
    for (std::size_t y = 0; y < probs.size(); ++y) {
        acc += probs[y];
        if (u < acc) return static_cast<int>(y);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

void SimulationPlan::validate() const {
    if (population_size < 1) throw DomainError("SimulationPlan: population_size must be >= 1");
    if (histogram_bins < 1) throw DomainError("SimulationPlan: histogram_bins must be >= 1");
    if (max_attempts < 1) throw DomainError("SimulationPlan: max_attempts must be >= 1");
}

std::vector<double> sample_population(const std::vector<double>& train_thetas, int n, int bins,
                                      std::uint64_t rng_seed) {
    if (train_thetas.empty()) throw DomainError("sample_population: empty train abilities");
    if (n < 1 || bins < 1) throw DomainError("sample_population: n and bins must be >= 1");
    const auto [lo_it, hi_it] = std::minmax_element(train_thetas.begin(), train_thetas.end());
    const double lo = *lo_it, hi = *hi_it;
    const double width = (hi - lo) / bins;

    std::vector<std::size_t> counts(bins, 0);
    for (double t : train_thetas) {
        int b = width > 0.0 ? static_cast<int>((t - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);  // right-closed last bin
        ++counts[b];
    }
    std::vector<double> cumulative(bins);
    double acc = 0.0;
    for (int b = 0; b < bins; ++b) {
        acc += static_cast<double>(counts[b]);
        cumulative[b] = acc;
    }

    std::mt19937_64 rng(rng_seed);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double u = canonical(rng) * acc;
        const int b = static_cast<int>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        const int bucket = std::min(b, bins - 1);
        const double left = lo + bucket * width;
        out.push_back(width > 0.0 ? left + canonical(rng) * width : lo);
    }
    return out;
}

std::string rounded_theta_label(double theta) {
    if (!is_finite(theta)) throw DomainError("rounded_theta_label: non-finite theta");
    double r = std::nearbyint(theta * 10.0) / 10.0;  // half-to-even
    if (r == 0.0) r = 0.0;                           // normalize -0.0
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", r);
    return buf;
}

std::string assign_student_id(double theta) { return "sim_" + rounded_theta_label(theta); }

std::vector<ScoredResponse> SimulationResult::responses() const {
    std::vector<ScoredResponse> out;
    out.reserve(records.size());
    for (const SimRecord& r : records)
        out.push_back(ScoredResponse{r.item_id, r.student_id, r.text, r.score});
    return out;
}

SimulationResult run_simulation(const std::vector<Item>& items,
                                const std::vector<double>& train_thetas,
                                const SimulationPlan& plan, GeneratorBackend& generator,
                                ScorerBackend& scorer) {
    plan.validate();
    for (const Item& item : items) {
        if (item.question.empty())
            throw DomainError("run_simulation: item '" + item.item_id + "' has empty question");
        if (item.num_categories < 2)
            throw DomainError("run_simulation: item '" + item.item_id + "' needs >= 2 categories");
    }

    SimulationResult result;
    result.population =
        sample_population(train_thetas, plan.population_size, plan.histogram_bins, plan.rng_seed);

    for (const Item& item : items) {
        std::size_t item_ok = 0;
        for (int ai = 0; ai < static_cast<int>(result.population.size()); ++ai) {
            const double theta = result.population[ai];
            const std::uint64_t cell_seed =
                mix(mix(plan.rng_seed, fnv1a(item.item_id)), static_cast<std::uint64_t>(ai));
            bool ok = false;
            SimRecord rec{item.item_id, ai, theta, assign_student_id(theta), "", 0};
            for (int attempt = 0; attempt < plan.max_attempts && !ok; ++attempt) {
                if (attempt > 0)
                    std::this_thread::sleep_for(std::chrono::milliseconds(50 << (attempt - 1)));
                try {
                    rec.text = generator.generate(item, theta, plan.decoding, cell_seed);
                    rec.score = scorer.score(item, rec.text, cell_seed);
                    if (rec.score < 0 || rec.score >= item.num_categories)
                        throw BackendError("scorer returned out-of-range score for item '" +
                                           item.item_id + "'");
                    ok = true;
                } catch (const BackendError&) {
                    // retry; counted as failed once attempts are spent
                }
            }
            if (ok) {
                result.records.push_back(std::move(rec));
                ++item_ok;
            } else {
                ++result.failed_cells;
            }
        }
        if (item_ok == 0)
            throw BackendError("run_simulation: every cell failed for item '" + item.item_id + "'");
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const SimRecord& a, const SimRecord& b) {
                  return a.item_id != b.item_id ? a.item_id < b.item_id
                                                : a.ability_index < b.ability_index;
              });
    return result;
}

int noisy_score(int base, int num_categories, double flip_prob, std::mt19937_64& rng) {
    if (flip_prob < 0.0 || flip_prob > 1.0)
        throw DomainError("noisy_score: flip_prob must be in [0,1]");
    if (canonical(rng) >= flip_prob) return base;
    const bool can_down = base > 0;
    const bool can_up = base < num_categories - 1;
    if (can_down && can_up) return canonical(rng) < 0.5 ? base - 1 : base + 1;
    if (can_up) return base + 1;
    if (can_down) return base - 1;
    return base;  // single-category edge, nowhere to move
}

SyntheticOracleBackend::SyntheticOracleBackend(std::map<std::string, ItemParams> truth,
                                               double score_flip_prob, int embedding_dim,
                                               bool ignore_theta)
    : truth_(std::move(truth)),
      flip_prob_(score_flip_prob),
      embedding_dim_(embedding_dim),
      ignore_theta_(ignore_theta) {}

std::string SyntheticOracleBackend::generate(const Item& item, double theta,
                                             const Decoding& /*decoding*/,
                                             std::uint64_t cell_seed) {
    auto it = truth_.find(item.item_id);
    if (it == truth_.end())
        throw BackendError("synthetic oracle: no truth params for item '" + item.item_id + "'");
    if (item.item_id.find('|') != std::string::npos)
        throw BackendError("synthetic oracle: item id may not contain '|'");

    const double effective_theta = ignore_theta_ ? 0.0 : theta;
    const std::vector<double> probs = irt::score_probabilities(effective_theta, it->second);
    std::mt19937_64 rng(cell_seed);
    const int y = sample_category(probs, rng);

    // Pseudo-embedding seeded by (item, theta, y): stable per sample.
    std::uint64_t theta_bits;
    static_assert(sizeof(theta_bits) == sizeof(theta));
    std::memcpy(&theta_bits, &theta, sizeof(theta));
    std::mt19937_64 feat_rng(mix(mix(fnv1a(item.item_id), theta_bits), static_cast<std::uint64_t>(y)));

    std::ostringstream os;
    os << "SYNTH|item=" << item.item_id << "|y=" << y << "|f=";
    for (int k = 0; k < embedding_dim_; ++k) {
        // Score-dependent cluster center plus noise, so scores separate
        // in embedding space the way distinct response styles would.
        const double v = static_cast<double>(y) + (canonical(feat_rng) - 0.5);
        if (k) os << ',';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        os << buf;
    }
    return os.str();
}

int SyntheticOracleBackend::parse_score(const std::string& envelope) {
    if (envelope.rfind("SYNTH|", 0) != 0)
        throw BackendError("synthetic oracle: malformed envelope");
    const std::size_t y_pos = envelope.find("|y=");
    if (y_pos == std::string::npos) throw BackendError("synthetic oracle: missing score field");
    const std::size_t end = envelope.find('|', y_pos + 3);
    try {
        return std::stoi(envelope.substr(y_pos + 3, end - (y_pos + 3)));
    } catch (const std::exception&) {
        throw BackendError("synthetic oracle: unparseable score field");
    }
}

std::vector<double> SyntheticOracleBackend::parse_embedding(const std::string& envelope) {
    const std::size_t f_pos = envelope.find("|f=");
    if (envelope.rfind("SYNTH|", 0) != 0 || f_pos == std::string::npos)
        throw BackendError("synthetic oracle: malformed envelope");
    std::vector<double> out;
    std::istringstream in(envelope.substr(f_pos + 3));
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

int SyntheticOracleBackend::score(const Item& item, const std::string& response_text,
                                  std::uint64_t cell_seed) {
    const int y = parse_score(response_text);
    if (flip_prob_ <= 0.0) return y;
    std::mt19937_64 rng(mix(cell_seed, 0x5c0e1ULL));
    return noisy_score(y, item.num_categories, flip_prob_, rng);
}

}  // namespace psychocal::sim
