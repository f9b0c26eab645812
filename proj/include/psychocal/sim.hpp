#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "psychocal/types.hpp"

namespace psychocal::sim {

struct Decoding {
    int max_tokens = 500;
    double temperature = 0.7;
    double top_p = 0.95;
};

struct SimulationPlan {
    int population_size = 1000;
    int histogram_bins = 50;
    std::uint64_t rng_seed = 0;
    Decoding decoding;
    int max_attempts = 3;  // per backend call, exponential backoff between

    void validate() const;
};

// Backends receive a per-(item, ability-index) substream seed so stochastic
// backends stay deterministic under any call order. External backends are
// free to ignore it.
class GeneratorBackend {
  public:
    virtual ~GeneratorBackend() = default;
    virtual std::string generate(const Item& item, double theta, const Decoding& decoding,
                                 std::uint64_t cell_seed) = 0;
};

class ScorerBackend {
  public:
    virtual ~ScorerBackend() = default;
    virtual int score(const Item& item, const std::string& response_text,
                      std::uint64_t cell_seed) = 0;
};

// Equal-width histogram over [min, max] of the train abilities; draws n
// bucket indices proportional to counts, then uniforms within the bucket.
std::vector<double> sample_population(const std::vector<double>& train_thetas, int n, int bins,
                                      std::uint64_t rng_seed);

// "sim_" + ability rounded half-to-even at 1 decimal; "-0.0" normalized.
std::string assign_student_id(double theta);

// Shared rounding rule: "<theta rounded to 1 decimal>" as text.
std::string rounded_theta_label(double theta);

struct SimRecord {
    std::string item_id;
    int ability_index = 0;
    double theta = 0.0;
    std::string student_id;
    std::string text;
    int score = 0;
};

struct SimulationResult {
    std::vector<double> population;  // sampled abilities, index = ability_index
    std::vector<SimRecord> records;  // sorted by (item_id, ability_index)
    std::size_t failed_cells = 0;

    std::vector<ScoredResponse> responses() const;
};

// One generated + scored response per (ability, item) cell. Cells that keep
// failing after the attempt budget are excluded and counted; an item with
// no surviving cells aborts the run.
SimulationResult run_simulation(const std::vector<Item>& items,
                                const std::vector<double>& train_thetas,
                                const SimulationPlan& plan, GeneratorBackend& generator,
                                ScorerBackend& scorer);

// With probability flip_prob moves the score one category up or down,
// clamped to {0..C-1}; at a boundary the only legal direction is taken.
int noisy_score(int base, int num_categories, double flip_prob, std::mt19937_64& rng);

// Test-harness backend: samples y ~ GPCM(theta, truth) and emits the
// envelope "SYNTH|item=<id>|y=<y>|f=<comma-separated pseudo-embedding>".
// The scorer parses y back exactly. The pseudo-embedding is deterministic
// in (item, theta, y) and doubles as the embedding vector for metrics.
class SyntheticOracleBackend : public GeneratorBackend, public ScorerBackend {
  public:
    explicit SyntheticOracleBackend(std::map<std::string, ItemParams> truth,
                                    double score_flip_prob = 0.0, int embedding_dim = 8,
                                    bool ignore_theta = false);

    std::string generate(const Item& item, double theta, const Decoding& decoding,
                         std::uint64_t cell_seed) override;
    int score(const Item& item, const std::string& response_text,
              std::uint64_t cell_seed) override;

    // Parses the feature vector back out of an envelope.
    static std::vector<double> parse_embedding(const std::string& envelope);
    static int parse_score(const std::string& envelope);

  private:
    std::map<std::string, ItemParams> truth_;
    double flip_prob_;
    int embedding_dim_;
    bool ignore_theta_;  // generator conditions on theta = 0 instead
};

}  // namespace psychocal::sim
