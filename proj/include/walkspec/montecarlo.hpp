#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "walkspec/graph_models.hpp"

namespace walkspec::mc {

inline constexpr std::string_view kRngId = "mt19937_64";

struct SimConfig {
    GraphModel model = GraphModel::free_product({2, 1});
    double lambda = 1.0;
    std::size_t steps = 100000;
    std::size_t replicas = 200;
    std::uint64_t seed = 1;
    std::size_t burn_in = 0;
    // Worker threads; 0 means std::thread::hardware_concurrency().
    unsigned jobs = 0;
    // Admit the line K_2 * K_2 where the two-factor estimators otherwise refuse it.
    bool allow_degenerate = false;
};

// Throws InvalidArgument unless steps >= 1, replicas >= 1 and burn_in <= steps.
void validate(const SimConfig& config);

std::uint64_t splitmix64(std::uint64_t x);
// splitmix64(master + (replica + 1) * 0x9E3779B97F4A7C15).
std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica);

struct PathSummary {
    std::size_t final_level = 0;
    // occupation[i] counts k in [burn_in, steps] with type(X_k) = i; index 0 is unused.
    std::vector<std::uint64_t> occupation;
    std::uint64_t origin_visits = 0;
    // excursions[i][j]: completed maximal runs of type i with length j + 1.
    std::vector<std::vector<std::uint64_t>> excursions;
    // Set when a marked branch was requested: whether X_steps lies in it.
    std::optional<bool> ended_in_branch;
    std::optional<bool> midway_in_branch;  // same at time steps / 2

    friend bool operator==(const PathSummary&, const PathSummary&) = default;
};

// Walk on word addresses: down pops the last letter, lateral rewrites it, up pushes one.
class Walker {
public:
    Walker(const GraphModel& model, double lambda, std::uint64_t seed, VertexAddr start = {});

    // Returns the level increment of the step.
    int step();
    const VertexAddr& position() const { return position_; }

private:
    struct Moves {
        double down = 0.0;
        double lateral = 0.0;  // per neighbor
        double up = 0.0;       // per neighbor
        int laterals = 0;
        std::vector<Letter> children;
    };

    double uniform();
    std::size_t pick(double u, double each, std::size_t count) const;

    GraphModel model_;
    std::mt19937_64 rng_;
    VertexAddr position_;
    std::vector<Moves> moves_;  // index 0 is the root
};

// One replica. The branch, if given, is the set of words whose first letter is branch_root.
PathSummary simulate_path(const SimConfig& config, std::uint64_t replica = 0, const VertexAddr& start = {},
                          std::optional<Letter> branch_root = std::nullopt);

// All replicas, run on config.jobs threads; result[i] is replica i regardless of scheduling.
std::vector<PathSummary> run_replicas(const SimConfig& config);

struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

struct Summary {
    Estimate speed;
    std::vector<Estimate> occupation;  // index = type, 0 unused
    Estimate origin;
};

// Speed and occupation from one set of replica summaries, so they describe the same paths.
Summary summarize(const SimConfig& config, const std::vector<PathSummary>& paths);

// Two-factor free products with lambda <= lambda_c; HypothesisViolated otherwise.
Estimate estimate_speed(const SimConfig& config);
Summary occupation_fractions(const SimConfig& config);

struct ExcursionFit {
    int type = 0;
    double p = 0.0;  // lateral probability (m_i - 1)/(m - 1 + lambda)
    std::uint64_t excursions = 0;
    double mean_extension = 0.0;
    std::vector<std::uint64_t> histogram;
    double chi_square = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pools completed runs over replicas and tests them against Geometric(p_i) on {0, 1, ...}.
std::vector<ExcursionFit> excursion_stats(const SimConfig& config);
std::vector<ExcursionFit> excursion_stats(const SimConfig& config, const std::vector<PathSummary>& paths);

// Chi-square goodness of fit of a histogram on {0, 1, ...} against Geometric(p). Bins with
// expected count below 5 are merged into the tail.
ExcursionFit geometric_fit(const std::vector<std::uint64_t>& histogram, double p);

struct HarmonicEstimate {
    VertexAddr start;
    double f_hat = 0.0;
    double se = 0.0;
    double f_hat_half = 0.0;  // same paths classified at steps / 2
};

struct HarmonicSplit {
    std::vector<HarmonicEstimate> estimates;
    double z_score = 0.0;         // (f(starts[0]) - f(starts[1])) / combined SE
    double horizon_shift = 0.0;   // max |f_hat - f_hat_half| / se over starts
};

// Probability of ending in the branch above the type-2 level-1 vertex (2,1), classified by
// the position at time config.steps. config.replicas paths per start. Throws Inconclusive
// when z_score < 3 and throw_if_inconclusive is set.
HarmonicSplit harmonic_split_estimate(const SimConfig& config, const std::vector<VertexAddr>& starts,
                                      bool throw_if_inconclusive = true);

}  // namespace walkspec::mc
