#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "walkspec/graph_models.hpp"
#include "walkspec/quotient_dp.hpp"

namespace walkspec::asymptotics {

// Fit of log p^(2k) = 2k log rho - alpha log k + log c over the even entries n = 2k of a
// window. The half index k keeps the constant comparable with p^(2n) ~ C rho^{2n} n^{-3/2}.
struct TailFit {
    double rho_hat = 0.0;
    double exponent_hat = 0.0;
    double constant_hat = 0.0;
    std::size_t n_lo = 0;
    std::size_t n_hi = 0;
    std::size_t points = 0;
    double residual_rms = 0.0;
};

// Throws InsufficientData when the window leaves the table, holds fewer than 50 even
// points, or contains zeros.
TailFit fit_tail(const SeriesTable& table, std::size_t n_lo, std::size_t n_hi);
// Default window [n_max/2, n_max].
TailFit fit_tail(const SeriesTable& table);
// Two-parameter fit (alpha, c) with rho held fixed.
TailFit fit_tail_fixed_rho(const SeriesTable& table, std::size_t n_lo, std::size_t n_hi, double rho);

// p^(2n)(o,o) sqrt(pi n) on T_d at lambda = d - 1.
double critical_tree_ratio(int d, std::size_t n);

struct FAsymptotics {
    double max_deviation = 0.0;             // max |ratio - 1|
    double limit_ratio = 0.0;               // (d-1+lambda)/(4(d-1))
    double max_deviation_from_limit = 0.0;  // max |ratio / limit_ratio - 1|
};

// ratio(n) = f^(2n) / (pi^{-1/2} rho^{2n} n^{-3/2}) over n in [n_max/2, n_max], with
// rho = 2 sqrt((d-1) lambda)/(d-1+lambda). lambda > 0.
FAsymptotics verify_f_asymptotics(int d, double lambda, std::size_t n_max);

struct SweepOptions {
    bool closed = true;
    bool solver = true;
    std::size_t n_max = 0;     // 0 skips the DP estimate
    std::size_t steps = 0;     // 0 skips Monte Carlo
    std::size_t replicas = 0;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
};

struct SweepRecord {
    std::string model;
    double lambda = 0.0;
    std::optional<double> rho_closed;
    std::optional<double> rho_solver;
    std::optional<double> rho_dp;
    std::optional<double> gap_closed_solver;
    std::optional<double> gap_closed_dp;
    std::optional<double> gap_solver_dp;
    std::optional<double> speed_closed;
    std::optional<double> speed_mc;
    std::optional<double> speed_se;
    std::optional<TailFit> fit;
    std::size_t n_max = 0;
    std::size_t steps = 0;
    std::size_t replicas = 0;
    std::uint64_t seed = 0;
    std::string rng_id;
    std::optional<double> wall_time_ms;

    // First non-null of closed, solver, dp.
    std::optional<double> rho() const;
};

// One record; sources outside their domain are left null.
SweepRecord sweep_point(const GraphModel& model, double lambda, const SweepOptions& options);

// Records in grid order; points are evaluated on options.jobs threads.
std::vector<SweepRecord> continuity_sweep(const GraphModel& model, const std::vector<double>& grid,
                                          const SweepOptions& options = {});

// lo, lo + step, ... up to hi (inclusive within half a step).
std::vector<double> grid(double lo, double hi, double step);
std::vector<double> linspace(double lo, double hi, std::size_t points);

struct SweepChecks {
    double max_jump = 0.0;
    double max_jump_at = 0.0;  // left grid point of the largest jump
    double lipschitz = 0.0;    // max jump / spacing
    bool increasing = true;
};

SweepChecks check_sweep(const std::vector<SweepRecord>& records);

// Upper bound delta^{-1} rho_1 sqrt(lambda) for T_d with delta = (d-1)/d.
double tree_small_bias_bound(int d, double lambda);

}  // namespace walkspec::asymptotics
