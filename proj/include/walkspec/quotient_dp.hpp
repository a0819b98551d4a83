#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "walkspec/graph_models.hpp"
#include "walkspec/kernel.hpp"

namespace walkspec {

// A non-negative number held as its natural log, with an explicit zero flag.
struct LogValue {
    double log = 0.0;
    bool zero = true;

    static LogValue of(double value);
    double value() const;
};

struct SeriesTable {
    std::size_t n_max = 0;
    std::vector<LogValue> log_p;  // p^(n)(o,o), n = 0..n_max
    std::vector<LogValue> log_f;  // f^(n)(o,o), n = 0..n_max; empty when not computed

    double p(std::size_t n) const { return log_p.at(n).value(); }
    double f(std::size_t n) const { return log_f.at(n).value(); }
    bool has_f() const { return !log_f.empty(); }
};

struct DpOptions {
    // Keep every level reachable from the origin instead of only those that can still
    // return by n_max. Needed to observe mass conservation; slower.
    bool full_support = false;
};

struct DpDiagnostics {
    // max over steps of |total mass - 1|; only meaningful with full_support.
    double max_mass_defect = 0.0;
};

SeriesTable p_series(const QuotientChain& chain, std::size_t n_max, const DpOptions& options = {},
                     DpDiagnostics* diagnostics = nullptr);
SeriesTable f_series(const QuotientChain& chain, std::size_t n_max);
// Both p and f parts.
SeriesTable series(const QuotientChain& chain, std::size_t n_max);

// Max over 1 <= n <= n_max of |p^(n) - sum_k f^(k) p^(n-k)| / p^(n); terms are summed in
// log space. When p^(n) = 0 the residual is 0 if every term vanishes, 1 otherwise.
double renewal_check(const SeriesTable& table);

struct RhoEstimate {
    double rho = 0.0;
    double error = 0.0;      // gap between the estimates at n_max and n_max/2
    double slope_rho = 0.0;  // exp of the fitted slope of log p^(n) + 1.5 log n over the top half
    double residual = 0.0;   // rms residual of that linear fit
    std::size_t n_used = 0;
};

// Step-(2 period) ratio estimate on the even subsequence, corrected for the n^{-3/2} factor.
// Throws InsufficientData when n_max < 200 or the tail has zeros.
RhoEstimate rho_from_series(const SeriesTable& table, int period = 1);

// (P f_n, f_n) / (f_n, f_n) in L^2(mu) for f(x) = g(|x|) restricted to B(n), with
// g(k) = (1 + k (d-1-lambda)/(d-1+lambda)) ((d-1)/lambda)^{-k/2}, d the regular degree.
// Computed by aggregating over (level, type) classes. lambda in (0, d-1).
double rayleigh_quotient(const GraphModel& model, double lambda, std::size_t n);

// rho_{T_d}(lambda) - (d-1) M_n g(n)^2 lambda^{-n} / (f_n, f_n).
double rayleigh_lower_bound(const GraphModel& model, double lambda, std::size_t n);

// Same quotient evaluated vertex by vertex on enumerate_ball(n). Throws BallTooLarge.
double rayleigh_quotient_on_ball(const GraphModel& model, double lambda, std::size_t n,
                                 std::size_t cap = kDefaultBallCap);

// Columns n, p_n, f_n, log_p_n, log_f_n. Zero entries print log as -inf.
void write_series_csv(std::ostream& out, const SeriesTable& table);

}  // namespace walkspec
