#include "walkspec/asymptotics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/fixed_point.hpp"
#include "walkspec/kernel.hpp"
#include "walkspec/montecarlo.hpp"

namespace walkspec::asymptotics {

namespace {

constexpr std::size_t kMinPoints = 50;

struct Window {
    std::vector<double> k;
    std::vector<double> y;
};

Window even_window(const SeriesTable& table, std::size_t n_lo, std::size_t n_hi) {
    if (n_hi > table.n_max || n_lo > n_hi || table.log_p.size() != table.n_max + 1) {
        throw Error(ErrorKind::InsufficientData, "window [" + std::to_string(n_lo) + ", " + std::to_string(n_hi) +
                                                     "] is not inside the table (n_max=" +
                                                     std::to_string(table.n_max) + ")");
    }
    Window w;
    for (std::size_t n = n_lo + n_lo % 2; n <= n_hi; n += 2) {
        if (n == 0) continue;
        const LogValue& v = table.log_p[n];
        if (v.zero) throw Error(ErrorKind::InsufficientData, "zero entry at n=" + std::to_string(n));
        w.k.push_back(static_cast<double>(n / 2));
        w.y.push_back(v.log);
    }
    if (w.k.size() < kMinPoints) {
        throw Error(ErrorKind::InsufficientData,
                    "window holds " + std::to_string(w.k.size()) + " even points, need " + std::to_string(kMinPoints));
    }
    return w;
}

double rms(const Eigen::VectorXd& r) { return std::sqrt(r.squaredNorm() / static_cast<double>(r.size())); }

double symmetric_rho(int d, double lambda) { return 2.0 * std::sqrt((d - 1) * lambda) / (d - 1 + lambda); }

template <class Task>
void run_indexed(std::size_t count, unsigned jobs, Task&& task) {
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    }
    for (auto& t : pool) t.join();
}

template <class F>
std::optional<double> attempt(F&& f) {
    try {
        return f();
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<double> gap(const std::optional<double>& a, const std::optional<double>& b) {
    if (a && b) return std::abs(*a - *b);
    return std::nullopt;
}

}  // namespace

TailFit fit_tail(const SeriesTable& table, std::size_t n_lo, std::size_t n_hi) {
    const Window w = even_window(table, n_lo, n_hi);
    const auto rows = static_cast<Eigen::Index>(w.k.size());
    Eigen::MatrixXd a(rows, 3);
    Eigen::VectorXd y(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double k = w.k[static_cast<std::size_t>(i)];
        a(i, 0) = 2.0 * k;
        a(i, 1) = -std::log(k);
        a(i, 2) = 1.0;
        y(i) = w.y[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);
    TailFit fit;
    fit.rho_hat = std::exp(beta(0));
    fit.exponent_hat = beta(1);
    fit.constant_hat = std::exp(beta(2));
    fit.n_lo = n_lo;
    fit.n_hi = n_hi;
    fit.points = w.k.size();
    fit.residual_rms = rms(y - a * beta);
    return fit;
}

TailFit fit_tail(const SeriesTable& table) { return fit_tail(table, table.n_max / 2, table.n_max); }

TailFit fit_tail_fixed_rho(const SeriesTable& table, std::size_t n_lo, std::size_t n_hi, double rho) {
    if (!(rho > 0.0)) throw Error(ErrorKind::DomainError, "rho must be > 0");
    const Window w = even_window(table, n_lo, n_hi);
    const auto rows = static_cast<Eigen::Index>(w.k.size());
    Eigen::MatrixXd a(rows, 2);
    Eigen::VectorXd y(rows);
    const double log_rho = std::log(rho);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double k = w.k[static_cast<std::size_t>(i)];
        a(i, 0) = -std::log(k);
        a(i, 1) = 1.0;
        y(i) = w.y[static_cast<std::size_t>(i)] - 2.0 * k * log_rho;
    }
    const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(y);
    TailFit fit;
    fit.rho_hat = rho;
    fit.exponent_hat = beta(0);
    fit.constant_hat = std::exp(beta(1));
    fit.n_lo = n_lo;
    fit.n_hi = n_hi;
    fit.points = w.k.size();
    fit.residual_rms = rms(y - a * beta);
    return fit;
}

double critical_tree_ratio(int d, std::size_t n) {
    const QuotientChain chain(GraphModel::tree(d), d - 1.0);
    const SeriesTable table = p_series(chain, 2 * n);
    return table.p(2 * n) * std::sqrt(std::numbers::pi * static_cast<double>(n));
}

FAsymptotics verify_f_asymptotics(int d, double lambda, std::size_t n_max) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::DomainError, "verify_f_asymptotics needs lambda > 0");
    if (n_max < 2) throw Error(ErrorKind::InsufficientData, "n_max must be >= 2");
    FAsymptotics out;
    out.limit_ratio = closed_form::f2n_tree_limit_ratio(d, lambda);
    const double log_rho = std::log(symmetric_rho(d, lambda));
    const double log_norm = -0.5 * std::log(std::numbers::pi);
    for (std::size_t n = std::max<std::size_t>(1, n_max / 2); n <= n_max; ++n) {
        const double nn = static_cast<double>(n);
        const double log_model = log_norm + 2.0 * nn * log_rho - 1.5 * std::log(nn);
        const double ratio = std::exp(closed_form::log_f2n_tree(d, lambda, static_cast<long>(n)) - log_model);
        out.max_deviation = std::max(out.max_deviation, std::abs(ratio - 1.0));
        out.max_deviation_from_limit = std::max(out.max_deviation_from_limit, std::abs(ratio / out.limit_ratio - 1.0));
    }
    return out;
}

std::optional<double> SweepRecord::rho() const {
    if (rho_closed) return rho_closed;
    if (rho_solver) return rho_solver;
    return rho_dp;
}

SweepRecord sweep_point(const GraphModel& model, double lambda, const SweepOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    SweepRecord rec;
    rec.model = model.to_string();
    rec.lambda = lambda;
    rec.n_max = options.n_max;
    rec.steps = options.steps;
    rec.replicas = options.replicas;
    rec.seed = options.seed;
    rec.rng_id = std::string(mc::kRngId);

    const bool two = model.is_two_factor() && !model.is_degenerate_line();
    if (options.closed) {
        if (model.is_tree()) {
            rec.rho_closed = attempt([&] { return closed_form::rho_tree(model.tree_degree(), lambda); });
        } else if (two) {
            const auto& ms = model.ms();
            rec.rho_closed = attempt([&] { return closed_form::rho_two_complete(ms[0], ms[1], lambda); });
            rec.speed_closed = attempt([&] { return closed_form::speed_two_complete(ms[0], ms[1], lambda); });
        }
    }
    if (options.solver) {
        // T_d is the free product of d copies of K_2.
        const std::vector<int> ms = model.is_tree() ? std::vector<int>(static_cast<std::size_t>(model.tree_degree()), 1)
                                                    : model.ms();
        rec.rho_solver = attempt([&] { return fixed_point::rho_free_product(ms, lambda); });
    }
    if (options.n_max > 0 && (model.is_tree() || model.is_two_factor())) {
        try {
            const SeriesTable table = p_series(QuotientChain(model, lambda), options.n_max);
            rec.rho_dp = attempt([&] { return rho_from_series(table).rho; });
            try {
                rec.fit = fit_tail(table);
            } catch (const Error&) {
            }
        } catch (const Error&) {
        }
    }
    if (options.steps > 0 && options.replicas > 0 && two) {
        mc::SimConfig cfg;
        cfg.model = model;
        cfg.lambda = lambda;
        cfg.steps = options.steps;
        cfg.replicas = options.replicas;
        cfg.seed = options.seed;
        cfg.jobs = 1;
        try {
            const mc::Estimate e = mc::estimate_speed(cfg);
            rec.speed_mc = e.mean;
            rec.speed_se = e.se;
        } catch (const Error&) {
        }
    }
    rec.gap_closed_solver = gap(rec.rho_closed, rec.rho_solver);
    rec.gap_closed_dp = gap(rec.rho_closed, rec.rho_dp);
    rec.gap_solver_dp = gap(rec.rho_solver, rec.rho_dp);
    rec.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<SweepRecord> continuity_sweep(const GraphModel& model, const std::vector<double>& grid,
                                          const SweepOptions& options) {
    validate_model(model);
    std::vector<SweepRecord> out(grid.size());
    run_indexed(grid.size(), options.jobs, [&](std::size_t i) { out[i] = sweep_point(model, grid[i], options); });
    return out;
}

std::vector<double> grid(double lo, double hi, double step) {
    if (!(step > 0.0) || hi < lo) throw Error(ErrorKind::InvalidArgument, "grid needs step > 0 and lo <= hi");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        if (x > hi + 0.5 * step) break;
        out.push_back(std::min(x, hi));
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    if (points < 2) throw Error(ErrorKind::InvalidArgument, "linspace needs at least 2 points");
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return out;
}

SweepChecks check_sweep(const std::vector<SweepRecord>& records) {
    SweepChecks c;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto a = records[i - 1].rho();
        const auto b = records[i].rho();
        if (!a || !b) continue;
        const double jump = std::abs(*b - *a);
        const double spacing = records[i].lambda - records[i - 1].lambda;
        if (jump > c.max_jump) {
            c.max_jump = jump;
            c.max_jump_at = records[i - 1].lambda;
        }
        if (spacing > 0.0) c.lipschitz = std::max(c.lipschitz, jump / spacing);
        if (!(*b > *a)) c.increasing = false;
    }
    return c;
}

double tree_small_bias_bound(int d, double lambda) {
    const double delta = (d - 1.0) / d;
    return closed_form::rho_tree(d, 1.0) * std::sqrt(lambda) / delta;
}

}  // namespace walkspec::asymptotics
