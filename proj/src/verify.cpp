#include "walkspec/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "walkspec/asymptotics.hpp"
#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/fixed_point.hpp"
#include "walkspec/format.hpp"
#include "walkspec/montecarlo.hpp"
#include "walkspec/oracle.hpp"
#include "walkspec/quotient_dp.hpp"

namespace walkspec::verify {

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) passed = false;
        if (detail.tellp() > 0) detail << "; ";
        detail << (ok ? "" : "FAILED ") << what;
    }
};

std::string fmt(double x) { return format_double(x); }

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

mc::SimConfig speed_config(const VerifyOptions& options) {
    mc::SimConfig cfg;
    cfg.model = GraphModel::free_product({2, 1});
    cfg.lambda = 1.0;
    cfg.steps = 100000;
    cfg.replicas = 200;
    cfg.seed = options.seed;
    cfg.jobs = options.jobs;
    return cfg;
}

void tree_rho(Outcome& out, const VerifyOptions&) {
    const auto start = Clock::now();
    const SeriesTable table = p_series(QuotientChain(GraphModel::tree(4), 1.0), 4000);
    const RhoEstimate est = rho_from_series(table);
    const double elapsed = seconds_since(start);
    const double target = std::sqrt(3.0) / 2.0;
    out.require(std::abs(est.rho - target) <= 1e-3,
                "rho_hat=" + fmt(est.rho) + " vs " + fmt(target) + " (|diff|=" + fmt(std::abs(est.rho - target)) + ")");
    out.require(elapsed < 10.0, "runtime " + fmt(elapsed) + " s < 10 s");
}

void catalan(Outcome& out, const VerifyOptions&) {
    double worst = 0.0;
    for (int d : {3, 4, 5}) {
        for (double lambda : {0.5, 1.0, 2.0}) {
            const SeriesTable table = f_series(QuotientChain(GraphModel::tree(d), lambda), 400);
            for (long n = 1; n <= 200; ++n) {
                worst = std::max(worst, std::abs(table.f(static_cast<std::size_t>(2 * n)) -
                                                 closed_form::f2n_tree(d, lambda, n)));
                worst = std::max(worst, table.f(static_cast<std::size_t>(2 * n - 1)));
            }
        }
    }
    out.require(worst <= 1e-12, "max |f_dp - f_catalan| = " + fmt(worst));
}

void critical_tree(Outcome& out, const VerifyOptions&) {
    const double ratio = asymptotics::critical_tree_ratio(4, 10000);
    out.require(ratio >= 0.99 && ratio <= 1.01, "p^(2n) sqrt(pi n) at n=10^4 is " + fmt(ratio));
}

void tree_constant(Outcome& out, const VerifyOptions&) {
    const SeriesTable table = p_series(QuotientChain(GraphModel::tree(4), 1.0), 4000);
    const auto fit = asymptotics::fit_tail(table, 2000, 4000);
    const double target = closed_form::p2n_tree_asymptotic_constant(4, 1.0);
    const double rel = std::abs(fit.constant_hat / target - 1.0);
    out.require(rel <= 0.05, "constant_hat=" + fmt(fit.constant_hat) + " vs " + fmt(target) +
                                 " (rel " + fmt(rel) + "), exponent_hat=" + fmt(fit.exponent_hat) +
                                 ", singularity constant " + fmt(closed_form::p2n_tree_singularity_constant(4, 1.0)));
}

void two_complete_rho(Outcome& out, const VerifyOptions&) {
    const double lc = std::sqrt(2.0);
    double worst = 0.0;
    double worst_at = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double lambda = lc * i / 51.0;
        const double gap = std::abs(closed_form::rho_two_complete(2, 1, lambda) -
                                    fixed_point::rho_free_product({2, 1}, lambda));
        if (gap > worst) {
            worst = gap;
            worst_at = lambda;
        }
    }
    out.require(worst <= 1e-9, "closed vs solver max gap " + fmt(worst) + " at lambda=" + fmt(worst_at));
    for (double lambda : {0.5, 1.0, 1.3}) {
        const SeriesTable table = p_series(QuotientChain(GraphModel::free_product({2, 1}), lambda), 4000);
        const double dp = rho_from_series(table).rho;
        const double closed = closed_form::rho_two_complete(2, 1, lambda);
        out.require(std::abs(dp - closed) <= 1e-3, "lambda=" + fmt(lambda) + " dp " + fmt(dp) + " vs " + fmt(closed));
    }
}

void critical_endpoint(Outcome& out, const VerifyOptions&) {
    const std::vector<std::pair<int, int>> pairs{{1, 2}, {2, 1}, {2, 2}, {1, 3}, {3, 2},
                                                 {2, 5}, {4, 4}, {3, 7}, {1, 8}, {6, 5}};
    double worst = 0.0;
    for (const auto& [m1, m2] : pairs) {
        const double rho = closed_form::rho_two_complete(m1, m2, std::sqrt(static_cast<double>(m1) * m2));
        worst = std::max(worst, std::abs(rho - 1.0));
    }
    out.require(worst <= 1e-12, "max |rho(lambda_c) - 1| over 10 pairs = " + fmt(worst));
}

void zero_bias(Outcome& out, const VerifyOptions&) {
    const double rho = fixed_point::rho_free_product({2, 1}, 1e-6);
    out.require(std::abs(rho - 0.5) <= 1e-3, "rho_free_product([2,1], 1e-6) = " + fmt(rho));
}

void growth(Outcome& out, const VerifyOptions&) {
    using fixed_point::FactorSpec;
    const double gr = fixed_point::gr_free_product({FactorSpec::complete(2), FactorSpec::complete(1)});
    out.require(std::abs(gr - std::sqrt(2.0)) <= 1e-10, "gr(K3*K2) = " + fmt(gr));
    const double lc = fixed_point::lambda_c_two_complete(2, 1);
    out.require(std::abs(gr - lc) <= 1e-10, "lambda_c(2,1) = " + fmt(lc));
    const double x33 = fixed_point::gr_X_dl(3, 3);
    out.require(std::abs(x33 - std::sqrt(2.0)) <= 1e-10, "gr_X_dl(3,3) = " + fmt(x33));
    double worst = 0.0;
    for (int d = 3; d <= 8; ++d) {
        for (int ell = 3; ell <= 12; ++ell) worst = std::max(worst, fixed_point::h_ell(d, ell, 1.0 / (d - 1)));
    }
    out.require(worst < 1.0, "max h_l(1/(d-1)) over d=3..8, l=3..12 is " + fmt(worst));
}

class SpeedRun {
public:
    const std::vector<mc::PathSummary>& paths(const VerifyOptions& options) {
        std::call_once(once_, [&] {
            const auto start = Clock::now();
            paths_ = mc::run_replicas(speed_config(options));
            seconds_ = seconds_since(start);
        });
        return paths_;
    }
    double seconds() const { return seconds_; }

private:
    std::once_flag once_;
    std::vector<mc::PathSummary> paths_;
    double seconds_ = 0.0;
};

void speed(Outcome& out, const VerifyOptions& options, SpeedRun& run) {
    const auto cfg = speed_config(options);
    const auto s = mc::summarize(cfg, run.paths(options));
    const double target = closed_form::speed_two_complete(2, 1, 1.0);
    const double z = (s.speed.mean - target) / s.speed.se;
    out.require(std::abs(z) <= 3.0, "speed " + fmt(s.speed.mean) + " +- " + fmt(s.speed.se) + " vs " + fmt(target) +
                                        " (z=" + fmt(z) + ")");
    out.require(run.seconds() < 60.0, "runtime " + fmt(run.seconds()) + " s < 60 s");
}

void occupation(Outcome& out, const VerifyOptions& options, SpeedRun& run) {
    const auto cfg = speed_config(options);
    const auto s = mc::summarize(cfg, run.paths(options));
    const double target = closed_form::occupation_limit(2, 1, 1.0, 1);
    const double z = (s.occupation[1].mean - target) / s.occupation[1].se;
    out.require(std::abs(z) <= 3.0, "type-1 fraction " + fmt(s.occupation[1].mean) + " +- " +
                                        fmt(s.occupation[1].se) + " vs " + fmt(target) + " (z=" + fmt(z) + ")");
}

void excursions(Outcome& out, const VerifyOptions& options, SpeedRun& run) {
    const auto fits = mc::excursion_stats(speed_config(options), run.paths(options));
    const auto& f = fits.at(0);
    out.require(std::abs(f.p - 1.0 / 3.0) < 1e-15, "p_1 = " + fmt(f.p));
    out.require(f.excursions >= 100000, std::to_string(f.excursions) + " type-1 excursions");
    out.require(f.p_value > 0.001, "chi2=" + fmt(f.chi_square) + " dof=" + std::to_string(f.dof) +
                                       " p-value=" + fmt(f.p_value));
}

void harmonic(Outcome& out, const VerifyOptions& options) {
    mc::SimConfig cfg;
    cfg.model = GraphModel::free_product({2, 1});
    cfg.lambda = 1.0;
    cfg.steps = 1000;
    cfg.replicas = 4000;
    cfg.seed = options.seed;
    cfg.jobs = options.jobs;
    const VertexAddr origin;
    const VertexAddr x{{{1, 1}}};
    const auto split = mc::harmonic_split_estimate(cfg, {origin, x}, false);
    const auto& a = split.estimates[0];
    const auto& b = split.estimates[1];
    const bool in_range = a.f_hat >= 0.0 && a.f_hat <= 1.0 && b.f_hat >= 0.0 && b.f_hat <= 1.0;
    out.require(in_range, "f(o)=" + fmt(a.f_hat) + " f(x)=" + fmt(b.f_hat));
    out.require(split.z_score >= 3.0, "z=" + fmt(split.z_score) + ", horizon shift " + fmt(split.horizon_shift) + " SE");
}

void oracle_check(Outcome& out, const VerifyOptions&) {
    double worst = 0.0;
    double worst_lumped = 0.0;
    for (const GraphModel& model : {GraphModel::tree(4), GraphModel::free_product({2, 1})}) {
        const double lc = model.is_tree() ? model.tree_degree() - 1.0 : std::sqrt(2.0);
        for (double lambda : {0.25, 1.0, lc}) {
            const auto dense = oracle::dense_return_probabilities(model, lambda, 8);
            const SeriesTable table = p_series(QuotientChain(model, lambda), 8);
            for (std::size_t k = 0; k <= 8; ++k) worst = std::max(worst, std::abs(dense[k] - table.p(k)));
            const auto ball = oracle::lumped_distribution(model, lambda, 8);
            const auto lumped = oracle::quotient_distribution(model, lambda, 8);
            for (std::size_t k = 0; k < ball.size(); ++k) {
                for (std::size_t l = 0; l < ball[k].size(); ++l) {
                    for (std::size_t t = 0; t < ball[k][l].size(); ++t) {
                        worst_lumped = std::max(worst_lumped, std::abs(ball[k][l][t] - lumped[k][l][t]));
                    }
                }
            }
        }
    }
    out.require(worst <= 1e-12, "max |p_dp - p_dense| = " + fmt(worst));
    out.require(worst_lumped <= 1e-12, "max lumped distribution gap = " + fmt(worst_lumped));
}

void renewal(Outcome& out, const VerifyOptions&) {
    double worst = 0.0;
    std::size_t tables = 0;
    auto run = [&](const GraphModel& model, double lambda) {
        worst = std::max(worst, renewal_check(series(QuotientChain(model, lambda), 500)));
        ++tables;
    };
    for (int d : {3, 4, 5}) {
        for (double lambda : {0.5, 1.0, 2.0, d - 1.0}) run(GraphModel::tree(d), lambda);
    }
    for (const auto& ms : std::vector<std::vector<int>>{{2, 1}, {3, 2}, {2, 2}}) {
        for (double lambda : {0.25, 0.5, 1.0, std::sqrt(static_cast<double>(ms[0]) * ms[1])}) {
            run(GraphModel::free_product(ms), lambda);
        }
    }
    out.require(worst <= 1e-10, "max relative renewal residual over " + std::to_string(tables) + " tables = " + fmt(worst));
}

void rayleigh(Outcome& out, const VerifyOptions&) {
    const GraphModel tree = GraphModel::tree(4);
    const double target = std::sqrt(3.0) / 2.0;
    bool increasing = true;
    double prev = -1.0;
    for (std::size_t n = 2; n <= 12; ++n) {
        const double q = rayleigh_quotient(tree, 1.0, n);
        if (!(q > prev)) increasing = false;
        prev = q;
    }
    out.require(increasing && prev <= target + 1e-9, "T4 quotient increasing in n=2..12 and below rho");
    out.require(target - prev < 0.05, "gap at n=12 is " + fmt(target - prev));
    const double free_q = rayleigh_quotient(GraphModel::free_product({2, 1}), 1.0, 8);
    const double bound = closed_form::rho_tree(3, 1.0);
    out.require(free_q > bound, "free:2,1 quotient at n=8 is " + fmt(free_q) + " vs " + fmt(bound));
}

void detailed_balance(Outcome& out, const VerifyOptions&) {
    double worst = 0.0;
    for (const GraphModel& model : {GraphModel::tree(4), GraphModel::free_product({2, 1})}) {
        for (double lambda : {0.5, 1.0, 2.0}) worst = std::max(worst, oracle::detailed_balance_error(model, lambda, 6));
    }
    out.require(worst <= 1e-12, "max relative detailed-balance gap on B(6) = " + fmt(worst));
}

void sweep(Outcome& out, const VerifyOptions& options) {
    asymptotics::SweepOptions so;
    so.solver = false;
    so.jobs = options.jobs;
    const auto tree = asymptotics::continuity_sweep(GraphModel::tree(4), asymptotics::grid(0.01, 3.0, 0.01), so);
    const auto tc = asymptotics::check_sweep(tree);
    out.require(tc.max_jump < 0.02, "T4 max adjacent jump " + fmt(tc.max_jump) + " at lambda=" + fmt(tc.max_jump_at));
    const double lc = std::sqrt(2.0);
    auto free_grid = asymptotics::grid(0.01, lc, 0.01);
    const auto fp = asymptotics::continuity_sweep(GraphModel::free_product({2, 1}), free_grid, so);
    const auto fc = asymptotics::check_sweep(fp);
    out.require(fc.max_jump < 0.02, "free:2,1 max adjacent jump " + fmt(fc.max_jump));
    const double end = closed_form::rho_two_complete(2, 1, lc);
    out.require(std::abs(end - 1.0) <= 1e-9, "free:2,1 rho(lambda_c) = " + fmt(end));
    const double near_zero = fixed_point::rho_free_product({2, 1}, 1e-6);
    out.require(std::abs(near_zero - 0.5) <= 1e-3, "free:2,1 rho(1e-6) = " + fmt(near_zero));
    const double t0 = closed_form::rho_tree(4, 1e-6);
    const double bound = asymptotics::tree_small_bias_bound(4, 1e-6);
    out.require(t0 <= bound, "T4 rho(1e-6) = " + fmt(t0) + " <= bound " + fmt(bound));
}

using Runner = std::function<void(Outcome&, const VerifyOptions&, SpeedRun&)>;

struct Entry {
    CheckInfo info;
    Runner run;
};

template <class F>
Runner plain(F f) {
    return [f](Outcome& o, const VerifyOptions& opt, SpeedRun&) { f(o, opt); };
}

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries{
        {{"1", "tree spectral radius from DP", "dp"}, plain(tree_rho)},
        {{"2", "Catalan first-return law", "dp"}, plain(catalan)},
        {{"3", "critical tree return law", "asymptotics"}, plain(critical_tree)},
        {{"4", "subcritical tree constant", "asymptotics"}, plain(tree_constant)},
        {{"5", "two-complete spectral radius agreement", "closedform"}, plain(two_complete_rho)},
        {{"6", "critical endpoint rho = 1", "closedform"}, plain(critical_endpoint)},
        {{"7", "zero-bias limit", "closedform"}, plain(zero_bias)},
        {{"8", "growth rates", "closedform"}, plain(growth)},
        {{"9", "Monte Carlo speed", "mc"}, speed},
        {{"10", "occupation fractions", "mc"}, occupation},
        {{"11", "excursion law", "mc"}, excursions},
        {{"12", "non-constant harmonic split", "mc"}, plain(harmonic)},
        {{"13", "ball oracle vs quotient DP", "oracle"}, plain(oracle_check)},
        {{"14", "renewal identity", "dp"}, plain(renewal)},
        {{"15", "Rayleigh lower bound", "dp"}, plain(rayleigh)},
        {{"16", "detailed balance", "oracle"}, plain(detailed_balance)},
        {{"sweep", "continuity sweep", "asymptotics"}, plain(sweep)},
    };
    return entries;
}

CheckResult execute(const Entry& e, const VerifyOptions& options, SpeedRun& run) {
    CheckResult r{e.info.id, e.info.name, e.info.suite, false, "", 0.0};
    const auto start = Clock::now();
    Outcome out;
    try {
        e.run(out, options, run);
        r.passed = out.passed;
        r.detail = out.detail.str();
    } catch (const std::exception& ex) {
        r.passed = false;
        r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = seconds_since(start);
    return r;
}

}  // namespace

const std::vector<CheckInfo>& list_checks() {
    static const std::vector<CheckInfo> infos = [] {
        std::vector<CheckInfo> v;
        for (const auto& e : registry()) v.push_back(e.info);
        return v;
    }();
    return infos;
}

CheckResult run_check(const std::string& id, const VerifyOptions& options) {
    for (const auto& e : registry()) {
        if (e.info.id == id) {
            SpeedRun run;
            return execute(e, options, run);
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown check id '" + id + "'");
}

std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& options) {
    static const std::vector<std::string> suites{"closedform", "dp", "oracle", "mc", "asymptotics", "all"};
    if (std::find(suites.begin(), suites.end(), suite) == suites.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown suite '" + suite + "'");
    }
    std::vector<const Entry*> selected;
    for (const auto& e : registry()) {
        if (suite == "all" || e.info.suite == suite) selected.push_back(&e);
    }
    std::vector<CheckResult> out(selected.size());
    SpeedRun run;
    const unsigned workers = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(selected.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < selected.size(); i = next++) out[i] = execute(*selected[i], options, run);
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return out;
}

std::string format_result(const CheckResult& r) {
    std::ostringstream os;
    os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << ": " << r.detail;
    return os.str();
}

}  // namespace walkspec::verify
