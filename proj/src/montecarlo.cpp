#include "walkspec/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/kernel.hpp"

namespace walkspec::mc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kMinExpected = 5.0;

void require_two_factor(const SimConfig& config, bool up_to_critical) {
    const GraphModel& model = config.model;
    if (!model.is_two_factor()) {
        throw Error(ErrorKind::HypothesisViolated,
                    "estimator is stated for two-factor free products, got " + model.to_string());
    }
    if (model.is_degenerate_line() && !config.allow_degenerate) {
        throw Error(ErrorKind::HypothesisViolated, "free:1,1 needs allow_degenerate");
    }
    if (up_to_critical) {
        const double lc = closed_form::lambda_c_two_complete(model.ms()[0], model.ms()[1]);
        if (config.lambda > lc) {
            throw Error(ErrorKind::HypothesisViolated,
                        "lambda=" + std::to_string(config.lambda) + " exceeds lambda_c=" + std::to_string(lc));
        }
    }
}

Estimate mean_and_se(const std::vector<double>& xs) {
    Estimate e;
    const double n = static_cast<double>(xs.size());
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() < 2) return e;
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / (n - 1.0) / n);
    return e;
}

unsigned worker_count(unsigned jobs, std::size_t tasks) {
    unsigned n = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
    return static_cast<unsigned>(std::min<std::size_t>(n, tasks));
}

template <class Task>
void parallel_for(std::size_t count, unsigned jobs, Task&& task) {
    const unsigned workers = worker_count(jobs, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) task(i);
        });
    }
    for (auto& t : pool) t.join();
}

bool in_branch(const VertexAddr& v, const Letter& root) { return !v.is_root() && v.letters.front() == root; }

}  // namespace

void validate(const SimConfig& config) {
    validate_model(config.model);
    if (config.steps < 1) throw Error(ErrorKind::InvalidArgument, "steps must be >= 1");
    if (config.replicas < 1) throw Error(ErrorKind::InvalidArgument, "replicas must be >= 1");
    if (config.burn_in > config.steps) throw Error(ErrorKind::InvalidArgument, "burn_in exceeds steps");
    if (!(config.lambda >= 0.0)) throw Error(ErrorKind::NegativeBias, "lambda must be >= 0");
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t master, std::uint64_t replica) {
    return splitmix64(master + (replica + 1) * kGolden);
}

Walker::Walker(const GraphModel& model, double lambda, std::uint64_t seed, VertexAddr start)
    : model_(model), rng_(seed), position_(std::move(start)) {
    check_vertex(model_, position_);
    const int types = model_.type_count();
    moves_.resize(static_cast<std::size_t>(types) + 1);
    for (int t = 0; t <= types; ++t) {
        Moves& mv = moves_[static_cast<std::size_t>(t)];
        const std::size_t level = t == 0 ? 0 : 1;
        const LevelDegrees deg = class_degrees(model_, level, t);
        const ClassProbabilities p = class_probabilities(model_, lambda, level, t);
        mv.down = deg.d_minus * p.down;
        mv.lateral = p.lateral;
        mv.up = p.up;
        mv.laterals = deg.d_zero;
        if (model_.is_tree()) {
            for (int c = 1; c <= deg.d_plus; ++c) mv.children.push_back({1, c});
        } else {
            const int r = static_cast<int>(model_.ms().size());
            for (int j = 1; j <= r; ++j) {
                if (j == t) continue;
                for (int b = 1; b <= model_.factor_size(j); ++b) mv.children.push_back({j, b});
            }
        }
    }
}

double Walker::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

std::size_t Walker::pick(double u, double each, std::size_t count) const {
    const auto k = static_cast<std::size_t>(u / each);
    return std::min(k, count - 1);
}

int Walker::step() {
    const Moves& mv = moves_[static_cast<std::size_t>(position_.type())];
    double u = uniform();
    if (u < mv.down) {
        position_.letters.pop_back();
        return -1;
    }
    u -= mv.down;
    const double lateral_total = mv.lateral * mv.laterals;
    if (u < lateral_total) {
        Letter& last = position_.letters.back();
        auto j = static_cast<std::int32_t>(pick(u, mv.lateral, static_cast<std::size_t>(mv.laterals))) + 1;
        if (j >= last.letter) ++j;
        last.letter = j;
        return 0;
    }
    u -= lateral_total;
    position_.letters.push_back(mv.children[pick(u, mv.up, mv.children.size())]);
    return 1;
}

PathSummary simulate_path(const SimConfig& config, std::uint64_t replica, const VertexAddr& start,
                          std::optional<Letter> branch_root) {
    validate(config);
    const auto types = static_cast<std::size_t>(config.model.type_count());
    Walker walker(config.model, config.lambda, replica_seed(config.seed, replica), start);
    PathSummary out;
    out.occupation.assign(types + 1, 0);
    out.excursions.assign(types + 1, {});

    int run_type = -1;
    std::size_t run_start = 0;
    auto visit = [&](std::size_t k) {
        const int t = walker.position().type();
        if (k >= config.burn_in) {
            if (t == 0) {
                ++out.origin_visits;
            } else {
                ++out.occupation[static_cast<std::size_t>(t)];
            }
        }
        if (t != run_type) {
            if (run_type > 0 && run_start >= config.burn_in) {
                auto& hist = out.excursions[static_cast<std::size_t>(run_type)];
                const std::size_t extension = k - run_start - 1;
                if (hist.size() <= extension) hist.resize(extension + 1, 0);
                ++hist[extension];
            }
            run_type = t;
            run_start = k;
        }
    };

    visit(0);
    const std::size_t midway = config.steps / 2;
    for (std::size_t k = 1; k <= config.steps; ++k) {
        walker.step();
        visit(k);
        if (branch_root && k == midway) out.midway_in_branch = in_branch(walker.position(), *branch_root);
    }
    out.final_level = walker.position().level();
    if (branch_root) {
        out.ended_in_branch = in_branch(walker.position(), *branch_root);
        if (!out.midway_in_branch) out.midway_in_branch = out.ended_in_branch;
    }
    return out;
}

std::vector<PathSummary> run_replicas(const SimConfig& config) {
    validate(config);
    std::vector<PathSummary> out(config.replicas);
    parallel_for(config.replicas, config.jobs, [&](std::size_t i) { out[i] = simulate_path(config, i); });
    return out;
}

Summary summarize(const SimConfig& config, const std::vector<PathSummary>& paths) {
    if (paths.empty()) throw Error(ErrorKind::InsufficientData, "no replica summaries");
    const auto types = static_cast<std::size_t>(config.model.type_count());
    const double visits = static_cast<double>(config.steps + 1 - config.burn_in);
    std::vector<double> speed, origin;
    std::vector<std::vector<double>> occ(types + 1);
    for (const auto& p : paths) {
        speed.push_back(static_cast<double>(p.final_level) / static_cast<double>(config.steps));
        origin.push_back(static_cast<double>(p.origin_visits) / visits);
        for (std::size_t t = 1; t <= types; ++t) occ[t].push_back(static_cast<double>(p.occupation[t]) / visits);
    }
    Summary s;
    s.speed = mean_and_se(speed);
    s.origin = mean_and_se(origin);
    s.occupation.resize(types + 1);
    for (std::size_t t = 1; t <= types; ++t) s.occupation[t] = mean_and_se(occ[t]);
    return s;
}

Estimate estimate_speed(const SimConfig& config) {
    require_two_factor(config, true);
    return summarize(config, run_replicas(config)).speed;
}

Summary occupation_fractions(const SimConfig& config) {
    require_two_factor(config, true);
    return summarize(config, run_replicas(config));
}

ExcursionFit geometric_fit(const std::vector<std::uint64_t>& histogram, double p) {
    ExcursionFit fit;
    fit.p = p;
    fit.histogram = histogram;
    double weighted = 0.0;
    for (std::size_t j = 0; j < histogram.size(); ++j) {
        fit.excursions += histogram[j];
        weighted += static_cast<double>(j) * static_cast<double>(histogram[j]);
    }
    if (fit.excursions == 0) throw Error(ErrorKind::InsufficientData, "no completed excursions");
    const double total = static_cast<double>(fit.excursions);
    fit.mean_extension = weighted / total;

    if (p <= 0.0) {
        // Geometric(0) is the point mass at 0.
        const bool all_zero = histogram[0] == fit.excursions;
        fit.p_value = all_zero ? 1.0 : 0.0;
        fit.chi_square = all_zero ? 0.0 : std::numeric_limits<double>::infinity();
        return fit;
    }

    // Bins 0..K-1 individually, then the tail j >= K, with K the first bin whose expected
    // count drops below kMinExpected.
    std::size_t bins = 0;
    while (total * (1.0 - p) * std::pow(p, static_cast<double>(bins)) >= kMinExpected) ++bins;
    double chi = 0.0;
    std::uint64_t observed_head = 0;
    for (std::size_t j = 0; j < bins; ++j) {
        const double expected = total * (1.0 - p) * std::pow(p, static_cast<double>(j));
        const double observed = j < histogram.size() ? static_cast<double>(histogram[j]) : 0.0;
        observed_head += j < histogram.size() ? histogram[j] : 0;
        chi += (observed - expected) * (observed - expected) / expected;
    }
    const double tail_expected = total * std::pow(p, static_cast<double>(bins));
    const double tail_observed = static_cast<double>(fit.excursions - observed_head);
    if (tail_expected > 0.0) chi += (tail_observed - tail_expected) * (tail_observed - tail_expected) / tail_expected;
    fit.chi_square = chi;
    fit.dof = static_cast<int>(bins);
    if (fit.dof < 1) {
        fit.p_value = 1.0;
        return fit;
    }
    boost::math::chi_squared dist(fit.dof);
    fit.p_value = boost::math::cdf(boost::math::complement(dist, chi));
    return fit;
}

std::vector<ExcursionFit> excursion_stats(const SimConfig& config, const std::vector<PathSummary>& paths) {
    require_two_factor(config, false);
    const auto& ms = config.model.ms();
    std::vector<ExcursionFit> out;
    for (int t = 1; t <= 2; ++t) {
        std::vector<std::uint64_t> pooled;
        for (const auto& path : paths) {
            const auto& h = path.excursions[static_cast<std::size_t>(t)];
            if (pooled.size() < h.size()) pooled.resize(h.size(), 0);
            for (std::size_t j = 0; j < h.size(); ++j) pooled[j] += h[j];
        }
        ExcursionFit fit = geometric_fit(pooled, closed_form::lateral_probability(ms[0], ms[1], config.lambda, t));
        fit.type = t;
        out.push_back(std::move(fit));
    }
    return out;
}

std::vector<ExcursionFit> excursion_stats(const SimConfig& config) {
    require_two_factor(config, false);
    return excursion_stats(config, run_replicas(config));
}

HarmonicSplit harmonic_split_estimate(const SimConfig& config, const std::vector<VertexAddr>& starts,
                                      bool throw_if_inconclusive) {
    require_two_factor(config, true);
    if (!(config.lambda < closed_form::lambda_c_two_complete(config.model.ms()[0], config.model.ms()[1]))) {
        throw Error(ErrorKind::HypothesisViolated, "harmonic split needs lambda < lambda_c");
    }
    if (starts.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two start vertices");
    validate(config);
    for (const auto& s : starts) check_vertex(config.model, s);

    const Letter branch{2, 1};
    const std::size_t total = starts.size() * config.replicas;
    std::vector<std::uint8_t> end(total), mid(total);
    parallel_for(total, config.jobs, [&](std::size_t i) {
        const PathSummary p = simulate_path(config, i, starts[i / config.replicas], branch);
        end[i] = *p.ended_in_branch ? 1 : 0;
        mid[i] = *p.midway_in_branch ? 1 : 0;
    });

    HarmonicSplit out;
    const double r = static_cast<double>(config.replicas);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        const auto first = static_cast<std::ptrdiff_t>(s * config.replicas);
        const auto last = first + static_cast<std::ptrdiff_t>(config.replicas);
        HarmonicEstimate e;
        e.start = starts[s];
        e.f_hat = std::accumulate(end.begin() + first, end.begin() + last, 0.0) / r;
        e.f_hat_half = std::accumulate(mid.begin() + first, mid.begin() + last, 0.0) / r;
        e.se = std::sqrt(std::max(e.f_hat * (1.0 - e.f_hat), 1.0 / r) / r);
        out.horizon_shift = std::max(out.horizon_shift, std::abs(e.f_hat - e.f_hat_half) / e.se);
        out.estimates.push_back(std::move(e));
    }
    const auto& a = out.estimates[0];
    const auto& b = out.estimates[1];
    out.z_score = (a.f_hat - b.f_hat) / std::sqrt(a.se * a.se + b.se * b.se);
    if (throw_if_inconclusive && out.z_score < 3.0) {
        throw Error(ErrorKind::Inconclusive,
                    "z-score " + std::to_string(out.z_score) + " < 3; increase replicas or steps");
    }
    return out;
}

}  // namespace walkspec::mc
