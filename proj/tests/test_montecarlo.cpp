#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/kernel.hpp"
#include "walkspec/montecarlo.hpp"

using namespace walkspec;
using namespace walkspec::mc;

namespace {

SimConfig config(const GraphModel& model, double lambda, std::size_t steps, std::size_t replicas,
                 std::uint64_t seed = 7) {
    SimConfig c;
    c.model = model;
    c.lambda = lambda;
    c.steps = steps;
    c.replicas = replicas;
    c.seed = seed;
    c.jobs = 4;
    return c;
}

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(MonteCarlo, SeedDerivation) {
    EXPECT_EQ(replica_seed(5, 0), splitmix64(5 + 0x9E3779B97F4A7C15ULL));
    EXPECT_EQ(replica_seed(5, 3), splitmix64(5 + 4 * 0x9E3779B97F4A7C15ULL));
    EXPECT_NE(replica_seed(5, 0), replica_seed(6, 0));
    // Reference output of the splitmix64 finaliser.
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(MonteCarlo, Deterministic) {
    const SimConfig c = config(GraphModel::free_product({2, 1}), 1.0, 2000, 16);
    EXPECT_EQ(simulate_path(c, 3), simulate_path(c, 3));
    SimConfig serial = c;
    serial.jobs = 1;
    EXPECT_EQ(run_replicas(c), run_replicas(serial));
    EXPECT_NE(simulate_path(c, 3), simulate_path(c, 4));
    SimConfig other = c;
    other.seed = 8;
    EXPECT_NE(run_replicas(c), run_replicas(other));
}

TEST(MonteCarlo, ValidateConfig) {
    SimConfig c = config(GraphModel::tree(3), 1.0, 0, 1);
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidArgument);
    c.steps = 10;
    c.replicas = 0;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidArgument);
    c.replicas = 1;
    c.burn_in = 11;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidArgument);
}

TEST(MonteCarlo, ZeroBias) {
    for (std::uint64_t r = 0; r < 5; ++r) {
        EXPECT_EQ(simulate_path(config(GraphModel::tree(4), 0.0, 500, 1), r).final_level, 500u);
    }
    Walker w(GraphModel::free_product({2, 1}), 0.0, 11);
    int stays = 0;
    for (int i = 0; i < 5000; ++i) {
        const int d = w.step();
        EXPECT_TRUE(d == 0 || d == 1);
        stays += d == 0;
    }
    EXPECT_GT(stays, 0);
}

TEST(MonteCarlo, LevelIncrements) {
    Walker tree(GraphModel::tree(3), 2.5, 1);
    for (int i = 0; i < 20000; ++i) {
        const std::size_t before = tree.position().level();
        const int d = tree.step();
        EXPECT_TRUE(d == 1 || d == -1);
        EXPECT_EQ(static_cast<long>(tree.position().level()), static_cast<long>(before) + d);
    }
    Walker fp(GraphModel::free_product({3, 2}), 1.0, 2);
    for (int i = 0; i < 20000; ++i) {
        const int d = fp.step();
        EXPECT_GE(d, -1);
        EXPECT_LE(d, 1);
        EXPECT_NO_THROW(check_vertex(GraphModel::free_product({3, 2}), fp.position()));
    }
}

TEST(MonteCarlo, OccupationConservesSteps) {
    SimConfig c = config(GraphModel::free_product({2, 1}), 1.2, 3000, 1);
    const PathSummary s = simulate_path(c, 0);
    EXPECT_EQ(s.occupation[1] + s.occupation[2] + s.origin_visits, 3001u);
    c.burn_in = 1000;
    const PathSummary b = simulate_path(c, 0);
    EXPECT_EQ(b.occupation[1] + b.occupation[2] + b.origin_visits, 2001u);
}

TEST(MonteCarlo, TransitionFrequencies) {
    const GraphModel model = GraphModel::free_product({2, 1});
    const QuotientChain chain(model, 1.0);
    Walker w(model, 1.0, 99);
    std::array<std::array<double, 3>, 3> counts{};  // [type][delta + 1]
    for (int i = 0; i < 100000; ++i) {
        const int type = w.position().type();
        const bool away = !w.position().is_root();
        const int d = w.step();
        if (away) counts[type][d + 1] += 1;
    }
    for (int t = 1; t <= 2; ++t) {
        const double n = counts[t][0] + counts[t][1] + counts[t][2];
        ASSERT_GT(n, 1000);
        const std::array<double, 3> expect{chain.down(t), chain.stay(t), chain.up(t)};
        for (int k = 0; k < 3; ++k) {
            const double sd = std::sqrt(n * expect[k] * (1 - expect[k]));
            EXPECT_LE(std::abs(counts[t][k] - n * expect[k]), 4 * sd + 1e-9) << t << " " << k;
        }
    }
}

TEST(MonteCarlo, SpeedOnLine) {
    SimConfig c = config(GraphModel::free_product({1, 1}), 0.5, 20000, 200);
    EXPECT_EQ(kind_of([&] { estimate_speed(c); }), ErrorKind::HypothesisViolated);
    c.allow_degenerate = true;
    const Estimate e = estimate_speed(c);
    EXPECT_LE(std::abs(e.mean - 1.0 / 3.0), 3 * e.se);
}

TEST(MonteCarlo, SpeedGates) {
    EXPECT_EQ(kind_of([] { estimate_speed(config(GraphModel::free_product({2, 1}), 1.5, 100, 2)); }),
              ErrorKind::HypothesisViolated);
    EXPECT_EQ(kind_of([] { estimate_speed(config(GraphModel::tree(3), 1.0, 100, 2)); }), ErrorKind::HypothesisViolated);
}

TEST(MonteCarlo, SpeedIntervalCoverage) {
    const double s = closed_form::speed_two_complete(2, 1, 1.0);
    int covered = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Estimate e = estimate_speed(config(GraphModel::free_product({2, 1}), 1.0, 20000, 100, seed));
        covered += std::abs(e.mean - s) <= 3 * e.se;
    }
    EXPECT_GE(covered, 19);
}

TEST(MonteCarlo, SpeedNearCriticalBias) {
    const Estimate e = estimate_speed(config(GraphModel::free_product({2, 1}), 1.4, 1000000, 100));
    const double s = closed_form::speed_two_complete(2, 1, 1.4);
    EXPECT_GT(s, 0.0);
    EXPECT_LE(std::abs(e.mean - s), 3 * e.se);
}

TEST(MonteCarlo, SpeedVanishesAtCriticalBias) {
    const double lc = std::sqrt(2.0);
    const Estimate short_run = estimate_speed(config(GraphModel::free_product({2, 1}), lc, 4000, 400));
    const Estimate long_run = estimate_speed(config(GraphModel::free_product({2, 1}), lc, 64000, 400));
    // |X_n| grows like sqrt(n) here, so |X_n|/n shrinks by about 4 when n grows 16-fold.
    EXPECT_LT(long_run.mean, 0.4 * short_run.mean);
    EXPECT_GT(long_run.mean, 0.1 * short_run.mean);
}

TEST(MonteCarlo, OccupationFractions) {
    const Summary s = occupation_fractions(config(GraphModel::free_product({2, 1}), 1.0, 20000, 100));
    EXPECT_LE(std::abs(s.occupation[1].mean - 0.6), 3 * s.occupation[1].se);
    EXPECT_LE(std::abs(s.occupation[2].mean - 0.4), 3 * s.occupation[2].se);
    EXPECT_LT(s.origin.mean, 0.01);
    EXPECT_NEAR(s.occupation[1].mean + s.occupation[2].mean + s.origin.mean, 1.0, 1e-12);
}

TEST(MonteCarlo, Excursions) {
    const auto fits = excursion_stats(config(GraphModel::free_product({2, 1}), 1.0, 20000, 50));
    ASSERT_EQ(fits.size(), 2u);
    EXPECT_NEAR(fits[0].p, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(fits[0].mean_extension, 0.5, 0.02);
    EXPECT_GT(fits[0].excursions, 100000u);
    EXPECT_GT(fits[0].p_value, 0.001);
    EXPECT_EQ(fits[1].p, 0.0);
    EXPECT_EQ(fits[1].mean_extension, 0.0);
    EXPECT_EQ(fits[1].p_value, 1.0);
}

TEST(MonteCarlo, GeometricFitOfExactCounts) {
    std::vector<std::uint64_t> hist;
    double expect = 300000.0 * (1 - 0.25);
    while (expect >= 0.5) {
        hist.push_back(static_cast<std::uint64_t>(std::llround(expect)));
        expect *= 0.25;
    }
    const ExcursionFit fit = geometric_fit(hist, 0.25);
    EXPECT_GT(fit.p_value, 0.99);
    EXPECT_GE(fit.dof, 3);

    std::vector<std::uint64_t> skewed = hist;
    skewed[0] -= 3000;
    skewed[1] += 3000;
    EXPECT_LT(geometric_fit(skewed, 0.25).p_value, 1e-6);
}

TEST(MonteCarlo, HarmonicSplit) {
    SimConfig c = config(GraphModel::free_product({2, 1}), 1.0, 1000, 4000);
    const VertexAddr x{{{1, 1}}};
    const HarmonicSplit split = harmonic_split_estimate(c, {VertexAddr{}, x});
    EXPECT_GE(split.z_score, 3.0);
    for (const auto& e : split.estimates) {
        EXPECT_GE(e.f_hat, 0.0);
        EXPECT_LE(e.f_hat, 1.0);
    }

    const HarmonicSplit control = harmonic_split_estimate(c, {x, VertexAddr{{{1, 2}}}}, false);
    EXPECT_LT(std::abs(control.z_score), 4.0);
}
