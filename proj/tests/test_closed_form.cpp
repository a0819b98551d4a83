#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/kernel.hpp"
#include "walkspec/quotient_dp.hpp"

using namespace walkspec;
using namespace walkspec::closed_form;

TEST(ClosedForm, TreeRho) {
    EXPECT_NEAR(rho_tree(4, 1.0), std::sqrt(3.0) / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(rho_tree(2, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(rho_tree(4, 3.0), 1.0);
    EXPECT_EQ(rho_tree(5, 0.0), 0.0);
    EXPECT_THROW(rho_tree(4, 3.01), Error);
}

TEST(ClosedForm, TreeTheta) {
    EXPECT_NEAR(theta_tree(4, 1.0), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(theta_tree(4, 3.0), 1.0);
    EXPECT_EQ(theta_tree(4, 7.0), 1.0);
    EXPECT_EQ(theta_tree(4, 0.0), 0.0);
}

TEST(ClosedForm, CatalanMatchesRecursion) {
    std::vector<double> c{1.0};
    for (int n = 0; n < 30; ++n) {
        double next = 0.0;
        for (int i = 0; i <= n; ++i) next += c[i] * c[n - i];
        c.push_back(next);
    }
    for (long k = 0; k <= 30; ++k) EXPECT_NEAR(std::exp(log_catalan(k)) / c[k], 1.0, 1e-12) << k;
}

TEST(ClosedForm, FirstReturnValues) {
    EXPECT_NEAR(f2n_tree(4, 1.0, 1), 0.25, 1e-15);
    EXPECT_NEAR(f2n_tree(4, 1.0, 2), 3.0 / 64.0, 1e-15);
    EXPECT_NEAR(f2n_tree(4, 1.0, 3), 2.0 * 9.0 / 16.0 / 64.0, 1e-15);
}

TEST(ClosedForm, FirstReturnSumsToTheta) {
    for (auto [d, lambda] : std::vector<std::pair<int, double>>{{4, 1.0}, {3, 0.5}, {5, 2.0}}) {
        double s = 0.0;
        for (long n = 1; n <= 20000; ++n) s += f2n_tree(d, lambda, n);
        EXPECT_NEAR(s, theta_tree(d, lambda), 1e-8);
    }
}

TEST(ClosedForm, FirstReturnSeriesMatchesU) {
    const int d = 4;
    const double lambda = 1.0;
    const double z = 0.9 * tree_radius(d, lambda);
    double s = 0.0;
    for (long n = 1; n <= 500; ++n) s += std::exp(log_f2n_tree(d, lambda, n) + 2.0 * n * std::log(z));
    EXPECT_NEAR(s, u_tree(d, lambda, z), 1e-10);
    EXPECT_NEAR(u_tree(4, 1.0, 1.0), 1.0 / 3.0, 1e-15);
    EXPECT_THROW(u_tree(d, lambda, 1.01 * tree_radius(d, lambda)), Error);
}

TEST(ClosedForm, GreenFunction) {
    for (double z : {-0.9, -0.3, 0.0, 0.5, 0.99}) EXPECT_NEAR(green_tree(4, 3.0, z), 1.0 / std::sqrt(1.0 - z * z), 1e-12);
    for (double lambda : {0.5, 1.0, 2.0}) {
        for (double frac : {0.1, 0.5, 0.999}) {
            const double z = frac * tree_radius(5, lambda);
            EXPECT_NEAR(green_tree(5, lambda, z) * (1.0 - u_tree(5, lambda, z)), 1.0, 1e-12);
        }
    }
    EXPECT_THROW(green_tree(4, 1.0, tree_radius(4, 1.0)), Error);
}

TEST(ClosedForm, GreenMatchesReturnSeries) {
    const SeriesTable t = p_series(QuotientChain(GraphModel::tree(4), 1.0), 2000);
    const double z = 1.05;
    double s = 0.0;
    for (std::size_t n = 0; n <= 2000; ++n) s += t.p(n) * std::pow(z, static_cast<double>(n));
    EXPECT_NEAR(s, green_tree(4, 1.0, z), 1e-10);
}

TEST(ClosedForm, SingularityConstants) {
    const TreeSingularity s = tree_singularity(4, 1.0);
    EXPECT_DOUBLE_EQ(s.a, 1.5);
    EXPECT_DOUBLE_EQ(s.b, 0.5);
    EXPECT_NEAR(s.c1, 8.0 / (2.0 * 3.0 * 16.0), 1e-15);
    EXPECT_NEAR(s.c2, 2.0 * rho_tree(4, 1.0) * 3.0 / 2.0, 1e-15);
    EXPECT_NEAR(p2n_tree_asymptotic_constant(4, 1.0), 1.0 / (12.0 * std::sqrt(3.0 * std::numbers::pi)), 1e-15);
    EXPECT_THROW(p2n_tree_asymptotic_constant(4, 3.0), Error);
    EXPECT_LT(p2n_tree_asymptotic_constant(4, 2.999999), 1e-10);
}

TEST(ClosedForm, SingularityConstantMatchesReturnProbabilities) {
    const SeriesTable t = p_series(QuotientChain(GraphModel::tree(4), 1.0), 8000);
    const double rho = rho_tree(4, 1.0);
    const double n = 4000.0;
    const double observed = std::exp(t.log_p[8000].log - 2 * n * std::log(rho) + 1.5 * std::log(n));
    EXPECT_NEAR(observed / p2n_tree_singularity_constant(4, 1.0), 1.0, 3e-3);
}

TEST(ClosedForm, Speed) {
    EXPECT_NEAR(speed_two_complete(2, 1, 1.0), 2.0 / 15.0, 1e-15);
    EXPECT_NEAR(speed_two_complete(2, 1, std::sqrt(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(speed_two_complete(3, 3, 3.0), 0.0, 1e-15);
    EXPECT_THROW(speed_two_complete(1, 1, 0.5), Error);
    for (double lambda : {0.0, 0.25, 0.5, 0.9}) {
        EXPECT_NEAR(speed_two_complete(1, 1, lambda, true), (1.0 - lambda) / (1.0 + lambda), 1e-15);
    }
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
        const double s = speed_two_complete(2, 1, std::sqrt(2.0) * i / 1000.0);
        EXPECT_LT(s, prev);
        prev = s;
    }
}

TEST(ClosedForm, TwoCompleteRho) {
    for (int m0 : {2, 3, 5}) {
        for (double lambda : {0.1, 0.7, 1.5}) {
            const double expect = (m0 - 1 + 2 * std::sqrt(lambda * m0)) / (2.0 * m0 + lambda - 1);
            EXPECT_NEAR(rho_two_complete(m0, m0, lambda), expect, 1e-15);
        }
    }
    for (double lambda : {0.05, 0.3, 0.9}) EXPECT_NEAR(rho_two_complete(1, 1, lambda, true), rho_tree(2, lambda), 1e-15);
    EXPECT_NEAR(rho_two_complete(2, 1, 1e-12), 0.5, 1e-5);
    EXPECT_THROW(rho_two_complete(2, 1, 1.5), Error);
    EXPECT_THROW(rho_two_complete(1, 1, 0.5), Error);
    EXPECT_NEAR(z0_two_complete(2, 1, 1.0) * rho_two_complete(2, 1, 1.0), 1.0, 1e-15);

    for (auto [m1, m2] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {3, 2}, {5, 4}}) {
        const double lc = std::sqrt(m1 * m2);
        EXPECT_NEAR(rho_two_complete(m1, m2, lc), 1.0, 1e-12);
        double prev = 0.0;
        for (int i = 1; i <= 1000; ++i) {
            const double r = rho_two_complete(m1, m2, lc * i / 1000.0);
            EXPECT_GT(r, prev);
            prev = r;
        }
    }
}

TEST(ClosedForm, TwoCompleteRhoMatchesTreeSpectrum) {
    // free:1,1 is the line, whose n-step return law is the binomial one.
    const SeriesTable t = p_series(QuotientChain(GraphModel::free_product({1, 1}), 0.5), 400);
    const double expect = rho_tree(2, 0.5);
    EXPECT_NEAR(std::pow(t.p(400) / t.p(398), 0.5), expect, 5e-3);
}

TEST(ClosedForm, ZeroBiasLimit) {
    EXPECT_DOUBLE_EQ(rho_zero_limit({2, 1}), 0.5);
    EXPECT_DOUBLE_EQ(rho_zero_limit({1, 1, 1, 1}), 0.0);
    EXPECT_DOUBLE_EQ(rho_zero_limit({3, 2}), 0.5);
    EXPECT_DOUBLE_EQ(rho_zero_limit({4, 1, 1}), 0.6);
}

TEST(ClosedForm, Occupation) {
    EXPECT_NEAR(occupation_limit(2, 1, 1.0, 1), 0.6, 1e-15);
    EXPECT_NEAR(occupation_limit(2, 1, 1.0, 2), 0.4, 1e-15);
    EXPECT_NEAR(occupation_limit(4, 4, 1.7, 1), 0.5, 1e-15);
    for (double lambda : {0.0, 0.5, 1.3}) {
        EXPECT_NEAR(occupation_limit(3, 2, lambda, 1) + occupation_limit(3, 2, lambda, 2), 1.0, 1e-15);
    }
    EXPECT_NEAR(lateral_probability(2, 1, 1.0, 1), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(lateral_probability(2, 1, 1.0, 2), 0.0);
}
