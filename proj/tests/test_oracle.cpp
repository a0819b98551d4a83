#include <gtest/gtest.h>

#include <cmath>

#include "walkspec/error.hpp"
#include "walkspec/fixed_point.hpp"
#include "walkspec/kernel.hpp"
#include "walkspec/oracle.hpp"
#include "walkspec/quotient_dp.hpp"

using namespace walkspec;

TEST(Oracle, DenseMatchesQuotient) {
    for (const GraphModel& m : {GraphModel::tree(3), GraphModel::tree(4), GraphModel::free_product({2, 1}),
                                GraphModel::free_product({3, 2})}) {
        const double lc = m.is_tree() ? m.tree_degree() - 1.0 : fixed_point::lambda_c_free_product(m.ms());
        for (double lambda : {0.0, 0.25, 1.0, lc}) {
            const auto dense = oracle::dense_return_probabilities(m, lambda, 8);
            const SeriesTable t = p_series(QuotientChain(m, lambda), 8);
            for (std::size_t n = 0; n <= 8; ++n) EXPECT_NEAR(dense[n], t.p(n), 1e-12) << m.to_string() << " " << n;
        }
    }
}

TEST(Oracle, DenseOnLineIsBinomial) {
    const auto p = oracle::dense_return_probabilities(GraphModel::free_product({1, 1}), 1.0, 12);
    EXPECT_NEAR(p[2], 0.5, 1e-15);
    EXPECT_NEAR(p[4], 6.0 / 16, 1e-15);
    EXPECT_NEAR(p[12], 924.0 / 4096, 1e-15);
    EXPECT_EQ(p[5], 0.0);
}

TEST(Oracle, DenseCap) {
    EXPECT_THROW(oracle::dense_return_probabilities(GraphModel::tree(4), 1.0, 12, 500), Error);
}

TEST(Oracle, LumpedDistributionsAreProbabilities) {
    const auto dist = oracle::lumped_distribution(GraphModel::free_product({2, 2, 1}), 0.6, 6);
    for (const auto& step : dist) {
        double total = 0.0;
        for (const auto& level : step)
            for (double p : level) total += p;
        EXPECT_NEAR(total, 1.0, 1e-13);
    }
}

TEST(Oracle, DetailedBalance) {
    for (const GraphModel& m : {GraphModel::tree(4), GraphModel::free_product({2, 1})}) {
        for (double lambda : {0.5, 1.0, 2.0}) EXPECT_LE(oracle::detailed_balance_error(m, lambda, 6), 1e-12);
    }
}
