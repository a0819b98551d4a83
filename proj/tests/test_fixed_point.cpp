#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/fixed_point.hpp"
#include "walkspec/kernel.hpp"
#include "walkspec/quotient_dp.hpp"

using namespace walkspec;
using namespace walkspec::fixed_point;

namespace {

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

TEST(FixedPoint, GrowthRates) {
    using F = FactorSpec;
    EXPECT_NEAR(gr_free_product({F::complete(2), F::complete(1)}), std::sqrt(2.0), 1e-10);
    for (int m : {1, 2, 3, 7}) EXPECT_NEAR(gr_free_product({F::complete(m), F::complete(m)}), m, 1e-10);
    for (int r : {3, 4, 6}) EXPECT_NEAR(gr_free_product(std::vector<F>(r, F::complete(1))), r - 1, 1e-10);
    EXPECT_NEAR(lambda_c_free_product({2, 2, 2}), 4.0, 1e-10);
    EXPECT_THROW(gr_free_product({F::complete(1)}), Error);
    for (int m1 = 1; m1 <= 4; ++m1)
        for (int m2 = 1; m2 <= 4; ++m2)
            EXPECT_NEAR(lambda_c_two_complete(m1, m2), gr_free_product({F::complete(m1), F::complete(m2)}), 1e-10);

    const FixedPointResult r = growth_root({F::complete(3), F::cycle(5)});
    EXPECT_LE(std::abs(r.residual), 1e-12);
    EXPECT_LE(r.lo, r.value);
    EXPECT_GE(r.hi, r.value);
}

TEST(FixedPoint, CycleFactor) {
    EXPECT_NEAR(k_ell(4, 0.3), 2 * 0.3 + 0.09, 1e-15);
    EXPECT_NEAR(k_ell(3, 0.3), 0.6, 1e-15);
    EXPECT_NEAR(k_ell(5, 0.3), 2 * 0.3 + 2 * 0.09, 1e-15);
    EXPECT_NEAR(FactorSpec::cycle(6).sphere_gf(0.5), 2 * 0.5 + 2 * 0.25 + 0.125, 1e-15);
}

TEST(FixedPoint, XdlGrowth) {
    EXPECT_NEAR(gr_X_dl(3, 3), std::sqrt(2.0), 1e-10);
    // z^3 + 2z^2 - 1 = (z + 1)(z^2 + z - 1).
    EXPECT_NEAR(gr_X_dl(3, 4), (1.0 + std::sqrt(5.0)) / 2.0, 1e-10);
    for (int d = 3; d <= 8; ++d) {
        double prev = 0.0;
        for (int ell = 3; ell <= 12; ++ell) {
            EXPECT_LT(h_ell(d, ell, 1.0 / (d - 1)), 1.0);
            const double g = gr_X_dl(d, ell);
            EXPECT_GT(g, prev);
            EXPECT_LT(g, d - 1.0);
            prev = g;
        }
    }
}

TEST(FixedPoint, FAtOne) {
    for (const std::vector<int>& ms : std::vector<std::vector<int>>{{2, 1}, {3, 2}, {1, 1, 1}, {2, 2, 3}}) {
        const double lc = lambda_c_free_product(ms);
        for (double lambda : {0.1, 0.5 * lc, 0.9 * lc}) {
            EXPECT_NEAR(F_eval(ms, lambda, 1.0, 1.0), 1.0, 1e-12);
            EXPECT_GT(F_eval(ms, lambda, 1.0, 0.0), 0.0);
            double expect = 0.0;
            for (int m : ms) expect += m / (m + lambda);
            EXPECT_NEAR(dF_dU(ms, lambda, 1.0, 1.0), expect, 1e-12);
            EXPECT_GT(expect, 1.0);
        }
    }
}

TEST(FixedPoint, DerivativeMatchesDifferenceQuotient) {
    const std::vector<int> ms{3, 1};
    for (double u : {0.0, 0.3, 0.8}) {
        const double h = 1e-6;
        const double fd = (F_eval(ms, 0.8, 1.1, u + h) - F_eval(ms, 0.8, 1.1, u - h)) / (2 * h);
        EXPECT_NEAR(dF_dU(ms, 0.8, 1.1, u), fd, 1e-8);
    }
}

TEST(FixedPoint, SolveUMatchesTreeClosedForm) {
    for (int r : {3, 4, 5}) {
        const std::vector<int> ms(r, 1);
        for (double lambda : {0.3, 1.0, r - 1.5}) {
            const double radius = closed_form::tree_radius(r, lambda);
            for (double frac : {0.2, 0.7, 0.98}) {
                const double z = frac * radius;
                EXPECT_NEAR(solve_U(ms, lambda, z), closed_form::u_tree(r, lambda, z), 1e-10);
            }
        }
    }
}

TEST(FixedPoint, SolveUMatchesFirstReturnSum) {
    const SeriesTable t = f_series(QuotientChain(GraphModel::free_product({2, 1}), 1.0), 6000);
    double s = 0.0;
    for (std::size_t n = 1; n <= 6000; ++n) {
        s += t.f(n);
        ASSERT_LT(s, 1.0);
    }
    EXPECT_NEAR(solve_U({2, 1}, 1.0, 1.0), s, 1e-6);
}

TEST(FixedPoint, IterationAgreesWithBisection) {
    const IterationTrace tr = iterate_U({2, 1}, 1.0, 1.0);
    EXPECT_TRUE(tr.monotone);
    EXPECT_NEAR(tr.value, solve_U({2, 1}, 1.0, 1.0), 1e-12);
    EXPECT_GT(tr.value, 0.0);
    EXPECT_LT(tr.value, 1.0);
}

TEST(FixedPoint, BeyondRadiusFails) {
    EXPECT_EQ(kind_of([] { solve_U({2, 1}, 1.0, 5.0); }), ErrorKind::NoConvergence);
    EXPECT_EQ(kind_of([] { iterate_U({2, 1}, 1.0, 5.0); }), ErrorKind::NoConvergence);
}

TEST(FixedPoint, TangencyAtZ0) {
    for (double lambda : {0.3, 1.0, 1.35}) {
        const double z0 = closed_form::z0_two_complete(2, 1, lambda);
        const double u = solve_U({2, 1}, lambda, z0);
        EXPECT_NEAR(3.0 * u, 3.0 + lambda - 1.0 - (std::sqrt(2.0) - 1.0) * z0, 1e-6);
    }
}

TEST(FixedPoint, RhoMatchesClosedForms) {
    for (int i = 1; i <= 50; ++i) {
        const double lambda = std::sqrt(2.0) * i / 51.0;
        EXPECT_NEAR(rho_free_product({2, 1}, lambda), closed_form::rho_two_complete(2, 1, lambda), 1e-9);
    }
    for (double lambda : {0.05, 0.5, 1.0, 1.9}) {
        EXPECT_NEAR(rho_free_product({1, 1, 1}, lambda), closed_form::rho_tree(3, lambda), 1e-9);
    }
    EXPECT_NEAR(rho_free_product({2, 1}, 1e-6), 0.5, 1e-3);
    EXPECT_NEAR(rho_free_product({2, 2, 2}, 1e-6), 0.2, 1e-3);
}

TEST(FixedPoint, RhoBelowOneInTransientRegime) {
    for (const std::vector<int>& ms : std::vector<std::vector<int>>{{2, 1}, {3, 3}, {2, 2, 1}, {1, 1, 1, 1}}) {
        const double lc = lambda_c_free_product(ms);
        double prev = 0.0;
        for (int i = 1; i <= 20; ++i) {
            const double r = rho_free_product(ms, 0.99 * lc * i / 20.0);
            EXPECT_LT(r, 1.0 - 1e-9);
            EXPECT_GT(r, prev);
            prev = r;
        }
    }
}

TEST(FixedPoint, HypothesisGate) {
    EXPECT_EQ(kind_of([] { rho_free_product({2, 1}, std::sqrt(2.0)); }), ErrorKind::HypothesisViolated);
    EXPECT_EQ(kind_of([] { rho_free_product({2, 1}, 2.0); }), ErrorKind::HypothesisViolated);
    EXPECT_EQ(kind_of([] { rho_free_product({2, 1}, 0.0); }), ErrorKind::HypothesisViolated);
}
