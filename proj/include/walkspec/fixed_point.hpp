#pragma once

#include <cstddef>
#include <vector>

namespace walkspec::fixed_point {

// A finite rooted factor graph, described by its sphere generating function psi(z).
struct FactorSpec {
    enum class Kind { Complete, Cycle };
    Kind kind = Kind::Complete;
    int size = 1;  // m for K_{m+1}, l for the cycle C_l

    static FactorSpec complete(int m) { return {Kind::Complete, m}; }
    static FactorSpec cycle(int l) { return {Kind::Cycle, l}; }

    // psi(z) = sum_{n >= 1} |sphere_n| z^n.
    double sphere_gf(double z) const;
};

struct FixedPointResult {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double lo = 0.0;
    double hi = 0.0;
};

// Root z* of sum_i psi_i(z)/(1 + psi_i(z)) = 1; the growth rate is 1/z*.
FixedPointResult growth_root(const std::vector<FactorSpec>& factors);
double gr_free_product(const std::vector<FactorSpec>& factors);

double lambda_c_two_complete(int m1, int m2);
// Critical bias of the free product of complete graphs, 1/z* with sum m_i z/(1 + m_i z) = 1.
double lambda_c_free_product(const std::vector<int>& ms);

// Sphere generating function of the cycle C_l.
double k_ell(int ell, double z);
// (d-2) z/(1+z) + k_l(z)/(1+k_l(z)).
double h_ell(int d, int ell, double z);
// Growth rate of (Z_2 * ... * Z_2) * Z_l with d-2 copies of Z_2. Also checks h_l(1/(d-1)) < 1
// and throws NoRoot if that fails.
double gr_X_dl(int d, int ell);

// F(z, U) = (1/2m) sum_i { -(phi_i - mU) + sqrt((phi_i - mU)^2 + 4 lambda m_i z^2) },
// phi_i(z) = m - 1 + lambda - (m_i - 1) z.
double F_eval(const std::vector<int>& ms, double lambda, double z, double U);
double dF_dU(const std::vector<int>& ms, double lambda, double z, double U);

// Smallest non-negative fixed point of U = F(z, U). F is increasing and convex in U, so the
// root is bracketed by 0 and the minimiser of F(z, U) - U. Throws NoConvergence when no fixed
// point exists (z beyond the radius) or the root exceeds 1.5.
double solve_U(const std::vector<int>& ms, double lambda, double z);

struct IterationTrace {
    double value = 0.0;
    int iterations = 0;
    bool monotone = true;
};

// Plain iteration U <- F(z, U) from U = 0. NoConvergence after max_iterations or when an
// iterate exceeds 1.5.
IterationTrace iterate_U(const std::vector<int>& ms, double lambda, double z, int max_iterations = 100000,
                         double tolerance = 1e-15);

// z0 = 1/rho: smallest z > 0 with dF/dU(z, U(z)) = 1. Requires 0 < lambda < lambda_c.
FixedPointResult z0_free_product(const std::vector<int>& ms, double lambda);
double rho_free_product(const std::vector<int>& ms, double lambda);

}  // namespace walkspec::fixed_point
