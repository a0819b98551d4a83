#pragma once

#include <vector>

namespace walkspec::closed_form {

// Several formulas below are stated only for the two-complete-graph case with m1*m2 >= 2.
// Passing allow_degenerate = true admits the line (m1 = m2 = 1) for sanity checks.

// --- d-regular tree -------------------------------------------------------

// 2 sqrt((d-1) lambda) / (d-1+lambda) on [0, d-1]; DomainError above d-1.
double rho_tree(int d, double lambda);

// Return probability min(lambda, d-1)/(d-1).
double theta_tree(int d, double lambda);

// log c_k of the k-th Catalan number, via lgamma.
double log_catalan(long k);

// First-return probability at time 2n: c_{n-1} ((d-1)/(d-1+lambda))^{n-1} (lambda/(d-1+lambda))^n.
double f2n_tree(int d, double lambda, long n);
double log_f2n_tree(int d, double lambda, long n);

// Radius of the first-return series in z: (d-1+lambda) / (2 sqrt(lambda (d-1))).
double tree_radius(int d, double lambda);

// First-return generating function U(z); OutsideRadius for |z| beyond tree_radius.
double u_tree(int d, double lambda, double z);
// Green function 1/(1-U(z)) for lambda in (0, d-1] and |z| strictly inside the radius.
double green_tree(int d, double lambda, double z);

// Constants of the singularity analysis of the tree Green function.
struct TreeSingularity {
    double a = 0.0;   // 2(d-1)/(d-1+lambda)
    double b = 0.0;   // (d-1-lambda)/(d-1+lambda)
    double c1 = 0.0;  // (d-1-lambda)^3 / (2(d-1)(d-1+lambda)^2)
    double c2 = 0.0;  // 2 rho (d-1)/(d-1-lambda)
};
TreeSingularity tree_singularity(int d, double lambda);

// The published constant (d-1-lambda)^2 / (16 (pi lambda)^{1/2} (d-1)^{3/2}) for
// p^{(2n)} ~ C rho^{2n} n^{-3/2}. DomainError outside (0, d-1).
double p2n_tree_asymptotic_constant(int d, double lambda);

// sqrt(c1 / (2 pi rho c2)) * 2^{-3/2}: the same constant assembled from c1, c2.
double p2n_tree_constant_from_c1c2(int d, double lambda);

// Constant read off the square-root singularity of G = a/(b + sqrt(1 - rho^2 z^2)):
// a / (2 sqrt(pi) b^2). This is the value the return probabilities actually approach.
double p2n_tree_singularity_constant(int d, double lambda);

// Ratio f^{(2n)} / (pi^{-1/2} rho^{2n} n^{-3/2}) tends to (d-1+lambda)/(4(d-1)).
double f2n_tree_limit_ratio(int d, double lambda);

// --- K_{m1+1} * K_{m2+1} --------------------------------------------------

double lambda_c_two_complete(int m1, int m2);

// 2(m1 m2 - lambda^2) / ((2 lambda + m)(lambda + m - 1)) on [0, sqrt(m1 m2)].
double speed_two_complete(int m1, int m2, double lambda, bool allow_degenerate = false);

// (m - 2 + sqrt((m1-m2)^2 + 4 lambda (sqrt m1 + sqrt m2)^2)) / (2 (m + lambda - 1)) on (0, sqrt(m1 m2)].
double rho_two_complete(int m1, int m2, double lambda, bool allow_degenerate = false);

// 1 / rho_two_complete.
double z0_two_complete(int m1, int m2, double lambda, bool allow_degenerate = false);

// max_i (m_i - 1) / (m - 1).
double rho_zero_limit(const std::vector<int>& ms);

// Long-run fraction of time on type i: (m_i + lambda)/(m + 2 lambda).
double occupation_limit(int m1, int m2, double lambda, int type);

// Probability of a lateral step from a type-i vertex: (m_i - 1)/(m - 1 + lambda).
double lateral_probability(int m1, int m2, double lambda, int type);

}  // namespace walkspec::closed_form
