#include "walkspec/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "walkspec/error.hpp"

namespace walkspec::closed_form {

namespace {

using std::numbers::pi;

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorKind::DomainError, what); }

void require_tree(int d) {
    if (d < 2) throw Error(ErrorKind::InvalidModel, "regular tree needs d >= 2, got " + std::to_string(d));
}

void require_two_complete(int m1, int m2, bool allow_degenerate) {
    if (m1 < 1 || m2 < 1) throw Error(ErrorKind::InvalidModel, "factor sizes must be >= 1");
    if (m1 * m2 < 2 && !allow_degenerate) {
        throw Error(ErrorKind::HypothesisViolated, "two-complete formulas need m1*m2 >= 2, got m1=" +
                                                       std::to_string(m1) + ", m2=" + std::to_string(m2));
    }
}

void require_at_most_critical(int m1, int m2, double lambda) {
    const double lc = lambda_c_two_complete(m1, m2);
    if (lambda > lc) {
        throw Error(ErrorKind::HypothesisViolated,
                    "lambda=" + std::to_string(lambda) + " exceeds lambda_c=" + std::to_string(lc));
    }
}

}  // namespace

double rho_tree(int d, double lambda) {
    require_tree(d);
    if (lambda < 0.0 || lambda > d - 1) {
        domain_error("rho_tree is stated on [0, d-1], got lambda=" + std::to_string(lambda));
    }
    return 2.0 * std::sqrt((d - 1) * lambda) / (d - 1 + lambda);
}

double theta_tree(int d, double lambda) {
    require_tree(d);
    if (lambda < 0.0) domain_error("lambda must be >= 0");
    return std::min(lambda, static_cast<double>(d - 1)) / (d - 1);
}

double log_catalan(long k) {
    const double kk = static_cast<double>(k);
    return std::lgamma(2.0 * kk + 1.0) - 2.0 * std::lgamma(kk + 1.0) - std::log(kk + 1.0);
}

double log_f2n_tree(int d, double lambda, long n) {
    require_tree(d);
    if (!(lambda > 0.0)) domain_error("f2n_tree needs lambda > 0");
    if (n < 1) domain_error("f2n_tree needs n >= 1");
    const double up = (d - 1) / (d - 1 + lambda);
    const double down = lambda / (d - 1 + lambda);
    return log_catalan(n - 1) + static_cast<double>(n - 1) * std::log(up) + static_cast<double>(n) * std::log(down);
}

double f2n_tree(int d, double lambda, long n) { return std::exp(log_f2n_tree(d, lambda, n)); }

double tree_radius(int d, double lambda) {
    require_tree(d);
    if (!(lambda > 0.0)) domain_error("tree_radius needs lambda > 0");
    return (d - 1 + lambda) / (2.0 * std::sqrt(lambda * (d - 1)));
}

double u_tree(int d, double lambda, double z) {
    const double radius = tree_radius(d, lambda);
    if (std::abs(z) > radius * (1.0 + 1e-15)) {
        throw Error(ErrorKind::OutsideRadius,
                    "|z|=" + std::to_string(std::abs(z)) + " beyond radius " + std::to_string(radius));
    }
    const double s = d - 1 + lambda;
    const double radicand = std::max(0.0, s * s - 4.0 * lambda * (d - 1) * z * z);
    return (s - std::sqrt(radicand)) / (2.0 * (d - 1));
}

double green_tree(int d, double lambda, double z) {
    require_tree(d);
    if (!(lambda > 0.0) || lambda > d - 1) domain_error("green_tree is stated for lambda in (0, d-1]");
    const double radius = tree_radius(d, lambda);
    if (std::abs(z) >= radius) {
        throw Error(ErrorKind::OutsideRadius,
                    "|z|=" + std::to_string(std::abs(z)) + " not inside radius " + std::to_string(radius));
    }
    return 1.0 / (1.0 - u_tree(d, lambda, z));
}

TreeSingularity tree_singularity(int d, double lambda) {
    require_tree(d);
    if (!(lambda > 0.0) || !(lambda < d - 1)) domain_error("tree singularity constants need lambda in (0, d-1)");
    const double s = d - 1 + lambda;
    const double t = d - 1 - lambda;
    TreeSingularity out;
    out.a = 2.0 * (d - 1) / s;
    out.b = t / s;
    out.c1 = t * t * t / (2.0 * (d - 1) * s * s);
    out.c2 = 2.0 * rho_tree(d, lambda) * (d - 1) / t;
    return out;
}

double p2n_tree_asymptotic_constant(int d, double lambda) {
    require_tree(d);
    if (!(lambda > 0.0) || !(lambda < d - 1)) {
        domain_error("the subcritical constant needs lambda in (0, d-1); at lambda = d-1 use 1/sqrt(pi n)");
    }
    const double t = d - 1 - lambda;
    return t * t / (16.0 * std::sqrt(pi * lambda) * std::pow(d - 1.0, 1.5));
}

double p2n_tree_constant_from_c1c2(int d, double lambda) {
    const auto s = tree_singularity(d, lambda);
    const double rho = rho_tree(d, lambda);
    return std::sqrt(s.c1 / (2.0 * pi * rho * s.c2)) * std::pow(2.0, -1.5);
}

double p2n_tree_singularity_constant(int d, double lambda) {
    const auto s = tree_singularity(d, lambda);
    return s.a / (2.0 * std::sqrt(pi) * s.b * s.b);
}

double f2n_tree_limit_ratio(int d, double lambda) {
    require_tree(d);
    if (!(lambda > 0.0)) domain_error("needs lambda > 0");
    return (d - 1 + lambda) / (4.0 * (d - 1));
}

double lambda_c_two_complete(int m1, int m2) {
    if (m1 < 1 || m2 < 1) throw Error(ErrorKind::InvalidModel, "factor sizes must be >= 1");
    return std::sqrt(static_cast<double>(m1) * m2);
}

double speed_two_complete(int m1, int m2, double lambda, bool allow_degenerate) {
    require_two_complete(m1, m2, allow_degenerate);
    if (lambda < 0.0) domain_error("speed needs lambda >= 0");
    require_at_most_critical(m1, m2, lambda);
    const double m = m1 + m2;
    return 2.0 * (static_cast<double>(m1) * m2 - lambda * lambda) / ((2.0 * lambda + m) * (lambda + m - 1.0));
}

double rho_two_complete(int m1, int m2, double lambda, bool allow_degenerate) {
    require_two_complete(m1, m2, allow_degenerate);
    if (!(lambda > 0.0)) domain_error("rho_two_complete needs lambda > 0");
    require_at_most_critical(m1, m2, lambda);
    const double m = m1 + m2;
    const double diff = m1 - m2;
    const double root_sum = std::sqrt(static_cast<double>(m1)) + std::sqrt(static_cast<double>(m2));
    const double radical = std::sqrt(diff * diff + 4.0 * lambda * root_sum * root_sum);
    return (m - 2.0 + radical) / (2.0 * (m + lambda - 1.0));
}

double z0_two_complete(int m1, int m2, double lambda, bool allow_degenerate) {
    return 1.0 / rho_two_complete(m1, m2, lambda, allow_degenerate);
}

double rho_zero_limit(const std::vector<int>& ms) {
    if (ms.size() < 2) throw Error(ErrorKind::InvalidModel, "free product needs r >= 2");
    const int m = std::accumulate(ms.begin(), ms.end(), 0);
    const int mmax = *std::max_element(ms.begin(), ms.end());
    return static_cast<double>(mmax - 1) / (m - 1);
}

double occupation_limit(int m1, int m2, double lambda, int type) {
    if (type != 1 && type != 2) throw Error(ErrorKind::InvalidArgument, "type must be 1 or 2");
    const double mi = type == 1 ? m1 : m2;
    return (mi + lambda) / (m1 + m2 + 2.0 * lambda);
}

double lateral_probability(int m1, int m2, double lambda, int type) {
    if (type != 1 && type != 2) throw Error(ErrorKind::InvalidArgument, "type must be 1 or 2");
    const double mi = type == 1 ? m1 : m2;
    return (mi - 1.0) / (m1 + m2 - 1.0 + lambda);
}

}  // namespace walkspec::closed_form
