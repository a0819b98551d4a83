#include "walkspec/fixed_point.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"

namespace walkspec::fixed_point {

namespace {

constexpr int kMaxBisection = 400;
constexpr double kDivergence = 1.5;
constexpr int kPrescanPoints = 64;

// Bisection on an increasing function for f(x) = 0 with f(lo) < 0 <= f(hi). Runs until the
// bracket stops shrinking in floating point.
template <class F>
FixedPointResult bisect_increasing(F&& f, double lo, double hi) {
    FixedPointResult out;
    for (; out.iterations < kMaxBisection; ++out.iterations) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    out.lo = lo;
    out.hi = hi;
    out.value = 0.5 * (lo + hi);
    out.residual = f(out.value);
    return out;
}

// -a + sqrt(a^2 + b) without cancellation for large positive a.
double sqrt_excess(double a, double b) {
    const double s = std::sqrt(a * a + b);
    return a > 0.0 ? b / (a + s) : s - a;
}

int total(const std::vector<int>& ms) { return std::accumulate(ms.begin(), ms.end(), 0); }

void require_factors(const std::vector<int>& ms) {
    if (ms.size() < 2) throw Error(ErrorKind::InvalidModel, "free product needs r >= 2 factors");
    for (int m : ms) {
        if (m < 1) throw Error(ErrorKind::InvalidModel, "factor sizes must be >= 1");
    }
}

double growth_lhs(const std::vector<FactorSpec>& factors, double z) {
    double s = 0.0;
    for (const auto& f : factors) {
        const double psi = f.sphere_gf(z);
        s += psi / (1.0 + psi);
    }
    return s;
}

// min_U (F(z, U) - U) and its minimiser. F(z, .) is convex with slope rising from 0 to r.
constexpr double kTangencySlack = 1e-13;

struct Tangent {
    double u_star = 0.0;
    double gap = 0.0;
};

Tangent tangent(const std::vector<int>& ms, double lambda, double z) {
    auto slope = [&](double u) { return dF_dU(ms, lambda, z, u) - 1.0; };
    double lo = 0.0;
    double hi = 1.0;
    if (slope(lo) >= 0.0) {
        while (slope(lo) >= 0.0) {
            hi = lo;
            lo = lo == 0.0 ? -1.0 : 2.0 * lo;
            if (lo < -1e12) break;
        }
    } else {
        while (slope(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e12) break;
        }
    }
    const auto r = bisect_increasing(slope, lo, hi);
    return {r.value, F_eval(ms, lambda, z, r.value) - r.value};
}

}  // namespace

double FactorSpec::sphere_gf(double z) const {
    switch (kind) {
        case Kind::Complete: return size * z;
        case Kind::Cycle: return k_ell(size, z);
    }
    return 0.0;
}

FixedPointResult growth_root(const std::vector<FactorSpec>& factors) {
    if (factors.size() < 2) throw Error(ErrorKind::NoRoot, "growth equation needs at least two factors");
    for (const auto& f : factors) {
        const bool trivial = (f.kind == FactorSpec::Kind::Complete && f.size < 1) ||
                             (f.kind == FactorSpec::Kind::Cycle && f.size < 3);
        if (trivial) throw Error(ErrorKind::NoRoot, "degenerate factor in growth equation");
    }
    auto g = [&](double z) { return growth_lhs(factors, z) - 1.0; };
    double hi = 1.0;
    while (g(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw Error(ErrorKind::NoRoot, "growth equation has no root below 1e12");
    }
    return bisect_increasing(g, 0.0, hi);
}

double gr_free_product(const std::vector<FactorSpec>& factors) { return 1.0 / growth_root(factors).value; }

double lambda_c_two_complete(int m1, int m2) { return closed_form::lambda_c_two_complete(m1, m2); }

double lambda_c_free_product(const std::vector<int>& ms) {
    require_factors(ms);
    std::vector<FactorSpec> factors;
    for (int m : ms) factors.push_back(FactorSpec::complete(m));
    return gr_free_product(factors);
}

double k_ell(int ell, double z) {
    if (ell < 3) throw Error(ErrorKind::InvalidArgument, "cycle length must be >= 3");
    double s = 0.0;
    double zp = 1.0;
    const int full = (ell % 2 == 1) ? (ell - 1) / 2 : (ell - 2) / 2;
    for (int j = 1; j <= full; ++j) {
        zp *= z;
        s += 2.0 * zp;
    }
    if (ell % 2 == 0) s += zp * z;
    return s;
}

double h_ell(int d, int ell, double z) {
    const double k = k_ell(ell, z);
    return (d - 2) * z / (1.0 + z) + k / (1.0 + k);
}

double gr_X_dl(int d, int ell) {
    if (d < 3 || ell < 3) throw Error(ErrorKind::InvalidArgument, "gr_X_dl needs d >= 3 and l >= 3");
    if (!(h_ell(d, ell, 1.0 / (d - 1)) < 1.0)) {
        throw Error(ErrorKind::NoRoot, "h_l(1/(d-1)) < 1 fails for d=" + std::to_string(d) + ", l=" + std::to_string(ell));
    }
    auto g = [&](double z) { return h_ell(d, ell, z) - 1.0; };
    double hi = 1.0;
    while (g(hi) < 0.0) hi *= 2.0;
    return 1.0 / bisect_increasing(g, 0.0, hi).value;
}

double F_eval(const std::vector<int>& ms, double lambda, double z, double U) {
    const int m = total(ms);
    double s = 0.0;
    for (int mi : ms) {
        const double phi = m - 1 + lambda - (mi - 1) * z;
        s += sqrt_excess(phi - m * U, 4.0 * lambda * mi * z * z);
    }
    return s / (2.0 * m);
}

double dF_dU(const std::vector<int>& ms, double lambda, double z, double U) {
    const int m = total(ms);
    double s = 0.0;
    for (int mi : ms) {
        const double a = m - 1 + lambda - (mi - 1) * z - m * U;
        const double root = std::sqrt(a * a + 4.0 * lambda * mi * z * z);
        s += root > 0.0 ? a / root : (a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0));
    }
    return 0.5 * static_cast<double>(ms.size()) - 0.5 * s;
}

double solve_U(const std::vector<int>& ms, double lambda, double z) {
    require_factors(ms);
    if (z == 0.0 || lambda == 0.0) return 0.0;
    const Tangent t = tangent(ms, lambda, z);
    if (t.u_star <= 0.0 || t.gap > kTangencySlack) {
        throw Error(ErrorKind::NoConvergence, "U = F(z, U) has no fixed point at z=" + std::to_string(z) +
                                                  " (beyond the radius of convergence)");
    }
    // At z0 the fixed point is the double root u_star itself.
    if (t.gap >= 0.0) return t.u_star;
    auto decreasing = [&](double u) { return u - F_eval(ms, lambda, z, u); };
    const double root = bisect_increasing(decreasing, 0.0, t.u_star).value;
    if (root > kDivergence) {
        throw Error(ErrorKind::NoConvergence, "fixed point " + std::to_string(root) + " exceeds 1.5");
    }
    return root;
}

IterationTrace iterate_U(const std::vector<int>& ms, double lambda, double z, int max_iterations, double tolerance) {
    require_factors(ms);
    IterationTrace out;
    double u = 0.0;
    for (out.iterations = 1; out.iterations <= max_iterations; ++out.iterations) {
        const double next = F_eval(ms, lambda, z, u);
        if (next < u) out.monotone = false;
        if (next > kDivergence) {
            throw Error(ErrorKind::NoConvergence, "iterates exceed 1.5 at z=" + std::to_string(z));
        }
        if (std::abs(next - u) <= tolerance) {
            out.value = next;
            return out;
        }
        u = next;
    }
    throw Error(ErrorKind::NoConvergence, "U iteration did not converge in " + std::to_string(max_iterations) + " steps");
}

FixedPointResult z0_free_product(const std::vector<int>& ms, double lambda) {
    require_factors(ms);
    const double lc = lambda_c_free_product(ms);
    if (!(lambda > 0.0) || !(lambda < lc)) {
        throw Error(ErrorKind::HypothesisViolated,
                    "rho_free_product needs 0 < lambda < lambda_c=" + std::to_string(lc) + ", got " + std::to_string(lambda));
    }
    // True while a fixed point with dF/dU < 1 exists, i.e. z < z0.
    auto below = [&](double z) { return tangent(ms, lambda, z).gap < 0.0; };
    if (!below(1.0)) throw Error(ErrorKind::NoConvergence, "no subcritical fixed point at z = 1");

    double lo = 1.0;
    double hi = 1.1;
    while (below(hi)) {
        lo = hi;
        hi *= 1.5;
        if (hi > 1e3) throw Error(ErrorKind::NoConvergence, "z0 bracket exceeded 1e3");
    }

    std::array<bool, kPrescanPoints> scan{};
    for (int i = 0; i < kPrescanPoints; ++i) {
        scan[static_cast<std::size_t>(i)] = below(lo + (hi - lo) * i / (kPrescanPoints - 1));
    }
    int changes = 0;
    for (std::size_t i = 1; i < scan.size(); ++i) changes += scan[i] != scan[i - 1];
    if (changes != 1) {
        throw Error(ErrorKind::MultipleRoots, "tangency condition changes sign " + std::to_string(changes) +
                                                  " times on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    auto g = [&](double z) { return below(z) ? -1.0 : 1.0; };
    FixedPointResult r = bisect_increasing(g, lo, hi);
    r.residual = tangent(ms, lambda, r.value).gap;
    return r;
}

double rho_free_product(const std::vector<int>& ms, double lambda) { return 1.0 / z0_free_product(ms, lambda).value; }

}  // namespace walkspec::fixed_point
