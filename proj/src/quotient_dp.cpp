#include "walkspec/quotient_dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "walkspec/closed_form.hpp"
#include "walkspec/error.hpp"
#include "walkspec/format.hpp"

namespace walkspec {

namespace {

constexpr double kTrim = 1e-290;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double critical_bias(const GraphModel& model) {
    if (model.is_tree()) return model.tree_degree() - 1.0;
    const auto& ms = model.ms();
    return std::sqrt(static_cast<double>(ms[0]) * ms[1]);
}

// Forward DP on the quotient chain in tilted coordinates v(L, t) = u(L, t) theta^L e^{-S}.
// With theta = sqrt(lambda / lambda_c) the tilted chain is close to symmetric, so the origin
// entry never falls far below the running maximum.
class Propagator {
public:
    Propagator(const QuotientChain& chain, std::size_t n_max, bool absorbing, bool full_support)
        : chain_(chain), n_max_(n_max), absorbing_(absorbing), full_(full_support), types_(chain.type_count()) {
        const double lambda = chain.lambda();
        theta_ = lambda > 0.0 ? std::sqrt(lambda / critical_bias(chain.model())) : 1.0;
        const auto t1 = static_cast<std::size_t>(types_) + 1;
        up_.assign(t1, 0.0);
        down_.assign(t1, 0.0);
        stay_.assign(t1, 0.0);
        enter_.assign(t1, 0.0);
        for (int t = 1; t <= types_; ++t) {
            const auto i = static_cast<std::size_t>(t);
            up_[i] = chain.up(t) * theta_;
            down_[i] = chain.down(t) / theta_;
            stay_[i] = chain.stay(t);
            enter_[i] = chain.origin_to(t) * theta_;
        }
        const std::size_t levels = full_ ? n_max : n_max / 2 + 1;
        cur_.assign(1 + levels * static_cast<std::size_t>(types_), 0.0);
        nxt_ = cur_;
        cur_[0] = 1.0;
    }

    // Advances one step and returns the log-value that lands on the origin at this step.
    LogValue step(std::size_t k) {
        const std::size_t cap = full_ ? k : std::min(k, n_max_ - k);
        std::fill(nxt_.begin(), nxt_.end(), 0.0);
        const double w0 = cur_[0];
        if (w0 != 0.0 && cap >= 1) {
            for (int t = 1; t <= types_; ++t) nxt_[index(1, t)] += w0 * enter_[static_cast<std::size_t>(t)];
        }
        for (std::size_t level = 1; level <= level_max_; ++level) {
            for (int t = 1; t <= types_; ++t) {
                const double w = cur_[index(level, t)];
                if (w == 0.0) continue;
                const auto i = static_cast<std::size_t>(t);
                const int nt = chain_.next_type(t);
                if (level == 1) {
                    nxt_[0] += w * down_[i];
                } else if (level - 1 <= cap) {
                    nxt_[index(level - 1, nt)] += w * down_[i];
                }
                if (level <= cap) nxt_[index(level, t)] += w * stay_[i];
                if (level + 1 <= cap) nxt_[index(level + 1, nt)] += w * up_[i];
            }
        }
        level_max_ = std::min(level_max_ + 1, cap);
        std::swap(cur_, nxt_);

        LogValue hit = LogValue::of(cur_[0]);
        if (!hit.zero) hit.log += log_scale_;
        if (absorbing_) cur_[0] = 0.0;

        double peak = 0.0;
        for (std::size_t i = 0; i < active_size(); ++i) peak = std::max(peak, cur_[i]);
        if (peak > 0.0) {
            const double inv = 1.0 / peak;
            for (std::size_t i = 0; i < active_size(); ++i) {
                double& v = cur_[i];
                v *= inv;
                if (v < kTrim) v = 0.0;
            }
            log_scale_ += std::log(peak);
        }
        return hit;
    }

    // log of the total untilted mass.
    double log_mass() const {
        const double log_theta = std::log(theta_);
        double best = kNegInf;
        auto term = [&](std::size_t i, std::size_t level) {
            return cur_[i] > 0.0 ? std::log(cur_[i]) - static_cast<double>(level) * log_theta : kNegInf;
        };
        best = std::max(best, term(0, 0));
        for (std::size_t level = 1; level <= level_max_; ++level) {
            for (int t = 1; t <= types_; ++t) best = std::max(best, term(index(level, t), level));
        }
        if (best == kNegInf) return kNegInf;
        double sum = std::exp(term(0, 0) - best);
        for (std::size_t level = 1; level <= level_max_; ++level) {
            for (int t = 1; t <= types_; ++t) sum += std::exp(term(index(level, t), level) - best);
        }
        return best + std::log(sum) + log_scale_;
    }

private:
    std::size_t index(std::size_t level, int type) const {
        return 1 + (level - 1) * static_cast<std::size_t>(types_) + static_cast<std::size_t>(type - 1);
    }
    std::size_t active_size() const { return 1 + level_max_ * static_cast<std::size_t>(types_); }

    const QuotientChain& chain_;
    std::size_t n_max_;
    bool absorbing_;
    bool full_;
    int types_;
    double theta_ = 1.0;
    std::vector<double> up_, down_, stay_, enter_;
    std::vector<double> cur_, nxt_;
    std::size_t level_max_ = 0;
    double log_scale_ = 0.0;
};

std::vector<LogValue> run(const QuotientChain& chain, std::size_t n_max, bool absorbing, bool full_support,
                          DpDiagnostics* diagnostics) {
    std::vector<LogValue> out(n_max + 1);
    out[0] = absorbing ? LogValue{} : LogValue::of(1.0);
    Propagator prop(chain, n_max, absorbing, full_support);
    double defect = 0.0;
    for (std::size_t k = 1; k <= n_max; ++k) {
        out[k] = prop.step(k);
        if (diagnostics != nullptr && full_support) defect = std::max(defect, std::abs(std::expm1(prop.log_mass())));
    }
    if (diagnostics != nullptr) diagnostics->max_mass_defect = defect;
    return out;
}

double g_test(int d, double lambda, std::size_t k) {
    const double kk = static_cast<double>(k);
    return (1.0 + (d - 1 - lambda) / (d - 1 + lambda) * kk) * std::pow((d - 1) / lambda, -kk / 2.0);
}

void require_rayleigh_domain(const GraphModel& model, double lambda) {
    const int d = model.degree();
    if (!(lambda > 0.0) || !(lambda < d - 1)) {
        throw Error(ErrorKind::DomainError, "rayleigh_quotient needs lambda in (0, d-1) with d=" + std::to_string(d));
    }
}

struct RayleighParts {
    double numerator = 0.0;
    double norm = 0.0;
};

RayleighParts rayleigh_parts(const GraphModel& model, double lambda, std::size_t n) {
    require_rayleigh_domain(model, lambda);
    const int d = model.degree();
    const auto counts = class_counts(model, n);
    std::vector<double> g(n + 2);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = g_test(d, lambda, k);
    RayleighParts out;
    for (std::size_t level = 0; level <= n; ++level) {
        for (int t = level == 0 ? 0 : 1; t <= (level == 0 ? 0 : model.type_count()); ++t) {
            const double count = counts[level][static_cast<std::size_t>(t)];
            if (count == 0.0) continue;
            const LevelDegrees deg = class_degrees(model, level, t);
            const ClassProbabilities p = class_probabilities(model, lambda, level, t);
            const double mass = count * class_stationary_weight(model, lambda, level, t);
            double pf = deg.d_zero * p.lateral * g[level];
            if (level > 0) pf += deg.d_minus * p.down * g[level - 1];
            if (level < n) pf += deg.d_plus * p.up * g[level + 1];
            out.numerator += mass * g[level] * pf;
            out.norm += mass * g[level] * g[level];
        }
    }
    return out;
}

}  // namespace

LogValue LogValue::of(double value) {
    if (value > 0.0) return {std::log(value), false};
    return {0.0, true};
}

double LogValue::value() const { return zero ? 0.0 : std::exp(log); }

SeriesTable p_series(const QuotientChain& chain, std::size_t n_max, const DpOptions& options,
                     DpDiagnostics* diagnostics) {
    SeriesTable table;
    table.n_max = n_max;
    table.log_p = run(chain, n_max, false, options.full_support, diagnostics);
    return table;
}

SeriesTable f_series(const QuotientChain& chain, std::size_t n_max) {
    SeriesTable table;
    table.n_max = n_max;
    table.log_f = run(chain, n_max, true, false, nullptr);
    return table;
}

SeriesTable series(const QuotientChain& chain, std::size_t n_max) {
    SeriesTable table = p_series(chain, n_max);
    table.log_f = run(chain, n_max, true, false, nullptr);
    return table;
}

double renewal_check(const SeriesTable& table) {
    if (table.log_p.size() != table.n_max + 1 || table.log_f.size() != table.n_max + 1) {
        throw Error(ErrorKind::InsufficientData, "renewal_check needs both p and f up to n_max");
    }
    double worst = 0.0;
    std::vector<double> terms;
    for (std::size_t n = 1; n <= table.n_max; ++n) {
        terms.clear();
        for (std::size_t k = 1; k <= n; ++k) {
            const LogValue& f = table.log_f[k];
            const LogValue& p = table.log_p[n - k];
            if (!f.zero && !p.zero) terms.push_back(f.log + p.log);
        }
        const LogValue& pn = table.log_p[n];
        if (pn.zero) {
            worst = std::max(worst, terms.empty() ? 0.0 : 1.0);
            continue;
        }
        double ratio = 0.0;
        for (double t : terms) ratio += std::exp(t - pn.log);
        worst = std::max(worst, std::abs(ratio - 1.0));
    }
    return worst;
}

RhoEstimate rho_from_series(const SeriesTable& table, int period) {
    if (period < 1) throw Error(ErrorKind::InvalidArgument, "period must be >= 1");
    if (table.n_max < 200 || table.log_p.size() != table.n_max + 1) {
        throw Error(ErrorKind::InsufficientData, "rho_from_series needs n_max >= 200, got " + std::to_string(table.n_max));
    }
    const auto s = static_cast<std::size_t>(2 * period);
    auto estimate = [&](std::size_t n) {
        const LogValue& hi = table.log_p[n];
        const LogValue& lo = table.log_p[n - s];
        if (hi.zero || lo.zero) throw Error(ErrorKind::InsufficientData, "zero return probability in the tail");
        const double sd = static_cast<double>(s);
        const double ratio = static_cast<double>(n) / static_cast<double>(n - s);
        return std::exp((hi.log - lo.log) / sd) * std::pow(ratio, 1.5 / sd);
    };
    const std::size_t top = table.n_max - table.n_max % 2;
    const std::size_t mid = (table.n_max / 2) - (table.n_max / 2) % 2;

    RhoEstimate out;
    out.n_used = top;
    out.rho = estimate(top);
    out.error = std::abs(out.rho - estimate(mid));

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t n = mid; n <= top; n += 2) {
        const LogValue& v = table.log_p[n];
        if (v.zero) throw Error(ErrorKind::InsufficientData, "zero return probability in the tail");
        const double x = static_cast<double>(n);
        const double y = v.log + 1.5 * std::log(x);
        pts.emplace_back(x, y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    const double c = static_cast<double>(count);
    const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / c;
    double ss = 0.0;
    for (const auto& [x, y] : pts) ss += (y - icpt - slope * x) * (y - icpt - slope * x);
    out.slope_rho = std::exp(slope);
    out.residual = std::sqrt(ss / c);
    return out;
}

double rayleigh_quotient(const GraphModel& model, double lambda, std::size_t n) {
    const auto parts = rayleigh_parts(model, lambda, n);
    return parts.numerator / parts.norm;
}

double rayleigh_lower_bound(const GraphModel& model, double lambda, std::size_t n) {
    const auto parts = rayleigh_parts(model, lambda, n);
    const int d = model.degree();
    const double mn = sphere_sizes(model, n)[n];
    const double gn = g_test(d, lambda, n);
    return closed_form::rho_tree(d, lambda) -
           (d - 1) * mn * gn * gn * std::pow(lambda, -static_cast<double>(n)) / parts.norm;
}

double rayleigh_quotient_on_ball(const GraphModel& model, double lambda, std::size_t n, std::size_t cap) {
    require_rayleigh_domain(model, lambda);
    const Ball ball = enumerate_ball(model, n, cap);
    const int d = model.degree();
    std::vector<double> f(ball.vertices.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g_test(d, lambda, ball.vertices[i].level());
    double num = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const VertexAddr& v = ball.vertices[i];
        const double mu = stationary_weight(model, lambda, v);
        const ClassProbabilities p = class_probabilities(model, lambda, v.level(), v.type());
        double pf = 0.0;
        for (const auto& [j, delta] : ball.adjacency[i]) {
            const double prob = delta < 0 ? p.down : (delta == 0 ? p.lateral : p.up);
            pf += prob * f[j];
        }
        num += mu * f[i] * pf;
        norm += mu * f[i] * f[i];
    }
    return num / norm;
}

void write_series_csv(std::ostream& out, const SeriesTable& table) {
    auto log_text = [](const std::vector<LogValue>& v, std::size_t n) {
        if (v.empty()) return std::string("nan");
        return v[n].zero ? std::string("-inf") : format_double(v[n].log);
    };
    auto value_text = [](const std::vector<LogValue>& v, std::size_t n) {
        if (v.empty()) return std::string("nan");
        return format_double(v[n].value());
    };
    out << "n,p_n,f_n,log_p_n,log_f_n\n";
    for (std::size_t n = 0; n <= table.n_max; ++n) {
        out << n << ',' << value_text(table.log_p, n) << ',' << value_text(table.log_f, n) << ','
            << log_text(table.log_p, n) << ',' << log_text(table.log_f, n) << '\n';
    }
}

}  // namespace walkspec
