#include "walkspec/kernel.hpp"

#include <cmath>
#include <string>

#include "walkspec/error.hpp"

namespace walkspec {

namespace {

void require_nonnegative(double lambda) {
    if (!(lambda >= 0.0)) throw Error(ErrorKind::NegativeBias, "lambda must be >= 0, got " + std::to_string(lambda));
}

void require_positive(double lambda) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::NonpositiveBias, "lambda must be > 0, got " + std::to_string(lambda));
}

}  // namespace

ClassProbabilities class_probabilities(const GraphModel& model, double lambda, std::size_t level, int type) {
    require_nonnegative(lambda);
    const LevelDegrees deg = class_degrees(model, level, type);
    if (level == 0) {
        const double p = 1.0 / deg.d_v;
        return {0.0, 0.0, p};
    }
    // d_v + (lambda - 1) d_v^- with d_v^- = 1 for both families.
    const double denom = static_cast<double>(deg.d_plus + deg.d_zero) + lambda * deg.d_minus;
    return {lambda / denom, 1.0 / denom, 1.0 / denom};
}

TransitionRow transition_row(const GraphModel& model, double lambda, const VertexAddr& v) {
    require_nonnegative(lambda);
    auto nbrs = neighbors(model, v);
    const auto p = class_probabilities(model, lambda, v.level(), v.type());
    TransitionRow row;
    row.reserve(nbrs.size());
    for (auto& nb : nbrs) {
        const double prob = nb.level_delta < 0 ? p.down : (nb.level_delta == 0 ? p.lateral : p.up);
        row.push_back({std::move(nb.addr), prob});
    }
    return row;
}

double conductance(double lambda, std::size_t n) {
    require_positive(lambda);
    return std::pow(lambda, -static_cast<double>(n));
}

double class_stationary_weight(const GraphModel& model, double lambda, std::size_t level, int type) {
    require_positive(lambda);
    const LevelDegrees deg = class_degrees(model, level, type);
    if (level == 0) return deg.d_v;
    return (deg.d_plus + deg.d_zero + lambda * deg.d_minus) * std::pow(lambda, -static_cast<double>(level));
}

double stationary_weight(const GraphModel& model, double lambda, const VertexAddr& v) {
    check_vertex(model, v);
    return class_stationary_weight(model, lambda, v.level(), v.type());
}

QuotientChain::QuotientChain(GraphModel model, double lambda) : model_(std::move(model)), lambda_(lambda) {
    require_nonnegative(lambda);
    validate_model(model_);
    if (model_.is_free_product() && model_.ms().size() != 2) {
        throw Error(ErrorKind::UnsupportedModel,
                    "quotient chain is tabulated for trees and two-factor free products, got " + model_.to_string());
    }
    const int types = model_.type_count();
    origin_to_.assign(static_cast<std::size_t>(types) + 1, 0.0);
    down_ = stay_ = up_ = origin_to_;
    const int d = model_.degree();
    for (int t = 1; t <= types; ++t) {
        const auto i = static_cast<std::size_t>(t);
        const LevelDegrees deg = class_degrees(model_, 1, t);
        const double denom = static_cast<double>(deg.d_plus + deg.d_zero) + lambda * deg.d_minus;
        origin_to_[i] = model_.is_tree() ? 1.0 : static_cast<double>(model_.factor_size(t)) / d;
        down_[i] = lambda / denom;
        stay_[i] = deg.d_zero / denom;
        up_[i] = deg.d_plus / denom;
    }
}

QuotientRow QuotientChain::row(const QState& state) const {
    QuotientRow out;
    if (state.level == 0) {
        for (int t = 1; t <= type_count(); ++t) {
            if (origin_to(t) > 0.0) out.push_back({{1, t}, origin_to(t)});
        }
        return out;
    }
    const int t = state.type;
    const int nt = next_type(t);
    const QState below = state.level == 1 ? QState{0, 0} : QState{state.level - 1, nt};
    out.push_back({below, down(t)});
    out.push_back({state, stay(t)});
    out.push_back({{state.level + 1, nt}, up(t)});
    return out;
}

QuotientChain build_quotient(const GraphModel& model, double lambda) { return QuotientChain(model, lambda); }

QuotientRow quotient_row(const QuotientChain& chain, const QState& state) {
    const bool origin_ok = state.level == 0 && state.type == 0;
    const bool level_ok = state.level >= 1 && state.type >= 1 && state.type <= chain.type_count();
    if (!origin_ok && !level_ok) {
        throw Error(ErrorKind::InvalidState, "(" + std::to_string(state.level) + "," + std::to_string(state.type) +
                                                 ") is not a state of the quotient chain");
    }
    return chain.row(state);
}

}  // namespace walkspec
