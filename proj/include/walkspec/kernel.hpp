#pragma once

#include <cstddef>
#include <vector>

#include "walkspec/graph_models.hpp"

namespace walkspec {

struct TransitionEntry {
    VertexAddr target;
    double probability = 0.0;
};

using TransitionRow = std::vector<TransitionEntry>;

// One-step probabilities from a vertex of a (level, type) class, per neighbor.
// down/lateral/up are the probabilities of each individual neighbor of that kind.
struct ClassProbabilities {
    double down = 0.0;
    double lateral = 0.0;
    double up = 0.0;
};

// lambda >= 0. Throws NegativeBias.
ClassProbabilities class_probabilities(const GraphModel& model, double lambda, std::size_t level, int type);

// Biased kernel: uniform at the root; lambda/(d_v + (lambda-1) d_v^-) to the parent and
// 1/(d_v + (lambda-1) d_v^-) to every other neighbor elsewhere.
TransitionRow transition_row(const GraphModel& model, double lambda, const VertexAddr& v);

// lambda^{-n} for an edge at distance n from the root. Throws NonpositiveBias.
double conductance(double lambda, std::size_t n);

// mu(o) = d_o, mu(x) = (d_x^+ + d_x^0 + lambda d_x^-) lambda^{-|x|}.
double stationary_weight(const GraphModel& model, double lambda, const VertexAddr& v);
double class_stationary_weight(const GraphModel& model, double lambda, std::size_t level, int type);

// State of the lumped chain; the origin is {0, 0}.
struct QState {
    std::size_t level = 0;
    int type = 0;

    friend auto operator<=>(const QState&, const QState&) = default;
};

struct QuotientEntry {
    QState target;
    double probability = 0.0;
};

using QuotientRow = std::vector<QuotientEntry>;

// Image of the walk under v -> (|v|, type(v)). Trees have a single type (1); two-factor
// free products have types 1 and 2. Rows are produced on demand for any level.
class QuotientChain {
public:
    QuotientChain(GraphModel model, double lambda);

    const GraphModel& model() const { return model_; }
    double lambda() const { return lambda_; }
    int type_count() const { return model_.type_count(); }

    // Probability that the first step from the origin lands on type t.
    double origin_to(int type) const { return origin_to_[static_cast<std::size_t>(type)]; }
    // Per-type step probabilities from any level >= 1 (aggregated over neighbors).
    double down(int type) const { return down_[static_cast<std::size_t>(type)]; }
    double stay(int type) const { return stay_[static_cast<std::size_t>(type)]; }
    double up(int type) const { return up_[static_cast<std::size_t>(type)]; }
    // Type reached by an up or down move from a vertex of the given type.
    int next_type(int type) const { return model_.is_tree() ? 1 : 3 - type; }

    QuotientRow row(const QState& state) const;

private:
    GraphModel model_;
    double lambda_;
    std::vector<double> origin_to_, down_, stay_, up_;
};

// Trees and two-factor free products only; UnsupportedModel for r >= 3.
QuotientChain build_quotient(const GraphModel& model, double lambda);

// Throws InvalidState for states outside the chain's state space.
QuotientRow quotient_row(const QuotientChain& chain, const QState& state);

}  // namespace walkspec
